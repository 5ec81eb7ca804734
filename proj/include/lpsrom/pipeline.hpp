#ifndef LPSROM_PIPELINE_HPP
#define LPSROM_PIPELINE_HPP

#include <string>

#include "lpsrom/io.hpp"
#include "lpsrom/rom.hpp"

namespace lpsrom {

// Whole-pipeline configuration: INI-like key=value file, one dot-separated
// key per line, '#' comments. Unknown keys are rejected.
struct PipelineConfig {
  // mesh
  std::string mesh_kind = "channel";  // channel | rect
  double target_h = 3e-2;
  double cylinder_x = 0.2, cylinder_y = 0.2, cylinder_r = 0.05;
  double grading = 0.5;
  int nx = 12, ny = 6;
  double width = 2.2, height = 0.41;

  FomConfig fom;

  int pod_r = 10;
  bool pod_center = true;

  int rom_r = 5;
  std::string rom_scheme = "bdf2";  // bdf2 | euler | implicit

  int analyze_r_max = 15;

  std::string out_dir = "out";

  void apply(const std::string& key, const std::string& value);
  static PipelineConfig from_file(const std::string& path);
};

// Subcommand entry points. All artifacts live under cfg.out_dir with fixed
// names: mesh.txt, snapshots.bin, fom_qoi.csv, basis.bin, eigenvalues.csv,
// rom_trajectory_r*.csv, rom_qoi_r*.csv, infsup.csv, errors.csv, summary.txt.
void cmd_mesh(const PipelineConfig& cfg);
void cmd_fom(const PipelineConfig& cfg);
void cmd_pod(const PipelineConfig& cfg);
void cmd_rom(const PipelineConfig& cfg);
void cmd_analyze(const PipelineConfig& cfg);

// One reduced-order run against recorded FOM data.
struct RomRunResult {
  std::vector<double> times;
  MatX a_history;  // r x steps+1
  MatX b_history;
  QoiSeries qoi;
  // l2(L2) relative errors over the snapshot times, against the FOM fields
  // and against their L2 projections onto the reduced spaces.
  double err_vel_fom = 0.0, err_pres_fom = 0.0;
  double err_vel_proj = 0.0, err_pres_proj = 0.0;
};

RomRunResult run_rom_trajectory(const FeSystem& sys, const FomConfig& fom_cfg,
                                const PodBasis& vel_basis, const PodBasis& pres_basis,
                                const SnapshotSet& snaps, int r, RomScheme scheme,
                                bool with_qoi);

// Truncation of a stored basis to its first r modes.
PodBasis truncate_basis(const PodBasis& basis, int r);

}  // namespace lpsrom

#endif
