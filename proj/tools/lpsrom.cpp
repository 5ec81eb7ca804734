// Pipeline driver: mesh generation, full-order runs, POD extraction,
// reduced-order runs and the diagnostics report, composed through files in
// the output directory.
//
// Exit codes: 0 success, 1 usage error, 2 missing input, 3 numerical failure.

#include <CLI11.hpp>
#include <iostream>

#include "lpsrom/errors.hpp"
#include "lpsrom/pipeline.hpp"

using namespace lpsrom;

namespace {

struct CliOverrides {
  std::string config_path;
  std::vector<std::string> sets;  // key=value pairs, win over the config file
  std::string out_dir;
  int r = -1;
};

PipelineConfig resolve_config(const CliOverrides& o) {
  PipelineConfig cfg =
      o.config_path.empty() ? PipelineConfig{} : PipelineConfig::from_file(o.config_path);
  for (const auto& kv : o.sets) {
    auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw ParameterError("--set expects key=value, got '" + kv + "'");
    cfg.apply(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
  if (o.r > 0) {
    cfg.pod_r = std::max(cfg.pod_r, o.r);
    cfg.rom_r = o.r;
  }
  return cfg;
}

void add_common(CLI::App* sub, CliOverrides& o) {
  sub->add_option("--config", o.config_path, "key=value config file");
  sub->add_option("--set", o.sets, "override a config key (key=value), repeatable");
  sub->add_option("--out", o.out_dir, "output directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LPS-stabilized POD-ROM toolkit for 2D incompressible flow"};
  app.require_subcommand(1);

  CliOverrides o;
  auto* c_mesh = app.add_subcommand("mesh", "generate the computational mesh");
  auto* c_fom = app.add_subcommand("fom-run", "run the full-order model");
  auto* c_pod = app.add_subcommand("pod-build", "extract the POD basis from snapshots");
  auto* c_rom = app.add_subcommand("rom-run", "run the reduced-order model");
  auto* c_ana = app.add_subcommand("analyze", "diagnostics report and error tables");
  for (auto* sub : {c_mesh, c_fom, c_pod, c_rom, c_ana}) add_common(sub, o);
  c_pod->add_option("-r", o.r, "number of POD modes");
  c_rom->add_option("-r", o.r, "number of reduced modes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    PipelineConfig cfg = resolve_config(o);
    if (c_mesh->parsed()) cmd_mesh(cfg);
    if (c_fom->parsed()) cmd_fom(cfg);
    if (c_pod->parsed()) cmd_pod(cfg);
    if (c_rom->parsed()) cmd_rom(cfg);
    if (c_ana->parsed()) cmd_analyze(cfg);
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const GeometryError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
