#ifndef LPSROM_IO_HPP
#define LPSROM_IO_HPP

#include <string>
#include <utility>
#include <vector>

#include "lpsrom/pod.hpp"

namespace lpsrom {

// Plain-text mesh format:
//   vertices N    followed by N lines "x y"
//   triangles M   followed by M lines "i j k"
//   boundary B    followed by B lines "i j tag"
// Indices are 0-based; tags are the lowercase names of BoundaryTag.
void write_mesh_text(const TriMesh& mesh, const std::string& path);
TriMesh read_mesh_text(const std::string& path);

// Binary snapshot container (all integers u32 little-endian, payload f64):
//   magic "LPSROM1" | n_vel | n_pres | n_snaps | flags
//   times[n_snaps] | velocity (n_vel x n_snaps, column-major) | pressure
//   flags bit0: mean velocity block appended
//   flags bit1: initial state (t_init, u_init[n_vel]) appended
void write_snapshots(const SnapshotSet& set, const std::string& path);
SnapshotSet read_snapshots(const std::string& path);

// Basis container: same framing with modes as columns plus the eigenvalue
// blocks and the optional mean field:
//   magic | n_vel | n_pres | r | flags | rank_v | rank_p
//   lambda[rank_v] | gamma[rank_p] | vel modes | pres modes | [mean]
void write_basis(const PodBasis& vel, const PodBasis& pres, const std::string& path);
std::pair<PodBasis, PodBasis> read_basis(const std::string& path);

// Legacy ASCII VTK export on the P2 node cloud; every P2 triangle is split
// into 4 linear triangles. Fields: (name, function) with 1 or 2 components.
void export_vtk(const FeSpace& space,
                const std::vector<std::pair<std::string, const FeFunction*>>& fields,
                const std::string& path);

// CSV helpers: ',' separator, '.' decimal, header row, %.17g values.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);
std::vector<std::vector<double>> read_csv(const std::string& path,
                                          std::vector<std::string>* header = nullptr);

void write_qoi_csv(const QoiSeries& qoi, const std::string& path);
QoiSeries read_qoi_csv(const std::string& path);

}  // namespace lpsrom

#endif
