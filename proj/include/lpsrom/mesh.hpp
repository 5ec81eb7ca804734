#ifndef LPSROM_MESH_HPP
#define LPSROM_MESH_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace lpsrom {

enum class BoundaryTag : std::uint8_t {
  Inlet = 0,
  Outlet = 1,
  WallTop = 2,
  WallBottom = 3,
  Cylinder = 4,
};

const char* to_string(BoundaryTag tag);
BoundaryTag boundary_tag_from_string(const std::string& s);

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

struct BoundaryEdge {
  int v0 = -1;
  int v1 = -1;
  BoundaryTag tag = BoundaryTag::Inlet;
};

// Conforming triangle mesh with tagged boundary. Immutable after
// construction; all derived connectivity is built once in finalize().
class TriMesh {
public:
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;  // CCW vertex indices
  std::vector<BoundaryEdge> boundary_edges;
  std::vector<double> h_per_cell;  // longest edge of each cell

  // Unique undirected edges (lo, hi) in lexicographic order and the
  // per-triangle edge indices matching local edges (0,1),(1,2),(2,0).
  std::vector<std::array<int, 2>> edges;
  std::vector<std::array<int, 3>> cell_edges;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_cells() const { return static_cast<int>(triangles.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }

  double cell_area(int k) const;
  double max_h() const;
  double total_area() const;

  // Builds edge tables, orients triangles CCW, fills h_per_cell and checks
  // the conformity invariants (positive areas, every edge in <= 2 cells,
  // boundary edges in exactly 1). Throws GeometryError on violation.
  void finalize();
};

// Structured crossed-diagonal triangulation of [0,width] x [0,height].
// Boundary tags: x=0 Inlet, x=width Outlet, y=0 WallBottom, y=height WallTop.
TriMesh generate_rect_mesh(int nx, int ny, double width, double height);

struct ChannelMeshOptions {
  double channel_length = 2.2;   // Schaefer-Turek DFG 2D geometry
  double channel_height = 0.41;
  double grading = 0.5;          // size factor within 2R of the cylinder
  int smoothing_sweeps = 6;
};

// Delaunay-refined mesh of the channel-with-hole benchmark domain.
// The circle is approximated by a boundary-conforming polygon resolved at
// the graded local mesh size.
TriMesh generate_channel_mesh(double target_h, Vec2 cylinder_center,
                              double cylinder_radius,
                              const ChannelMeshOptions& opts = {});

}  // namespace lpsrom

#endif
