#ifndef LPSROM_FE_SPACE_HPP
#define LPSROM_FE_SPACE_HPP

#include <Eigen/Dense>
#include <array>
#include <map>
#include <vector>

#include "lpsrom/mesh.hpp"

namespace lpsrom {

using VecX = Eigen::VectorXd;

// Per-cell affine geometry: constant Jacobian data for mapping reference
// gradients to physical ones.
struct CellGeom {
  double area;
  double dxi[2];   // d(xi)/dx, d(xi)/dy
  double deta[2];  // d(eta)/dx, d(eta)/dy
};

CellGeom cell_geometry(const TriMesh& mesh, int cell);

// Shape values/reference gradients at (xi, eta). P2 local ordering: vertices
// 0,1,2 then midpoints of edges (0,1), (1,2), (2,0).
void shape_values(int order, double xi, double eta, double* values);
void shape_grads_ref(int order, double xi, double eta, double grads[][2]);

// Continuous Lagrange space (P1 or P2) on a TriMesh. P2 dofs are vertices
// followed by edge midpoints.
class FeSpace {
public:
  FeSpace(const TriMesh& mesh, int order);

  const TriMesh& mesh() const { return *mesh_; }
  int order() const { return order_; }
  int dof_count() const { return dof_count_; }
  int dofs_per_cell() const { return order_ == 1 ? 3 : 6; }

  // Global dof indices of a cell (first dofs_per_cell() entries valid).
  const std::array<int, 6>& cell_dofs(int cell) const { return cell_dofs_[cell]; }
  const Vec2& dof_coord(int dof) const { return dof_coords_[dof]; }
  const std::vector<Vec2>& dof_coords() const { return dof_coords_; }

  // Boundary dofs partitioned by tag; tag-junction dofs are resolved by
  // precedence Cylinder > WallBottom > WallTop > Inlet > Outlet so the
  // no-slip value wins at wall corners.
  const std::map<BoundaryTag, std::vector<int>>& boundary_dofs() const {
    return boundary_dofs_;
  }
  std::vector<int> all_boundary_dofs() const;

  bool same_space(const FeSpace& other) const {
    return mesh_ == other.mesh_ && order_ == other.order_;
  }

private:
  const TriMesh* mesh_;
  int order_;
  int dof_count_;
  std::vector<std::array<int, 6>> cell_dofs_;
  std::vector<Vec2> dof_coords_;
  std::map<BoundaryTag, std::vector<int>> boundary_dofs_;
};

// Coefficient vector over an FeSpace. Vector-valued functions (components=2)
// store the two scalar blocks stacked as [u_x; u_y].
struct FeFunction {
  const FeSpace* space = nullptr;
  int components = 1;
  VecX coeffs;

  FeFunction() = default;
  FeFunction(const FeSpace& s, int comps)
      : space(&s), components(comps), coeffs(VecX::Zero(comps * s.dof_count())) {}

  int block_size() const { return space->dof_count(); }

  double value_scalar(int cell, double xi, double eta, int component = 0) const;
  Vec2 grad_scalar(int cell, double xi, double eta, int component = 0) const;
  Vec2 value_vec(int cell, double xi, double eta) const;
  // Row-major 2x2 gradient [du_x/dx, du_x/dy; du_y/dx, du_y/dy].
  std::array<double, 4> grad_vec(int cell, double xi, double eta) const;
  double divergence(int cell, double xi, double eta) const;
};

}  // namespace lpsrom

#endif
