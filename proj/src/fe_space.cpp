#include "lpsrom/fe_space.hpp"

#include <cassert>

#include "lpsrom/errors.hpp"

namespace lpsrom {

CellGeom cell_geometry(const TriMesh& mesh, int cell) {
  const auto& t = mesh.triangles[cell];
  const Vec2 &p0 = mesh.vertices[t[0]], &p1 = mesh.vertices[t[1]], &p2 = mesh.vertices[t[2]];
  double j11 = p1.x - p0.x, j12 = p2.x - p0.x;
  double j21 = p1.y - p0.y, j22 = p2.y - p0.y;
  double det = j11 * j22 - j12 * j21;
  CellGeom g;
  g.area = 0.5 * det;
  g.dxi[0] = j22 / det;
  g.dxi[1] = -j12 / det;
  g.deta[0] = -j21 / det;
  g.deta[1] = j11 / det;
  return g;
}

void shape_values(int order, double xi, double eta, double* v) {
  double l0 = 1.0 - xi - eta, l1 = xi, l2 = eta;
  if (order == 1) {
    v[0] = l0;
    v[1] = l1;
    v[2] = l2;
    return;
  }
  v[0] = l0 * (2.0 * l0 - 1.0);
  v[1] = l1 * (2.0 * l1 - 1.0);
  v[2] = l2 * (2.0 * l2 - 1.0);
  v[3] = 4.0 * l0 * l1;
  v[4] = 4.0 * l1 * l2;
  v[5] = 4.0 * l2 * l0;
}

void shape_grads_ref(int order, double xi, double eta, double g[][2]) {
  double l0 = 1.0 - xi - eta, l1 = xi, l2 = eta;
  // d l0 = (-1,-1), d l1 = (1,0), d l2 = (0,1)
  if (order == 1) {
    g[0][0] = -1.0; g[0][1] = -1.0;
    g[1][0] = 1.0;  g[1][1] = 0.0;
    g[2][0] = 0.0;  g[2][1] = 1.0;
    return;
  }
  g[0][0] = -(4.0 * l0 - 1.0);       g[0][1] = -(4.0 * l0 - 1.0);
  g[1][0] = 4.0 * l1 - 1.0;          g[1][1] = 0.0;
  g[2][0] = 0.0;                     g[2][1] = 4.0 * l2 - 1.0;
  g[3][0] = 4.0 * (l0 - l1);         g[3][1] = -4.0 * l1;
  g[4][0] = 4.0 * l2;                g[4][1] = 4.0 * l1;
  g[5][0] = -4.0 * l2;               g[5][1] = 4.0 * (l0 - l2);
}

FeSpace::FeSpace(const TriMesh& mesh, int order) : mesh_(&mesh), order_(order) {
  if (order != 1 && order != 2) throw ParameterError("FeSpace: order must be 1 or 2");
  const int nv = mesh.num_vertices();
  dof_count_ = (order == 1) ? nv : nv + mesh.num_edges();

  cell_dofs_.resize(mesh.num_cells());
  for (int k = 0; k < mesh.num_cells(); ++k) {
    const auto& t = mesh.triangles[k];
    std::array<int, 6> d{t[0], t[1], t[2], -1, -1, -1};
    if (order == 2)
      for (int e = 0; e < 3; ++e) d[3 + e] = nv + mesh.cell_edges[k][e];
    cell_dofs_[k] = d;
  }

  dof_coords_.resize(dof_count_);
  for (int v = 0; v < nv; ++v) dof_coords_[v] = mesh.vertices[v];
  if (order == 2)
    for (int e = 0; e < mesh.num_edges(); ++e) {
      const Vec2 &a = mesh.vertices[mesh.edges[e][0]], &b = mesh.vertices[mesh.edges[e][1]];
      dof_coords_[nv + e] = {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
    }

  // Tag precedence resolution for junction dofs.
  auto rank = [](BoundaryTag t) {
    switch (t) {
      case BoundaryTag::Cylinder: return 4;
      case BoundaryTag::WallBottom: return 3;
      case BoundaryTag::WallTop: return 2;
      case BoundaryTag::Inlet: return 1;
      case BoundaryTag::Outlet: return 0;
    }
    return -1;
  };
  std::map<int, BoundaryTag> best;
  auto offer = [&](int dof, BoundaryTag tag) {
    auto it = best.find(dof);
    if (it == best.end() || rank(tag) > rank(it->second)) best[dof] = tag;
  };
  for (const auto& be : mesh.boundary_edges) {
    offer(be.v0, be.tag);
    offer(be.v1, be.tag);
    if (order == 2) {
      int lo = std::min(be.v0, be.v1), hi = std::max(be.v0, be.v1);
      auto it = std::lower_bound(mesh.edges.begin(), mesh.edges.end(),
                                 std::array<int, 2>{lo, hi});
      assert(it != mesh.edges.end() && (*it)[0] == lo && (*it)[1] == hi);
      offer(nv + static_cast<int>(it - mesh.edges.begin()), be.tag);
    }
  }
  for (const auto& [dof, tag] : best) boundary_dofs_[tag].push_back(dof);
}

std::vector<int> FeSpace::all_boundary_dofs() const {
  std::vector<int> out;
  for (const auto& [tag, dofs] : boundary_dofs_)
    out.insert(out.end(), dofs.begin(), dofs.end());
  std::sort(out.begin(), out.end());
  return out;
}

double FeFunction::value_scalar(int cell, double xi, double eta, int component) const {
  const int nd = space->dofs_per_cell();
  const auto& dofs = space->cell_dofs(cell);
  double N[6];
  shape_values(space->order(), xi, eta, N);
  const int off = component * block_size();
  double v = 0.0;
  for (int i = 0; i < nd; ++i) v += coeffs[off + dofs[i]] * N[i];
  return v;
}

Vec2 FeFunction::grad_scalar(int cell, double xi, double eta, int component) const {
  const int nd = space->dofs_per_cell();
  const auto& dofs = space->cell_dofs(cell);
  double gr[6][2];
  shape_grads_ref(space->order(), xi, eta, gr);
  CellGeom g = cell_geometry(space->mesh(), cell);
  const int off = component * block_size();
  Vec2 out{0.0, 0.0};
  for (int i = 0; i < nd; ++i) {
    double gx = gr[i][0] * g.dxi[0] + gr[i][1] * g.deta[0];
    double gy = gr[i][0] * g.dxi[1] + gr[i][1] * g.deta[1];
    out.x += coeffs[off + dofs[i]] * gx;
    out.y += coeffs[off + dofs[i]] * gy;
  }
  return out;
}

Vec2 FeFunction::value_vec(int cell, double xi, double eta) const {
  return {value_scalar(cell, xi, eta, 0), value_scalar(cell, xi, eta, 1)};
}

std::array<double, 4> FeFunction::grad_vec(int cell, double xi, double eta) const {
  Vec2 gx = grad_scalar(cell, xi, eta, 0);
  Vec2 gy = grad_scalar(cell, xi, eta, 1);
  return {gx.x, gx.y, gy.x, gy.y};
}

double FeFunction::divergence(int cell, double xi, double eta) const {
  auto g = grad_vec(cell, xi, eta);
  return g[0] + g[3];
}

}  // namespace lpsrom
