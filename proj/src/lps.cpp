#include "lpsrom/lps.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <cmath>

#include "lpsrom/errors.hpp"
#include "lpsrom/quadrature.hpp"

namespace lpsrom {

namespace {

// Reference-element matrix of the P1 L2 projection of P2 data, row i giving
// the projected nodal value at vertex i as a combination of the 6 local P2
// coefficients. Areas cancel, so this is mesh independent.
Eigen::Matrix<double, 3, 6> p1_projection_of_p2() {
  const QuadRule& qr = quad_degree4();
  Eigen::Matrix3d m11 = Eigen::Matrix3d::Zero();
  Eigen::Matrix<double, 3, 6> m12 = Eigen::Matrix<double, 3, 6>::Zero();
  double N1[3], N2[6];
  for (std::size_t q = 0; q < qr.points.size(); ++q) {
    shape_values(1, qr.points[q][0], qr.points[q][1], N1);
    shape_values(2, qr.points[q][0], qr.points[q][1], N2);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) m11(i, j) += qr.weights[q] * N1[i] * N1[j];
      for (int j = 0; j < 6; ++j) m12(i, j) += qr.weights[q] * N1[i] * N2[j];
    }
  }
  return m11.inverse() * m12;
}

}  // namespace

BufferProjector::BufferProjector(const FeSpace& fine, const FeSpace& buffer)
    : fine_(&fine), buffer_(&buffer) {
  if (&fine.mesh() != &buffer.mesh())
    throw SpaceMismatchError("BufferProjector: spaces on different meshes");
  if (buffer.order() != fine.order() - 1)
    throw SpaceMismatchError("BufferProjector: buffer order must be fine order - 1");

  const TriMesh& mesh = fine.mesh();
  const int nv = mesh.num_vertices();

  // Scott-Zhang patch choice: the adjacent cell of smallest index.
  std::vector<int> chosen(nv, -1);
  for (int k = 0; k < mesh.num_cells(); ++k)
    for (int v : mesh.triangles[k])
      if (chosen[v] < 0) chosen[v] = k;

  static const Eigen::Matrix<double, 3, 6> proj_ref = p1_projection_of_p2();

  std::vector<Triplet> trip;
  trip.reserve(6 * nv);
  for (int z = 0; z < nv; ++z) {
    int k = chosen[z];
    if (k < 0) continue;  // isolated vertex
    const auto& t = mesh.triangles[k];
    int lz = (t[0] == z) ? 0 : (t[1] == z) ? 1 : 2;
    const auto& dofs = fine.cell_dofs(k);
    for (int j = 0; j < 6; ++j) trip.emplace_back(z, dofs[j], proj_ref(lz, j));
  }
  proj_ = SpMat(buffer.dof_count(), fine.dof_count());
  proj_.setFromTriplets(trip.begin(), trip.end());

  // Exact embedding of the P1 buffer into the P2 fine space.
  std::vector<Triplet> etrip;
  etrip.reserve(nv + 2 * mesh.num_edges());
  for (int v = 0; v < nv; ++v) etrip.emplace_back(v, v, 1.0);
  for (int e = 0; e < mesh.num_edges(); ++e) {
    etrip.emplace_back(nv + e, mesh.edges[e][0], 0.5);
    etrip.emplace_back(nv + e, mesh.edges[e][1], 0.5);
  }
  embed_ = SpMat(fine.dof_count(), buffer.dof_count());
  embed_.setFromTriplets(etrip.begin(), etrip.end());

  SpMat id(fine.dof_count(), fine.dof_count());
  id.setIdentity();
  fluct_ = id - SpMat(embed_ * proj_);
}

double BufferProjector::measured_l2_stability(int iterations) const {
  SpMat m_fine = assemble_mass(*fine_);
  SpMat m_buf = assemble_mass(*buffer_);
  Eigen::SimplicialLDLT<SpMat> ldlt(m_fine);
  VecX x = VecX::Ones(fine_->dof_count());
  x += VecX::LinSpaced(x.size(), 0.0, 1.0);  // break symmetry of the seed
  double mu = 0.0;
  for (int it = 0; it < iterations; ++it) {
    VecX y = proj_ * x;
    VecX z = SpMat(proj_.transpose()) * VecX(m_buf * y);
    x = ldlt.solve(z);
    double nrm = std::sqrt(x.dot(m_fine * x));
    if (nrm == 0.0) return 0.0;
    x /= nrm;
    VecX px = proj_ * x;
    mu = px.dot(m_buf * px);
  }
  return std::sqrt(mu);
}

double StabParams::max_tau_over_h2(const TriMesh& mesh) const {
  double c = 0.0;
  for (int k = 0; k < mesh.num_cells(); ++k)
    c = std::max(c, tau_per_cell[k] / (mesh.h_per_cell[k] * mesh.h_per_cell[k]));
  return c;
}

StabParams compute_tau(const TriMesh& mesh, double dt, double nu, double mean_velocity) {
  if (!(dt > 0.0) || !(nu > 0.0) || !(mean_velocity > 0.0))
    throw ParameterError("compute_tau: dt, nu and mean velocity must be positive");
  StabParams s;
  s.dt = dt;
  s.nu = nu;
  s.mean_velocity = mean_velocity;
  s.tau_per_cell.resize(mesh.num_cells());
  for (int k = 0; k < mesh.num_cells(); ++k) {
    double hh = 0.5 * mesh.h_per_cell[k];
    double val = 4.0 / (dt * dt) + 32.0 * nu * nu / (hh * hh * hh * hh) +
                 4.0 * mean_velocity / (hh * hh);
    s.tau_per_cell[k] = 1.0 / std::sqrt(val);
  }
  return s;
}

SpMat assemble_lps_matrix(const FeSpace& pres_space, const BufferProjector& projector,
                          const StabParams& tau) {
  if (!pres_space.same_space(projector.fine()))
    throw SpaceMismatchError("assemble_lps_matrix: pressure space is not the projector fine space");
  if (static_cast<int>(tau.tau_per_cell.size()) != pres_space.mesh().num_cells())
    throw SpaceMismatchError("assemble_lps_matrix: tau not sized for this mesh");

  // tau-weighted H1 seminorm Gram on the fine space.
  const FeSpace& space = pres_space;
  const int nd = space.dofs_per_cell();
  const int nc = space.mesh().num_cells();
  const QuadRule& qr = quad_degree4();
  std::vector<Triplet> trip(static_cast<std::size_t>(nc) * nd * nd);
  parallel_cells(nc, [&](int k) {
    CellGeom g = cell_geometry(space.mesh(), k);
    const auto& dofs = space.cell_dofs(k);
    double loc[6][6] = {};
    double gr[6][2], pg[6][2];
    for (std::size_t q = 0; q < qr.points.size(); ++q) {
      shape_grads_ref(space.order(), qr.points[q][0], qr.points[q][1], gr);
      for (int i = 0; i < nd; ++i) {
        pg[i][0] = gr[i][0] * g.dxi[0] + gr[i][1] * g.deta[0];
        pg[i][1] = gr[i][0] * g.dxi[1] + gr[i][1] * g.deta[1];
      }
      double w = tau.tau_per_cell[k] * qr.weights[q] * g.area;
      for (int i = 0; i < nd; ++i)
        for (int j = 0; j < nd; ++j)
          loc[i][j] += w * (pg[i][0] * pg[j][0] + pg[i][1] * pg[j][1]);
    }
    std::size_t base = static_cast<std::size_t>(k) * nd * nd;
    for (int i = 0; i < nd; ++i)
      for (int j = 0; j < nd; ++j)
        trip[base + i * nd + j] = Triplet(dofs[i], dofs[j], loc[i][j]);
  });
  SpMat a_tau(space.dof_count(), space.dof_count());
  a_tau.setFromTriplets(trip.begin(), trip.end());

  const SpMat& f = projector.fluctuation_matrix();
  SpMat g = SpMat(f.transpose()) * SpMat(a_tau * f);
  SpMat gs = 0.5 * (g + SpMat(g.transpose()));
  return gs;
}

double lps_seminorm_sq_direct(const FeFunction& pressure, const BufferProjector& projector,
                              const StabParams& tau) {
  const FeSpace& space = *pressure.space;
  VecX fluct_coeffs = projector.fluctuation(pressure.coeffs);
  FeFunction fluct(space, 1);
  fluct.coeffs = fluct_coeffs;
  const QuadRule& qr = quad_degree4();
  double acc = 0.0;
  for (int k = 0; k < space.mesh().num_cells(); ++k) {
    CellGeom g = cell_geometry(space.mesh(), k);
    double cell = 0.0;
    for (std::size_t q = 0; q < qr.points.size(); ++q) {
      Vec2 gr = fluct.grad_scalar(k, qr.points[q][0], qr.points[q][1]);
      cell += qr.weights[q] * g.area * (gr.x * gr.x + gr.y * gr.y);
    }
    acc += tau.tau_per_cell[k] * cell;
  }
  return acc;
}

}  // namespace lpsrom
