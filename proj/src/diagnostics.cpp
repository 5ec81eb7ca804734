#include "lpsrom/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lpsrom/errors.hpp"
#include "lpsrom/quadrature.hpp"

namespace lpsrom {

ForceTestFunctions build_force_test_functions(const FeSpace& vel_space) {
  ForceTestFunctions f{FeFunction(vel_space, 2), FeFunction(vel_space, 2)};
  const int n = vel_space.dof_count();
  auto it = vel_space.boundary_dofs().find(BoundaryTag::Cylinder);
  if (it != vel_space.boundary_dofs().end()) {
    for (int d : it->second) {
      f.v_drag.coeffs[d] = 1.0;
      f.v_lift.coeffs[d + n] = 1.0;
    }
  }
  return f;
}

DragLiftEvaluator::DragLiftEvaluator(const FeSystem& sys, double cylinder_diameter,
                                     double mean_velocity)
    : sys_(&sys), testfns_(build_force_test_functions(sys.space)) {
  scale_ = -2.0 / (cylinder_diameter * mean_velocity * mean_velocity);
  const FeSpace& space = sys.space;
  const int n = space.dof_count();
  std::vector<char> active(n, 0);
  for (int d = 0; d < n; ++d)
    if (testfns_.v_drag.coeffs[d] != 0.0 || testfns_.v_lift.coeffs[d + n] != 0.0)
      active[d] = 1;
  for (int k = 0; k < space.mesh().num_cells(); ++k) {
    const auto& dofs = space.cell_dofs(k);
    for (int i = 0; i < space.dofs_per_cell(); ++i)
      if (active[dofs[i]]) {
        support_cells_.push_back(k);
        break;
      }
  }
}

std::pair<double, double> DragLiftEvaluator::evaluate(const VecX& u, const VecX& dudt,
                                                      const VecX& p) const {
  const FeSpace& space = sys_->space;
  const QuadRule& qr = quad_degree5();
  const double nu = sys_->tau.nu;

  FeFunction uf(space, 2), dudtf(space, 2), pf(space, 1);
  uf.coeffs = u;
  dudtf.coeffs = dudt;
  pf.coeffs = p;

  double drag = 0.0, lift = 0.0;
  for (int k : support_cells_) {
    CellGeom g = cell_geometry(space.mesh(), k);
    for (std::size_t q = 0; q < qr.points.size(); ++q) {
      double xi = qr.points[q][0], eta = qr.points[q][1];
      double w = qr.weights[q] * g.area;
      Vec2 uv = uf.value_vec(k, xi, eta);
      Vec2 ut = dudtf.value_vec(k, xi, eta);
      auto gu = uf.grad_vec(k, xi, eta);
      double pv = pf.value_scalar(k, xi, eta);

      for (int which = 0; which < 2; ++which) {
        const FeFunction& vt = which == 0 ? testfns_.v_drag : testfns_.v_lift;
        Vec2 vv = vt.value_vec(k, xi, eta);
        auto gv = vt.grad_vec(k, xi, eta);
        double dt_term = ut.x * vv.x + ut.y * vv.y;
        // skew form b(u,u,v) = 1/2 [ (u.grad u, v) - (u.grad v, u) ]
        double ugu_v = (uv.x * gu[0] + uv.y * gu[1]) * vv.x + (uv.x * gu[2] + uv.y * gu[3]) * vv.y;
        double ugv_u = (uv.x * gv[0] + uv.y * gv[1]) * uv.x + (uv.x * gv[2] + uv.y * gv[3]) * uv.y;
        double conv = 0.5 * (ugu_v - ugv_u);
        double visc = nu * (gu[0] * gv[0] + gu[1] * gv[1] + gu[2] * gv[2] + gu[3] * gv[3]);
        double pdiv = pv * (gv[0] + gv[3]);
        double val = w * (dt_term + conv + visc - pdiv);
        if (which == 0)
          drag += val;
        else
          lift += val;
      }
    }
  }
  return {scale_ * drag, scale_ * lift};
}

double kinetic_energy(const FeSystem& sys, const VecX& u) {
  return 0.5 * u.dot(sys.mass_v * u);
}

std::pair<double, double> divergence_norms(const FeSystem& sys, const VecX& u) {
  double strong = std::sqrt(std::max(0.0, u.dot(sys.divdiv * u)));
  VecX bu = sys.div_op * u;
  VecX mi = sys.mass_s_ldlt().solve(bu);
  double weak = std::sqrt(std::max(0.0, bu.dot(mi)));
  return {strong, weak};
}

double strouhal(const std::vector<double>& lift, double dt, double diameter,
                double mean_velocity) {
  if (lift.size() < 4) throw DataError("strouhal: series too short");
  double mean = std::accumulate(lift.begin(), lift.end(), 0.0) / lift.size();
  std::vector<double> crossings;
  for (std::size_t i = 0; i + 1 < lift.size(); ++i) {
    double a = lift[i] - mean, b = lift[i + 1] - mean;
    if (a < 0.0 && b >= 0.0) {
      double frac = (b - a) > 0 ? -a / (b - a) : 0.0;
      crossings.push_back((static_cast<double>(i) + frac) * dt);
    }
  }
  if (crossings.size() < 3)
    throw DataError("strouhal: fewer than two full periods in the lift series");
  double f = (crossings.size() - 1) / (crossings.back() - crossings.front());
  return diameter * f / mean_velocity;
}

namespace {

// Symmetric inverse square root, dropping eigendirections below the
// relative threshold. Returns the number of kept directions.
int inv_sqrt_sym(const MatX& g, double rel_threshold, MatX& out) {
  Eigen::SelfAdjointEigenSolver<MatX> es(0.5 * (g + g.transpose()));
  if (es.info() != Eigen::Success) throw LinAlgError("eigendecomposition failed");
  VecX ev = es.eigenvalues();
  double emax = ev.maxCoeff();
  if (!(emax > 0.0)) throw LinAlgError("Gram matrix has no positive eigenvalues");
  int kept = 0;
  VecX inv = VecX::Zero(ev.size());
  for (int i = 0; i < ev.size(); ++i)
    if (ev[i] > rel_threshold * emax) {
      inv[i] = 1.0 / std::sqrt(ev[i]);
      ++kept;
    }
  out = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
  return kept;
}

}  // namespace

double inf_sup_constant(const MatX& vel_modes, const MatX& pres_modes, const FeSystem& sys) {
  if (vel_modes.cols() != pres_modes.cols())
    throw SpaceMismatchError("inf_sup_constant: unequal mode counts");
  MatX s_r = vel_modes.transpose() * (sys.stiff1_v * vel_modes);
  MatX d_r = pres_modes.transpose() * (sys.div_op * vel_modes);  // (q_i, div v_j)
  MatX mp_r = pres_modes.transpose() * (sys.mass_s * pres_modes);

  Eigen::LLT<MatX> llt(0.5 * (s_r + s_r.transpose()));
  if (llt.info() != Eigen::Success)
    throw LinAlgError("inf_sup_constant: reduced H1 Gram is not positive definite");
  MatX mp_isqrt;
  inv_sqrt_sym(mp_r, 1e-14, mp_isqrt);

  // beta = smallest singular value of L^{-1} D^T Mp^{-1/2}.
  MatX w = llt.matrixL().solve(d_r.transpose()) * mp_isqrt;
  Eigen::JacobiSVD<MatX> svd(w);
  return svd.singularValues().minCoeff();
}

SaturationResult saturation_constant(const MatX& vel_modes, const MatX& pres_modes,
                                     const FeSystem& sys) {
  if (vel_modes.cols() != pres_modes.cols())
    throw SpaceMismatchError("saturation_constant: unequal mode counts");
  MatX g_y = vel_modes.transpose() * (sys.divdiv * vel_modes);
  MatX c = pres_modes.transpose() * (sys.div_op * vel_modes);  // C[i,j] = (div phi_j, psi_i)
  MatX g_z = pres_modes.transpose() * (sys.mass_s * pres_modes);

  MatX gy_isqrt, gz_isqrt;
  SaturationResult res;
  res.effective_dim = inv_sqrt_sym(g_y, 1e-12, gy_isqrt);
  inv_sqrt_sym(g_z, 1e-14, gz_isqrt);

  MatX w = gz_isqrt * c * gy_isqrt;
  Eigen::JacobiSVD<MatX> svd(w);
  res.alpha = svd.singularValues().maxCoeff();
  return res;
}

Regression linear_regression(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw DataError("linear_regression: need >= 2 paired samples");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    syy += y[i] * y[i];
    sxy += x[i] * y[i];
  }
  double vx = sxx - sx * sx / n, vy = syy - sy * sy / n, cxy = sxy - sx * sy / n;
  Regression r;
  if (vx <= 0.0) throw DataError("linear_regression: degenerate abscissae");
  r.slope = cxy / vx;
  r.intercept = (sy - r.slope * sx) / n;
  r.correlation = (vy > 0.0) ? cxy / std::sqrt(vx * vy) : 0.0;
  return r;
}

}  // namespace lpsrom
