#include "lpsrom/rom.hpp"

#include <cmath>
#include <sstream>

#include "lpsrom/errors.hpp"

namespace lpsrom {

MatX RomOperators::convection_at(const VecX& a) const {
  MatX n = MatX::Zero(r, r);
  for (int k = 0; k < r; ++k) n += a[k] * conv[k];
  return n;
}

RomOperators precompute_operators(const PodBasis& vel_basis, const PodBasis& pres_basis,
                                  const FeSystem& sys, double nu, double sigma,
                                  const VectorField& forcing) {
  if (vel_basis.r() != pres_basis.r())
    throw SpaceMismatchError("precompute_operators: velocity and pressure mode counts differ");
  if (vel_basis.modes.rows() != sys.n_vel() || pres_basis.modes.rows() != sys.n_pres())
    throw SpaceMismatchError("precompute_operators: basis sizes do not match the FE system");

  const MatX& phi = vel_basis.modes;
  const MatX& psi = pres_basis.modes;
  const int r = vel_basis.r();
  const int ns = sys.n_scalar();

  RomOperators ops;
  ops.r = r;
  ops.nu = nu;
  ops.sigma = sigma;
  ops.mass_v = phi.transpose() * (sys.mass_v * phi);
  ops.stiff_v = phi.transpose() * (sys.stiff1_v * phi);
  ops.div_coupling = psi.transpose() * (sys.div_op * phi);
  ops.grad_coupling = ops.div_coupling.transpose();
  ops.lps_p = psi.transpose() * (sys.lps * psi);
  ops.mass_p = psi.transpose() * (sys.mass_s * psi);

  ops.forcing = VecX::Zero(r);
  if (forcing) {
    VecX f = assemble_forcing(sys.space, forcing);
    ops.forcing = phi.transpose() * f;
  }

  ops.centered = vel_basis.mean_field.has_value();
  VecX mean = ops.centered ? *vel_basis.mean_field : VecX::Zero(sys.n_vel());

  // Convection tensor: conv[k](i,j) = b(phi_k, phi_j, phi_i), assembled as r
  // scalar convection operators applied blockwise. The mean-advected and
  // mean-transported couplings reuse the same assemblies.
  ops.conv.resize(r);
  ops.conv_mean_right = MatX::Zero(r, r);
  for (int k = 0; k < r; ++k) {
    FeFunction adv(sys.space, 2);
    adv.coeffs = phi.col(k);
    SpMat cs = assemble_convection_scalar(sys.space, adv);
    MatX cx = cs * phi.topRows(ns);
    MatX cy = cs * phi.bottomRows(ns);
    ops.conv[k] = phi.topRows(ns).transpose() * cx + phi.bottomRows(ns).transpose() * cy;
    if (ops.centered) {
      VecX cmx = cs * mean.head(ns);
      VecX cmy = cs * mean.tail(ns);
      ops.conv_mean_right.col(k) =
          phi.topRows(ns).transpose() * cmx + phi.bottomRows(ns).transpose() * cmy;
    }
  }

  if (ops.centered) {
    FeFunction meanf(sys.space, 2);
    meanf.coeffs = mean;
    SpMat cs = assemble_convection_scalar(sys.space, meanf);
    MatX cx = cs * phi.topRows(ns);
    MatX cy = cs * phi.bottomRows(ns);
    ops.conv_mean_left = phi.topRows(ns).transpose() * cx + phi.bottomRows(ns).transpose() * cy;
    VecX cmx = cs * mean.head(ns);
    VecX cmy = cs * mean.tail(ns);
    ops.conv_mean_const =
        phi.topRows(ns).transpose() * cmx + phi.bottomRows(ns).transpose() * cmy;
    ops.visc_mean = phi.transpose() * (sys.stiff1_v * mean);
    ops.div_mean = psi.transpose() * (sys.div_op * mean);
  } else {
    ops.conv_mean_left = MatX::Zero(r, r);
    ops.conv_mean_const = VecX::Zero(r);
    ops.visc_mean = VecX::Zero(r);
    ops.div_mean = VecX::Zero(r);
  }
  return ops;
}

namespace {

// Assembles and solves one reduced saddle step.
//   [mass_coef M + nu S + N(adv) + C_meanL, -D^T] [a]   [rhs_a]
//   [D,                    G + sigma M_p       ] [b] = [rhs_b]
RomState solve_reduced(const RomOperators& ops, double mass_coef, double sigma,
                       const VecX& adv_coeff, const VecX& rhs_mass, double t_next,
                       double dt_for_state) {
  const int r = ops.r;
  MatX k = MatX::Zero(2 * r, 2 * r);
  k.topLeftCorner(r, r) = mass_coef * ops.mass_v + ops.nu * ops.stiff_v +
                          ops.convection_at(adv_coeff) + ops.conv_mean_left;
  k.topRightCorner(r, r) = -ops.grad_coupling;
  k.bottomLeftCorner(r, r) = ops.div_coupling;
  k.bottomRightCorner(r, r) = ops.lps_p + sigma * ops.mass_p;

  VecX rhs(2 * r);
  rhs.head(r) = rhs_mass + ops.forcing -
                (ops.conv_mean_const + ops.conv_mean_right * adv_coeff +
                 ops.nu * ops.visc_mean);
  rhs.tail(r) = -ops.div_mean;

  Eigen::FullPivLU<MatX> lu(k);
  if (!lu.isInvertible())
    throw LinAlgError(
        "reduced saddle system is singular; with sigma = 0 the reduced pressure "
        "block can have a kernel intersecting the POD pressure space");
  VecX x = lu.solve(rhs);

  RomState next;
  next.a = x.head(r);
  next.b = x.tail(r);
  next.t = t_next;
  (void)dt_for_state;
  return next;
}

}  // namespace

RomState rom_step_implicit(const RomState& state, const RomOperators& ops, double dt,
                           double sigma) {
  const double mass_coef = 1.0 / dt;
  VecX rhs_mass = (1.0 / dt) * (ops.mass_v * state.a);
  VecX adv = state.a;
  std::vector<double> history;
  RomState next;
  for (int it = 0; it < 100; ++it) {
    next = solve_reduced(ops, mass_coef, sigma, adv, rhs_mass, state.t + dt, dt);
    double err = (next.a - adv).norm();
    history.push_back(err);
    if (err <= 1e-12 * std::max(1.0, next.a.norm())) {
      next.a_prev = state.a;
      next.has_prev = true;
      return next;
    }
    adv = next.a;
  }
  std::ostringstream os;
  os << "rom_step_implicit: Picard did not converge in 100 iterations; residuals:";
  for (double h : history) os << " " << h;
  throw SolverError(os.str());
}

RomState rom_step_semi_implicit(const RomState& state, const RomOperators& ops, double dt,
                                double sigma, RomScheme scheme) {
  RomState next;
  if (scheme == RomScheme::SemiImplicitEuler) {
    VecX rhs_mass = (1.0 / dt) * (ops.mass_v * state.a);
    next = solve_reduced(ops, 1.0 / dt, sigma, state.a, rhs_mass, state.t + dt, dt);
  } else {
    const VecX& a_prev = state.has_prev ? state.a_prev : state.a;
    VecX adv = 2.0 * state.a - a_prev;
    VecX rhs_mass = (0.5 / dt) * (ops.mass_v * (4.0 * state.a - a_prev));
    next = solve_reduced(ops, 1.5 / dt, sigma, adv, rhs_mass, state.t + dt, dt);
  }
  next.a_prev = state.a;
  next.has_prev = true;
  return next;
}

RomState rom_initialize(const PodBasis& vel_basis, const SpMat& mass_v, const VecX& u0) {
  VecX w = u0;
  if (vel_basis.mean_field) w -= *vel_basis.mean_field;
  RomState s;
  s.a = vel_basis.modes.transpose() * (mass_v * w);
  s.b = VecX::Zero(vel_basis.r());
  return s;
}

std::pair<VecX, VecX> reconstruct(const RomState& state, const PodBasis& vel_basis,
                                  const PodBasis& pres_basis) {
  if (state.a.size() != vel_basis.r() || state.b.size() != pres_basis.r())
    throw SpaceMismatchError("reconstruct: coefficient/basis size mismatch");
  VecX u = vel_basis.modes * state.a;
  if (vel_basis.mean_field) u += *vel_basis.mean_field;
  VecX p = pres_basis.modes * state.b;
  return {u, p};
}

RomEnergyLedger::RomEnergyLedger(const RomOperators& ops, double dt, const RomState& initial)
    : ops_(&ops), dt_(dt) {
  if (ops.centered)
    throw ParameterError("RomEnergyLedger: reduced energy bound requires an uncentered basis");
  u0_sq_ = initial.a.dot(ops.mass_v * initial.a);
  last_u_sq_ = u0_sq_;
}

void RomEnergyLedger::record(const RomState& prev, const RomState& next, double dual_f_sq) {
  VecX da = next.a - prev.a;
  sum_incr_ += da.dot(ops_->mass_v * da);
  sum_dissip_ += dt_ * (ops_->nu * next.a.dot(ops_->stiff_v * next.a) +
                        next.b.dot(ops_->lps_p * next.b) +
                        ops_->sigma * next.b.dot(ops_->mass_p * next.b));
  sum_dual_ += dt_ * dual_f_sq;
  last_u_sq_ = next.a.dot(ops_->mass_v * next.a);
}

double RomEnergyLedger::lhs() const { return last_u_sq_ + sum_incr_ + sum_dissip_; }

double RomEnergyLedger::rhs() const { return u0_sq_ + (4.0 / ops_->nu) * sum_dual_; }

double RomEnergyLedger::relative_slack() const {
  double l = lhs(), r = rhs();
  return (r - l) / std::max({l, r, 1e-30});
}

}  // namespace lpsrom
