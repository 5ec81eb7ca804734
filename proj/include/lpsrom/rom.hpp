#ifndef LPSROM_ROM_HPP
#define LPSROM_ROM_HPP

#include "lpsrom/pod.hpp"

namespace lpsrom {

enum class RomScheme { SemiImplicitEuler, SemiImplicitBDF2 };

// Dense reduced operators obtained by Galerkin projection of the full-order
// forms onto the POD velocity-pressure product space.
struct RomOperators {
  int r = 0;
  double nu = 0.0;
  double sigma = 0.0;

  MatX mass_v;   // ~identity, kept for verification and exact stepping
  MatX stiff_v;  // (grad phi_j, grad phi_i), unit viscosity
  MatX div_coupling;   // (div phi_j, psi_i)
  MatX grad_coupling;  // (psi_j, div phi_i) = div_coupling^T
  MatX lps_p;
  MatX mass_p;  // ~identity
  std::vector<MatX> conv;  // conv[k](i,j) = b(phi_k, phi_j, phi_i)
  VecX forcing;

  // Mean-field couplings (present when the velocity basis is centered).
  bool centered = false;
  MatX conv_mean_left;   // b(ubar, phi_j, phi_i)
  MatX conv_mean_right;  // b(phi_j, ubar, phi_i)
  VecX conv_mean_const;  // b(ubar, ubar, phi_i)
  VecX visc_mean;        // (grad ubar, grad phi_i), unit viscosity
  VecX div_mean;         // (div ubar, psi_i)

  // N(a) = sum_k a_k conv[k]; the reduced convection matrix at coefficient a.
  MatX convection_at(const VecX& a) const;
};

struct RomState {
  VecX a;       // velocity coefficients
  VecX b;       // pressure coefficients
  VecX a_prev;  // BDF2 history
  bool has_prev = false;
  double t = 0.0;
};

RomOperators precompute_operators(const PodBasis& vel_basis, const PodBasis& pres_basis,
                                  const FeSystem& sys, double nu, double sigma,
                                  const VectorField& forcing = nullptr);

// Fully implicit backward-Euler step solved by Picard iteration on the
// advecting coefficient (tolerance 1e-12, cap 100).
RomState rom_step_implicit(const RomState& state, const RomOperators& ops, double dt,
                           double sigma);

// One linear solve; BDF2 extrapolates the advecting coefficient and reduces
// to semi-implicit Euler with step (2/3) dt when no history is present.
RomState rom_step_semi_implicit(const RomState& state, const RomOperators& ops, double dt,
                                double sigma, RomScheme scheme);

// a_i = (u0 - ubar, phi_i)_M, pressure coefficients start at zero.
RomState rom_initialize(const PodBasis& vel_basis, const SpMat& mass_v, const VecX& u0);

// Full-order coefficient vectors u = ubar + Phi a, p = Psi b.
std::pair<VecX, VecX> reconstruct(const RomState& state, const PodBasis& vel_basis,
                                  const PodBasis& pres_basis);

// Running check of the discrete energy stability bound
//   ||u_r^k||^2 + sum ||du||^2 + dt sum (nu |u|_1^2 + |p|_tau^2 + sigma ||p||^2)
//     <= ||u_r^0||^2 + (4 dt / nu) sum ||f||_{-1}^2
// evaluated on reduced quantities (uncentered bases).
class RomEnergyLedger {
public:
  RomEnergyLedger(const RomOperators& ops, double dt, const RomState& initial);

  // Record a completed step; dual_f_sq is the squared discrete dual norm of
  // the forcing at the new time (zero for unforced runs).
  void record(const RomState& prev, const RomState& next, double dual_f_sq);

  double lhs() const;
  double rhs() const;
  // Relative slack (rhs - lhs) / max(rhs, lhs); >= -1e-8 when the bound holds.
  double relative_slack() const;

private:
  const RomOperators* ops_;
  double dt_;
  double u0_sq_;
  double last_u_sq_ = 0.0;
  double sum_incr_ = 0.0;
  double sum_dissip_ = 0.0;
  double sum_dual_ = 0.0;
};

}  // namespace lpsrom

#endif
