#ifndef LPSROM_DIAGNOSTICS_HPP
#define LPSROM_DIAGNOSTICS_HPP

#include <Eigen/Dense>

#include "lpsrom/fe_system.hpp"

namespace lpsrom {

using MatX = Eigen::MatrixXd;

// Per-step monitored quantities of the benchmark study.
struct QoiSeries {
  std::vector<double> times;
  std::vector<double> c_d;
  std::vector<double> c_l;
  std::vector<double> e_kin;
  std::vector<double> div_strong;
  std::vector<double> div_weak;
};

// Nodal drag/lift test functions: (1,0) resp. (0,1) on every Cylinder dof,
// zero on all other boundary dofs and in the interior.
struct ForceTestFunctions {
  FeFunction v_drag;
  FeFunction v_lift;
};

ForceTestFunctions build_force_test_functions(const FeSpace& vel_space);

// Drag/lift via volume integrals. The integrals are evaluated only over the
// support cells of the test functions; dudt is the difference quotient of
// the active time scheme.
class DragLiftEvaluator {
public:
  DragLiftEvaluator(const FeSystem& sys, double cylinder_diameter = 0.1,
                    double mean_velocity = 1.0);

  std::pair<double, double> evaluate(const VecX& u, const VecX& dudt, const VecX& p) const;

  const ForceTestFunctions& test_functions() const { return testfns_; }

private:
  const FeSystem* sys_;
  ForceTestFunctions testfns_;
  std::vector<int> support_cells_;
  double scale_;  // -2 / (D Ubar^2)
};

double kinetic_energy(const FeSystem& sys, const VecX& u);

// Strong divergence ||div u||_L2 and weak divergence
// max over unit-norm discrete pressures of |(div u, q)|.
std::pair<double, double> divergence_norms(const FeSystem& sys, const VecX& u);

// Vortex-shedding frequency from upward mean-crossings of the lift series.
double strouhal(const std::vector<double>& lift, double dt, double diameter,
                double mean_velocity);

// Discrete inf-sup constant of the reduced velocity-pressure pair:
// beta = min_q max_v (q, div v) / (|v|_1 ||q||).
double inf_sup_constant(const MatX& vel_modes, const MatX& pres_modes, const FeSystem& sys);

// Saturation constant alpha = cos of the angle between span{div phi_i} and
// the reduced pressure space, in L2.
struct SaturationResult {
  double alpha = 0.0;
  int effective_dim = 0;  // directions of span{div phi_i} kept after whitening
};
SaturationResult saturation_constant(const MatX& vel_modes, const MatX& pres_modes,
                                     const FeSystem& sys);

struct Regression {
  double slope = 0.0;
  double intercept = 0.0;
  double correlation = 0.0;
};
Regression linear_regression(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace lpsrom

#endif
