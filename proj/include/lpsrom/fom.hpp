#ifndef LPSROM_FOM_HPP
#define LPSROM_FOM_HPP

#include <memory>
#include <optional>

#include "lpsrom/diagnostics.hpp"
#include "lpsrom/fe_system.hpp"

namespace lpsrom {

enum class OutletBC { DoNothing, Dirichlet };
enum class TimeScheme { BackwardEuler, SemiImplicitBDF2 };

struct FomConfig {
  double nu = 1e-3;
  double dt = 2e-3;
  double t_end = 7.0;
  double sigma = 0.0;  // pressure penalty; 0 with DoNothing, > 0 with Dirichlet outlet
  OutletBC outlet_bc = OutletBC::DoNothing;
  TimeScheme scheme = TimeScheme::SemiImplicitBDF2;
  int snapshot_stride = 5;
  double window_start = 5.0;
  double window_end = 7.0;
  double mean_velocity = 1.0;  // Ubar entering tau
  bool enable_convection = true;
  int picard_max = 50;
  double picard_tol = 1e-10;

  void validate() const;
  int total_steps() const;
};

// Time-stamped FOM solution ensembles (raw, uncentered coefficients).
struct SnapshotSet {
  std::vector<double> times;
  MatX velocity;  // n_vel x N, columns ordered by time
  MatX pressure;  // n_pres x N
  std::optional<VecX> mean_velocity;  // present iff centering applied

  // Full state at the window start: the reduced model's initial condition.
  bool has_initial = false;
  double initial_time = 0.0;
  VecX initial_velocity;

  int count() const { return static_cast<int>(times.size()); }
};

// Which steps get recorded: stride-aligned steps with t in (start, end],
// or the single nearest step for a degenerate start == end window.
struct SnapshotPlan {
  std::vector<int> record_steps;
  int initial_step = 0;  // step whose state seeds the ROM
  int total_steps = 0;
};
SnapshotPlan plan_snapshots(const FomConfig& config);

using TimeVectorField = std::function<Vec2(double, double, double)>;  // (x, y, t)
using TimeScalarField = std::function<double(double, double, double)>;
using TimeTensorField = std::function<std::array<double, 4>(double, double, double)>;

// Problem data: which boundary parts carry Dirichlet data, their values,
// forcing and (for manufactured cases with a free outlet) the natural
// boundary data. Empty initial velocity means an impulsive start from rest.
struct FomProblem {
  std::set<BoundaryTag> dirichlet_tags;
  std::function<Vec2(BoundaryTag, double, double, double)> bc_value;
  TimeVectorField forcing;           // null -> zero
  TimeVectorField outlet_traction;   // null -> none
  VecX initial_velocity;
  VecX initial_velocity_prev;        // BDF2 history; empty -> u^{-1} = u^0

  static FomProblem benchmark(OutletBC outlet);
};

// Parabolic inflow u(0,y) = (4 U_m y (H-y)/H^2, 0), U_m = 1.5, H = 0.41.
Vec2 benchmark_inflow(double y);

// Dirichlet values of the benchmark problem on the constrained dofs at time
// t (the profile is stationary; t is accepted for interface uniformity).
VelocityDirichlet apply_inflow(const FeSpace& space, double t, OutletBC outlet);

// Time-marching driver for both schemes. Backward Euler solves the fully
// implicit system by Picard iteration on the advecting field; BDF2 is
// semi-implicit with the extrapolated advecting velocity 2u^n - u^{n-1} and
// reduces to semi-implicit Euler with step (2/3) dt at the first step.
class FomStepper {
public:
  FomStepper(const FeSystem& sys, const FomConfig& config, const FomProblem& problem);

  void step();

  double time() const { return t_; }
  int step_index() const { return step_index_; }
  const VecX& u() const { return u_; }
  const VecX& u_prev() const { return u_prev_; }
  const VecX& p() const { return p_; }
  VecX dudt() const;  // difference quotient of the active scheme
  int last_picard_iterations() const { return picard_iters_; }

  // Residual of the discrete energy identity of the last backward-Euler
  // step, relative to the energy scale. Meaningful for homogeneous
  // Dirichlet data only.
  double energy_identity_residual() const;

  const SaddleSolver& solver() const { return *solver_; }

private:
  VecX forcing_rhs(double t) const;
  void update_boundary_values(double t);

  const FeSystem* sys_;
  FomConfig cfg_;
  const FomProblem* prob_;
  std::unique_ptr<SaddleSolver> solver_;
  VecX u_, u_prev_, u_prev2_, p_;
  VecX last_forcing_;
  double t_ = 0.0;
  int step_index_ = 0;
  int picard_iters_ = 0;
};

struct FomResult {
  SnapshotSet snapshots;
  QoiSeries qoi;
};

// Marches the problem to t_end, recording snapshots per the plan and the
// per-step diagnostics series.
FomResult run_fom(const FomConfig& config, const FeSystem& sys, const FomProblem& problem,
                  bool record_qoi = true);

// ---------------------------------------------------------------------------
// Manufactured solutions
// ---------------------------------------------------------------------------

struct ManufacturedSolution {
  TimeVectorField velocity;
  TimeTensorField velocity_grad;
  TimeScalarField pressure;
  TimeVectorField forcing;
  TimeVectorField outlet_traction;  // natural data on x = x_max
  bool dirichlet_everywhere = false;
};

// Divergence-free trigonometric field with pressure sin(pi x) sin(pi y),
// time factor cos(omega t); natural data compensated on the outlet.
ManufacturedSolution mms_trigonometric(double nu, double omega);

// Linear-in-time solution contained in the P2 space; reproduced exactly by
// BDF2 with exact history.
ManufacturedSolution mms_polynomial(double nu);

struct MmsErrors {
  double vel_l2 = 0.0;
  double vel_h1 = 0.0;
  double pres_l2 = 0.0;
};

// Runs the FOM against a manufactured solution on the given mesh and
// returns errors at the final time. exact_history seeds BDF2 with the exact
// state at -dt instead of the impulsive u^{-1} = u^0 protocol.
MmsErrors run_mms(const TriMesh& mesh, const FomConfig& config,
                  const ManufacturedSolution& mms, bool exact_history);

// Errors against analytic fields by quadrature.
double l2_error(const FeFunction& f, const VectorField& exact);
double l2_error_scalar(const FeFunction& f, const ScalarField& exact);
double h1_error(const FeFunction& f, const std::function<std::array<double, 4>(double, double)>& exact_grad);

}  // namespace lpsrom

#endif
