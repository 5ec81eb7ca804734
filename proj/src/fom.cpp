#include "lpsrom/fom.hpp"

#include <cmath>
#include <sstream>

#include "lpsrom/errors.hpp"
#include "lpsrom/quadrature.hpp"

namespace lpsrom {

void FomConfig::validate() const {
  if (!(dt > 0.0)) throw ParameterError("FomConfig: dt must be > 0");
  if (!(nu > 0.0)) throw ParameterError("FomConfig: nu must be > 0");
  if (!(mean_velocity > 0.0)) throw ParameterError("FomConfig: mean velocity must be > 0");
  if (t_end < 0.0) throw ParameterError("FomConfig: t_end must be >= 0");
  if (sigma < 0.0) throw ParameterError("FomConfig: sigma must be >= 0");
  if (outlet_bc == OutletBC::DoNothing && sigma != 0.0)
    throw ParameterError("FomConfig: sigma must be 0 with a do-nothing outlet");
  if (outlet_bc == OutletBC::Dirichlet && sigma <= 0.0)
    throw ParameterError("FomConfig: sigma must be > 0 with a Dirichlet outlet");
  if (snapshot_stride < 1) throw ParameterError("FomConfig: snapshot stride must be >= 1");
  if (window_start > window_end)
    throw ParameterError("FomConfig: snapshot window start exceeds end");
}

int FomConfig::total_steps() const {
  return static_cast<int>(std::llround(t_end / dt));
}

SnapshotPlan plan_snapshots(const FomConfig& config) {
  SnapshotPlan plan;
  plan.total_steps = config.total_steps();
  plan.initial_step =
      std::clamp(static_cast<int>(std::llround(config.window_start / config.dt)), 0,
                 plan.total_steps);
  const double eps = 1e-9 * config.dt;
  if (config.window_start == config.window_end) {
    plan.record_steps.push_back(plan.initial_step);
    return plan;
  }
  for (int n = 1; n <= plan.total_steps; ++n) {
    double t = n * config.dt;
    if (t > config.window_start + eps && t <= config.window_end + eps &&
        n % config.snapshot_stride == 0)
      plan.record_steps.push_back(n);
  }
  return plan;
}

Vec2 benchmark_inflow(double y) {
  const double um = 1.5, height = 0.41;
  return {4.0 * um * y * (height - y) / (height * height), 0.0};
}

FomProblem FomProblem::benchmark(OutletBC outlet) {
  FomProblem p;
  p.dirichlet_tags = {BoundaryTag::Inlet, BoundaryTag::WallTop, BoundaryTag::WallBottom,
                      BoundaryTag::Cylinder};
  if (outlet == OutletBC::Dirichlet) p.dirichlet_tags.insert(BoundaryTag::Outlet);
  p.bc_value = [](BoundaryTag tag, double /*x*/, double y, double /*t*/) -> Vec2 {
    if (tag == BoundaryTag::Inlet || tag == BoundaryTag::Outlet) return benchmark_inflow(y);
    return {0.0, 0.0};
  };
  return p;
}

VelocityDirichlet apply_inflow(const FeSpace& space, double t, OutletBC outlet) {
  FomProblem prob = FomProblem::benchmark(outlet);
  return build_velocity_dirichlet(space, prob.dirichlet_tags,
                                  [&](BoundaryTag tag, double x, double y) {
                                    return prob.bc_value(tag, x, y, t);
                                  });
}

FomStepper::FomStepper(const FeSystem& sys, const FomConfig& config, const FomProblem& problem)
    : sys_(&sys), cfg_(config), prob_(&problem) {
  cfg_.validate();
  VelocityDirichlet bc = build_velocity_dirichlet(
      sys.space, prob_->dirichlet_tags,
      [&](BoundaryTag tag, double x, double y) { return prob_->bc_value(tag, x, y, 0.0); });
  const double mass_coef = (cfg_.scheme == TimeScheme::BackwardEuler)
                               ? 1.0 / cfg_.dt
                               : 1.5 / cfg_.dt;
  solver_ = std::make_unique<SaddleSolver>(sys, mass_coef, cfg_.nu, cfg_.sigma, std::move(bc));

  u_ = prob_->initial_velocity.size() ? prob_->initial_velocity : VecX::Zero(sys.n_vel());
  u_prev_ = prob_->initial_velocity_prev.size() ? prob_->initial_velocity_prev : u_;
  u_prev2_ = u_prev_;
  p_ = VecX::Zero(sys.n_pres());
  last_forcing_ = VecX::Zero(sys.n_vel());
}

VecX FomStepper::forcing_rhs(double t) const {
  VecX rhs = VecX::Zero(sys_->n_vel());
  if (prob_->forcing)
    rhs += assemble_forcing(sys_->space,
                            [&](double x, double y) { return prob_->forcing(x, y, t); });
  if (prob_->outlet_traction)
    rhs += assemble_boundary_traction(
        sys_->space, BoundaryTag::Outlet,
        [&](double x, double y) { return prob_->outlet_traction(x, y, t); });
  return rhs;
}

void FomStepper::update_boundary_values(double t) {
  VelocityDirichlet bc = build_velocity_dirichlet(
      sys_->space, prob_->dirichlet_tags,
      [&](BoundaryTag tag, double x, double y) { return prob_->bc_value(tag, x, y, t); });
  solver_->set_boundary_values(bc.values);
}

void FomStepper::step() {
  const double t_next = t_ + cfg_.dt;
  update_boundary_values(t_next);
  last_forcing_ = forcing_rhs(t_next);
  const VecX rhs_p = VecX::Zero(sys_->n_pres());

  if (cfg_.scheme == TimeScheme::BackwardEuler) {
    VecX rhs_v = (1.0 / cfg_.dt) * (sys_->mass_v * u_) + last_forcing_;
    VecX advect = u_;
    std::vector<double> history;
    SaddleSolver::Solution sol;
    bool converged = false;
    for (int it = 0; it < cfg_.picard_max; ++it) {
      FeFunction adv(sys_->space, 2);
      adv.coeffs = advect;
      sol = solver_->solve(cfg_.enable_convection ? &adv : nullptr, rhs_v, rhs_p);
      VecX diff = sol.u - advect;
      double err = std::sqrt(sys_->velocity_l2_sq(diff));
      double scale = std::max(std::sqrt(sys_->velocity_l2_sq(sol.u)), 1e-30);
      history.push_back(err / scale);
      picard_iters_ = it + 1;
      if (err <= cfg_.picard_tol * scale || !cfg_.enable_convection) {
        converged = true;
        break;
      }
      advect = sol.u;
    }
    if (!converged) {
      std::ostringstream os;
      os << "Picard iteration did not converge in " << cfg_.picard_max
         << " iterations; relative residuals:";
      for (double r : history) os << " " << r;
      throw SolverError(os.str());
    }
    u_prev2_ = u_prev_;
    u_prev_ = u_;
    u_ = sol.u;
    p_ = sol.p;
  } else {
    // Semi-implicit BDF2 with Newton-Gregory extrapolated advecting field.
    VecX advect = 2.0 * u_ - u_prev_;
    VecX rhs_v = (0.5 / cfg_.dt) * (sys_->mass_v * (4.0 * u_ - u_prev_)) + last_forcing_;
    FeFunction adv(sys_->space, 2);
    adv.coeffs = advect;
    SaddleSolver::Solution sol =
        solver_->solve(cfg_.enable_convection ? &adv : nullptr, rhs_v, rhs_p);
    picard_iters_ = 1;
    u_prev2_ = u_prev_;
    u_prev_ = u_;
    u_ = sol.u;
    p_ = sol.p;
  }
  t_ = t_next;
  ++step_index_;
}

VecX FomStepper::dudt() const {
  if (cfg_.scheme == TimeScheme::BackwardEuler) return (u_ - u_prev_) / cfg_.dt;
  return (3.0 * u_ - 4.0 * u_prev_ + u_prev2_) / (2.0 * cfg_.dt);
}

double FomStepper::energy_identity_residual() const {
  // ||u1||^2 - ||u0||^2 + ||u1-u0||^2 + 2 dt (nu |u1|_1^2 + |p|_tau^2
  //   + sigma ||p||^2) - 2 dt <f, u1> = 0 for the converged implicit step.
  double un1 = sys_->velocity_l2_sq(u_);
  double un = sys_->velocity_l2_sq(u_prev_);
  double du = sys_->velocity_l2_sq(u_ - u_prev_);
  double visc = cfg_.nu * sys_->velocity_h1_sq(u_);
  double stab = sys_->lps_seminorm_sq(p_);
  double pen = cfg_.sigma * sys_->pressure_l2_sq(p_);
  double work = last_forcing_.dot(u_);
  double lhs = un1 - un + du + 2.0 * cfg_.dt * (visc + stab + pen) - 2.0 * cfg_.dt * work;
  double scale = std::max({un1, un, 1e-30});
  return lhs / scale;
}

FomResult run_fom(const FomConfig& config, const FeSystem& sys, const FomProblem& problem,
                  bool record_qoi) {
  config.validate();
  SnapshotPlan plan = plan_snapshots(config);
  FomStepper stepper(sys, config, problem);
  DragLiftEvaluator forces(sys, 0.1, config.mean_velocity);

  FomResult out;
  out.snapshots.velocity.resize(sys.n_vel(), plan.record_steps.size());
  out.snapshots.pressure.resize(sys.n_pres(), plan.record_steps.size());

  auto maybe_record = [&](int n) {
    if (n == plan.initial_step) {
      out.snapshots.has_initial = true;
      out.snapshots.initial_time = n * config.dt;
      out.snapshots.initial_velocity = stepper.u();
    }
    auto it = std::lower_bound(plan.record_steps.begin(), plan.record_steps.end(), n);
    if (it != plan.record_steps.end() && *it == n) {
      int col = static_cast<int>(it - plan.record_steps.begin());
      out.snapshots.times.push_back(n * config.dt);
      out.snapshots.velocity.col(col) = stepper.u();
      out.snapshots.pressure.col(col) = stepper.p();
    }
  };

  maybe_record(0);
  for (int n = 1; n <= plan.total_steps; ++n) {
    stepper.step();
    maybe_record(n);
    if (record_qoi) {
      auto [cd, cl] = forces.evaluate(stepper.u(), stepper.dudt(), stepper.p());
      auto [ds, dw] = divergence_norms(sys, stepper.u());
      out.qoi.times.push_back(stepper.time());
      out.qoi.c_d.push_back(cd);
      out.qoi.c_l.push_back(cl);
      out.qoi.e_kin.push_back(kinetic_energy(sys, stepper.u()));
      out.qoi.div_strong.push_back(ds);
      out.qoi.div_weak.push_back(dw);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Manufactured solutions
// ---------------------------------------------------------------------------

ManufacturedSolution mms_trigonometric(double nu, double omega) {
  const double pi = M_PI;
  auto g = [omega](double t) { return std::cos(omega * t); };
  auto gp = [omega](double t) { return -omega * std::sin(omega * t); };

  ManufacturedSolution m;
  m.velocity = [=](double x, double y, double t) -> Vec2 {
    return {std::sin(pi * x) * std::cos(pi * y) * g(t),
            -std::cos(pi * x) * std::sin(pi * y) * g(t)};
  };
  m.velocity_grad = [=](double x, double y, double t) -> std::array<double, 4> {
    double c = g(t);
    return {pi * std::cos(pi * x) * std::cos(pi * y) * c,
            -pi * std::sin(pi * x) * std::sin(pi * y) * c,
            pi * std::sin(pi * x) * std::sin(pi * y) * c,
            -pi * std::cos(pi * x) * std::cos(pi * y) * c};
  };
  m.pressure = [=](double x, double y, double t) {
    return std::sin(pi * x) * std::sin(pi * y) * g(t);
  };
  m.forcing = [=](double x, double y, double t) -> Vec2 {
    double c = g(t), cp = gp(t);
    double fx = cp * std::sin(pi * x) * std::cos(pi * y) + 0.5 * pi * c * c * std::sin(2 * pi * x) +
                2.0 * nu * pi * pi * c * std::sin(pi * x) * std::cos(pi * y) +
                pi * c * std::cos(pi * x) * std::sin(pi * y);
    double fy = -cp * std::cos(pi * x) * std::sin(pi * y) + 0.5 * pi * c * c * std::sin(2 * pi * y) -
                2.0 * nu * pi * pi * c * std::cos(pi * x) * std::sin(pi * y) +
                pi * c * std::sin(pi * x) * std::cos(pi * y);
    return {fx, fy};
  };
  // nu du/dn - p n on the outlet x = 1 of the unit square.
  m.outlet_traction = [=](double /*x*/, double y, double t) -> Vec2 {
    return {-nu * pi * std::cos(pi * y) * g(t), 0.0};
  };
  m.dirichlet_everywhere = false;
  return m;
}

ManufacturedSolution mms_polynomial(double nu) {
  auto a = [](double t) { return 1.0 + 0.5 * t; };
  auto ap = [](double /*t*/) { return 0.5; };
  ManufacturedSolution m;
  (void)nu;  // Laplacian of the linear field vanishes
  // u = (2y, 2x) a(t), divergence-free with nonzero convection
  m.velocity = [=](double x, double y, double t) -> Vec2 {
    return {2.0 * y * a(t), 2.0 * x * a(t)};
  };
  m.velocity_grad = [=](double /*x*/, double /*y*/, double t) -> std::array<double, 4> {
    return {0.0, 2.0 * a(t), 2.0 * a(t), 0.0};
  };
  m.pressure = [](double, double, double) { return 0.0; };
  m.forcing = [=](double x, double y, double t) -> Vec2 {
    double at = a(t), atp = ap(t);
    return {2.0 * y * atp + 4.0 * x * at * at, 2.0 * x * atp + 4.0 * y * at * at};
  };
  m.outlet_traction = nullptr;
  m.dirichlet_everywhere = true;
  return m;
}

MmsErrors run_mms(const TriMesh& mesh, const FomConfig& config,
                  const ManufacturedSolution& mms, bool exact_history) {
  FeSystem sys(mesh, config.dt, config.nu, config.mean_velocity);

  FomProblem prob;
  prob.dirichlet_tags = {BoundaryTag::Inlet, BoundaryTag::WallTop, BoundaryTag::WallBottom,
                         BoundaryTag::Cylinder};
  if (mms.dirichlet_everywhere) prob.dirichlet_tags.insert(BoundaryTag::Outlet);
  prob.bc_value = [&](BoundaryTag, double x, double y, double t) {
    return mms.velocity(x, y, t);
  };
  prob.forcing = mms.forcing;
  if (!mms.dirichlet_everywhere) prob.outlet_traction = mms.outlet_traction;
  prob.initial_velocity =
      interpolate(sys.space, [&](double x, double y) { return mms.velocity(x, y, 0.0); })
          .coeffs;
  if (exact_history && config.scheme == TimeScheme::SemiImplicitBDF2)
    prob.initial_velocity_prev =
        interpolate(sys.space,
                    [&](double x, double y) { return mms.velocity(x, y, -config.dt); })
            .coeffs;

  FomStepper stepper(sys, config, prob);
  const int n_steps = config.total_steps();
  for (int n = 0; n < n_steps; ++n) stepper.step();
  const double tf = stepper.time();

  FeFunction uh(sys.space, 2), ph(sys.space, 1);
  uh.coeffs = stepper.u();
  ph.coeffs = stepper.p();

  MmsErrors err;
  err.vel_l2 = l2_error(uh, [&](double x, double y) { return mms.velocity(x, y, tf); });
  err.vel_h1 = h1_error(uh, [&](double x, double y) { return mms.velocity_grad(x, y, tf); });
  err.pres_l2 = l2_error_scalar(ph, [&](double x, double y) { return mms.pressure(x, y, tf); });
  return err;
}

namespace {

Vec2 map_pt(const TriMesh& mesh, int cell, double xi, double eta) {
  const auto& t = mesh.triangles[cell];
  const Vec2 &p0 = mesh.vertices[t[0]], &p1 = mesh.vertices[t[1]], &p2 = mesh.vertices[t[2]];
  return {p0.x + (p1.x - p0.x) * xi + (p2.x - p0.x) * eta,
          p0.y + (p1.y - p0.y) * xi + (p2.y - p0.y) * eta};
}

}  // namespace

double l2_error(const FeFunction& f, const VectorField& exact) {
  const QuadRule& qr = quad_degree5();
  const TriMesh& mesh = f.space->mesh();
  double acc = 0.0;
  for (int k = 0; k < mesh.num_cells(); ++k) {
    CellGeom g = cell_geometry(mesh, k);
    for (std::size_t q = 0; q < qr.points.size(); ++q) {
      Vec2 p = map_pt(mesh, k, qr.points[q][0], qr.points[q][1]);
      Vec2 ex = exact(p.x, p.y);
      Vec2 vh = f.value_vec(k, qr.points[q][0], qr.points[q][1]);
      double dx = vh.x - ex.x, dy = vh.y - ex.y;
      acc += qr.weights[q] * g.area * (dx * dx + dy * dy);
    }
  }
  return std::sqrt(acc);
}

double l2_error_scalar(const FeFunction& f, const ScalarField& exact) {
  const QuadRule& qr = quad_degree5();
  const TriMesh& mesh = f.space->mesh();
  double acc = 0.0;
  for (int k = 0; k < mesh.num_cells(); ++k) {
    CellGeom g = cell_geometry(mesh, k);
    for (std::size_t q = 0; q < qr.points.size(); ++q) {
      Vec2 p = map_pt(mesh, k, qr.points[q][0], qr.points[q][1]);
      double d = f.value_scalar(k, qr.points[q][0], qr.points[q][1]) - exact(p.x, p.y);
      acc += qr.weights[q] * g.area * d * d;
    }
  }
  return std::sqrt(acc);
}

double h1_error(const FeFunction& f,
                const std::function<std::array<double, 4>(double, double)>& exact_grad) {
  const QuadRule& qr = quad_degree5();
  const TriMesh& mesh = f.space->mesh();
  double acc = 0.0;
  for (int k = 0; k < mesh.num_cells(); ++k) {
    CellGeom g = cell_geometry(mesh, k);
    for (std::size_t q = 0; q < qr.points.size(); ++q) {
      Vec2 p = map_pt(mesh, k, qr.points[q][0], qr.points[q][1]);
      auto ge = exact_grad(p.x, p.y);
      auto gh = f.grad_vec(k, qr.points[q][0], qr.points[q][1]);
      double s = 0.0;
      for (int c = 0; c < 4; ++c) s += (gh[c] - ge[c]) * (gh[c] - ge[c]);
      acc += qr.weights[q] * g.area * s;
    }
  }
  return std::sqrt(acc);
}

}  // namespace lpsrom
