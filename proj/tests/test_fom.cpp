#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lpsrom/errors.hpp"
#include "lpsrom/fom.hpp"

using namespace lpsrom;

namespace {

FomConfig square_config(TimeScheme scheme, double dt, double t_end, double nu) {
  FomConfig cfg;
  cfg.nu = nu;
  cfg.dt = dt;
  cfg.t_end = t_end;
  cfg.sigma = 1e-6;
  cfg.outlet_bc = OutletBC::Dirichlet;
  cfg.scheme = scheme;
  cfg.snapshot_stride = 1;
  cfg.window_start = 0.0;
  cfg.window_end = t_end;
  return cfg;
}

FomProblem zero_bc_problem() {
  FomProblem p;
  p.dirichlet_tags = {BoundaryTag::Inlet, BoundaryTag::Outlet, BoundaryTag::WallTop,
                      BoundaryTag::WallBottom};
  p.bc_value = [](BoundaryTag, double, double, double) { return Vec2{0.0, 0.0}; };
  return p;
}

}  // namespace

TEST_CASE("config validation: sigma and outlet pairing") {
  FomConfig cfg;
  cfg.outlet_bc = OutletBC::DoNothing;
  cfg.sigma = 1e-6;
  CHECK_THROWS_AS(cfg.validate(), ParameterError);
  cfg.sigma = 0.0;
  CHECK_NOTHROW(cfg.validate());
  cfg.outlet_bc = OutletBC::Dirichlet;
  CHECK_THROWS_AS(cfg.validate(), ParameterError);
  cfg.sigma = 1e-6;
  CHECK_NOTHROW(cfg.validate());
  cfg.dt = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ParameterError);
}

TEST_CASE("inflow profile: midline value, wall values, mean") {
  TriMesh m = generate_rect_mesh(2, 8, 2.2, 0.41);
  FeSpace s(m, 2);
  VelocityDirichlet bc = apply_inflow(s, 0.0, OutletBC::DoNothing);

  Vec2 mid = benchmark_inflow(0.41 / 2.0);
  CHECK(mid.x == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(benchmark_inflow(0.0).x == 0.0);
  CHECK(benchmark_inflow(0.41).x == doctest::Approx(0.0).epsilon(1e-14));

  // mean of the profile over the inlet is Ubar = 2 Um / 3 = 1
  int nq = 2000;
  double acc = 0.0;
  for (int i = 0; i < nq; ++i) {
    double y = 0.41 * (i + 0.5) / nq;
    acc += benchmark_inflow(y).x;
  }
  CHECK(acc / nq == doctest::Approx(1.0).epsilon(1e-6));

  // wall dofs carry zero values
  for (const auto& [tag, dofs] : s.boundary_dofs()) {
    if (tag == BoundaryTag::WallTop || tag == BoundaryTag::WallBottom)
      for (int d : dofs) CHECK(bc.values[d] == 0.0);
  }
}

TEST_CASE("snapshot plan: paper arithmetic and degenerate window") {
  FomConfig cfg;
  cfg.dt = 2e-3;
  cfg.t_end = 7.0;
  cfg.snapshot_stride = 5;
  cfg.window_start = 5.0;
  cfg.window_end = 7.0;
  SnapshotPlan plan = plan_snapshots(cfg);
  CHECK(plan.total_steps == 3500);
  CHECK(plan.record_steps.size() == 200);
  CHECK(plan.record_steps.front() == 2505);
  CHECK(plan.record_steps.back() == 3500);
  CHECK(plan.initial_step == 2500);

  cfg.window_start = cfg.window_end = 5.0;
  SnapshotPlan single = plan_snapshots(cfg);
  CHECK(single.record_steps.size() == 1);
  CHECK(single.record_steps[0] == 2500);
}

TEST_CASE("rest state stays at rest") {
  TriMesh m = generate_rect_mesh(4, 4, 1.0, 1.0);
  FeSystem sys(m, 1e-2, 1e-2, 1.0);
  FomConfig cfg = square_config(TimeScheme::BackwardEuler, 1e-2, 5e-2, 1e-2);
  FomProblem prob = zero_bc_problem();
  FomResult res = run_fom(cfg, sys, prob, true);
  for (int c = 0; c < res.snapshots.count(); ++c) {
    CHECK(res.snapshots.velocity.col(c).lpNorm<Eigen::Infinity>() < 1e-12);
    CHECK(res.snapshots.pressure.col(c).lpNorm<Eigen::Infinity>() < 1e-10);
  }
}

TEST_CASE("Stokes limit: one huge backward-Euler step matches the steady solve") {
  TriMesh m = generate_rect_mesh(6, 6, 1.0, 1.0);
  const double nu = 1.0, sigma = 1e-6;
  FeSystem sys(m, 1e8, nu, 1.0);

  // lid-driven-like forcing instead of boundary data: keeps BCs homogeneous
  auto forcing = [](double x, double y) {
    return Vec2{std::sin(M_PI * y) * x, std::cos(M_PI * x) + y};
  };
  VecX f = assemble_forcing(sys.space, forcing);

  std::set<BoundaryTag> all_tags{BoundaryTag::Inlet, BoundaryTag::Outlet, BoundaryTag::WallTop,
                                 BoundaryTag::WallBottom};
  VelocityDirichlet bc = build_velocity_dirichlet(
      sys.space, all_tags, [](BoundaryTag, double, double) { return Vec2{0.0, 0.0}; });
  auto steady = solve_stokes(sys, nu, sigma, bc, f);

  FomConfig cfg = square_config(TimeScheme::BackwardEuler, 1e8, 1e8, nu);
  cfg.enable_convection = false;
  FomProblem prob = zero_bc_problem();
  prob.forcing = [forcing](double x, double y, double) { return forcing(x, y); };
  FomStepper stepper(sys, cfg, prob);
  stepper.step();

  CHECK(std::sqrt(sys.velocity_l2_sq(stepper.u() - steady.u)) < 1e-6);
  CHECK(std::sqrt(sys.pressure_l2_sq(stepper.p() - steady.p)) < 1e-4);
}

TEST_CASE("backward Euler satisfies the discrete energy identity each step") {
  TriMesh m = generate_rect_mesh(5, 5, 1.0, 1.0);
  const double dt = 5e-3, nu = 0.05;
  FeSystem sys(m, dt, nu, 1.0);
  FomConfig cfg = square_config(TimeScheme::BackwardEuler, dt, 10 * dt, nu);
  FomProblem prob = zero_bc_problem();
  prob.forcing = [](double x, double y, double t) {
    return Vec2{std::sin(2 * M_PI * y + t), std::cos(2 * M_PI * x)};
  };
  // nonzero homogeneous-BC initial field
  prob.initial_velocity =
      interpolate(sys.space,
                  [](double x, double y) {
                    double sx = std::sin(M_PI * x), sy = std::sin(M_PI * y);
                    return Vec2{0.2 * sx * sx * std::sin(2 * M_PI * y),
                                -0.2 * std::sin(2 * M_PI * x) * sy * sy};
                  })
          .coeffs;
  FomStepper stepper(sys, cfg, prob);
  for (int n = 0; n < 10; ++n) {
    stepper.step();
    CHECK(std::abs(stepper.energy_identity_residual()) < 1e-10);
  }
}

TEST_CASE("weak divergence equals the mass-metric norm of B u") {
  TriMesh m = generate_rect_mesh(5, 4, 1.0, 1.0);
  FeSystem sys(m, 1e-2, 1e-2, 1.0);
  FeFunction u = interpolate(sys.space, [](double x, double y) {
    return Vec2{x * x + y, x - y * y};
  });
  auto [strong, weak] = divergence_norms(sys, u.coeffs);
  // independent route: || Mp^{-1} B u ||_{Mp}
  VecX bu = sys.div_op * u.coeffs;
  VecX z = sys.mass_s_ldlt().solve(bu);
  CHECK(weak == doctest::Approx(std::sqrt(z.dot(sys.mass_s * z))).epsilon(1e-10));
  CHECK(weak <= strong * (1.0 + 1e-10));

  // u = (x, 0) on the unit square: strong divergence = 1
  FeFunction shear = interpolate(sys.space, [](double x, double) { return Vec2{x, 0.0}; });
  auto [s2, w2] = divergence_norms(sys, shear.coeffs);
  CHECK(s2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(w2 > 0.1);
}

TEST_CASE("sigma-penalized continuity residual vanishes for the discrete solution") {
  TriMesh m = generate_rect_mesh(5, 5, 1.0, 1.0);
  const double dt = 1e-2, nu = 0.1, sigma = 1e-6;
  FeSystem sys(m, dt, nu, 1.0);
  FomConfig cfg = square_config(TimeScheme::BackwardEuler, dt, 3 * dt, nu);
  cfg.sigma = sigma;
  FomProblem prob = zero_bc_problem();
  prob.forcing = [](double x, double y, double) {
    return Vec2{std::sin(3 * x + y), std::cos(2 * y)};
  };
  FomStepper stepper(sys, cfg, prob);
  for (int n = 0; n < 3; ++n) {
    stepper.step();
    VecX residual = sys.div_op * stepper.u() + sys.lps * stepper.p() +
                    sigma * (sys.mass_s * stepper.p());
    double scale = std::max(1.0, std::sqrt(sys.velocity_l2_sq(stepper.u())));
    CHECK(residual.lpNorm<Eigen::Infinity>() < 1e-10 * scale);
  }
}

TEST_CASE("BDF2: constant-in-time solution is reproduced") {
  TriMesh m = generate_rect_mesh(4, 4, 1.0, 1.0);
  const double dt = 1e-2, nu = 0.5;
  FeSystem sys(m, dt, nu, 1.0);
  FomConfig cfg = square_config(TimeScheme::SemiImplicitBDF2, dt, 5 * dt, nu);
  // steady manufactured state u = (2y, 2x), f = (u.grad)u = (4x, 4y)
  auto steady_u = [](double x, double y) { return Vec2{2.0 * y, 2.0 * x}; };
  FomProblem prob;
  prob.dirichlet_tags = {BoundaryTag::Inlet, BoundaryTag::Outlet, BoundaryTag::WallTop,
                         BoundaryTag::WallBottom};
  prob.bc_value = [&](BoundaryTag, double x, double y, double) { return steady_u(x, y); };
  prob.forcing = [](double x, double y, double) { return Vec2{4.0 * x, 4.0 * y}; };
  prob.initial_velocity = interpolate(sys.space, VectorField(steady_u)).coeffs;
  FomStepper stepper(sys, cfg, prob);
  VecX u0 = stepper.u();
  for (int n = 0; n < 5; ++n) stepper.step();
  CHECK(std::sqrt(sys.velocity_l2_sq(stepper.u() - u0)) < 1e-9);
}

TEST_CASE("BDF2 with exact history reproduces linear-in-time data exactly") {
  TriMesh m = generate_rect_mesh(3, 4, 1.0, 1.0);
  const double dt = 0.05, nu = 0.3;
  FomConfig cfg = square_config(TimeScheme::SemiImplicitBDF2, dt, 10 * dt, nu);
  ManufacturedSolution mms = mms_polynomial(nu);
  MmsErrors err = run_mms(m, cfg, mms, /*exact_history=*/true);
  CHECK(err.vel_l2 < 1e-10);
  CHECK(err.pres_l2 < 1e-8);
}

TEST_CASE("BDF2 first step with u^{-1} = u^0 is semi-implicit Euler at (2/3) dt") {
  TriMesh m = generate_rect_mesh(4, 4, 1.0, 1.0);
  const double dt = 0.02, nu = 0.1, sigma = 1e-6;
  FeSystem sys(m, dt, nu, 1.0);
  FomConfig cfg = square_config(TimeScheme::SemiImplicitBDF2, dt, dt, nu);
  FomProblem prob = zero_bc_problem();
  prob.forcing = [](double x, double y, double) { return Vec2{y, -x}; };
  prob.initial_velocity =
      interpolate(sys.space,
                  [](double x, double y) {
                    double b = x * (1 - x) * y * (1 - y);
                    return Vec2{4.0 * b, -2.0 * b};
                  })
          .coeffs;

  FomStepper stepper(sys, cfg, prob);
  stepper.step();

  // manual semi-implicit Euler step with mass coefficient 3/(2 dt), i.e.
  // effective step (2/3) dt, advected by u^0
  std::set<BoundaryTag> tags{BoundaryTag::Inlet, BoundaryTag::Outlet, BoundaryTag::WallTop,
                             BoundaryTag::WallBottom};
  VelocityDirichlet bc = build_velocity_dirichlet(
      sys.space, tags, [](BoundaryTag, double, double) { return Vec2{0.0, 0.0}; });
  SaddleSolver solver(sys, 1.5 / dt, nu, sigma, bc);
  FeFunction adv(sys.space, 2);
  adv.coeffs = prob.initial_velocity;
  VecX rhs_v = (1.5 / dt) * (sys.mass_v * prob.initial_velocity) +
               assemble_forcing(sys.space, [&](double x, double y) {
                 return prob.forcing(x, y, dt);
               });
  auto manual = solver.solve(&adv, rhs_v, VecX::Zero(sys.n_pres()));

  CHECK((stepper.u() - manual.u).lpNorm<Eigen::Infinity>() < 1e-12);
  CHECK((stepper.p() - manual.p).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("Picard nonconvergence raises SolverError with history") {
  TriMesh m = generate_rect_mesh(4, 4, 1.0, 1.0);
  const double dt = 1.0, nu = 1e-4;  // huge step, tiny viscosity
  FeSystem sys(m, dt, nu, 1.0);
  FomConfig cfg = square_config(TimeScheme::BackwardEuler, dt, dt, nu);
  cfg.picard_max = 2;
  FomProblem prob = zero_bc_problem();
  prob.forcing = [](double x, double y, double) {
    return Vec2{50.0 * std::sin(8 * x * y), 50.0 * std::cos(7 * x)};
  };
  FomStepper stepper(sys, cfg, prob);
  CHECK_THROWS_AS(stepper.step(), SolverError);
}

TEST_CASE("manufactured convergence: coarse two-mesh spatial order sanity") {
  const double nu = 0.1;
  FomConfig cfg;
  cfg.nu = nu;
  cfg.dt = 2e-3;
  cfg.t_end = 0.02;
  cfg.sigma = 0.0;
  cfg.outlet_bc = OutletBC::DoNothing;
  cfg.scheme = TimeScheme::SemiImplicitBDF2;
  ManufacturedSolution mms = mms_trigonometric(nu, 1.0);
  double e1 = run_mms(generate_rect_mesh(6, 6, 1.0, 1.0), cfg, mms, true).vel_l2;
  double e2 = run_mms(generate_rect_mesh(12, 12, 1.0, 1.0), cfg, mms, true).vel_l2;
  double order = std::log2(e1 / e2);
  MESSAGE("observed coarse spatial order ", order);
  CHECK(order > 2.5);
}
