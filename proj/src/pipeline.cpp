#include "lpsrom/pipeline.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "lpsrom/errors.hpp"

namespace lpsrom {

namespace {

bool to_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ParameterError("config: expected boolean, got '" + v + "'");
}

std::string artifact(const PipelineConfig& cfg, const std::string& name) {
  return (std::filesystem::path(cfg.out_dir) / name).string();
}

void require_artifact(const std::string& path) {
  if (!std::filesystem::exists(path))
    throw DataError("missing input artifact '" + path + "'");
}

}  // namespace

void PipelineConfig::apply(const std::string& key, const std::string& value) {
  if (key == "mesh.kind") mesh_kind = value;
  else if (key == "mesh.target_h") target_h = std::stod(value);
  else if (key == "mesh.cylinder_x") cylinder_x = std::stod(value);
  else if (key == "mesh.cylinder_y") cylinder_y = std::stod(value);
  else if (key == "mesh.cylinder_r") cylinder_r = std::stod(value);
  else if (key == "mesh.grading") grading = std::stod(value);
  else if (key == "mesh.nx") nx = std::stoi(value);
  else if (key == "mesh.ny") ny = std::stoi(value);
  else if (key == "mesh.width") width = std::stod(value);
  else if (key == "mesh.height") height = std::stod(value);
  else if (key == "fom.nu") fom.nu = std::stod(value);
  else if (key == "fom.dt") fom.dt = std::stod(value);
  else if (key == "fom.t_end") fom.t_end = std::stod(value);
  else if (key == "fom.sigma") fom.sigma = std::stod(value);
  else if (key == "fom.outlet") {
    if (value == "do_nothing") fom.outlet_bc = OutletBC::DoNothing;
    else if (value == "dirichlet") fom.outlet_bc = OutletBC::Dirichlet;
    else throw ParameterError("config: fom.outlet must be do_nothing or dirichlet");
  } else if (key == "fom.scheme") {
    if (value == "bdf2") fom.scheme = TimeScheme::SemiImplicitBDF2;
    else if (value == "backward_euler") fom.scheme = TimeScheme::BackwardEuler;
    else throw ParameterError("config: fom.scheme must be bdf2 or backward_euler");
  } else if (key == "fom.stride") fom.snapshot_stride = std::stoi(value);
  else if (key == "fom.window_start") fom.window_start = std::stod(value);
  else if (key == "fom.window_end") fom.window_end = std::stod(value);
  else if (key == "fom.mean_velocity") fom.mean_velocity = std::stod(value);
  else if (key == "pod.r") pod_r = std::stoi(value);
  else if (key == "pod.center") pod_center = to_bool(value);
  else if (key == "rom.r") rom_r = std::stoi(value);
  else if (key == "rom.scheme") rom_scheme = value;
  else if (key == "analyze.r_max") analyze_r_max = std::stoi(value);
  else if (key == "out.dir") out_dir = value;
  else throw ParameterError("config: unknown key '" + key + "'");
}

PipelineConfig PipelineConfig::from_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open config file '" + path + "'");
  PipelineConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      bool blank = line.find_first_not_of(" \t\r") == std::string::npos;
      if (blank) continue;
      throw ParameterError("config: malformed line " + std::to_string(lineno));
    }
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return (b == std::string::npos) ? std::string() : s.substr(b, e - b + 1);
    };
    cfg.apply(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

namespace {

TriMesh build_mesh(const PipelineConfig& cfg) {
  if (cfg.mesh_kind == "channel")
    return generate_channel_mesh(cfg.target_h, {cfg.cylinder_x, cfg.cylinder_y},
                                 cfg.cylinder_r,
                                 {cfg.width, cfg.height, cfg.grading});
  if (cfg.mesh_kind == "rect") return generate_rect_mesh(cfg.nx, cfg.ny, cfg.width, cfg.height);
  throw ParameterError("config: mesh.kind must be channel or rect");
}

RomScheme parse_rom_scheme(const std::string& s) {
  if (s == "bdf2") return RomScheme::SemiImplicitBDF2;
  if (s == "euler") return RomScheme::SemiImplicitEuler;
  if (s == "implicit") return RomScheme::SemiImplicitEuler;  // stepping picked below
  throw ParameterError("config: rom.scheme must be bdf2, euler or implicit");
}

}  // namespace

void cmd_mesh(const PipelineConfig& cfg) {
  std::filesystem::create_directories(cfg.out_dir);
  TriMesh mesh = build_mesh(cfg);
  write_mesh_text(mesh, artifact(cfg, "mesh.txt"));
  std::cout << "mesh: " << mesh.num_vertices() << " vertices, " << mesh.num_cells()
            << " cells, max h = " << mesh.max_h() << "\n";
}

void cmd_fom(const PipelineConfig& cfg) {
  require_artifact(artifact(cfg, "mesh.txt"));
  TriMesh mesh = read_mesh_text(artifact(cfg, "mesh.txt"));
  FeSystem sys(mesh, cfg.fom.dt, cfg.fom.nu, cfg.fom.mean_velocity);
  FomProblem prob = FomProblem::benchmark(cfg.fom.outlet_bc);
  FomResult res = run_fom(cfg.fom, sys, prob);
  write_snapshots(res.snapshots, artifact(cfg, "snapshots.bin"));
  write_qoi_csv(res.qoi, artifact(cfg, "fom_qoi.csv"));

  FeFunction u(sys.space, 2), p(sys.space, 1);
  if (res.snapshots.count() > 0) {
    u.coeffs = res.snapshots.velocity.col(res.snapshots.count() - 1);
    p.coeffs = res.snapshots.pressure.col(res.snapshots.count() - 1);
    export_vtk(sys.space, {{"velocity", &u}, {"pressure", &p}},
               artifact(cfg, "fom_final.vtk"));
  }
  std::cout << "fom: " << res.snapshots.count() << " snapshots, "
            << res.qoi.times.size() << " qoi steps\n";
}

void cmd_pod(const PipelineConfig& cfg) {
  require_artifact(artifact(cfg, "mesh.txt"));
  require_artifact(artifact(cfg, "snapshots.bin"));
  TriMesh mesh = read_mesh_text(artifact(cfg, "mesh.txt"));
  FeSystem sys(mesh, cfg.fom.dt, cfg.fom.nu, cfg.fom.mean_velocity);
  SnapshotSet snaps = read_snapshots(artifact(cfg, "snapshots.bin"));

  const double dt_snap = cfg.fom.dt * cfg.fom.snapshot_stride;
  PodBasis vel = compute_basis(snaps.velocity, sys.mass_v, dt_snap, cfg.pod_r, cfg.pod_center);
  PodBasis pres = compute_basis(snaps.pressure, sys.mass_s, dt_snap, cfg.pod_r, false);
  write_basis(vel, pres, artifact(cfg, "basis.bin"));

  std::vector<std::vector<double>> rows;
  int n = std::max(vel.eigenvalues.size(), pres.eigenvalues.size());
  for (int i = 0; i < n; ++i) {
    double lam = i < vel.eigenvalues.size() ? vel.eigenvalues[i] : 0.0;
    double gam = i < pres.eigenvalues.size() ? pres.eigenvalues[i] : 0.0;
    rows.push_back({static_cast<double>(i + 1), lam, gam, energy_capture(vel, i + 1),
                    energy_capture(pres, i + 1)});
  }
  write_csv(artifact(cfg, "eigenvalues.csv"),
            {"i", "lambda", "gamma", "energy_vel_pct", "energy_pres_pct"}, rows);
  std::cout << "pod: rank_v = " << vel.total_rank << ", rank_p = " << pres.total_rank
            << ", r = " << cfg.pod_r << "\n";
}

PodBasis truncate_basis(const PodBasis& basis, int r) {
  if (r > basis.r()) throw RankError("truncate_basis: r exceeds stored mode count");
  PodBasis out = basis;
  out.modes = basis.modes.leftCols(r);
  return out;
}

RomRunResult run_rom_trajectory(const FeSystem& sys, const FomConfig& fom_cfg,
                                const PodBasis& vel_basis, const PodBasis& pres_basis,
                                const SnapshotSet& snaps, int r, RomScheme scheme,
                                bool with_qoi) {
  PodBasis vel = truncate_basis(vel_basis, r);
  PodBasis pres = truncate_basis(pres_basis, r);
  RomOperators ops = precompute_operators(vel, pres, sys, fom_cfg.nu, fom_cfg.sigma);

  if (!snaps.has_initial)
    throw DataError("run_rom_trajectory: snapshot set lacks the window-start state");
  RomState state = rom_initialize(vel, sys.mass_v, snaps.initial_velocity);
  state.t = snaps.initial_time;

  const double dt = fom_cfg.dt;
  const int n_steps =
      static_cast<int>(std::llround((fom_cfg.window_end - snaps.initial_time) / dt));

  RomRunResult out;
  out.times.push_back(state.t);
  out.a_history.resize(r, n_steps + 1);
  out.b_history.resize(r, n_steps + 1);
  out.a_history.col(0) = state.a;
  out.b_history.col(0) = state.b;

  DragLiftEvaluator forces(sys, 0.1, fom_cfg.mean_velocity);

  // Error accumulators over snapshot times.
  double num_v = 0, num_p = 0, nump_v = 0, nump_p = 0, den_v = 0, den_p = 0;
  std::size_t snap_idx = 0;

  RomState prev = state, prev2 = state;
  for (int m = 1; m <= n_steps; ++m) {
    RomState next = rom_step_semi_implicit(state, ops, dt, fom_cfg.sigma, scheme);
    prev2 = prev;
    prev = state;
    state = next;
    out.times.push_back(state.t);
    out.a_history.col(m) = state.a;
    out.b_history.col(m) = state.b;

    auto [u, p] = reconstruct(state, vel, pres);

    if (with_qoi) {
      VecX dudt;
      if (scheme == RomScheme::SemiImplicitBDF2) {
        const VecX& am1 = prev.a;
        const VecX& am2 = prev.has_prev ? prev.a_prev : prev.a;
        dudt = vel.modes * ((3.0 * state.a - 4.0 * am1 + am2) / (2.0 * dt));
      } else {
        dudt = vel.modes * ((state.a - prev.a) / dt);
      }
      auto [cd, cl] = forces.evaluate(u, dudt, p);
      out.qoi.times.push_back(state.t);
      out.qoi.c_d.push_back(cd);
      out.qoi.c_l.push_back(cl);
      out.qoi.e_kin.push_back(kinetic_energy(sys, u));
      auto [ds, dw] = divergence_norms(sys, u);
      out.qoi.div_strong.push_back(ds);
      out.qoi.div_weak.push_back(dw);
    }

    while (snap_idx < snaps.times.size() &&
           snaps.times[snap_idx] < state.t - 0.5 * dt)
      ++snap_idx;
    if (snap_idx < snaps.times.size() &&
        std::abs(snaps.times[snap_idx] - state.t) < 0.5 * dt) {
      VecX uf = snaps.velocity.col(snap_idx);
      VecX pf = snaps.pressure.col(snap_idx);
      VecX uc = uf;
      if (vel.mean_field) uc -= *vel.mean_field;
      VecX uproj = vel.modes * (vel.modes.transpose() * (sys.mass_v * uc));
      if (vel.mean_field) uproj += *vel.mean_field;
      VecX pproj = pres.modes * (pres.modes.transpose() * (sys.mass_s * pf));

      num_v += sys.velocity_l2_sq(u - uf);
      num_p += sys.pressure_l2_sq(p - pf);
      nump_v += sys.velocity_l2_sq(u - uproj);
      nump_p += sys.pressure_l2_sq(p - pproj);
      den_v += sys.velocity_l2_sq(uf);
      den_p += sys.pressure_l2_sq(pf);
      ++snap_idx;
    }
  }

  out.err_vel_fom = std::sqrt(num_v / std::max(den_v, 1e-300));
  out.err_pres_fom = std::sqrt(num_p / std::max(den_p, 1e-300));
  out.err_vel_proj = std::sqrt(nump_v / std::max(den_v, 1e-300));
  out.err_pres_proj = std::sqrt(nump_p / std::max(den_p, 1e-300));
  return out;
}

void cmd_rom(const PipelineConfig& cfg) {
  require_artifact(artifact(cfg, "mesh.txt"));
  require_artifact(artifact(cfg, "snapshots.bin"));
  require_artifact(artifact(cfg, "basis.bin"));
  TriMesh mesh = read_mesh_text(artifact(cfg, "mesh.txt"));
  FeSystem sys(mesh, cfg.fom.dt, cfg.fom.nu, cfg.fom.mean_velocity);
  SnapshotSet snaps = read_snapshots(artifact(cfg, "snapshots.bin"));
  auto [vel, pres] = read_basis(artifact(cfg, "basis.bin"));

  const int r = cfg.rom_r;
  RomRunResult res;
  if (cfg.rom_scheme == "implicit") {
    // Fully implicit trajectory, stepping manually.
    PodBasis velr = truncate_basis(vel, r), presr = truncate_basis(pres, r);
    RomOperators ops = precompute_operators(velr, presr, sys, cfg.fom.nu, cfg.fom.sigma);
    RomState state = rom_initialize(velr, sys.mass_v, snaps.initial_velocity);
    state.t = snaps.initial_time;
    int n_steps = static_cast<int>(
        std::llround((cfg.fom.window_end - snaps.initial_time) / cfg.fom.dt));
    res.times.push_back(state.t);
    res.a_history.resize(r, n_steps + 1);
    res.b_history.resize(r, n_steps + 1);
    res.a_history.col(0) = state.a;
    res.b_history.col(0) = state.b;
    for (int m = 1; m <= n_steps; ++m) {
      state = rom_step_implicit(state, ops, cfg.fom.dt, cfg.fom.sigma);
      res.times.push_back(state.t);
      res.a_history.col(m) = state.a;
      res.b_history.col(m) = state.b;
    }
  } else {
    res = run_rom_trajectory(sys, cfg.fom, vel, pres, snaps, r,
                             parse_rom_scheme(cfg.rom_scheme), true);
  }

  std::vector<std::string> header{"t"};
  for (int i = 1; i <= r; ++i) header.push_back("a_" + std::to_string(i));
  for (int i = 1; i <= r; ++i) header.push_back("b_" + std::to_string(i));
  std::vector<std::vector<double>> rows;
  for (std::size_t m = 0; m < res.times.size(); ++m) {
    std::vector<double> row{res.times[m]};
    for (int i = 0; i < r; ++i) row.push_back(res.a_history(i, m));
    for (int i = 0; i < r; ++i) row.push_back(res.b_history(i, m));
    rows.push_back(std::move(row));
  }
  std::string suffix = "_r" + std::to_string(r) + ".csv";
  write_csv(artifact(cfg, "rom_trajectory" + suffix), header, rows);
  if (!res.qoi.times.empty()) write_qoi_csv(res.qoi, artifact(cfg, "rom_qoi" + suffix));

  // Reconstructed final field export.
  PodBasis velr = truncate_basis(vel, r), presr = truncate_basis(pres, r);
  RomState last;
  last.a = res.a_history.col(res.a_history.cols() - 1);
  last.b = res.b_history.col(res.b_history.cols() - 1);
  auto [u, p] = reconstruct(last, velr, presr);
  FeFunction uf(sys.space, 2), pf(sys.space, 1);
  uf.coeffs = u;
  pf.coeffs = p;
  export_vtk(sys.space, {{"velocity", &uf}, {"pressure", &pf}},
             artifact(cfg, "rom_final" + std::string("_r") + std::to_string(r) + ".vtk"));
  std::cout << "rom: r = " << r << ", " << res.times.size() - 1 << " steps\n";
}

namespace {

double relative_l2(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0, den = 0;
  std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / std::max(den, 1e-300));
}

}  // namespace

void cmd_analyze(const PipelineConfig& cfg) {
  require_artifact(artifact(cfg, "mesh.txt"));
  require_artifact(artifact(cfg, "snapshots.bin"));
  require_artifact(artifact(cfg, "basis.bin"));
  require_artifact(artifact(cfg, "fom_qoi.csv"));
  TriMesh mesh = read_mesh_text(artifact(cfg, "mesh.txt"));
  FeSystem sys(mesh, cfg.fom.dt, cfg.fom.nu, cfg.fom.mean_velocity);
  SnapshotSet snaps = read_snapshots(artifact(cfg, "snapshots.bin"));
  auto [vel, pres] = read_basis(artifact(cfg, "basis.bin"));
  QoiSeries fom_qoi = read_qoi_csv(artifact(cfg, "fom_qoi.csv"));

  const int r_max = std::min(cfg.analyze_r_max, vel.r());

  // Inf-sup and saturation constants per r.
  std::vector<std::vector<double>> is_rows;
  for (int r = 1; r <= r_max; ++r) {
    MatX vm = vel.modes.leftCols(r), pm = pres.modes.leftCols(r);
    double beta = inf_sup_constant(vm, pm, sys);
    SaturationResult sat = saturation_constant(vm, pm, sys);
    is_rows.push_back({static_cast<double>(r), beta, sat.alpha,
                       static_cast<double>(sat.effective_dim)});
  }
  write_csv(artifact(cfg, "infsup.csv"), {"r", "beta", "alpha", "alpha_effective_dim"},
            is_rows);

  // ROM error table across r.
  RomScheme scheme = cfg.rom_scheme == "euler" ? RomScheme::SemiImplicitEuler
                                               : RomScheme::SemiImplicitBDF2;
  std::vector<std::vector<double>> err_rows;
  for (int r = 1; r <= r_max; ++r) {
    RomRunResult res = run_rom_trajectory(sys, cfg.fom, vel, pres, snaps, r, scheme, true);
    // Lift/kinetic-energy series compared at matching times.
    std::vector<double> fom_cl, fom_ek;
    std::size_t j = 0;
    for (double t : res.qoi.times) {
      while (j < fom_qoi.times.size() && fom_qoi.times[j] < t - 0.5 * cfg.fom.dt) ++j;
      if (j < fom_qoi.times.size() && std::abs(fom_qoi.times[j] - t) < 0.5 * cfg.fom.dt) {
        fom_cl.push_back(fom_qoi.c_l[j]);
        fom_ek.push_back(fom_qoi.e_kin[j]);
      }
    }
    double lift_err = relative_l2(res.qoi.c_l, fom_cl);
    double ekin_err = relative_l2(res.qoi.e_kin, fom_ek);
    err_rows.push_back({static_cast<double>(r), vel.eigenvalue_tail(r),
                        pres.eigenvalue_tail(r), res.err_vel_fom, res.err_pres_fom,
                        res.err_vel_proj, res.err_pres_proj, lift_err, ekin_err});
  }
  write_csv(artifact(cfg, "errors.csv"),
            {"r", "lambda_tail", "gamma_tail", "err_vel_fom", "err_pres_fom",
             "err_vel_proj", "err_pres_proj", "lift_l2_rel", "ekin_l2_rel"},
            err_rows);

  // Table-1-style summary over the snapshot window.
  double cd_max = 0.0, cl_max = 0.0;
  std::vector<double> window_lift;
  for (std::size_t i = 0; i < fom_qoi.times.size(); ++i) {
    double t = fom_qoi.times[i];
    if (t >= cfg.fom.window_start && t <= cfg.fom.window_end + 1e-12) {
      cd_max = std::max(cd_max, fom_qoi.c_d[i]);
      cl_max = std::max(cl_max, fom_qoi.c_l[i]);
      window_lift.push_back(fom_qoi.c_l[i]);
    }
  }
  double st = std::nan("");
  try {
    st = strouhal(window_lift, cfg.fom.dt, 2.0 * cfg.cylinder_r, cfg.fom.mean_velocity);
  } catch (const DataError&) {
    // no shedding in the window (e.g. rectangle smoke runs)
  }

  // log-log regression of projection-relative errors against eigenvalue tails.
  auto regress = [&](int col_tail, int col_err) {
    std::vector<double> x, y;
    for (const auto& row : err_rows) {
      int r = static_cast<int>(row[0]);
      if (r < 2 || r > 10) continue;
      if (row[col_tail] <= 0.0 || row[col_err] <= 0.0) continue;
      x.push_back(std::log10(row[col_tail]));
      y.push_back(std::log10(row[col_err]));
    }
    if (x.size() < 3) return Regression{};
    return linear_regression(x, y);
  };
  Regression reg_v = regress(1, 5);
  Regression reg_p = regress(2, 6);

  std::ofstream os(artifact(cfg, "summary.txt"));
  os.precision(17);
  os << "c_d_max=" << cd_max << "\n";
  os << "c_l_max=" << cl_max << "\n";
  os << "strouhal=" << st << "\n";
  os << "tau_over_h2_max=" << sys.tau.max_tau_over_h2(mesh) << "\n";
  os << "pi_h_l2_stability=" << sys.projector.measured_l2_stability() << "\n";
  os << "energy_capture_vel_r5=" << energy_capture(vel, 5) << "\n";
  os << "energy_capture_pres_r5=" << energy_capture(pres, 5) << "\n";
  os << "regression_vel_slope=" << reg_v.slope << "\n";
  os << "regression_vel_corr=" << reg_v.correlation << "\n";
  os << "regression_pres_slope=" << reg_p.slope << "\n";
  os << "regression_pres_corr=" << reg_p.correlation << "\n";
  std::cout << "analyze: c_d_max = " << cd_max << ", c_l_max = " << cl_max
            << ", St = " << st << "\n";
}

}  // namespace lpsrom
