#include "lpsrom/fe_system.hpp"

#include <algorithm>

#include "lpsrom/errors.hpp"

namespace lpsrom {

FeSystem::FeSystem(const TriMesh& mesh, double dt, double nu, double mean_velocity)
    : space(mesh, 2),
      buffer(mesh, 1),
      projector(space, buffer),
      tau(compute_tau(mesh, dt, nu, mean_velocity)),
      mesh_(&mesh) {
  mass_s = assemble_mass(space);
  stiff1_s = assemble_stiffness(space, 1.0);
  mass_v = block_diag2(mass_s);
  stiff1_v = block_diag2(stiff1_s);
  div_op = assemble_divergence(space, space);
  lps = assemble_lps_matrix(space, projector, tau);
  divdiv = assemble_divdiv(space);
  mass_s_ldlt_ = std::make_unique<Eigen::SimplicialLDLT<SpMat>>(mass_s);
  if (mass_s_ldlt_->info() != Eigen::Success)
    throw LinAlgError("FeSystem: mass matrix factorization failed");
}

VelocityDirichlet build_velocity_dirichlet(const FeSpace& space,
                                           const std::set<BoundaryTag>& constrained,
                                           const BoundaryValueFn& value) {
  const int n = space.dof_count();
  VelocityDirichlet bc;
  bc.values = VecX::Zero(2 * n);
  for (const auto& [tag, dofs] : space.boundary_dofs()) {
    if (!constrained.count(tag)) continue;
    for (int d : dofs) {
      const Vec2& p = space.dof_coord(d);
      Vec2 v = value(tag, p.x, p.y);
      bc.dofs.push_back(d);
      bc.dofs.push_back(d + n);
      bc.values[d] = v.x;
      bc.values[d + n] = v.y;
    }
  }
  std::sort(bc.dofs.begin(), bc.dofs.end());
  bc.dofs.erase(std::unique(bc.dofs.begin(), bc.dofs.end()), bc.dofs.end());
  return bc;
}

SaddleSolver::SaddleSolver(const FeSystem& sys, double mass_coef, double nu, double sigma,
                           VelocityDirichlet dirichlet)
    : sys_(&sys), sigma_(sigma), bc_(std::move(dirichlet)) {
  const int nv = sys.n_vel();
  const int np = sys.n_pres();

  full_to_free_.assign(nv, 0);
  for (int d : bc_.dofs) full_to_free_[d] = -1;
  for (int d = 0; d < nv; ++d)
    if (full_to_free_[d] == 0) {
      full_to_free_[d] = n_free_++;
      free_to_full_.push_back(d);
    }
  n_total_ = n_free_ + np;

  // Constant blocks: cM + nu A in the velocity block, -B^T / B coupling and
  // G + sigma M_p in the pressure block.
  std::vector<Triplet> kt, bt;
  auto add = [&](int row, int col_full_vel, double v) {
    int c = full_to_free_[col_full_vel];
    if (c >= 0)
      kt.emplace_back(row, c, v);
    else
      bt.emplace_back(row, static_cast<int>(std::lower_bound(bc_.dofs.begin(), bc_.dofs.end(),
                                                             col_full_vel) -
                                            bc_.dofs.begin()),
                      v);
  };

  SpMat kv = mass_coef * sys.mass_v + nu * sys.stiff1_v;
  for (int c = 0; c < kv.outerSize(); ++c)
    for (SpMat::InnerIterator it(kv, c); it; ++it) {
      int rf = full_to_free_[it.row()];
      if (rf < 0) continue;
      add(rf, it.col(), it.value());
    }
  for (int c = 0; c < sys_->div_op.outerSize(); ++c)
    for (SpMat::InnerIterator it(sys_->div_op, c); it; ++it) {
      // it.row() = pressure dof, it.col() = velocity dof
      add(n_free_ + it.row(), it.col(), it.value());  // continuity: B u
      int cf = full_to_free_[it.col()];
      if (cf >= 0) kt.emplace_back(cf, n_free_ + it.row(), -it.value());  // -B^T p
    }
  SpMat kp = sys.lps + sigma * sys.mass_s;
  for (int c = 0; c < kp.outerSize(); ++c)
    for (SpMat::InnerIterator it(kp, c); it; ++it)
      kt.emplace_back(n_free_ + it.row(), n_free_ + it.col(), it.value());

  k_const_ = SpMat(n_total_, n_total_);
  k_const_.setFromTriplets(kt.begin(), kt.end());
  k_bc_ = SpMat(n_total_, static_cast<int>(bc_.dofs.size()));
  k_bc_.setFromTriplets(bt.begin(), bt.end());

  VecX g(bc_.dofs.size());
  for (std::size_t i = 0; i < bc_.dofs.size(); ++i) g[i] = bc_.values[bc_.dofs[i]];
  rhs_bc_ = -(k_bc_ * g);
}

void SaddleSolver::set_boundary_values(const VecX& full_values) {
  bc_.values = full_values;
  VecX g(bc_.dofs.size());
  for (std::size_t i = 0; i < bc_.dofs.size(); ++i) g[i] = bc_.values[bc_.dofs[i]];
  rhs_bc_ = -(k_bc_ * g);
}

SaddleSolver::Solution SaddleSolver::solve(const FeFunction* advecting, const VecX& rhs_v,
                                           const VecX& rhs_p) {
  const int np = sys_->n_pres();
  SpMat k = k_const_;
  VecX rhs = VecX::Zero(n_total_);
  rhs += rhs_bc_;

  if (advecting != nullptr) {
    SpMat cs = assemble_convection_scalar(sys_->space, *advecting);
    const int ns = sys_->n_scalar();
    std::vector<Triplet> ct;
    ct.reserve(2 * cs.nonZeros());
    for (int c = 0; c < cs.outerSize(); ++c)
      for (SpMat::InnerIterator it(cs, c); it; ++it) {
        for (int comp = 0; comp < 2; ++comp) {
          int rfull = it.row() + comp * ns, cfull = it.col() + comp * ns;
          int rf = full_to_free_[rfull];
          if (rf < 0) continue;
          int cf = full_to_free_[cfull];
          if (cf >= 0)
            ct.emplace_back(rf, cf, it.value());
          else
            rhs[rf] -= it.value() * bc_.values[cfull];
        }
      }
    SpMat cm(n_total_, n_total_);
    cm.setFromTriplets(ct.begin(), ct.end());
    k += cm;
  }

  for (int i = 0; i < n_free_; ++i) rhs[i] += rhs_v[free_to_full_[i]];
  for (int i = 0; i < np; ++i) rhs[n_free_ + i] += rhs_p[i];

  if (!analyzed_) {
    lu_.analyzePattern(k);
    analyzed_ = true;
  }
  lu_.factorize(k);
  if (lu_.info() != Eigen::Success)
    throw LinAlgError("SaddleSolver: sparse LU factorization failed (singular system?)");
  VecX x = lu_.solve(rhs);

  Solution sol;
  sol.u = bc_.values;
  for (int i = 0; i < n_free_; ++i) sol.u[free_to_full_[i]] = x[i];
  sol.p = x.tail(np);
  return sol;
}

SaddleSolver::Solution solve_stokes(const FeSystem& sys, double nu, double sigma,
                                    const VelocityDirichlet& bc, const VecX& rhs_v) {
  SaddleSolver solver(sys, 0.0, nu, sigma, bc);
  return solver.solve(nullptr, rhs_v, VecX::Zero(sys.n_pres()));
}

}  // namespace lpsrom
