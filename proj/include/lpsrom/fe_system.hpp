#ifndef LPSROM_FE_SYSTEM_HPP
#define LPSROM_FE_SYSTEM_HPP

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <memory>
#include <set>

#include "lpsrom/assembly.hpp"
#include "lpsrom/lps.hpp"

namespace lpsrom {

// All time-independent operators for the equal-order P2/P2 discretization on
// one mesh. Not movable: members hold pointers into each other.
class FeSystem {
public:
  FeSystem(const TriMesh& mesh, double dt, double nu, double mean_velocity);
  FeSystem(const FeSystem&) = delete;
  FeSystem& operator=(const FeSystem&) = delete;

  const TriMesh& mesh() const { return *mesh_; }

  FeSpace space;   // P2, shared by both velocity components and pressure
  FeSpace buffer;  // P1
  BufferProjector projector;
  StabParams tau;

  SpMat mass_s;    // scalar L2 mass
  SpMat stiff1_s;  // scalar unit-viscosity stiffness
  SpMat mass_v;    // velocity block mass (2n x 2n)
  SpMat stiff1_v;  // velocity block unit stiffness
  SpMat div_op;    // (div phi_j, psi_i), n_p x 2n
  SpMat lps;       // pressure stabilization Gram
  SpMat divdiv;    // (div phi_i, div phi_j) velocity Gram

  int n_scalar() const { return space.dof_count(); }
  int n_vel() const { return 2 * space.dof_count(); }
  int n_pres() const { return space.dof_count(); }

  // Factorized pressure mass, used by weak-divergence and POD diagnostics.
  const Eigen::SimplicialLDLT<SpMat>& mass_s_ldlt() const { return *mass_s_ldlt_; }

  double velocity_l2_sq(const VecX& u) const { return u.dot(mass_v * u); }
  double velocity_h1_sq(const VecX& u) const { return u.dot(stiff1_v * u); }
  double pressure_l2_sq(const VecX& p) const { return p.dot(mass_s * p); }
  double lps_seminorm_sq(const VecX& p) const { return p.dot(lps * p); }

private:
  const TriMesh* mesh_;
  std::unique_ptr<Eigen::SimplicialLDLT<SpMat>> mass_s_ldlt_;
};

// Dirichlet data on velocity dofs (stacked [u_x; u_y] indexing).
struct VelocityDirichlet {
  std::vector<int> dofs;  // sorted, unique
  VecX values;            // full-length 2n, zero at free dofs
};

using BoundaryValueFn = std::function<Vec2(BoundaryTag, double, double)>;

VelocityDirichlet build_velocity_dirichlet(const FeSpace& space,
                                           const std::set<BoundaryTag>& constrained,
                                           const BoundaryValueFn& value);

// Direct solver for the coupled velocity-pressure system
//   [ c M + nu A + C(a) , -B^T          ] [u]   [rhs_v]
//   [ B                 , G + sigma M_p ] [p] = [rhs_p]
// with symmetric elimination of Dirichlet velocity dofs. The sparsity
// pattern is constant across steps, so the symbolic analysis is done once.
class SaddleSolver {
public:
  SaddleSolver(const FeSystem& sys, double mass_coef, double nu, double sigma,
               VelocityDirichlet dirichlet);

  // Update boundary values (same constrained set), e.g. time-dependent data.
  void set_boundary_values(const VecX& full_values);

  // advecting == nullptr solves the Stokes-type system without convection.
  // rhs_v/rhs_p are given in full (unreduced) indexing.
  struct Solution {
    VecX u;  // full velocity vector with boundary values filled in
    VecX p;
  };
  Solution solve(const FeFunction* advecting, const VecX& rhs_v, const VecX& rhs_p);

  const VelocityDirichlet& dirichlet() const { return bc_; }
  int n_free() const { return n_free_; }

private:
  const FeSystem* sys_;
  double sigma_;
  VelocityDirichlet bc_;
  std::vector<int> full_to_free_;  // velocity dofs; -1 where constrained
  std::vector<int> free_to_full_;
  int n_free_ = 0;
  int n_total_ = 0;

  SpMat k_const_;     // constant part of the reduced system matrix
  SpMat k_bc_;        // reduced rows x constrained velocity columns
  VecX rhs_bc_;       // -k_bc * g
  bool analyzed_ = false;
  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu_;
};

// Steady Stokes solve (no mass term, no convection); test oracle and
// initial-field helper.
SaddleSolver::Solution solve_stokes(const FeSystem& sys, double nu, double sigma,
                                    const VelocityDirichlet& bc, const VecX& rhs_v);

}  // namespace lpsrom

#endif
