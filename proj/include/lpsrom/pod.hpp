#ifndef LPSROM_POD_HPP
#define LPSROM_POD_HPP

#include <optional>

#include "lpsrom/fom.hpp"

namespace lpsrom {

// POD basis of one field, built by the method of snapshots in the L2 inner
// product induced by the mass matrix.
struct PodBasis {
  MatX modes;        // n x r, M-orthonormal columns
  VecX eigenvalues;  // all positive eigenvalues (descending), length = rank
  std::optional<VecX> mean_field;
  int total_rank = 0;
  double dt_weight = 0.0;

  int r() const { return static_cast<int>(modes.cols()); }
  double eigenvalue_tail(int r_keep) const;  // sum of lambda_i for i > r_keep
  double eigenvalue_sum() const { return eigenvalues.sum(); }
};

// K = dt * S^T M S for the snapshot columns S; symmetric PSD.
MatX build_correlation(const MatX& snapshot_cols, const SpMat& mass, double dt_snap);

// Eigen-decomposition of the correlation matrix and mode construction.
// center=true subtracts the temporal mean from the columns first and stores
// it as mean_field. Throws RankError when r exceeds the numerical rank
// (eigenvalues above 1e-12 * lambda_1).
PodBasis compute_basis(const MatX& snapshot_cols, const SpMat& mass, double dt_snap, int r,
                       bool center);

// Left-hand side of the POD projection-error identity, computed directly:
// dt * sum_n || s_n - sum_{i<=r} (s_n, phi_i)_M phi_i ||_M^2.
// Must equal the eigenvalue tail of the basis.
double projection_error(const MatX& snapshot_cols, const SpMat& mass, const PodBasis& basis,
                        int r);

// 100 * sum_{i<=r} lambda_i / sum_i lambda_i.
double energy_capture(const PodBasis& basis, int r);

// 2-norm of the reduced Gram [S_r]_ij = (grad phi_j, grad phi_i).
double stiffness_norm(const PodBasis& basis, const SpMat& h1_gram);

// Snapshot-matrix views of a SnapshotSet.
inline const MatX& velocity_snapshots(const SnapshotSet& s) { return s.velocity; }
inline const MatX& pressure_snapshots(const SnapshotSet& s) { return s.pressure; }

}  // namespace lpsrom

#endif
