#include "lpsrom/pod.hpp"

#include <cmath>
#include <sstream>

#include "lpsrom/errors.hpp"

namespace lpsrom {

double PodBasis::eigenvalue_tail(int r_keep) const {
  double s = 0.0;
  for (int i = r_keep; i < eigenvalues.size(); ++i) s += eigenvalues[i];
  return s;
}

MatX build_correlation(const MatX& snapshot_cols, const SpMat& mass, double dt_snap) {
  if (snapshot_cols.cols() == 0) throw DataError("build_correlation: empty snapshot set");
  if (snapshot_cols.rows() != mass.rows())
    throw SpaceMismatchError("build_correlation: snapshot length does not match mass matrix");
  MatX ms = mass * snapshot_cols;
  MatX k = dt_snap * (snapshot_cols.transpose() * ms);
  return 0.5 * (k + k.transpose());
}

PodBasis compute_basis(const MatX& snapshot_cols, const SpMat& mass, double dt_snap, int r,
                       bool center) {
  if (snapshot_cols.cols() == 0) throw DataError("compute_basis: empty snapshot set");
  MatX s = snapshot_cols;
  PodBasis basis;
  basis.dt_weight = dt_snap;
  if (center) {
    VecX mean = s.rowwise().mean();
    s.colwise() -= mean;
    basis.mean_field = mean;
  }

  MatX k = build_correlation(s, mass, dt_snap);
  Eigen::SelfAdjointEigenSolver<MatX> es(k);
  if (es.info() != Eigen::Success) throw LinAlgError("compute_basis: eigensolver failed");

  const int n_snap = static_cast<int>(s.cols());
  VecX ev = es.eigenvalues().reverse();       // descending
  MatX evec = es.eigenvectors().rowwise().reverse();
  double lmax = std::max(ev[0], 0.0);
  int rank = 0;
  for (int i = 0; i < n_snap; ++i)
    if (ev[i] > 1e-12 * lmax) ++rank;
  basis.total_rank = rank;
  if (r > rank) {
    std::ostringstream os;
    os << "compute_basis: requested r=" << r << " exceeds numerical rank " << rank;
    throw RankError(os.str());
  }

  basis.eigenvalues = ev.head(rank);
  basis.modes.resize(s.rows(), r);
  for (int i = 0; i < r; ++i)
    basis.modes.col(i) = (std::sqrt(dt_snap) / std::sqrt(ev[i])) * (s * evec.col(i));

  // Gram-Schmidt polish in the M inner product: eigenvalues near the rank
  // threshold amplify roundoff in the raw modes, while the leading-r spans
  // (hence all projections and error identities) are unchanged by the
  // triangular re-orthonormalization.
  for (int pass = 0; pass < 2; ++pass)
    for (int i = 0; i < r; ++i) {
      for (int j = 0; j < i; ++j) {
        double c = basis.modes.col(j).dot(mass * basis.modes.col(i));
        basis.modes.col(i) -= c * basis.modes.col(j);
      }
      VecX mi = mass * basis.modes.col(i);
      basis.modes.col(i) /= std::sqrt(basis.modes.col(i).dot(mi));
    }

  // Deterministic sign: first coefficient of noticeable magnitude is positive.
  for (int i = 0; i < r; ++i) {
    double amax = basis.modes.col(i).cwiseAbs().maxCoeff();
    for (int j = 0; j < basis.modes.rows(); ++j) {
      if (std::abs(basis.modes(j, i)) > 1e-12 * amax) {
        if (basis.modes(j, i) < 0.0) basis.modes.col(i) = -basis.modes.col(i);
        break;
      }
    }
  }
  return basis;
}

double projection_error(const MatX& snapshot_cols, const SpMat& mass, const PodBasis& basis,
                        int r) {
  MatX s = snapshot_cols;
  if (basis.mean_field) s.colwise() -= *basis.mean_field;
  const MatX phi = basis.modes.leftCols(r);
  double acc = 0.0;
  for (int n = 0; n < s.cols(); ++n) {
    VecX u = s.col(n);
    VecX coef = phi.transpose() * (mass * u);
    VecX res = u - phi * coef;
    acc += res.dot(mass * res);
  }
  return basis.dt_weight * acc;
}

double energy_capture(const PodBasis& basis, int r) {
  double total = basis.eigenvalue_sum();
  if (total <= 0.0) return 0.0;
  double head = 0.0;
  for (int i = 0; i < std::min<int>(r, basis.eigenvalues.size()); ++i)
    head += basis.eigenvalues[i];
  return 100.0 * head / total;
}

double stiffness_norm(const PodBasis& basis, const SpMat& h1_gram) {
  if (basis.modes.rows() != h1_gram.rows())
    throw SpaceMismatchError("stiffness_norm: basis/Gram size mismatch");
  MatX s_r = basis.modes.transpose() * (h1_gram * basis.modes);
  Eigen::SelfAdjointEigenSolver<MatX> es(0.5 * (s_r + s_r.transpose()));
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace lpsrom
