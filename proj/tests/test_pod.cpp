#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <memory>
#include <random>

#include "lpsrom/errors.hpp"
#include "lpsrom/pod.hpp"

using namespace lpsrom;

namespace {

struct SmallSetup {
  TriMesh mesh;
  std::unique_ptr<FeSystem> sys;
  SmallSetup(int nx, int ny) : mesh(generate_rect_mesh(nx, ny, 1.0, 1.0)) {
    sys = std::make_unique<FeSystem>(mesh, 1e-2, 1e-2, 1.0);
  }
};

MatX random_columns(int n, int cols, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> dist;
  MatX s(n, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < n; ++i) s(i, j) = dist(rng);
  return s;
}

}  // namespace

TEST_CASE("correlation: single snapshot, duplicated columns, PSD") {
  SmallSetup st(3, 3);
  const SpMat& m = st.sys->mass_s;
  const int n = st.sys->n_scalar();
  const double dt = 0.25;

  MatX one = random_columns(n, 1, 3);
  MatX k1 = build_correlation(one, m, dt);
  CHECK(k1.rows() == 1);
  CHECK(k1(0, 0) == doctest::Approx(dt * one.col(0).dot(m * one.col(0))).epsilon(1e-13));

  MatX dup(n, 3);
  dup.col(0) = one.col(0);
  dup.col(1) = one.col(0);
  dup.col(2) = one.col(0);
  MatX kd = build_correlation(dup, m, dt);
  Eigen::SelfAdjointEigenSolver<MatX> es(kd);
  int rank = 0;
  for (int i = 0; i < 3; ++i)
    if (es.eigenvalues()[i] > 1e-12 * es.eigenvalues().maxCoeff()) ++rank;
  CHECK(rank == 1);

  MatX s = random_columns(n, 8, 17);
  MatX k = build_correlation(s, m, dt);
  Eigen::SelfAdjointEigenSolver<MatX> es2(k);
  CHECK(es2.eigenvalues().minCoeff() >= -1e-12 * es2.eigenvalues().maxCoeff());

  CHECK_THROWS_AS(build_correlation(MatX(n, 0), m, dt), DataError);
}

TEST_CASE("two orthogonal equal-norm snapshots give equal eigenvalues") {
  SmallSetup st(4, 3);
  const SpMat& m = st.sys->mass_s;
  const int n = st.sys->n_scalar();
  MatX s = random_columns(n, 2, 5);
  VecX a = s.col(0);
  a /= std::sqrt(a.dot(m * a));
  VecX b = s.col(1);
  b -= a * (a.dot(m * b));
  b /= std::sqrt(b.dot(m * b));
  MatX cols(n, 2);
  cols.col(0) = a;
  cols.col(1) = b;
  PodBasis basis = compute_basis(cols, m, 0.5, 2, false);
  CHECK(basis.eigenvalues[0] == doctest::Approx(basis.eigenvalues[1]).epsilon(1e-12));
  CHECK(projection_error(cols, m, basis, 2) < 1e-12);
}

TEST_CASE("single snapshot: mode is the normalized snapshot") {
  SmallSetup st(3, 4);
  const SpMat& m = st.sys->mass_s;
  MatX s = random_columns(st.sys->n_scalar(), 1, 23);
  PodBasis basis = compute_basis(s, m, 0.1, 1, false);
  VecX expected = s.col(0) / std::sqrt(s.col(0).dot(m * s.col(0)));
  double diff = std::min((basis.modes.col(0) - expected).norm(),
                         (basis.modes.col(0) + expected).norm());
  CHECK(diff < 1e-10);
}

TEST_CASE("projection-error identity and trace identity") {
  SmallSetup st(4, 4);
  const SpMat& m = st.sys->mass_s;
  const double dt = 0.03;
  MatX s = random_columns(st.sys->n_scalar(), 12, 99);
  PodBasis basis = compute_basis(s, m, dt, 12, false);
  REQUIRE(basis.total_rank == 12);

  double trace = 0.0;
  for (int n = 0; n < s.cols(); ++n) trace += dt * s.col(n).dot(m * s.col(n));
  CHECK(basis.eigenvalue_sum() == doctest::Approx(trace).epsilon(1e-10));

  for (int r = 0; r <= 12; ++r) {
    double direct = projection_error(s, m, basis, r);
    double tail = basis.eigenvalue_tail(r);
    CHECK(direct == doctest::Approx(tail).epsilon(1e-8).scale(trace));
  }
  CHECK(projection_error(s, m, basis, 12) < 1e-10 * basis.eigenvalues[0]);
  CHECK(projection_error(s, m, basis, 0) == doctest::Approx(trace).epsilon(1e-10));
}

TEST_CASE("centered basis: identity holds for the centered ensemble") {
  SmallSetup st(4, 3);
  const SpMat& m = st.sys->mass_s;
  MatX s = random_columns(st.sys->n_scalar(), 9, 41);
  VecX mean = 5.0 * VecX::Ones(st.sys->n_scalar());
  s.colwise() += mean;
  PodBasis basis = compute_basis(s, m, 0.2, 8, true);
  REQUIRE(basis.mean_field.has_value());
  for (int r = 0; r <= 8; ++r)
    CHECK(projection_error(s, m, basis, r) ==
          doctest::Approx(basis.eigenvalue_tail(r)).epsilon(1e-8).scale(basis.eigenvalue_sum()));
}

TEST_CASE("orthonormality of modes in the mass inner product") {
  SmallSetup st(4, 4);
  const SpMat& m = st.sys->mass_s;
  MatX s = random_columns(st.sys->n_scalar(), 10, 7);
  PodBasis basis = compute_basis(s, m, 0.05, 10, false);
  MatX gram = basis.modes.transpose() * (m * basis.modes);
  CHECK((gram - MatX::Identity(10, 10)).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("eigenvalues scale as c^2, modes invariant up to sign") {
  SmallSetup st(3, 3);
  const SpMat& m = st.sys->mass_s;
  MatX s = random_columns(st.sys->n_scalar(), 6, 13);
  PodBasis b1 = compute_basis(s, m, 0.1, 6, false);
  PodBasis b2 = compute_basis(MatX(3.0 * s), m, 0.1, 6, false);
  for (int i = 0; i < 6; ++i) {
    CHECK(b2.eigenvalues[i] == doctest::Approx(9.0 * b1.eigenvalues[i]).epsilon(1e-10));
    double d = std::min((b1.modes.col(i) - b2.modes.col(i)).norm(),
                        (b1.modes.col(i) + b2.modes.col(i)).norm());
    CHECK(d < 1e-8);
  }
}

TEST_CASE("deterministic sign convention") {
  SmallSetup st(3, 3);
  const SpMat& m = st.sys->mass_s;
  MatX s = random_columns(st.sys->n_scalar(), 5, 29);
  PodBasis basis = compute_basis(s, m, 0.1, 5, false);
  for (int i = 0; i < 5; ++i) {
    double amax = basis.modes.col(i).cwiseAbs().maxCoeff();
    for (int j = 0; j < basis.modes.rows(); ++j)
      if (std::abs(basis.modes(j, i)) > 1e-12 * amax) {
        CHECK(basis.modes(j, i) > 0.0);
        break;
      }
  }
}

TEST_CASE("rank threshold raises RankError naming the numerical rank") {
  SmallSetup st(3, 3);
  const SpMat& m = st.sys->mass_s;
  MatX s = random_columns(st.sys->n_scalar(), 4, 31);
  MatX degenerate(s.rows(), 6);
  degenerate.leftCols(4) = s;
  degenerate.col(4) = s.col(0) + s.col(1);
  degenerate.col(5) = 2.0 * s.col(2);
  try {
    compute_basis(degenerate, m, 0.1, 6, false);
    FAIL("expected RankError");
  } catch (const RankError& e) {
    CHECK(std::string(e.what()).find("rank 4") != std::string::npos);
  }
}

TEST_CASE("energy capture endpoints and monotonicity") {
  SmallSetup st(3, 3);
  const SpMat& m = st.sys->mass_s;
  MatX s = random_columns(st.sys->n_scalar(), 7, 53);
  PodBasis basis = compute_basis(s, m, 0.1, 7, false);
  CHECK(energy_capture(basis, 0) == doctest::Approx(0.0));
  CHECK(energy_capture(basis, 7) == doctest::Approx(100.0).epsilon(1e-12));
  for (int r = 1; r <= 7; ++r)
    CHECK(energy_capture(basis, r) >= energy_capture(basis, r - 1));
}

TEST_CASE("stiffness norm: r=1 closed form, PSD, POD inverse estimate") {
  SmallSetup st(4, 4);
  const SpMat& mv = st.sys->mass_v;
  MatX s = random_columns(st.sys->n_vel(), 6, 71);
  PodBasis basis = compute_basis(s, mv, 0.1, 6, false);

  PodBasis one = basis;
  one.modes = basis.modes.leftCols(1);
  double s11 = stiffness_norm(one, st.sys->stiff1_v);
  CHECK(s11 == doctest::Approx(basis.modes.col(0).dot(st.sys->stiff1_v * basis.modes.col(0)))
                   .epsilon(1e-12));

  double snorm = stiffness_norm(basis, st.sys->stiff1_v);
  MatX s_r = basis.modes.transpose() * (st.sys->stiff1_v * basis.modes);
  Eigen::SelfAdjointEigenSolver<MatX> es(s_r);
  CHECK(snorm == doctest::Approx(es.eigenvalues().maxCoeff()).epsilon(1e-12));
  CHECK(es.eigenvalues().minCoeff() >= -1e-10 * snorm);

  std::mt19937 rng(5);
  std::normal_distribution<double> dist;
  for (int trial = 0; trial < 100; ++trial) {
    VecX a(6);
    for (int i = 0; i < 6; ++i) a[i] = dist(rng);
    VecX v = basis.modes * a;
    double h1 = std::sqrt(v.dot(st.sys->stiff1_v * v));
    double l2 = std::sqrt(v.dot(mv * v));
    CHECK(h1 <= std::sqrt(snorm) * l2 * (1.0 + 1e-10));
  }
}
