#include <gtest/gtest.h>

#include <cmath>

#include "dynsamp/numkit.hpp"
#include "dynsamp/random.hpp"
#include "oracle_values.hpp"
#include "test_support.hpp"

using namespace dynsamp;
using namespace testing_support;

TEST(Svd, IdentityAndDiagonal) {
  EXPECT_TRUE(numkit::singular_values(numkit::identity(2)).isApprox(Eigen::Vector2d(1, 1)));
  EXPECT_TRUE(numkit::singular_values(diag({2, 1})).isApprox(Eigen::Vector2d(2, 1)));
}

TEST(Svd, RectangularTwoByThree) {
  const RealVector s = numkit::singular_values(mat({{1, 0, 1}, {0, 1, 1}}));
  ASSERT_EQ(s.size(), 2);
  EXPECT_NEAR(s(0), std::sqrt(3.0), 1e-14);
  EXPECT_NEAR(s(1), 1.0, 1e-14);
}

TEST(Svd, FactorsReconstructInput) {
  rnd::Rng rng(11);
  const Matrix m = rnd::gaussian_matrix(4, 6, rng);
  const numkit::Svd d = numkit::svd(m);
  Matrix sigma = Matrix::Zero(4, 6);
  for (Index i = 0; i < d.sigma.size(); ++i) sigma(i, i) = d.sigma(i);
  EXPECT_LT((d.u * sigma * d.v.adjoint() - m).norm(), 1e-12 * m.norm());
  for (Index i = 1; i < d.sigma.size(); ++i) EXPECT_GE(d.sigma(i - 1), d.sigma(i));
}

TEST(EigHermitian, Examples) {
  EXPECT_TRUE(numkit::eig_hermitian(diag({1, 2})).values.isApprox(Eigen::Vector2d(1, 2)));
  const auto e = numkit::eig_hermitian(mat({{2, 1}, {1, 2}}));
  EXPECT_NEAR(e.values(0), 1.0, 1e-14);
  EXPECT_NEAR(e.values(1), 3.0, 1e-14);
  EXPECT_EQ(numkit::eig_hermitian(Matrix::Zero(3, 3)).values.norm(), 0.0);
}

TEST(EigHermitian, RejectsNonHermitian) {
  try {
    numkit::eig_hermitian(mat({{1, 2}, {0, 1}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::invalid_input);
  }
}

TEST(Pinv, Examples) {
  EXPECT_LT((numkit::pinv(numkit::identity(3)) - numkit::identity(3)).norm(), 1e-15);
  EXPECT_LT((numkit::pinv(diag({2, 0})) - diag({0.5, 0})).norm(), 1e-15);
  const Matrix ones = mat({{1, 1}, {1, 1}});
  EXPECT_LT((numkit::pinv(ones) - 0.25 * ones).norm(), 1e-15);
}

TEST(Pinv, PenroseIdentitiesOnRandomRankDeficient) {
  rnd::Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix m = rnd::gaussian_matrix(5, 2, rng) * rnd::gaussian_matrix(2, 4, rng);
    const Matrix p = numkit::pinv(m);
    const double s = m.norm();
    EXPECT_LT((m * p * m - m).norm(), 1e-10 * s);
    EXPECT_LT((p * m * p - p).norm(), 1e-10 * p.norm());
    EXPECT_LT((m * p - (m * p).adjoint()).norm(), 1e-10);
    EXPECT_LT((p * m - (p * m).adjoint()).norm(), 1e-10);
  }
}

TEST(SqrtPsd, Examples) {
  EXPECT_LT((numkit::sqrt_psd(diag({4, 9})) - diag({2, 3})).norm(), 1e-14);
  EXPECT_LT((numkit::sqrt_psd(numkit::identity(3)) - numkit::identity(3)).norm(), 1e-14);
  const Matrix m = mat({{2, 1}, {1, 2}});
  const Matrix r = numkit::sqrt_psd(m);
  EXPECT_LT((r * r - m).norm(), 1e-14);
  EXPECT_TRUE(numkit::is_hermitian(r));
}

TEST(SqrtPsd, RejectsIndefinite) {
  try {
    numkit::sqrt_psd(diag({1, -1}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::not_psd);
  }
}

TEST(InvSqrt, InvertsSqrt) {
  const Matrix m = mat({{2, 1}, {1, 2}});
  const Matrix a = numkit::inv_sqrt_pd(m);
  EXPECT_LT((a * m * a - numkit::identity(2)).norm(), 1e-13);
}

TEST(SpectralRadius, Examples) {
  EXPECT_NEAR(numkit::spectral_radius(diag({0.5, 0.75})), 0.75, 1e-15);
  EXPECT_NEAR(numkit::spectral_radius(nilpotent_shift(2)), 0.0, 1e-15);
  EXPECT_NEAR(numkit::spectral_radius(circulant_shift(3)), 1.0, 1e-14);
}

TEST(Stein, ScalarGeometricSeries) {
  const auto s = numkit::solve_stein(mat({{0.5}}), mat({{1}}));
  EXPECT_NEAR(s.s(0, 0).real(), 4.0 / 3.0, 1e-14);
}

TEST(Stein, ZeroOperatorReturnsRhs) {
  const Matrix c = mat({{2, 1}, {1, 3}});
  EXPECT_LT((numkit::solve_stein(Matrix::Zero(2, 2), c).s - c).norm(), 1e-15);
}

TEST(Stein, DiagonalClosedFormMatchesOracle) {
  const Vector phi = vec({std::sqrt(3.0) / 2, std::sqrt(7.0) / 4});
  for (auto method : {numkit::SteinMethod::vectorized_solve, numkit::SteinMethod::doubling_iteration}) {
    const auto sol = numkit::solve_stein(diag({0.5, 0.75}), phi * phi.adjoint(), 1e-12, method);
    EXPECT_NEAR(sol.s(0, 0).real(), 1.0, 1e-13);
    EXPECT_NEAR(sol.s(1, 1).real(), 1.0, 1e-13);
    EXPECT_NEAR(sol.s(0, 1).real(), oracle::kSteinOffDiagonal, 1e-13);
    EXPECT_EQ(sol.method, method);
    const auto e = numkit::eig_hermitian(sol.s);
    EXPECT_NEAR(e.values(0), oracle::kSteinEigLow, 1e-13);
    EXPECT_NEAR(e.values(1), oracle::kSteinEigHigh, 1e-13);
  }
}

TEST(Stein, DivergentSeriesRejected) {
  try {
    numkit::solve_stein(circulant_shift(3), numkit::identity(3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::divergent_series);
  }
}

TEST(Stein, LargeDimensionUsesDoubling) {
  rnd::Rng rng(5);
  const Matrix t = rnd::with_spectral_radius(80, 0.8, rng);
  const Matrix g = rnd::gaussian_matrix(80, 2, rng);
  const auto sol = numkit::solve_stein(t, g * g.adjoint());
  EXPECT_EQ(sol.method, numkit::SteinMethod::doubling_iteration);
  EXPECT_LE(sol.residual, 1e-12 * (1.0 + (g * g.adjoint()).norm()));
}

// Property: on random contractive inputs both solver paths agree, the
// solution is Hermitian, and the residual is within tolerance.
TEST(SteinProperty, MethodsAgreeAndSolutionHermitian) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    rnd::Rng rng(seed);
    const Index d = rnd::uniform_int(rng, 1, 8);
    const Matrix t = rnd::with_spectral_radius(d, rnd::uniform(rng, 0.0, 0.95), rng);
    const Matrix g = rnd::gaussian_matrix(d, 1, rng);
    const Matrix c = g * g.adjoint();
    const auto a = numkit::solve_stein(t, c, 1e-12, numkit::SteinMethod::vectorized_solve);
    const auto b = numkit::solve_stein(t, c, 1e-12, numkit::SteinMethod::doubling_iteration);
    EXPECT_LT((a.s - b.s).norm(), 1e-9 * (1.0 + a.s.norm())) << "seed " << seed;
    EXPECT_LE((a.s - a.s.adjoint()).norm(), 1e-12 * a.s.norm());
    EXPECT_GE(numkit::eig_hermitian(a.s).values(0), -1e-10 * a.s.norm());
  }
}

TEST(Rank, NumericalRankAndRange) {
  const Matrix m = mat({{1, 0, 1}, {0, 1, 1}, {1, 1, 2}});
  EXPECT_EQ(numkit::numerical_rank(m), 2);
  const Matrix q = numkit::orthonormal_range(m);
  EXPECT_EQ(q.cols(), 2);
  EXPECT_LT((q.adjoint() * q - numkit::identity(2)).norm(), 1e-14);
  EXPECT_LT((m - q * (q.adjoint() * m)).norm(), 1e-13);
}
