#include <gtest/gtest.h>

#include <random>

#include "remest/errors.hpp"
#include "remest/linalg.hpp"

namespace remest::linalg {
namespace {

const Mat kA{{1.8, 0.2}, {0.2, 0.8}};
const Mat kPBar0{{2.3579, -1.5419}, {-1.5419, 1.5987}};

void expect_near(const Mat& got, const Mat& want, double tol) {
  ASSERT_EQ(got.rows(), want.rows());
  ASSERT_EQ(got.cols(), want.cols());
  for (std::size_t i = 0; i < got.rows(); ++i)
    for (std::size_t j = 0; j < got.cols(); ++j) EXPECT_NEAR(got(i, j), want(i, j), tol) << i << "," << j;
}

Mat random_mat(std::mt19937_64& gen, std::size_t r, std::size_t c) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  Mat m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = u(gen);
  return m;
}

Mat random_spd(std::mt19937_64& gen, std::size_t n) {
  const Mat b = random_mat(gen, n, n);
  return b * b.transpose() + Mat::identity(n);
}

TEST(Mat, RejectsNonFiniteAndEmpty) {
  EXPECT_THROW(Mat(0, 2), DimensionError);
  EXPECT_THROW((Mat{{1.0, std::numeric_limits<double>::quiet_NaN()}}), DomainError);
  EXPECT_THROW((Mat(1, 2, {1.0, std::numeric_limits<double>::infinity()})), DomainError);
  EXPECT_THROW((Mat(2, 2, {1.0, 2.0, 3.0})), DimensionError);
}

TEST(MatMul, IdentityCases) {
  EXPECT_EQ(Mat::identity(2) * Mat::identity(2), Mat::identity(2));
  EXPECT_EQ(kA * Mat::identity(2), kA);
}

TEST(MatMul, ReferenceProduct) {
  // Entry-by-entry oracle so the check does not go through mat_mul itself.
  Mat want(2, 2);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) want(i, j) = kA(i, 0) * kPBar0(0, j) + kA(i, 1) * kPBar0(1, j);
  expect_near(kA * kPBar0, want, 1e-12);
  expect_near(kA * kPBar0, Mat{{3.9358, -2.4557}, {-0.7619, 0.9706}}, 1e-3);
}

TEST(MatMul, DimensionMismatchThrows) {
  EXPECT_THROW(Mat(2, 3) * Mat(2, 3), DimensionError);
}

TEST(Trace, Values) {
  EXPECT_DOUBLE_EQ(trace(Mat::identity(2)), 2.0);
  EXPECT_NEAR(trace(kPBar0), 3.9566, 1e-3);
  EXPECT_THROW(trace(Mat(2, 3)), DimensionError);
}

TEST(SpectralRadius, ClosedFormCases) {
  EXPECT_NEAR(spectral_radius_sq(Mat::identity(2)), 1.0, 1e-12);
  const double lead = (2.6 + std::sqrt(1.0 * 1.0 + 4 * 0.04)) / 2.0;  // eigenvalues of a symmetric 2x2
  EXPECT_NEAR(spectral_radius_sq(kA), lead * lead, 1e-12);
  EXPECT_NEAR(spectral_radius_sq(kA), 1.8385 * 1.8385, 1e-3);
  const std::vector<double> d{2.0, 0.5};
  EXPECT_NEAR(spectral_radius_sq(Mat::diagonal(d)), 4.0, 1e-12);
}

TEST(SpectralRadius, ComplexPairUsesDeterminant) {
  // Rotation scaled by 1.5: eigenvalues 1.5 e^{±iθ}.
  const Mat rot{{0.0, -1.5}, {1.5, 0.0}};
  EXPECT_NEAR(spectral_radius_sq(rot), 2.25, 1e-12);
}

TEST(SpectralRadius, PowerIterationForLargerMatrices) {
  const Mat upper{{3.0, 1.0, 0.0}, {0.0, 2.0, 1.0}, {0.0, 0.0, -1.0}};
  EXPECT_NEAR(spectral_radius_sq(upper), 9.0, 1e-8);
}

TEST(SpectralRadius, ComplexDominantPairFailsForLargerMatrices) {
  const Mat m{{0.0, -2.0, 0.0}, {2.0, 0.0, 0.0}, {0.0, 0.0, 0.5}};
  EXPECT_THROW(spectral_radius_sq(m, EigenOptions{500, 1e-12}), ConvergenceError);
}

TEST(SpdInverse, Examples) {
  EXPECT_EQ(spd_inverse(Mat::identity(2)), Mat::identity(2));
  const std::vector<double> d{2.0, 4.0};
  expect_near(spd_inverse(Mat::diagonal(d)), Mat{{0.5, 0.0}, {0.0, 0.25}}, 1e-15);
  expect_near(spd_inverse(Mat{{2.0, 1.0}, {1.0, 2.0}}), Mat{{2.0 / 3, -1.0 / 3}, {-1.0 / 3, 2.0 / 3}}, 1e-14);
}

TEST(SpdInverse, RejectsBadInput) {
  EXPECT_THROW(spd_inverse(Mat{{1.0, 2.0}, {0.0, 1.0}}), DomainError);
  EXPECT_THROW(spd_inverse(Mat{{1.0, 2.0}, {2.0, 1.0}}), DomainError);
  EXPECT_THROW(spd_inverse(Mat{{1.0, 1.0}, {1.0, 1.0}}), DomainError);
  EXPECT_THROW(spd_inverse(Mat(2, 3)), DimensionError);
}

TEST(SymmetricEigenvalues, Ascending) {
  const auto ev = symmetric_eigenvalues(Mat{{2.0, 1.0}, {1.0, 2.0}});
  ASSERT_EQ(ev.size(), 2u);
  EXPECT_NEAR(ev[0], 1.0, 1e-12);
  EXPECT_NEAR(ev[1], 3.0, 1e-12);
}

TEST(LuSolve, SolvesAndDetectsSingular) {
  const auto x = lu_solve(Mat{{0.0, 2.0}, {3.0, 1.0}}, {4.0, 5.0});
  EXPECT_NEAR(x[0], 1.0, 1e-14);
  EXPECT_NEAR(x[1], 2.0, 1e-14);
  EXPECT_THROW(lu_solve(Mat{{1.0, 2.0}, {2.0, 4.0}}, {1.0, 1.0}), DomainError);
}

TEST(CholeskyPsd, AllowsSingular) {
  const Mat l = cholesky_psd(Mat{{1.0, 1.0}, {1.0, 1.0}});
  expect_near(l * l.transpose(), Mat{{1.0, 1.0}, {1.0, 1.0}}, 1e-12);
}

TEST(LinalgProperties, Associativity) {
  std::mt19937_64 gen(7);
  for (int t = 0; t < 200; ++t) {
    const Mat a = random_mat(gen, 3, 4), b = random_mat(gen, 4, 2), c = random_mat(gen, 2, 3);
    const Mat lhs = (a * b) * c, rhs = a * (b * c);
    EXPECT_LE(max_abs_diff(lhs, rhs), 1e-9 * std::max(1.0, max_abs(lhs)));
  }
}

TEST(LinalgProperties, TraceCommutes) {
  std::mt19937_64 gen(11);
  for (int t = 0; t < 200; ++t) {
    const Mat a = random_mat(gen, 3, 3), b = random_mat(gen, 3, 3);
    EXPECT_NEAR(trace(a * b), trace(b * a), 1e-9);
  }
}

TEST(LinalgProperties, InverseRoundTrip) {
  std::mt19937_64 gen(13);
  for (int t = 0; t < 200; ++t) {
    const Mat a = random_spd(gen, 1 + t % 4);
    EXPECT_LT(max_abs_diff(a * spd_inverse(a), Mat::identity(a.rows())), 1e-8);
  }
}

TEST(LinalgProperties, SpectralRadiusScales) {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> scale(0.1, 5.0);
  for (int t = 0; t < 200; ++t) {
    const Mat a = random_mat(gen, 2, 2);
    const double c = scale(gen);
    const double base = spectral_radius_sq(a);
    EXPECT_NEAR(spectral_radius_sq(a * c), c * c * base, 1e-6 * std::max(1e-12, c * c * base));
  }
}

}  // namespace
}  // namespace remest::linalg
