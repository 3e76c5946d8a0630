#include <gtest/gtest.h>

#include "remest/errors.hpp"
#include "remest/harq.hpp"
#include "remest/rng.hpp"

namespace remest {
namespace {

TEST(HarqModel, GeometricFailureProbabilities) {
  const HarqModel m = HarqModel::geometric(0.8, 0.5, 20);
  EXPECT_DOUBLE_EQ(m.failure_prob(0), 1.0 - 0.8);
  EXPECT_NEAR(m.failure_prob(1), 0.1, 1e-15);
  EXPECT_NEAR(m.failure_prob(2), 0.05, 1e-15);
  EXPECT_THROW(m.failure_prob(21), DomainError);
  EXPECT_DOUBLE_EQ(m.failure_prob_saturated(40), m.failure_prob(20));
  for (std::size_t r = 1; r <= 20; ++r) EXPECT_LT(m.failure_prob(r), m.failure_prob(r - 1));
}

TEST(HarqModel, NoCombiningGainIsPlainArq) {
  const HarqModel m = HarqModel::geometric(0.7, 1.0, 10);
  for (std::size_t r = 0; r <= 10; ++r) EXPECT_DOUBLE_EQ(m.failure_prob(r), 1.0 - 0.7);
  EXPECT_NEAR(lambda_prime(m), 0.7, 1e-15);
}

TEST(HarqModel, RejectsInvalidParameters) {
  EXPECT_THROW(HarqModel::geometric(0.0, 0.5, 5), DomainError);
  EXPECT_THROW(HarqModel::geometric(1.2, 0.5, 5), DomainError);
  EXPECT_THROW(HarqModel::geometric(0.8, 0.0, 5), DomainError);
  EXPECT_THROW(HarqModel::tabulated({0.2, 0.3}), DomainError);
  EXPECT_THROW(HarqModel::tabulated({1.0, 0.5}), DomainError);
  EXPECT_THROW(HarqModel::tabulated({}), DomainError);
  EXPECT_NO_THROW(HarqModel::tabulated({0.3, 0.1, 0.0}));
}

TEST(LambdaPrime, Values) {
  EXPECT_NEAR(lambda_prime(HarqModel::geometric(0.8, 0.5, 20)), 0.9, 1e-15);
  EXPECT_DOUBLE_EQ(lambda_prime(HarqModel::geometric(1.0, 0.5, 20)), 1.0);
  EXPECT_NEAR(lambda_prime(HarqModel::tabulated({0.4, 0.1, 0.3 / 4})), 0.9, 1e-15);
}

TEST(StabilityCheck, ReferenceSetting) {
  const StabilityReport rep = stability_check(HarqModel::geometric(0.8, 0.5, 20), 3.3801);
  EXPECT_TRUE(rep.stable);
  EXPECT_NEAR(rep.product, (1.0 - 0.9) * 3.3801, 1e-12);
  EXPECT_NEAR(rep.lambda_prime, 0.9, 1e-15);
}

TEST(StabilityCheck, BoundaryIsUnstable) {
  // g(1) = 0.25 and ρ² = 4 put the product exactly on one.
  const StabilityReport rep = stability_check(HarqModel::tabulated({0.5, 0.25, 0.125}), 4.0);
  EXPECT_DOUBLE_EQ(rep.product, 1.0);
  EXPECT_FALSE(rep.stable);
}

TEST(StabilityCheck, PoorChannelFails) {
  const StabilityReport rep = stability_check(HarqModel::geometric(0.01, 0.99, 20), 3.3801);
  EXPECT_NEAR(rep.product, 0.99 * 0.99 * 3.3801, 1e-12);
  EXPECT_FALSE(rep.stable);
}

TEST(StabilityCheck, Monotone) {
  const double rhos[] = {1.5, 3.38, 8.0};
  const double lambdas[] = {0.2, 0.5, 0.8, 0.95};
  const double hs[] = {0.1, 0.5, 0.9, 1.0};
  for (double rho : rhos)
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) {
        const bool base = stability_check(HarqModel::geometric(lambdas[i], hs[j], 10), rho).stable;
        if (!base) continue;
        if (i + 1 < 4) EXPECT_TRUE(stability_check(HarqModel::geometric(lambdas[i + 1], hs[j], 10), rho).stable);
        if (j > 0) EXPECT_TRUE(stability_check(HarqModel::geometric(lambdas[i], hs[j - 1], 10), rho).stable);
        EXPECT_TRUE(stability_check(HarqModel::geometric(lambdas[i], hs[j], 10), rho * 0.9).stable);
      }
}

TEST(SampleDetection, DegenerateProbabilities) {
  const HarqModel m = HarqModel::tabulated({0.6, 0.0});
  const HarqModel always_fail = HarqModel::tabulated({0.999999999, 0.999999999});
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(sample_detection(m, 1, rng), Detection::success);
  int fails = 0;
  for (int i = 0; i < 1000; ++i) fails += sample_detection(always_fail, 0, rng) == Detection::failure;
  EXPECT_EQ(fails, 1000);
}

TEST(SampleDetection, EmpiricalSuccessRate) {
  const HarqModel m = HarqModel::geometric(0.8, 0.5, 20);
  Rng rng(2024);
  int ok = 0;
  const int n = 1'000'000;
  for (int i = 0; i < n; ++i) ok += sample_detection(m, 0, rng) == Detection::success;
  EXPECT_NEAR(static_cast<double>(ok) / n, 0.8, 0.002);
}

TEST(SampleDetection, Reproducible) {
  const HarqModel m = HarqModel::geometric(0.8, 0.5, 20);
  Rng a = Rng::for_stream(9, 4), b = Rng::for_stream(9, 4), c = Rng::for_stream(9, 5);
  bool differs = false;
  for (int i = 0; i < 500; ++i) {
    const Detection da = sample_detection(m, i % 3, a);
    EXPECT_EQ(da, sample_detection(m, i % 3, b));
    differs |= da != sample_detection(m, i % 3, c);
  }
  EXPECT_TRUE(differs);
}

}  // namespace
}  // namespace remest
