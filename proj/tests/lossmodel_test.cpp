#include "fepp/errors.hpp"
#include "fepp/lossmodel.hpp"
#include "fepp/protocol.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace fepp;

namespace {
LossParams reference_setup() { return {0.28, 0.2, 0.9, std::nullopt}; }
}  // namespace

TEST(TotalSuccessProb, ReportedOperatingPoint) {
  // 0.68 * 0.04 * 0.81 * 0.0784
  EXPECT_NEAR(total_success_prob(0.8, reference_setup()), 1.7273088e-3, 1e-15);
}

TEST(TotalSuccessProb, AtThreshold) {
  EXPECT_NEAR(total_success_prob(0.5, reference_setup()), 0.5 * 0.04 * 0.81 * 0.0784, 1e-16);
}

TEST(TotalSuccessProb, LosslessReducesToIdeal) {
  for (double f = 0.05; f < 1.0; f += 0.05) {
    EXPECT_EQ(total_success_prob(f, LossParams::lossless()), success_prob_ideal(f));
  }
}

TEST(TotalSuccessProb, MonotoneInEachEfficiency) {
  const double base = total_success_prob(0.8, reference_setup());
  LossParams lp = reference_setup();
  lp.eta_d = 0.3;
  EXPECT_GT(total_success_prob(0.8, lp), base);
  lp = reference_setup();
  lp.t_f = 0.25;
  EXPECT_GT(total_success_prob(0.8, lp), base);
  lp = reference_setup();
  lp.t_o = 0.95;
  EXPECT_GT(total_success_prob(0.8, lp), base);
  EXPECT_GT(total_success_prob(0.85, reference_setup()), base);
}

TEST(TotalSuccessProb, DomainErrors) {
  LossParams lp = reference_setup();
  lp.eta_d = 0.0;
  EXPECT_THROW(total_success_prob(0.8, lp), DomainError);
  lp = reference_setup();
  lp.t_f = 1.2;
  EXPECT_THROW(total_success_prob(0.8, lp), DomainError);
  EXPECT_THROW(total_success_prob(1.0, reference_setup()), DomainError);
}

TEST(Sweep, EndpointsAndMonotonicity) {
  const double eps = 1e-6;
  const auto rows = sweep_success_prob(0.5 + eps, 1.0 - eps, 101, reference_setup());
  ASSERT_EQ(rows.size(), 101u);
  EXPECT_EQ(rows.front().fidelity, 0.5 + eps);
  EXPECT_EQ(rows.back().fidelity, 1.0 - eps);
  EXPECT_NEAR(rows.front().total_prob, 1.270e-3, 1e-6);
  EXPECT_NEAR(rows.back().total_prob, 2.54e-3, 1e-5);
  for (std::size_t k = 1; k < rows.size(); ++k) EXPECT_GT(rows[k].total_prob, rows[k - 1].total_prob);
}

TEST(Sweep, TwoStepsAreTheEndpoints) {
  const auto rows = sweep_success_prob(0.6, 0.9, 2, reference_setup());
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].fidelity, 0.6);
  EXPECT_EQ(rows[1].fidelity, 0.9);
}

TEST(Sweep, LosslessCurveIsIdealCurve) {
  for (const auto& row : sweep_success_prob(0.55, 0.95, 9, LossParams::lossless())) {
    EXPECT_EQ(row.total_prob, row.ideal_prob);
  }
}

TEST(Sweep, RangeErrors) {
  EXPECT_THROW(sweep_success_prob(0.5, 0.9, 5, reference_setup()), DomainError);
  EXPECT_THROW(sweep_success_prob(0.6, 1.0, 5, reference_setup()), DomainError);
  EXPECT_THROW(sweep_success_prob(0.9, 0.6, 5, reference_setup()), DomainError);
  EXPECT_THROW(sweep_success_prob(0.6, 0.9, 1, reference_setup()), DomainError);
}

TEST(ExpectedTime, Examples) {
  LossParams lp = reference_setup();
  lp.pair_rate = 1e4;
  const ExpectedTime t = expected_time_to_success(1.7273088e-3, lp);
  EXPECT_TRUE(t.finite);
  EXPECT_NEAR(t.seconds, 0.0579, 1e-4);

  lp.pair_rate = 1.0;
  EXPECT_EQ(expected_time_to_success(1.0, lp).seconds, 1.0);
  lp.pair_rate = 2.0;
  EXPECT_EQ(expected_time_to_success(0.5, lp).seconds, 1.0);

  const ExpectedTime never = expected_time_to_success(0.0, lp);
  EXPECT_FALSE(never.finite);
  EXPECT_TRUE(std::isinf(never.seconds));
}

TEST(ExpectedTime, RequiresRate) {
  EXPECT_THROW(expected_time_to_success(0.5, reference_setup()), ContractError);
  LossParams lp = reference_setup();
  lp.pair_rate = -1.0;
  EXPECT_THROW(expected_time_to_success(0.5, lp), DomainError);
}
