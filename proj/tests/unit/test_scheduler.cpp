#include <gtest/gtest.h>

#include <pcae/error.hpp>
#include <pcae/random.hpp>
#include <pcae/scheduler.hpp>

using namespace pcae;

namespace {

// Piecewise weights written out from the update rule for a given pivot j (1-based).
std::vector<double> expected_gammas(std::size_t d, std::size_t j) {
  std::vector<double> g(d);
  for (std::size_t i = 1; i <= d; ++i) {
    if (i < j) g[i - 1] = 0.5 * double(i) / double(j - 1);
    else if (i == j) g[i - 1] = 1.0;
    else g[i - 1] = 1.0 + 0.5 * double(i - j) / double(d - j);
  }
  return g;
}

// Variances whose pivot lands on j for threshold 0.99.
std::vector<double> variances_with_pivot(std::size_t d, std::size_t j) {
  std::vector<double> v(d, 0.0);
  for (std::size_t i = 0; i < j; ++i) v[i] = 1.0;
  return v;
}

void expect_contract(const std::vector<double>& g) {
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_GT(g[i], 0.0);
    EXPECT_LE(g[i], 1.5);
    if (i > 0) EXPECT_GT(g[i], g[i - 1]);
  }
}

}  // namespace

TEST(InitGammas, Examples) {
  const auto s = init_gammas(16);
  EXPECT_DOUBLE_EQ(s.gammas[0], 0.11875);
  EXPECT_DOUBLE_EQ(s.gammas[15], 1.9);
  EXPECT_EQ(s.period, 10u);
  EXPECT_DOUBLE_EQ(init_gammas(1).gammas[0], 1.9);
  const auto big = init_gammas(64);
  for (std::size_t i = 1; i < 64; ++i) EXPECT_GT(big.gammas[i], big.gammas[i - 1]);
  EXPECT_THROW(init_gammas(0), PreconditionError);
}

TEST(UpdateGammas, PivotFourOfSixteen) {
  const auto s = update_gammas(init_gammas(16), variances_with_pivot(16, 4));
  EXPECT_EQ(s.pivot, 4u);
  EXPECT_NEAR(s.gammas[1], 1.0 / 3.0, 1e-15);
  EXPECT_EQ(s.gammas[3], 1.0);
  EXPECT_DOUBLE_EQ(s.gammas[9], 1.25);
}

TEST(UpdateGammas, PivotAtBoundaries) {
  const auto first = update_gammas(init_gammas(8), variances_with_pivot(8, 1));
  EXPECT_EQ(first.pivot, 1u);
  EXPECT_EQ(first.gammas[0], 1.0);
  for (std::size_t i = 2; i <= 8; ++i) EXPECT_DOUBLE_EQ(first.gammas[i - 1], 1.0 + 0.5 * double(i - 1) / 7.0);
  const auto last = update_gammas(init_gammas(8), std::vector<double>(8, 1.0));
  EXPECT_EQ(last.pivot, 8u);
  EXPECT_EQ(last.gammas[7], 1.0);
  EXPECT_DOUBLE_EQ(last.gammas[0], 0.5 / 7.0);
}

TEST(UpdateGammas, BruteForcePivotScan) {
  const std::vector<double> v{10, 5, 1, 0.01, 0, 0, 0, 0};
  double total = 0.0;
  for (double x : v) total += x;
  std::size_t j = 0;
  double cum = 0.0;
  for (std::size_t i = 0; i < v.size() && j == 0; ++i) {
    cum += v[i];
    if (cum > 0.99 * total) j = i + 1;
  }
  ASSERT_EQ(j, 3u);
  const auto s = update_gammas(init_gammas(8), v);
  EXPECT_EQ(s.pivot, j);
  const auto want = expected_gammas(8, j);
  for (std::size_t i = 0; i < 8; ++i) EXPECT_DOUBLE_EQ(s.gammas[i], want[i]);
}

TEST(UpdateGammas, StrictInequalityAtThreshold) {
  // cumulative after two coordinates is exactly half: not strictly above t = 0.5
  auto s = init_gammas(4, 0.5);
  s = update_gammas(s, std::vector<double>{1, 1, 1, 1});
  EXPECT_EQ(s.pivot, 3u);
}

TEST(UpdateGammas, AllZeroVariancesNoOp) {
  const auto before = init_gammas(5);
  const auto after = update_gammas(before, std::vector<double>(5, 0.0), 10);
  EXPECT_EQ(after.gammas, before.gammas);
  EXPECT_EQ(after.pivot, 0u);
}

TEST(UpdateGammas, LengthMismatch) {
  EXPECT_THROW(update_gammas(init_gammas(5), std::vector<double>(4, 1.0)), ShapeError);
}

TEST(UpdateGammas, ContractOverRandomVariances) {
  Rng rng = make_rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 500; ++t) {
    const std::size_t d = 1 + t % 40;
    std::vector<double> v(d);
    for (double& x : v) x = u(rng) * u(rng);
    const auto s = update_gammas(init_gammas(d), v);
    expect_contract(s.gammas);
    EXPECT_LT(s.gammas.back(), 2.0);
    // idempotent for fixed variances
    EXPECT_EQ(update_gammas(s, v).gammas, s.gammas);
  }
}

TEST(ShouldUpdate, Examples) {
  GammaSchedule s = init_gammas(4);
  EXPECT_TRUE(should_update(s, 10));
  EXPECT_FALSE(should_update(s, 9));
}

TEST(ShouldUpdate, EveryPeriodOverHundredEpochs) {
  GammaSchedule s = init_gammas(4);
  std::vector<std::size_t> fired;
  for (std::size_t e = 1; e <= 100; ++e) {
    if (should_update(s, e)) {
      fired.push_back(e);
      s = update_gammas(s, std::vector<double>{4, 3, 2, 1}, e);
    }
  }
  ASSERT_EQ(fired.size(), 10u);
  for (std::size_t i = 0; i < fired.size(); ++i) EXPECT_EQ(fired[i], 10 * (i + 1));
}

TEST(StaticModes, NeverUpdated) {
  const auto arith = init_gammas(6, 0.99, 10, ScheduleMode::arithmetic);
  EXPECT_EQ(update_gammas(arith, std::vector<double>{1, 0, 0, 0, 0, 0}).gammas, arith.gammas);
  const auto geo = init_gammas(6, 0.99, 10, ScheduleMode::geometric);
  EXPECT_NEAR(geo.gammas.front(), 1.9 / 6.0, 1e-15);
  EXPECT_NEAR(geo.gammas.back(), 1.9, 1e-12);
  for (std::size_t i = 2; i < 6; ++i)
    EXPECT_NEAR(geo.gammas[i] / geo.gammas[i - 1], geo.gammas[1] / geo.gammas[0], 1e-12);
}
