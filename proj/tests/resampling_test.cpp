#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "boon/error.hpp"
#include "boon/estimators.hpp"
#include "boon/resampling.hpp"
#include "boon/summary.hpp"

using namespace boon;

namespace {

ResamplingConfig config(std::size_t replicates, std::uint64_t seed = 1, unsigned threads = 0) {
  ResamplingConfig c;
  c.replicates = replicates;
  c.seed = seed;
  c.threads = threads;
  return c;
}

ResultPool gaussian_pool(const GaussianParams& p, std::size_t m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return ResultPool(simulate_records(p, m, rng));
}

const ResultPool kToy({{0.1, 10.0}, {0.2, 20.0}, {0.3, 30.0}});
const GaussianParams kStandard{.mu_val = 0, .mu_test = 0, .sigma_val = 1, .sigma_test = 1, .rho = 1};

}  // namespace

TEST(ResamplingConfig, Validation) {
  EXPECT_THROW(bootstrap_ci(kToy, test_mean, config(99)), Error);
  auto c = config(100);
  c.level = 1.0;
  EXPECT_THROW(bootstrap_ci(kToy, test_mean, c), Error);
  c.level = 0.0;
  EXPECT_THROW(bootstrap_ci(kToy, test_mean, c), Error);
  c = config(100);
  c.bandwidth = Bandwidth::fixed(-1.0);
  EXPECT_THROW(smoothed_bootstrap_ci(kToy, test_mean, c), Error);
}

TEST(PercentileInterval, LinearInterpolation) {
  std::vector<double> reps(101);
  for (int i = 0; i <= 100; ++i) reps[i] = 100 - i;
  const auto [lo, hi] = percentile_interval(reps, 0.9);
  EXPECT_DOUBLE_EQ(lo, 5.0);
  EXPECT_DOUBLE_EQ(hi, 95.0);
}

TEST(BootstrapCi, IdenticalRecordsGiveZeroWidth) {
  const ResultPool pool(std::vector<RunRecord>(12, {0.7, 64.5}));
  const auto ci = bootstrap_ci(pool, boon_statistic(5), config(500));
  EXPECT_DOUBLE_EQ(ci.lo, 64.5);
  EXPECT_DOUBLE_EQ(ci.hi, 64.5);
  EXPECT_EQ(ci.method, ResamplingMethod::bootstrap);
  EXPECT_EQ(ci.replicates, 500u);
}

TEST(BootstrapCi, MeanWidthMatchesNormalTheory) {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> g;
  std::vector<RunRecord> records(400);
  for (auto& r : records) r = {g(rng), g(rng)};
  const ResultPool pool(records);
  const auto ci = bootstrap_ci(pool, test_mean, config(20'000));
  const double expected = 2 * 1.96 * 1.0 / std::sqrt(400.0);
  EXPECT_NEAR(ci.width(), expected, 0.15 * expected);
}

TEST(BootstrapCi, BoonIntervalRespectsConvexity) {
  const auto ci = bootstrap_ci(kToy, boon_statistic(2), config(100'000));
  EXPECT_GE(ci.lo, 10.0);
  EXPECT_LE(ci.hi, 30.0);
  EXPECT_LE(ci.lo, ci.hi);
}

TEST(BootstrapCi, HigherLevelNeverNarrower) {
  const auto pool = gaussian_pool({.rho = 0.5}, 60, 3);
  double prev = 0.0;
  for (double level : {0.5, 0.8, 0.9, 0.95, 0.99}) {
    auto c = config(2000, 8);
    c.level = level;
    const auto ci = bootstrap_ci(pool, boon_statistic(5), c);
    EXPECT_GE(ci.width(), prev);
    prev = ci.width();
  }
}

TEST(BootstrapCi, DeterministicAcrossThreadCounts) {
  const auto pool = gaussian_pool({.rho = 0.3}, 50, 4);
  const auto serial = bootstrap_replicates(pool, boon_statistic(5), config(3000, 5, 1), false);
  const auto parallel = bootstrap_replicates(pool, boon_statistic(5), config(3000, 5, 7), false);
  EXPECT_EQ(serial, parallel);
  const auto other_seed = bootstrap_replicates(pool, boon_statistic(5), config(3000, 6, 7), false);
  EXPECT_NE(serial, other_seed);
}

TEST(BootstrapCi, RedrawsRareDegenerateResamples) {
  // All-identical resamples of a 5-record pool occur with probability 5/5^5 = 0.16%.
  std::vector<RunRecord> records;
  for (int i = 0; i < 5; ++i) records.push_back({double(i), double(i)});
  const ResultPool pool(records);
  std::atomic<int> calls{0};
  auto picky = [&](const ResultPool& p) {
    ++calls;
    const auto r = p.records();
    if (std::all_of(r.begin(), r.end(), [&](const RunRecord& x) { return x == r.front(); })) {
      throw Error(ErrorCode::degenerate_pool, "all identical");
    }
    return test_mean(p);
  };
  const auto c = config(10'000, 3);
  const auto reps = bootstrap_replicates(pool, picky, c, false);
  EXPECT_EQ(reps.size(), 10'000u);
  EXPECT_GT(calls.load(), 10'000);
  EXPECT_EQ(reps, bootstrap_replicates(pool, picky, config(10'000, 3, 1), false));
}

TEST(BootstrapCi, FailsLoudlyBeyondBudget) {
  try {
    bootstrap_ci(kToy, boon_statistic(5, EstimatorKind::gaussian_parametric), config(1000));
    FAIL();
  } catch (const Error& e) {
    // A 3-record resample repeats a record with probability 7/9.
    EXPECT_EQ(e.code(), ErrorCode::resampling_degenerate);
  }
}

TEST(SmoothedBootstrap, ZeroBandwidthEqualsVanilla) {
  const auto pool = gaussian_pool({.rho = 0.4}, 40, 12);
  auto c = config(2000, 99);
  c.bandwidth = Bandwidth::fixed(0.0);
  EXPECT_EQ(bootstrap_replicates(pool, boon_statistic(5), c, true),
            bootstrap_replicates(pool, boon_statistic(5), c, false));
  const auto s = smoothed_bootstrap_ci(pool, boon_statistic(5), c);
  const auto v = bootstrap_ci(pool, boon_statistic(5), c);
  EXPECT_EQ(s.lo, v.lo);
  EXPECT_EQ(s.hi, v.hi);
  EXPECT_EQ(s.method, ResamplingMethod::smoothed_bootstrap);
}

TEST(SmoothedBootstrap, WidthScalesWithBandwidth) {
  const std::size_t m = 25;
  const ResultPool pool(std::vector<RunRecord>(m, {1.0, 2.0}));
  double prev = INFINITY;
  for (double h : {1.0, 0.5, 0.1, 0.01}) {
    auto c = config(10'000, 4);
    c.bandwidth = Bandwidth::fixed(h);
    const auto ci = smoothed_bootstrap_ci(pool, test_mean, c);
    EXPECT_GT(ci.width(), 0.0);
    EXPECT_LT(ci.width(), prev);
    const double expected = 2 * 1.96 * h / std::sqrt(double(m));
    EXPECT_NEAR(ci.width(), expected, 0.15 * expected);
    prev = ci.width();
  }
}

TEST(SmoothedBootstrap, AutoBandwidthRule) {
  const auto pool = gaussian_pool({.sigma_val = 2.0, .sigma_test = 3.0, .rho = 0.1}, 64, 5);
  const auto [hv, ht] = resolve_bandwidth(pool, Bandwidth::auto_rule());
  EXPECT_NEAR(hv, sample_std(pool.validation_scores()) / 2.0, 1e-12);  // 64^(-1/6) = 1/2
  EXPECT_NEAR(ht, sample_std(pool.test_scores()) / 2.0, 1e-12);
}

TEST(SmoothedBootstrap, BestSingleModelWiderThanBoon) {
  const auto pool = gaussian_pool({.mu_test = 68.41, .sigma_val = 0.6, .sigma_test = 0.67, .rho = 0.1}, 75, 21);
  const auto c = config(10'000, 8);
  const auto single = smoothed_bootstrap_ci(pool, best_single_model, c);
  const auto boo5 = smoothed_bootstrap_ci(pool, boon_statistic(5), c);
  EXPECT_GT(single.width(), boo5.width());
}

TEST(MonteCarloCi, DegenerateDistributionCollapses) {
  const GaussianParams p{.mu_val = 3, .mu_test = 7.25, .sigma_val = 1e-9, .sigma_test = 1e-9, .rho = 0.5};
  for (auto kind : {EstimatorKind::nonparametric, EstimatorKind::gaussian_parametric}) {
    const auto ci = monte_carlo_ci_gaussian(p, 30, 5, kind, config(500));
    EXPECT_NEAR(ci.lo, 7.25, 1e-6);
    EXPECT_NEAR(ci.hi, 7.25, 1e-6);
    EXPECT_EQ(ci.method, ResamplingMethod::monte_carlo_gaussian);
  }
}

TEST(MonteCarloCi, ContainsTrueValue) {
  int covered = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto ci = monte_carlo_ci_gaussian(kStandard, 200, 5, EstimatorKind::nonparametric, config(1000, seed));
    covered += ci.contains(1.163) ? 1 : 0;
  }
  EXPECT_GE(covered, 18);
}

TEST(MonteCarloCi, SmallerPoolsAreWider) {
  double wide = 0.0, narrow = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    wide += monte_carlo_ci_gaussian(kStandard, 20, 5, EstimatorKind::nonparametric, config(200, seed)).width();
    narrow += monte_carlo_ci_gaussian(kStandard, 200, 5, EstimatorKind::nonparametric, config(200, seed)).width();
  }
  EXPECT_GT(wide / 50, narrow / 50);
}

TEST(MonteCarloCi, Errors) {
  EXPECT_THROW(monte_carlo_ci_gaussian({.sigma_val = 0}, 10, 5, EstimatorKind::nonparametric, config(100)), Error);
  EXPECT_THROW(monte_carlo_ci_gaussian(kStandard, 2, 5, EstimatorKind::gaussian_parametric, config(100)), Error);
}

TEST(Curve, FirstPointIsTheMean) {
  const auto pool = gaussian_pool({.rho = 0.3}, 100, 6);
  const std::vector<std::size_t> ms{1};
  const auto pts = best_of_m_curve(pool, ms, {.samples_per_m = 50'000, .band = false}, config(100));
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_NEAR(pts[0].expected_best_test, test_mean(pool), 3 * pts[0].mc_standard_error);
  EXPECT_FALSE(pts[0].ci);
}

TEST(Curve, ToyPoolMatchesExactValue) {
  const std::vector<std::size_t> ms{2};
  const auto pts = best_of_m_curve(kToy, ms, {.samples_per_m = 200'000, .band = false}, config(100));
  EXPECT_NEAR(pts[0].expected_best_test, 220.0 / 9.0, 0.05);
}

TEST(Curve, AgreesWithNonparametricEstimator) {
  const auto pool = gaussian_pool({.rho = 0.6}, 40, 8);
  std::vector<std::size_t> ms{1, 2, 3, 5, 8, 13, 40};
  const auto pts = best_of_m_curve(pool, ms, {.samples_per_m = 20'000, .band = false}, config(100, 2));
  for (const auto& p : pts) {
    EXPECT_NEAR(p.expected_best_test, boon_nonparametric(pool, p.m).value, 4 * p.mc_standard_error) << p.m;
  }
}

TEST(Curve, TiedValidationsAverageTheirTests) {
  const ResultPool pool({{1.0, 5.0}, {1.0, 7.0}, {1.0, 9.0}});
  const std::vector<std::size_t> ms{4};
  const auto pts = best_of_m_curve(pool, ms, {.samples_per_m = 50'000, .band = false}, config(100));
  EXPECT_NEAR(pts[0].expected_best_test, 7.0, 4 * pts[0].mc_standard_error + 1e-12);
}

TEST(Curve, PerfectCorrelationIsNonDecreasing) {
  auto pool = gaussian_pool(kStandard, 80, 10);
  std::vector<std::size_t> ms(30);
  for (std::size_t i = 0; i < ms.size(); ++i) ms[i] = i + 1;
  const auto pts = best_of_m_curve(pool, ms, {.samples_per_m = 20'000, .band = false}, config(100));
  for (std::size_t i = 1; i < pts.size(); ++i) {
    EXPECT_GE(pts[i].expected_best_test, pts[i - 1].expected_best_test) << pts[i].m;
  }
}

TEST(Curve, WithoutReplacement) {
  const std::vector<std::size_t> ms{3};
  const auto pts = best_of_m_curve(kToy, ms, {.samples_per_m = 1000, .with_replacement = false, .band = false},
                                   config(100));
  EXPECT_DOUBLE_EQ(pts[0].expected_best_test, 30.0);
  const std::vector<std::size_t> too_big{4};
  EXPECT_THROW(best_of_m_curve(kToy, too_big, {.with_replacement = false}, config(100)), Error);
}

TEST(Curve, MinimizeDirection) {
  const ResultPool loss({{0.3, 3.0}, {0.1, 1.0}, {0.2, 2.0}}, Direction::minimize);
  const std::vector<std::size_t> ms{2};
  const auto pts = best_of_m_curve(loss, ms, {.samples_per_m = 200'000, .band = false}, config(100));
  // Mirror of the toy pool: best of 2 by lowest validation.
  EXPECT_NEAR(pts[0].expected_best_test, boon_nonparametric(loss, 2).value, 4 * pts[0].mc_standard_error);
}

TEST(Curve, BandsAndDeterminism) {
  const auto pool = gaussian_pool({.rho = 0.8}, 60, 11);
  const std::vector<std::size_t> ms{1, 5, 10};
  auto run = [&](unsigned threads) {
    return best_of_m_curve(pool, ms, {.samples_per_m = 10'000}, config(500, 17, threads));
  };
  const auto a = run(1);
  const auto b = run(6);
  for (std::size_t i = 0; i < ms.size(); ++i) {
    ASSERT_TRUE(a[i].ci);
    EXPECT_EQ(a[i].expected_best_test, b[i].expected_best_test);
    EXPECT_EQ(a[i].ci->lo, b[i].ci->lo);
    EXPECT_EQ(a[i].ci->hi, b[i].ci->hi);
    EXPECT_LE(a[i].ci->lo, a[i].ci->hi);
  }
}

TEST(Curve, EmptyRequestIsRejected) {
  EXPECT_THROW(best_of_m_curve(kToy, std::vector<std::size_t>{}, {}, config(100)), Error);
}

TEST(Compare, IdenticalPools) {
  const auto pool = gaussian_pool({.rho = 0.5}, 30, 1);
  const auto c = compare_architectures(pool, pool, 5, config(2000));
  EXPECT_EQ(c.delta, 0.0);
  EXPECT_FALSE(c.significant);
  EXPECT_TRUE(c.ci.contains(0.0));
}

TEST(Compare, ShiftedPool) {
  const auto a = gaussian_pool({.rho = 0.5}, 30, 2);
  std::vector<RunRecord> shifted(a.records().begin(), a.records().end());
  const double delta = 0.75;
  for (auto& r : shifted) r = {r.validation + delta, r.test + delta};
  const ResultPool b(shifted);
  const auto c = compare_architectures(a, b, 5, config(4000));
  EXPECT_NEAR(c.delta, delta, 1e-12);
  EXPECT_NEAR(0.5 * (c.ci.lo + c.ci.hi), delta, 0.15);
}

TEST(Compare, SingleRecordPools) {
  const auto c = compare_architectures(ResultPool({{1.0, 60.0}}), ResultPool({{1.0, 61.5}}), 5, config(200));
  EXPECT_DOUBLE_EQ(c.delta, 1.5);
  EXPECT_DOUBLE_EQ(c.ci.lo, 1.5);
  EXPECT_DOUBLE_EQ(c.ci.hi, 1.5);
  EXPECT_TRUE(c.significant);
}

TEST(Compare, DirectionMismatch) {
  try {
    compare_architectures(kToy, ResultPool({{1.0, 2.0}}, Direction::minimize), 5, config(100));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::invalid_argument);
  }
}
