#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "boon/error.hpp"
#include "boon/estimators.hpp"
#include "boon/resampling.hpp"

using namespace boon;

namespace {

// Exhaustive expectation over all m^n with-replacement draws: the test score
// of the best-validation draw, averaging over draws tied at the top.
double enumerate_boon(const std::vector<RunRecord>& records, unsigned n) {
  const std::size_t m = records.size();
  std::vector<std::size_t> idx(n, 0);
  double total = 0.0;
  std::size_t tuples = 0;
  for (;;) {
    double best = -INFINITY;
    for (std::size_t i : idx) best = std::max(best, records[i].validation);
    double sum = 0.0;
    int count = 0;
    for (std::size_t i : idx) {
      if (records[i].validation == best) {
        sum += records[i].test;
        ++count;
      }
    }
    total += sum / count;
    ++tuples;
    std::size_t pos = 0;
    while (pos < n && ++idx[pos] == m) idx[pos++] = 0;
    if (pos == n) break;
  }
  return total / static_cast<double>(tuples);
}

std::vector<RunRecord> random_records(std::mt19937_64& rng, std::size_t m, bool ties) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<int> coarse(0, 2);
  std::vector<RunRecord> out(m);
  for (auto& r : out) {
    r.validation = ties ? static_cast<double>(coarse(rng)) : gauss(rng);
    r.test = gauss(rng) * 5.0 + 60.0;
  }
  return out;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected boon::Error";
  return ErrorCode::invalid_argument;
}

const ResultPool kToy({{0.1, 10.0}, {0.2, 20.0}, {0.3, 30.0}});

}  // namespace

TEST(BoonNonparametric, ToyPool) {
  EXPECT_NEAR(boon_nonparametric(kToy, 2).value, 220.0 / 9.0, 1e-12);
  EXPECT_NEAR(enumerate_boon({kToy.records().begin(), kToy.records().end()}, 2), 220.0 / 9.0, 1e-12);
}

TEST(BoonNonparametric, FirstIsTheMean) {
  EXPECT_NEAR(boon_nonparametric(kToy, 1).value, 20.0, 1e-12);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    const ResultPool pool(random_records(rng, 1 + i % 17, i % 2 == 0));
    double mean = 0.0;
    for (const auto& r : pool.records()) mean += r.test;
    mean /= static_cast<double>(pool.size());
    EXPECT_NEAR(boon_nonparametric(pool, 1).value, mean, 1e-12);
  }
}

TEST(BoonNonparametric, AllTiedIsTheMean) {
  const ResultPool pool({{1.0, 5.0}, {1.0, 7.0}, {1.0, 9.0}});
  for (unsigned n : {1u, 2u, 5u, 40u}) EXPECT_NEAR(boon_nonparametric(pool, n).value, 7.0, 1e-12);
}

TEST(BoonNonparametric, SingleRecord) {
  const ResultPool pool({{0.4, 71.5}});
  for (unsigned n : {1u, 5u, 100u}) EXPECT_DOUBLE_EQ(boon_nonparametric(pool, n).value, 71.5);
}

TEST(BoonNonparametric, MetadataAndExtrapolation) {
  const auto e = boon_nonparametric(kToy, 5);
  EXPECT_EQ(e.n, 5u);
  EXPECT_EQ(e.m, 3u);
  EXPECT_EQ(e.kind, EstimatorKind::nonparametric);
  EXPECT_TRUE(e.extrapolative);
  EXPECT_FALSE(boon_nonparametric(kToy, 3).extrapolative);
}

TEST(BoonNonparametric, Errors) {
  EXPECT_EQ(code_of([] { ResultPool p(std::vector<RunRecord>{}); }), ErrorCode::invalid_argument);
  EXPECT_EQ(code_of([] { ResultPool p({{1.0, NAN}}); }), ErrorCode::invalid_data);
  EXPECT_EQ(code_of([] { ResultPool p({{INFINITY, 1.0}}); }), ErrorCode::invalid_data);
  EXPECT_EQ(code_of([] { boon_nonparametric(kToy, 0); }), ErrorCode::invalid_argument);
}

TEST(BoonNonparametric, MatchesEnumeration) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 120; ++trial) {
    const auto records = random_records(rng, 1 + trial % 6, trial % 3 == 0);
    const ResultPool pool(records);
    for (unsigned n = 1; n <= 4; ++n) {
      EXPECT_NEAR(boon_nonparametric(pool, n).value, enumerate_boon(records, n), 1e-10);
    }
  }
}

TEST(BoonNonparametric, Properties) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    auto records = random_records(rng, 2 + trial % 30, trial % 4 == 0);
    const ResultPool pool(records);
    const auto [lo, hi] = std::minmax_element(records.begin(), records.end(),
                                              [](auto& a, auto& b) { return a.test < b.test; });
    for (unsigned n : {1u, 2u, 5u, 10u, 100u}) {
      const double v = boon_nonparametric(pool, n).value;
      // convexity
      EXPECT_GE(v, lo->test);
      EXPECT_LE(v, hi->test);

      // permutation invariance
      auto shuffled = records;
      std::shuffle(shuffled.begin(), shuffled.end(), rng);
      EXPECT_NEAR(boon_nonparametric(ResultPool(shuffled), n).value, v, 1e-12);

      // affine map of the test scores
      auto mapped = records;
      for (auto& r : mapped) r.test = 2.5 * r.test - 4.0;
      EXPECT_NEAR(boon_nonparametric(ResultPool(mapped), n).value, 2.5 * v - 4.0, 1e-9);

      // minimize on P == -(maximize on -P)
      auto negated = records;
      for (auto& r : negated) r = {-r.validation, -r.test};
      EXPECT_NEAR(boon_nonparametric(ResultPool(records, Direction::minimize), n).value,
                  -boon_nonparametric(ResultPool(negated), n).value, 1e-12);
    }
  }
}

TEST(BoonNonparametric, SingleEvaluationMonotoneInN) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 40; ++trial) {
    auto records = random_records(rng, 1 + trial % 25, trial % 2 == 0);
    for (auto& r : records) r.test = r.validation;
    const ResultPool pool(records);
    double prev = boon_nonparametric(pool, 1).value;
    for (unsigned n = 2; n <= 40; ++n) {
      const double cur = boon_nonparametric(pool, n).value;
      EXPECT_GE(cur, prev - 1e-12);
      prev = cur;
    }
  }
}

TEST(BoonParametric, FirstIsTheMean) {
  EXPECT_NEAR(boon_parametric_gaussian(kToy, 1).value, 20.0, 1e-12);
}

TEST(BoonParametric, MatchesHandComputation) {
  // Toy pool: rho = 1, sd(test) = 10, so Boo(5) = 20 + 10 * E5.
  EXPECT_NEAR(boon_parametric_gaussian(kToy, 5).value, 20.0 + 10.0 * std_normal_expected_max(5), 1e-10);
  EXPECT_EQ(boon_parametric_gaussian(kToy, 5).kind, EstimatorKind::gaussian_parametric);
}

TEST(BoonParametric, Errors) {
  EXPECT_EQ(code_of([] { boon_parametric_gaussian(ResultPool({{1.0, 2.0}, {2.0, 3.0}}), 5); }),
            ErrorCode::insufficient_data);
  const ResultPool flat_test({{1.0, 5.0}, {2.0, 5.0}, {3.0, 5.0}});
  try {
    boon_parametric_gaussian(flat_test, 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::degenerate_pool);
    EXPECT_NE(std::string(e.what()).find("test"), std::string::npos);
  }
  const ResultPool flat_val({{1.0, 5.0}, {1.0, 6.0}, {1.0, 7.0}});
  try {
    boon_parametric_gaussian(flat_val, 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::degenerate_pool);
    EXPECT_NE(std::string(e.what()).find("validation"), std::string::npos);
  }
}

TEST(BoonParametric, Properties) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    auto records = random_records(rng, 3 + trial % 20, false);
    const double v = boon_parametric_gaussian(ResultPool(records), 5).value;

    auto mapped = records;
    for (auto& r : mapped) r.test = 0.5 * r.test + 3.0;
    EXPECT_NEAR(boon_parametric_gaussian(ResultPool(mapped), 5).value, 0.5 * v + 3.0, 1e-9);

    auto negated = records;
    for (auto& r : negated) r = {-r.validation, -r.test};
    EXPECT_NEAR(boon_parametric_gaussian(ResultPool(records, Direction::minimize), 5).value,
                -boon_parametric_gaussian(ResultPool(negated), 5).value, 1e-9);
  }
}

TEST(BoonParametric, ConvergesToClosedForm) {
  const GaussianParams truth{.mu_val = 60.0, .mu_test = 63.16, .sigma_val = 1.0, .sigma_test = 0.94, .rho = 0.18};
  std::mt19937_64 rng(2024);
  const ResultPool pool(simulate_records(truth, 10'000, rng));
  EXPECT_NEAR(boon_parametric_gaussian(pool, 5).value, gaussian_boon_valtest(truth, 5), 0.05);
}

TEST(BestSingleModel, PicksBestValidationAndBreaksTiesByTest) {
  EXPECT_DOUBLE_EQ(best_single_model(kToy), 30.0);
  EXPECT_DOUBLE_EQ(best_single_model(ResultPool({{1.0, 3.0}, {2.0, 1.0}, {2.0, 4.0}})), 4.0);
  EXPECT_DOUBLE_EQ(best_single_model(ResultPool({{1.0, 3.0}, {2.0, 1.0}, {2.0, 4.0}}, Direction::minimize)),
                   3.0);
}
