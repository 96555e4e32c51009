#include "boon/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "boon/error.hpp"
#include "boon/summary.hpp"

namespace boon {

std::string_view to_string(EstimatorKind kind) {
  return kind == EstimatorKind::nonparametric ? "nonparametric" : "gaussian";
}

namespace {

void require_positive_n(unsigned n) {
  if (n == 0) throw Error(ErrorCode::invalid_argument, "n must be at least 1");
}

double orient(const ResultPool& pool, double value) {
  return pool.direction() == Direction::maximize ? value : -value;
}

// Moments of an already-oriented (larger is better) sample.
GaussianParams fit_oriented(std::span<const RunRecord> records) {
  if (records.size() < 3) {
    throw Error(ErrorCode::insufficient_data,
                "Gaussian fit needs at least 3 records, got " + std::to_string(records.size()));
  }
  std::vector<double> vals, tests;
  vals.reserve(records.size());
  tests.reserve(records.size());
  for (const RunRecord& r : records) {
    vals.push_back(r.validation);
    tests.push_back(r.test);
  }
  GaussianParams p;
  p.mu_val = mean(vals);
  p.mu_test = mean(tests);
  p.sigma_val = sample_std(vals);
  p.sigma_test = sample_std(tests);
  if (!(p.sigma_val > 0.0)) {
    throw Error(ErrorCode::degenerate_pool, "degenerate pool: validation scores have zero variance");
  }
  if (!(p.sigma_test > 0.0)) {
    throw Error(ErrorCode::degenerate_pool, "degenerate pool: test scores have zero variance");
  }
  const auto r = pearson(vals, tests);
  if (!r) {
    throw Error(ErrorCode::degenerate_pool, "degenerate pool: correlation undefined");
  }
  p.rho = *r;
  return p;
}

}  // namespace

BoonEstimate boon_nonparametric(const ResultPool& pool, unsigned n) {
  require_positive_n(n);
  auto records = pool.oriented_records();
  std::sort(records.begin(), records.end(), [](const RunRecord& a, const RunRecord& b) {
    return a.validation < b.validation;
  });

  const std::size_t m = records.size();
  const double md = static_cast<double>(m);
  auto cumulative = [&](std::size_t j) {
    return j == m ? 1.0 : std::pow(static_cast<double>(j) / md, n);
  };

  double value = 0.0;
  double lo = records.front().test;
  double hi = lo;
  std::size_t start = 0;
  while (start < m) {
    std::size_t end = start + 1;
    while (end < m && records[end].validation == records[start].validation) ++end;
    // Ranks start+1..end share ((end/m)^n - (start/m)^n) equally.
    const double group_weight = cumulative(end) - cumulative(start);
    double group_tests = 0.0;
    for (std::size_t k = start; k < end; ++k) {
      group_tests += records[k].test;
      lo = std::min(lo, records[k].test);
      hi = std::max(hi, records[k].test);
    }
    value += group_weight * group_tests / static_cast<double>(end - start);
    start = end;
  }

  BoonEstimate e;
  e.n = n;
  e.m = m;
  e.value = orient(pool, std::clamp(value, lo, hi));
  e.kind = EstimatorKind::nonparametric;
  e.extrapolative = m < n;
  return e;
}

BoonEstimate boon_parametric_gaussian(const ResultPool& pool, unsigned n) {
  require_positive_n(n);
  const auto records = pool.oriented_records();
  const GaussianParams p = fit_oriented(records);
  BoonEstimate e;
  e.n = n;
  e.m = pool.size();
  e.value = orient(pool, p.mu_test + p.rho * p.sigma_test * std_normal_expected_max(n));
  e.kind = EstimatorKind::gaussian_parametric;
  e.extrapolative = pool.size() < n;
  return e;
}

BoonEstimate estimate_boon(const ResultPool& pool, unsigned n, EstimatorKind kind) {
  return kind == EstimatorKind::nonparametric ? boon_nonparametric(pool, n)
                                              : boon_parametric_gaussian(pool, n);
}

GaussianParams fit_gaussian(const ResultPool& pool) {
  const auto records = pool.records();
  return fit_oriented(records);
}

double best_single_model(const ResultPool& pool) {
  const auto records = pool.oriented_records();
  const auto best = std::max_element(records.begin(), records.end(),
                                     [](const RunRecord& a, const RunRecord& b) {
                                       if (a.validation != b.validation) return a.validation < b.validation;
                                       return a.test < b.test;
                                     });
  return orient(pool, best->test);
}

}  // namespace boon
