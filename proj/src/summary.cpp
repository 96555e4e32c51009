#include "boon/summary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "boon/error.hpp"

namespace boon {

namespace {

// Composite-normality case (mean and variance estimated): 5% critical value
// for the modified statistic A^2 (1 + 0.75/m + 2.25/m^2).
constexpr double kAndersonDarlingCritical5 = 0.752;
constexpr std::size_t kAndersonDarlingMinSize = 8;

double log_std_normal_cdf(double z) {
  const double p = 0.5 * std::erfc(-z / std::numbers::sqrt2);
  return std::log(std::max(p, std::numeric_limits<double>::min()));
}

double log_std_normal_sf(double z) { return log_std_normal_cdf(-z); }

}  // namespace

double mean(std::span<const double> values) {
  if (values.empty()) {
    throw Error(ErrorCode::insufficient_data, "mean of an empty sample");
  }
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

double sample_std(std::span<const double> values) {
  if (values.size() < 2) {
    throw Error(ErrorCode::insufficient_data, "standard deviation needs two values");
  }
  const double mu = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - mu) * (v - mu);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

double quantile(std::span<const double> values, double p) {
  if (values.empty()) {
    throw Error(ErrorCode::insufficient_data, "quantile of an empty sample");
  }
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::invalid_argument, "quantile probability outside [0, 1]");
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    // positions i..j-1 (0-based) share the average 1-based rank
    const double r = 0.5 * static_cast<double>(i + j + 1);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = r;
    i = j;
  }
  return ranks;
}

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::invalid_argument, "correlation of samples with different sizes");
  }
  if (x.size() < 2) return std::nullopt;
  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::optional<double> spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::invalid_argument, "correlation of samples with different sizes");
  }
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry);
}

PoolSummary summarize(const ResultPool& pool) {
  const auto tests = pool.test_scores();
  const auto vals = pool.validation_scores();
  PoolSummary s;
  s.m = pool.size();
  s.mean_test = mean(tests);
  const auto [lo, hi] = std::minmax_element(tests.begin(), tests.end());
  s.range_test = {*lo, *hi};
  if (s.m >= 2) {
    s.std_test = sample_std(tests);
    s.iqr_test = quantile(tests, 0.75) - quantile(tests, 0.25);
  }
  if (s.m >= 3) {
    s.spearman_val_test = spearman(vals, tests);
    s.pearson_val_test = pearson(vals, tests);
  }
  return s;
}

AndersonDarlingResult anderson_darling_normality(std::span<const double> values) {
  const std::size_t m = values.size();
  if (m < kAndersonDarlingMinSize) {
    throw Error(ErrorCode::insufficient_data,
                "Anderson-Darling test needs at least 8 values, got " + std::to_string(m));
  }
  const double mu = mean(values);
  const double sd = sample_std(values);
  if (!(sd > 0.0)) {
    throw Error(ErrorCode::insufficient_data, "Anderson-Darling test on zero-variance data");
  }
  std::vector<double> z(values.begin(), values.end());
  std::sort(z.begin(), z.end());
  for (double& v : z) v = (v - mu) / sd;

  const double md = static_cast<double>(m);
  double acc = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double coef = 2.0 * static_cast<double>(i + 1) - 1.0;
    acc += coef * (log_std_normal_cdf(z[i]) + log_std_normal_sf(z[m - 1 - i]));
  }
  AndersonDarlingResult r;
  r.raw_statistic = -md - acc / md;
  r.statistic = r.raw_statistic * (1.0 + 0.75 / md + 2.25 / (md * md));
  r.critical_value = kAndersonDarlingCritical5;
  r.reject_at_5pct = r.statistic > r.critical_value;
  return r;
}

}  // namespace boon
