#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "boon/pool.hpp"

namespace boon {

double mean(std::span<const double> values);

/// Bessel-corrected; needs at least two values.
double sample_std(std::span<const double> values);

/// Linear interpolation between order statistics: h = (m - 1) p.
double quantile(std::span<const double> values, double p);

/// Average ranks (1-based) with ties sharing the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);

/// nullopt when either side has zero variance or fewer than two values.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);
std::optional<double> spearman(std::span<const double> x, std::span<const double> y);

struct PoolSummary {
  std::size_t m = 0;
  double mean_test = 0.0;
  std::optional<double> std_test;
  std::optional<double> iqr_test;
  std::pair<double, double> range_test{0.0, 0.0};
  std::optional<double> spearman_val_test;
  std::optional<double> pearson_val_test;
};

/// Dispersion statistics need m >= 2 and correlations m >= 3; below that
/// (or on zero variance) the field is left empty instead of failing.
PoolSummary summarize(const ResultPool& pool);

struct AndersonDarlingResult {
  double statistic = 0.0;      // A^2 with the small-sample correction applied
  double raw_statistic = 0.0;  // uncorrected A^2
  double critical_value = 0.0;
  bool reject_at_5pct = false;
};

/// Anderson-Darling test of normality with mean and variance estimated from
/// the data. Needs >= 8 values with non-zero spread.
AndersonDarlingResult anderson_darling_normality(std::span<const double> values);

}  // namespace boon
