#pragma once

#include <cstddef>
#include <string_view>

#include "boon/distributions.hpp"
#include "boon/pool.hpp"

namespace boon {

enum class EstimatorKind { nonparametric, gaussian_parametric };

std::string_view to_string(EstimatorKind kind);

struct BoonEstimate {
  unsigned n = 0;
  std::size_t m = 0;
  double value = 0.0;
  EstimatorKind kind = EstimatorKind::nonparametric;
  // The pool is smaller than n; the estimate is still well defined but
  // extrapolates beyond what was observed.
  bool extrapolative = false;
};

/// Plug-in Boo(n) of the empirical distribution: a rank-weighted average of
/// test scores. Records are ranked by validation; the j-th of m gets weight
/// (j/m)^n - ((j-1)/m)^n. Records with exactly equal validation scores share
/// their combined weight equally.
BoonEstimate boon_nonparametric(const ResultPool& pool, unsigned n);

/// Fits a bivariate normal (sample mean, Bessel-corrected sd, Pearson rho)
/// and evaluates the closed form. Needs m >= 3 and non-zero variance on both
/// axes; throws insufficient_data / degenerate_pool otherwise.
BoonEstimate boon_parametric_gaussian(const ResultPool& pool, unsigned n);

BoonEstimate estimate_boon(const ResultPool& pool, unsigned n, EstimatorKind kind);

/// Moment fit of (validation, test) in the pool's native orientation.
GaussianParams fit_gaussian(const ResultPool& pool);

/// Test score of the best-validation record; ties go to the better test score.
double best_single_model(const ResultPool& pool);

}  // namespace boon
