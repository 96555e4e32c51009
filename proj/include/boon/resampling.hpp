#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "boon/distributions.hpp"
#include "boon/estimators.hpp"
#include "boon/pool.hpp"

namespace boon {

/// Kernel width for the smoothed bootstrap. `automatic` uses the per-axis
/// rule h = sd * m^(-1/6); otherwise the fixed widths are used as given.
struct Bandwidth {
  bool automatic = true;
  double h_val = 0.0;
  double h_test = 0.0;

  static Bandwidth auto_rule() { return {}; }
  static Bandwidth fixed(double h) { return {false, h, h}; }
  static Bandwidth fixed(double h_val, double h_test) { return {false, h_val, h_test}; }
};

struct ResamplingConfig {
  std::size_t replicates = 10'000;
  double level = 0.95;
  std::uint64_t seed = 0;
  Bandwidth bandwidth;
  unsigned threads = 0;  // 0: hardware concurrency; results never depend on it

  /// Throws invalid_argument unless replicates >= 100 and 0 < level < 1.
  void validate() const;
};

enum class ResamplingMethod { bootstrap, smoothed_bootstrap, monte_carlo_gaussian };

std::string_view to_string(ResamplingMethod method);

struct ConfidenceInterval {
  double lo = 0.0;
  double hi = 0.0;
  double level = 0.95;
  ResamplingMethod method = ResamplingMethod::bootstrap;
  std::size_t replicates = 0;
  std::uint64_t seed = 0;

  double width() const noexcept { return hi - lo; }
  bool contains(double x) const noexcept { return lo <= x && x <= hi; }
};

/// Must be pure: it is called concurrently on different resamples. Throwing
/// boon::Error marks the resample as degenerate.
using Statistic = std::function<double(const ResultPool&)>;

Statistic boon_statistic(unsigned n, EstimatorKind kind = EstimatorKind::nonparametric);
double test_mean(const ResultPool& pool);

/// Percentile interval [(1-level)/2, (1+level)/2] of a replicate sample.
std::pair<double, double> percentile_interval(std::span<const double> replicates, double level);

/// Resolved (h_val, h_test) for a pool.
std::pair<double, double> resolve_bandwidth(const ResultPool& pool, const Bandwidth& bandwidth);

/// The B statistic values behind bootstrap_ci / smoothed_bootstrap_ci, in
/// replicate order. resample_size 0 means the pool size. Resamples on which
/// the statistic throws are redrawn from the same stream; more than 1% of
/// failures overall raises resampling_degenerate.
std::vector<double> bootstrap_replicates(const ResultPool& pool, const Statistic& statistic,
                                         const ResamplingConfig& config, bool smoothed,
                                         std::size_t resample_size = 0);

ConfidenceInterval bootstrap_ci(const ResultPool& pool, const Statistic& statistic,
                                const ResamplingConfig& config, std::size_t resample_size = 0);

/// Like bootstrap_ci, but each resampled pair receives independent Gaussian
/// noise with standard deviations (h_val, h_test) from config.bandwidth.
/// Noise comes from its own stream, so zero bandwidth reproduces
/// bootstrap_ci replicate for replicate.
ConfidenceInterval smoothed_bootstrap_ci(const ResultPool& pool, const Statistic& statistic,
                                         const ResamplingConfig& config,
                                         std::size_t resample_size = 0);

/// m draws from the bivariate normal described by params.
std::vector<RunRecord> simulate_records(const GaussianParams& params, std::size_t m,
                                        std::mt19937_64& rng);

/// Sampling distribution of the Boo(n) estimator at pool size m under a known
/// bivariate normal, summarized as a percentile interval.
ConfidenceInterval monte_carlo_ci_gaussian(const GaussianParams& params, std::size_t m,
                                           unsigned n, EstimatorKind kind,
                                           const ResamplingConfig& config,
                                           Direction direction = Direction::maximize);

struct CurveOptions {
  std::size_t samples_per_m = 100'000;
  bool with_replacement = true;
  // Smoothed-bootstrap band of the best-single-model statistic at size m.
  bool band = true;
};

struct CurvePoint {
  std::size_t m = 0;
  double expected_best_test = 0.0;
  double mc_standard_error = 0.0;
  std::optional<ConfidenceInterval> ci;
};

/// Expected test score of the best-validation record among m records drawn
/// from the pool, by Monte Carlo. Tied best validations contribute the mean
/// of their test scores.
std::vector<CurvePoint> best_of_m_curve(const ResultPool& pool,
                                        std::span<const std::size_t> m_values,
                                        const CurveOptions& options,
                                        const ResamplingConfig& config);

struct Comparison {
  double delta = 0.0;  // Boo(n)(b) - Boo(n)(a)
  ConfidenceInterval ci;
  bool significant = false;  // zero lies outside ci
};

/// Nonparametric Boo(n) difference with a bootstrap interval obtained by
/// resampling each pool independently.
Comparison compare_architectures(const ResultPool& pool_a, const ResultPool& pool_b,
                                 unsigned n, const ResamplingConfig& config);

}  // namespace boon
