#include "boon/resampling.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <string>

#include "boon/error.hpp"
#include "boon/random.hpp"
#include "boon/summary.hpp"

namespace boon {

namespace {

// Stream domains keep the different procedures from sharing random numbers
// when they are run with the same master seed.
constexpr std::uint64_t kBootstrapDomain = 0xB0;
constexpr std::uint64_t kMonteCarloDomain = 0xC0;
constexpr std::uint64_t kCurveDomain = 0xD0;
constexpr std::uint64_t kCurveBandDomain = 0xD1;
constexpr std::uint64_t kCompareDomain = 0xE0;

constexpr std::size_t kCurveChunk = 4096;
constexpr double kFailureBudget = 0.01;

std::size_t failure_budget(std::size_t replicates) {
  return static_cast<std::size_t>(std::floor(kFailureBudget * static_cast<double>(replicates)));
}

[[noreturn]] void throw_degenerate(std::size_t failures, std::size_t replicates) {
  const double fraction =
      static_cast<double>(failures) / static_cast<double>(failures + replicates);
  throw Error(ErrorCode::resampling_degenerate,
              "statistic failed on " + std::to_string(failures) + " resamples (" +
                  std::to_string(100.0 * fraction) + "% of draws, budget 1%)");
}

// make_replicate(r) returns a callable that draws one sample from replicate
// r's own streams and evaluates it. A failing draw is retried with the same
// callable (continuing its streams) until the global failure budget is spent.
template <class MakeReplicate>
std::vector<double> run_replicates(const ResamplingConfig& config, MakeReplicate&& make_replicate) {
  const std::size_t budget = failure_budget(config.replicates);
  std::vector<double> out(config.replicates);
  std::atomic<std::size_t> failures{0};
  parallel_for(config.replicates, config.threads, [&](std::size_t r) {
    auto draw = make_replicate(r);
    for (;;) {
      try {
        out[r] = draw();
        return;
      } catch (const Error&) {
        const std::size_t total = failures.fetch_add(1) + 1;
        if (total > budget) throw_degenerate(total, config.replicates);
      }
    }
  });
  return out;
}

struct CurveChunk {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::size_t count = 0;
};

}  // namespace

void ResamplingConfig::validate() const {
  if (replicates < 100) {
    throw Error(ErrorCode::invalid_argument,
                "at least 100 replicates are required, got " + std::to_string(replicates));
  }
  if (!(level > 0.0 && level < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "confidence level must lie in (0, 1)");
  }
  if (!bandwidth.automatic && !(bandwidth.h_val >= 0.0 && bandwidth.h_test >= 0.0)) {
    throw Error(ErrorCode::invalid_argument, "bandwidth must be non-negative");
  }
}

std::string_view to_string(ResamplingMethod method) {
  switch (method) {
    case ResamplingMethod::bootstrap: return "bootstrap";
    case ResamplingMethod::smoothed_bootstrap: return "smoothed_bootstrap";
    case ResamplingMethod::monte_carlo_gaussian: return "monte_carlo_gaussian";
  }
  return "unknown";
}

Statistic boon_statistic(unsigned n, EstimatorKind kind) {
  return [n, kind](const ResultPool& pool) { return estimate_boon(pool, n, kind).value; };
}

double test_mean(const ResultPool& pool) { return mean(pool.test_scores()); }

std::pair<double, double> percentile_interval(std::span<const double> replicates, double level) {
  if (replicates.empty()) {
    throw Error(ErrorCode::invalid_argument, "no replicates");
  }
  std::vector<double> sorted(replicates.begin(), replicates.end());
  std::sort(sorted.begin(), sorted.end());
  auto at = [&](double p) {
    const double h = static_cast<double>(sorted.size() - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
  };
  const double lo = at(0.5 * (1.0 - level));
  const double hi = at(0.5 * (1.0 + level));
  return {std::min(lo, hi), std::max(lo, hi)};
}

std::pair<double, double> resolve_bandwidth(const ResultPool& pool, const Bandwidth& bandwidth) {
  if (!bandwidth.automatic) return {bandwidth.h_val, bandwidth.h_test};
  if (pool.size() < 2) return {0.0, 0.0};
  const double factor = std::pow(static_cast<double>(pool.size()), -1.0 / 6.0);
  return {sample_std(pool.validation_scores()) * factor, sample_std(pool.test_scores()) * factor};
}

std::vector<double> bootstrap_replicates(const ResultPool& pool, const Statistic& statistic,
                                         const ResamplingConfig& config, bool smoothed,
                                         std::size_t resample_size) {
  config.validate();
  const auto source = pool.records();
  const std::size_t size = resample_size == 0 ? pool.size() : resample_size;
  const auto widths =
      smoothed ? resolve_bandwidth(pool, config.bandwidth) : std::pair{0.0, 0.0};
  const double h_val = widths.first;
  const double h_test = widths.second;
  const bool add_noise = h_val > 0.0 || h_test > 0.0;

  return run_replicates(config, [&](std::size_t r) {
    return [&, index_rng = make_stream(config.seed, r, 0, kBootstrapDomain),
            noise_rng = make_stream(config.seed, r, 1, kBootstrapDomain)]() mutable {
      std::uniform_int_distribution<std::size_t> pick(0, source.size() - 1);
      std::normal_distribution<double> gauss(0.0, 1.0);
      std::vector<RunRecord> sample(size);
      for (RunRecord& rec : sample) {
        rec = source[pick(index_rng)];
        if (add_noise) {
          rec.validation += h_val * gauss(noise_rng);
          rec.test += h_test * gauss(noise_rng);
        }
      }
      return statistic(pool.with_records(std::move(sample)));
    };
  });
}

namespace {

ConfidenceInterval make_interval(std::span<const double> replicates, const ResamplingConfig& config,
                                 ResamplingMethod method) {
  const auto [lo, hi] = percentile_interval(replicates, config.level);
  ConfidenceInterval ci;
  ci.lo = lo;
  ci.hi = hi;
  ci.level = config.level;
  ci.method = method;
  ci.replicates = config.replicates;
  ci.seed = config.seed;
  return ci;
}

}  // namespace

ConfidenceInterval bootstrap_ci(const ResultPool& pool, const Statistic& statistic,
                                const ResamplingConfig& config, std::size_t resample_size) {
  const auto reps = bootstrap_replicates(pool, statistic, config, false, resample_size);
  return make_interval(reps, config, ResamplingMethod::bootstrap);
}

ConfidenceInterval smoothed_bootstrap_ci(const ResultPool& pool, const Statistic& statistic,
                                         const ResamplingConfig& config,
                                         std::size_t resample_size) {
  const auto reps = bootstrap_replicates(pool, statistic, config, true, resample_size);
  return make_interval(reps, config, ResamplingMethod::smoothed_bootstrap);
}

std::vector<RunRecord> simulate_records(const GaussianParams& params, std::size_t m,
                                        std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double residual = std::sqrt(std::max(0.0, 1.0 - params.rho * params.rho));
  std::vector<RunRecord> out(m);
  for (RunRecord& rec : out) {
    const double z1 = gauss(rng);
    const double z2 = gauss(rng);
    rec.validation = params.mu_val + params.sigma_val * z1;
    rec.test = params.mu_test + params.sigma_test * (params.rho * z1 + residual * z2);
  }
  return out;
}

ConfidenceInterval monte_carlo_ci_gaussian(const GaussianParams& params, std::size_t m,
                                           unsigned n, EstimatorKind kind,
                                           const ResamplingConfig& config,
                                           Direction direction) {
  params.validate();
  config.validate();
  if (n == 0) throw Error(ErrorCode::invalid_argument, "n must be at least 1");
  if (m == 0 || (kind == EstimatorKind::gaussian_parametric && m < 3)) {
    throw Error(ErrorCode::invalid_argument,
                "pool size " + std::to_string(m) + " is too small for the chosen estimator");
  }
  const auto reps = run_replicates(config, [&](std::size_t r) {
    return [&, rng = make_stream(config.seed, r, 0, kMonteCarloDomain)]() mutable {
      ResultPool pool(simulate_records(params, m, rng), direction);
      return estimate_boon(pool, n, kind).value;
    };
  });
  return make_interval(reps, config, ResamplingMethod::monte_carlo_gaussian);
}

std::vector<CurvePoint> best_of_m_curve(const ResultPool& pool,
                                        std::span<const std::size_t> m_values,
                                        const CurveOptions& options,
                                        const ResamplingConfig& config) {
  config.validate();
  if (m_values.empty()) {
    throw Error(ErrorCode::invalid_argument, "no pool sizes requested for the curve");
  }
  if (options.samples_per_m == 0) {
    throw Error(ErrorCode::invalid_argument, "samples_per_m must be positive");
  }
  for (std::size_t m : m_values) {
    if (m == 0) throw Error(ErrorCode::invalid_argument, "curve pool sizes must be >= 1");
    if (!options.with_replacement && m > pool.size()) {
      throw Error(ErrorCode::invalid_argument,
                  "sampling without replacement needs m <= " + std::to_string(pool.size()));
    }
  }

  const auto records = pool.oriented_records();
  const std::size_t chunks = (options.samples_per_m + kCurveChunk - 1) / kCurveChunk;
  std::vector<CurveChunk> partial(m_values.size() * chunks);

  parallel_for(partial.size(), config.threads, [&](std::size_t task) {
    const std::size_t mi = task / chunks;
    const std::size_t c = task % chunks;
    const std::size_t m = m_values[mi];
    const std::size_t begin = c * kCurveChunk;
    const std::size_t end = std::min(begin + kCurveChunk, options.samples_per_m);
    auto rng = make_stream(config.seed, m, c, kCurveDomain);
    std::uniform_int_distribution<std::size_t> pick(0, records.size() - 1);
    std::vector<std::size_t> perm;
    if (!options.with_replacement) {
      perm.resize(records.size());
    }
    CurveChunk acc;
    for (std::size_t s = begin; s < end; ++s) {
      if (!options.with_replacement) std::iota(perm.begin(), perm.end(), std::size_t{0});
      double best_val = 0.0;
      double tied_sum = 0.0;
      std::size_t tied = 0;
      for (std::size_t k = 0; k < m; ++k) {
        std::size_t idx;
        if (options.with_replacement) {
          idx = pick(rng);
        } else {
          std::uniform_int_distribution<std::size_t> rest(k, perm.size() - 1);
          std::swap(perm[k], perm[rest(rng)]);
          idx = perm[k];
        }
        const RunRecord& rec = records[idx];
        if (tied == 0 || rec.validation > best_val) {
          best_val = rec.validation;
          tied_sum = rec.test;
          tied = 1;
        } else if (rec.validation == best_val) {
          tied_sum += rec.test;
          ++tied;
        }
      }
      const double value = tied_sum / static_cast<double>(tied);
      acc.sum += value;
      acc.sum_sq += value * value;
      ++acc.count;
    }
    partial[task] = acc;
  });

  const double sign = pool.direction() == Direction::maximize ? 1.0 : -1.0;
  std::vector<CurvePoint> out;
  out.reserve(m_values.size());
  for (std::size_t mi = 0; mi < m_values.size(); ++mi) {
    CurveChunk total;
    for (std::size_t c = 0; c < chunks; ++c) {
      const CurveChunk& p = partial[mi * chunks + c];
      total.sum += p.sum;
      total.sum_sq += p.sum_sq;
      total.count += p.count;
    }
    const double count = static_cast<double>(total.count);
    const double mu = total.sum / count;
    const double var = total.count > 1
                           ? std::max(0.0, (total.sum_sq - count * mu * mu) / (count - 1.0))
                           : 0.0;
    CurvePoint point;
    point.m = m_values[mi];
    point.expected_best_test = sign * mu;
    point.mc_standard_error = std::sqrt(var / count);
    if (options.band) {
      ResamplingConfig band = config;
      band.seed = mix64(config.seed ^ mix64(kCurveBandDomain + point.m));
      point.ci = smoothed_bootstrap_ci(pool, best_single_model, band, point.m);
      point.ci->seed = config.seed;
    }
    out.push_back(point);
  }
  return out;
}

Comparison compare_architectures(const ResultPool& pool_a, const ResultPool& pool_b,
                                 unsigned n, const ResamplingConfig& config) {
  config.validate();
  if (pool_a.direction() != pool_b.direction()) {
    throw Error(ErrorCode::invalid_argument,
                "cannot compare pools with different directions (" +
                    std::string(to_string(pool_a.direction())) + " vs " +
                    std::string(to_string(pool_b.direction())) + ")");
  }
  const auto a = pool_a.records();
  const auto b = pool_b.records();
  auto resample = [](std::span<const RunRecord> src, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> pick(0, src.size() - 1);
    std::vector<RunRecord> out(src.size());
    for (RunRecord& rec : out) rec = src[pick(rng)];
    return out;
  };
  const auto reps = run_replicates(config, [&](std::size_t r) {
    return [&, rng_a = make_stream(config.seed, r, 0, kCompareDomain),
            rng_b = make_stream(config.seed, r, 1, kCompareDomain)]() mutable {
      const double boo_a = boon_nonparametric(pool_a.with_records(resample(a, rng_a)), n).value;
      const double boo_b = boon_nonparametric(pool_b.with_records(resample(b, rng_b)), n).value;
      return boo_b - boo_a;
    };
  });

  Comparison out;
  out.delta = boon_nonparametric(pool_b, n).value - boon_nonparametric(pool_a, n).value;
  out.ci = make_interval(reps, config, ResamplingMethod::bootstrap);
  out.significant = !out.ci.contains(0.0);
  return out;
}

}  // namespace boon
