#include "boon/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>
#include <unordered_map>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "boon/error.hpp"

namespace boon {

namespace {

constexpr double kGaussianWindow = 12.0;
constexpr double kNormalizationTolerance = 1e-6;
constexpr double kWeightSumTolerance = 1e-12;

void require_positive_n(unsigned n) {
  if (n == 0) {
    throw Error(ErrorCode::invalid_argument, "n must be at least 1");
  }
}

double std_normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double std_normal_cdf(double z) {
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

// Density of the maximum of n draws evaluated at x, i.e. n f(x) F(x)^(n-1).
double max_density(double f, double F, unsigned n) {
  if (n == 1) return f;
  if (f <= 0.0 || F <= 0.0) return 0.0;
  if (F >= 1.0) return n * f;
  return n * f * std::exp((n - 1) * std::log(F));
}

double integrate(const std::function<double(double)>& integrand, double lo,
                 double hi) {
  using boost::math::quadrature::gauss_kronrod;
  return gauss_kronrod<double, 61>::integrate(integrand, lo, hi, 20, 1e-12);
}

}  // namespace

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::invalid_distribution: return "invalid-distribution";
    case ErrorCode::invalid_data: return "invalid-data";
    case ErrorCode::insufficient_data: return "insufficient-data";
    case ErrorCode::degenerate_pool: return "degenerate-pool";
    case ErrorCode::resampling_degenerate: return "resampling-degenerate";
    case ErrorCode::unreadable_file: return "unreadable-file";
    case ErrorCode::unknown_columns: return "unknown-columns";
    case ErrorCode::malformed_rows: return "malformed-rows";
    case ErrorCode::no_valid_rows: return "no-valid-rows";
  }
  return "unknown";
}

ContinuousDistribution ContinuousDistribution::normal(double mu, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(mu) || !std::isfinite(sigma)) {
    throw Error(ErrorCode::invalid_argument,
                "normal distribution needs finite mu and sigma > 0");
  }
  ContinuousDistribution d;
  d.pdf = [mu, sigma](double x) { return std_normal_pdf((x - mu) / sigma) / sigma; };
  d.cdf = [mu, sigma](double x) { return std_normal_cdf((x - mu) / sigma); };
  d.window_lo = mu - kGaussianWindow * sigma;
  d.window_hi = mu + kGaussianWindow * sigma;
  return d;
}

ContinuousDistribution ContinuousDistribution::uniform(double lo, double hi) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw Error(ErrorCode::invalid_argument, "uniform distribution needs finite lo < hi");
  }
  ContinuousDistribution d;
  const double width = hi - lo;
  d.pdf = [lo, hi, width](double x) { return (x < lo || x > hi) ? 0.0 : 1.0 / width; };
  d.cdf = [lo, hi, width](double x) {
    if (x <= lo) return 0.0;
    if (x >= hi) return 1.0;
    return (x - lo) / width;
  };
  d.support_lo = d.window_lo = lo;
  d.support_hi = d.window_hi = hi;
  return d;
}

DiscreteDistribution::DiscreteDistribution(std::vector<Atom> atoms)
    : atoms_(std::move(atoms)) {
  if (atoms_.empty()) {
    throw Error(ErrorCode::invalid_argument, "discrete distribution has no atoms");
  }
  double total = 0.0;
  for (const Atom& a : atoms_) {
    if (!std::isfinite(a.value) || !(a.weight > 0.0)) {
      throw Error(ErrorCode::invalid_distribution,
                  "atoms need finite values and positive weights");
    }
    total += a.weight;
  }
  if (std::abs(total - 1.0) > kWeightSumTolerance) {
    throw Error(ErrorCode::invalid_distribution,
                "atom weights sum to " + std::to_string(total) + ", expected 1");
  }
  std::sort(atoms_.begin(), atoms_.end(),
            [](const Atom& a, const Atom& b) { return a.value < b.value; });
  auto dup = std::adjacent_find(atoms_.begin(), atoms_.end(),
                                [](const Atom& a, const Atom& b) { return a.value == b.value; });
  if (dup != atoms_.end()) {
    throw Error(ErrorCode::invalid_distribution, "atom values must be distinct");
  }
}

DiscreteDistribution DiscreteDistribution::uniform_over(std::span<const double> values) {
  std::vector<Atom> atoms;
  atoms.reserve(values.size());
  const double w = values.empty() ? 0.0 : 1.0 / static_cast<double>(values.size());
  for (double v : values) atoms.push_back({v, w});
  return DiscreteDistribution(std::move(atoms));
}

double DiscreteDistribution::mean() const noexcept {
  double s = 0.0;
  for (const Atom& a : atoms_) s += a.weight * a.value;
  return s;
}

void GaussianParams::validate() const {
  const bool finite = std::isfinite(mu_val) && std::isfinite(mu_test) &&
                      std::isfinite(sigma_val) && std::isfinite(sigma_test) &&
                      std::isfinite(rho);
  if (!finite || !(sigma_val > 0.0) || !(sigma_test > 0.0) || std::abs(rho) > 1.0) {
    throw Error(ErrorCode::invalid_argument,
                "Gaussian parameters need sigma_val > 0, sigma_test > 0 and |rho| <= 1");
  }
}

double std_normal_expected_max(unsigned n) {
  require_positive_n(n);
  static std::mutex mutex;
  static std::unordered_map<unsigned, double> cache;
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(n); it != cache.end()) return it->second;
  }
  const double value =
      expected_max_continuous(ContinuousDistribution::normal(0.0, 1.0), n);
  std::lock_guard lock(mutex);
  cache.emplace(n, value);
  return value;
}

double expected_max_continuous(const ContinuousDistribution& dist, unsigned n) {
  require_positive_n(n);
  if (!dist.pdf || !dist.cdf) {
    throw Error(ErrorCode::invalid_distribution, "distribution lacks pdf or cdf");
  }
  const double lo = std::max(dist.window_lo, dist.support_lo);
  const double hi = std::min(dist.window_hi, dist.support_hi);
  if (!(lo < hi)) {
    throw Error(ErrorCode::invalid_distribution, "empty integration window");
  }
  const double at_hi = dist.cdf(std::isfinite(hi) ? hi : std::numeric_limits<double>::max());
  const double at_lo = dist.cdf(std::isfinite(lo) ? lo : std::numeric_limits<double>::lowest());
  if (std::abs(at_hi - 1.0) > kNormalizationTolerance || std::abs(at_lo) > kNormalizationTolerance) {
    throw Error(ErrorCode::invalid_distribution,
                "cdf is not normalized over the support (cdf(lo)=" + std::to_string(at_lo) +
                    ", cdf(hi)=" + std::to_string(at_hi) + ")");
  }

  auto integrand = [&](double x) { return x * max_density(dist.pdf(x), dist.cdf(x), n); };
  const double value = integrate(integrand, lo, hi);
  return std::clamp(value, dist.support_lo, dist.support_hi);
}

double expected_max_discrete(const DiscreteDistribution& dist, unsigned n) {
  require_positive_n(n);
  const auto atoms = dist.atoms();
  // P(max <= x_i)^n - P(max < x_i)^n, accumulated over atoms sorted by value.
  double below = 0.0;
  double below_pow = 0.0;
  double total = 0.0;
  for (const Atom& a : atoms) {
    const double upto = below + a.weight;
    const double upto_pow = std::pow(std::min(upto, 1.0), n);
    total += (upto_pow - below_pow) * a.value;
    below = upto;
    below_pow = upto_pow;
  }
  return std::clamp(total, atoms.front().value, atoms.back().value);
}

double gaussian_boon_single(double mu, double sigma, unsigned n) {
  if (!(sigma >= 0.0)) {
    throw Error(ErrorCode::invalid_argument, "sigma must be non-negative");
  }
  return mu + sigma * std_normal_expected_max(n);
}

double gaussian_boon_valtest(const GaussianParams& params, unsigned n) {
  params.validate();
  return params.mu_test + params.rho * params.sigma_test * std_normal_expected_max(n);
}

}  // namespace boon
