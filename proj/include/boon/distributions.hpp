#pragma once

#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace boon {

/// A univariate continuous performance distribution given by its density and
/// distribution function. The support bounds may be infinite; the integration
/// window is where quadrature actually runs and defaults to the support.
struct ContinuousDistribution {
  std::function<double(double)> pdf;
  std::function<double(double)> cdf;
  double support_lo = -std::numeric_limits<double>::infinity();
  double support_hi = std::numeric_limits<double>::infinity();
  double window_lo = -std::numeric_limits<double>::infinity();
  double window_hi = std::numeric_limits<double>::infinity();

  /// Normal(mu, sigma^2), integrated over mu +/- 12 sigma.
  static ContinuousDistribution normal(double mu, double sigma);
  static ContinuousDistribution uniform(double lo, double hi);
};

struct Atom {
  double value;
  double weight;
};

/// Finitely supported distribution. Construction validates that weights are
/// positive, sum to one within 1e-12 and that values are distinct.
class DiscreteDistribution {
 public:
  explicit DiscreteDistribution(std::vector<Atom> atoms);

  /// Equal weight 1/k on each of the k given (distinct) values.
  static DiscreteDistribution uniform_over(std::span<const double> values);

  std::span<const Atom> atoms() const noexcept { return atoms_; }
  double mean() const noexcept;

 private:
  std::vector<Atom> atoms_;  // sorted by value
};

/// Bivariate normal model of (validation, test) scores.
struct GaussianParams {
  double mu_val = 0.0;
  double mu_test = 0.0;
  double sigma_val = 1.0;
  double sigma_test = 1.0;
  double rho = 0.0;

  /// Throws ErrorCode::invalid_argument unless sigmas > 0 and |rho| <= 1.
  void validate() const;
};

/// Expected maximum of n iid standard normals. Memoized per n; thread safe.
double std_normal_expected_max(unsigned n);

/// Expected maximum of n iid draws, by adaptive Gauss-Kronrod quadrature of
/// x * n f(x) F(x)^(n-1). F^(n-1) is evaluated in log space.
double expected_max_continuous(const ContinuousDistribution& dist, unsigned n);

/// Exact expected maximum of n iid draws from a discrete distribution.
double expected_max_discrete(const DiscreteDistribution& dist, unsigned n);

double gaussian_boon_single(double mu, double sigma, unsigned n);

/// Expected test score of the best-validation model out of n under a
/// bivariate normal: mu_test + rho * sigma_test * E[max of n N(0,1)].
double gaussian_boon_valtest(const GaussianParams& params, unsigned n);

}  // namespace boon
