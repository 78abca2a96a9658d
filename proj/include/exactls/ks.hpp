#pragma once

// Kolmogorov-Smirnov statistics for the distributional test suites.

#include <functional>
#include <span>

namespace exactls::ks {

struct Result {
  double distance = 0.0;  // sup |F_n - F|
  double p_value = 1.0;   // asymptotic Kolmogorov tail with Stephens' correction
  double effective_n = 0.0;
  bool passes(double level) const noexcept { return p_value >= level; }
};

/// P(sqrt(n) D > lambda) limit: 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2).
double kolmogorov_tail(double lambda) noexcept;

/// p-value for distance d at effective sample size n_eff.
double p_value(double d, double n_eff) noexcept;

/// One-sample test of `samples` against a continuous CDF.
Result one_sample(std::span<const double> samples, const std::function<double(double)>& cdf);

/// One-sample test against Uniform(0, 1).
Result uniform(std::span<const double> samples);

/// Two-sample test.
Result two_sample(std::span<const double> a, std::span<const double> b);

}  // namespace exactls::ks
