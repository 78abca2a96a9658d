#pragma once

// Special functions behind every exact probability in the library:
// log-gamma, the regularized incomplete beta function and the beta / F
// distribution functions built on it.
//
// All functions are pure and reentrant. Probabilities are clamped to [0, 1];
// a clamp of more than kClampWarnThreshold is counted (see clamp_warnings()).

#include <cstdint>

namespace exactls::numerics {

inline constexpr double kClampWarnThreshold = 1e-9;

struct BetaParams {
  double a;
  double b;
  /// Throws DomainError unless both shapes are positive and finite.
  void validate() const;
};

struct FParams {
  long k;  // numerator degrees of freedom
  long l;  // denominator degrees of freedom
  void validate() const;
};

/// log Gamma(a) for a > 0.
double ln_gamma(double a);

/// log B(a, b) = log Gamma(a) + log Gamma(b) - log Gamma(a + b).
double ln_beta(BetaParams params);

/// Density of Beta(a, b) at u (0 outside (0, 1)).
double beta_pdf(BetaParams params, double u);

/// Regularized incomplete beta function B_{a,b}(u), i.e. the Beta(a, b) CDF.
double beta_cdf(BetaParams params, double u);

/// Smallest u with beta_cdf(params, u) = p, found by safeguarded Newton.
double beta_quantile(BetaParams params, double p);

/// Fisher F distribution function, evaluated through
/// F_{k,l}(x) = B_{k/2,l/2}(r / (r + 1)) with r = (k/l) x.
double f_cdf(FParams params, double x);

/// Regularized lower incomplete gamma P(a, x), the Gamma(a, 1) CDF.
double gamma_cdf(double a, double x);

/// Standard normal quantile (rational approximation, |error| < 1.2e-9).
double normal_quantile(double p);

/// Number of probability clamps larger than kClampWarnThreshold seen so far.
std::uint64_t clamp_warnings() noexcept;

}  // namespace exactls::numerics
