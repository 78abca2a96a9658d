#include "exactls/numerics.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>

#include "exactls/errors.hpp"

namespace exactls::numerics {

namespace {

std::atomic<std::uint64_t> g_clamp_warnings{0};

double clamp_probability(double p) noexcept {
  if (p < 0.0 || p > 1.0) {
    const double excess = p < 0.0 ? -p : p - 1.0;
    if (excess > kClampWarnThreshold) g_clamp_warnings.fetch_add(1, std::memory_order_relaxed);
    return p < 0.0 ? 0.0 : 1.0;
  }
  return p;
}

constexpr double kTiny = 1e-300;
constexpr double kCfEps = 3e-16;
constexpr int kCfMaxIter = 100000;

// Modified Lentz evaluation of the continued fraction for I_u(a, b).
double beta_continued_fraction(double a, double b, double u) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * u / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kCfMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * u / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * u / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) <= kCfEps) return h;
  }
  std::ostringstream msg;
  msg << "incomplete beta continued fraction did not converge (a=" << a << ", b=" << b
      << ", u=" << u << ")";
  throw NumericalError(msg.str());
}

// log of u^a (1-u)^b / B(a,b)
double log_beta_kernel(double a, double b, double u) {
  return a * std::log(u) + b * std::log1p(-u) - ln_beta({a, b});
}

void require_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    std::ostringstream msg;
    msg << what << " must lie in [0, 1], got " << p;
    throw DomainError(msg.str());
  }
}

}  // namespace

void BetaParams::validate() const {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    std::ostringstream msg;
    msg << "beta shape parameters must be positive and finite (a=" << a << ", b=" << b << ")";
    throw DomainError(msg.str());
  }
}

void FParams::validate() const {
  if (k < 1 || l < 1) {
    std::ostringstream msg;
    msg << "F degrees of freedom must be >= 1 (k=" << k << ", l=" << l << ")";
    throw DomainError(msg.str());
  }
}

double ln_gamma(double a) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    std::ostringstream msg;
    msg << "ln_gamma requires a positive finite argument, got " << a;
    throw DomainError(msg.str());
  }
#if defined(__GLIBC__) || defined(__APPLE__)
  int sign = 0;
  return ::lgamma_r(a, &sign);
#else
  return std::lgamma(a);
#endif
}

double ln_beta(BetaParams params) {
  params.validate();
  return ln_gamma(params.a) + ln_gamma(params.b) - ln_gamma(params.a + params.b);
}

double beta_pdf(BetaParams params, double u) {
  params.validate();
  if (!(u > 0.0 && u < 1.0)) return 0.0;
  return std::exp((params.a - 1.0) * std::log(u) + (params.b - 1.0) * std::log1p(-u) -
                  ln_beta(params));
}

double beta_cdf(BetaParams params, double u) {
  params.validate();
  require_probability(u, "beta_cdf argument");
  if (u == 0.0) return 0.0;
  if (u == 1.0) return 1.0;
  const double a = params.a;
  const double b = params.b;
  double result;
  if (u < (a + 1.0) / (a + b + 2.0)) {
    result = std::exp(log_beta_kernel(a, b, u)) * beta_continued_fraction(a, b, u) / a;
  } else {
    result = 1.0 - std::exp(log_beta_kernel(b, a, 1.0 - u)) *
                       beta_continued_fraction(b, a, 1.0 - u) / b;
  }
  return clamp_probability(result);
}

double beta_quantile(BetaParams params, double p) {
  params.validate();
  require_probability(p, "beta_quantile probability");
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;

  const double a = params.a;
  const double b = params.b;
  const double mean = a / (a + b);
  const double sd = std::sqrt(a * b / ((a + b) * (a + b) * (a + b + 1.0)));
  double u = mean + normal_quantile(p) * sd;
  if (!(u > 0.0 && u < 1.0)) u = p < 0.5 ? 0.5 * mean : 0.5 * (1.0 + mean);

  double lo = 0.0;
  double hi = 1.0;
  constexpr int kMaxIter = 2000;
  int iter = 0;
  double residual = 0.0;
  for (; iter < kMaxIter; ++iter) {
    residual = beta_cdf(params, u) - p;
    if (residual == 0.0) return u;
    if (residual < 0.0) {
      lo = u;
    } else {
      hi = u;
    }
    const double density = beta_pdf(params, u);
    double next = (density > 0.0 && std::isfinite(density)) ? u - residual / density
                                                             : std::numeric_limits<double>::quiet_NaN();
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::fabs(next - u);
    u = next;
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if ((step <= 4.0 * eps * u && std::fabs(residual) <= 1e-10) || std::nextafter(lo, hi) >= hi) break;
  }
  residual = beta_cdf(params, u) - p;
  if (!(std::fabs(residual) <= 1e-10) && std::nextafter(lo, hi) >= hi) {
    // Adjacent doubles: the CDF steps over p between them, so the nearer
    // endpoint is the best representable answer.
    const double r_lo = std::fabs(beta_cdf(params, lo) - p);
    const double r_hi = std::fabs(beta_cdf(params, hi) - p);
    return r_lo <= r_hi ? lo : hi;
  }
  if (iter == kMaxIter || !(std::fabs(residual) <= 1e-10)) {
    std::ostringstream msg;
    msg << "beta_quantile failed to converge: a=" << a << " b=" << b << " p=" << p
        << " last u=" << u << " residual=" << residual << " iterations=" << iter
        << " bracket=[" << lo << ", " << hi << "]";
    throw NumericalError(msg.str());
  }
  return u;
}

double f_cdf(FParams params, double x) {
  params.validate();
  if (std::isnan(x) || x < 0.0) {
    std::ostringstream msg;
    msg << "f_cdf requires x >= 0, got " << x;
    throw DomainError(msg.str());
  }
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  const double r = (static_cast<double>(params.k) / static_cast<double>(params.l)) * x;
  // r / (r + 1) rounds to 1 for huge r; the CDF is then 1 to double precision.
  const double u = r / (r + 1.0);
  return beta_cdf({0.5 * static_cast<double>(params.k), 0.5 * static_cast<double>(params.l)}, u);
}

double gamma_cdf(double a, double x) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    std::ostringstream msg;
    msg << "gamma_cdf shape must be positive and finite, got " << a;
    throw DomainError(msg.str());
  }
  if (std::isnan(x) || x < 0.0) {
    std::ostringstream msg;
    msg << "gamma_cdf requires x >= 0, got " << x;
    throw DomainError(msg.str());
  }
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  const double log_prefactor = -x + a * std::log(x) - ln_gamma(a);
  if (x < a + 1.0) {
    double ap = a;
    double del = 1.0 / a;
    double sum = del;
    for (int n = 0; n < kCfMaxIter; ++n) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::fabs(del) < std::fabs(sum) * kCfEps) {
        return clamp_probability(sum * std::exp(log_prefactor));
      }
    }
  } else {
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kCfMaxIter; ++i) {
      const double an = -i * (i - a);
      b += 2.0;
      d = an * d + b;
      if (std::fabs(d) < kTiny) d = kTiny;
      c = b + an / c;
      if (std::fabs(c) < kTiny) c = kTiny;
      d = 1.0 / d;
      const double del = d * c;
      h *= del;
      if (std::fabs(del - 1.0) <= kCfEps) {
        return clamp_probability(1.0 - std::exp(log_prefactor) * h);
      }
    }
  }
  std::ostringstream msg;
  msg << "incomplete gamma did not converge (a=" << a << ", x=" << x << ")";
  throw NumericalError(msg.str());
}

double normal_quantile(double p) {
  require_probability(p, "normal_quantile probability");
  if (p == 0.0) return -std::numeric_limits<double>::infinity();
  if (p == 1.0) return std::numeric_limits<double>::infinity();
  // Acklam's rational approximation.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - p_low) {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

std::uint64_t clamp_warnings() noexcept { return g_clamp_warnings.load(); }

}  // namespace exactls::numerics
