#include "exactls/regions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "exactls/errors.hpp"
#include "exactls/kernels.hpp"
#include "exactls/numerics.hpp"
#include "exactls/parallel.hpp"

namespace exactls {

namespace {

constexpr double kSubspaceTol = 1e-10;

bool same_ids(const IdSet& a, const IdSet& b) {
  return a.size() == b.size() && id_subset(a, b) && id_subset(b, a);
}

// Exact pi for the F statistic; an empty residual counts as tau = 0, pi = 1.
double exact_pi(std::span<const double> y, const RegressorSet& regressors, const IdSet& null_set,
                const IdSet& full_set) {
  const NestedFit fit = nested_fit(y, regressors, null_set, full_set);
  if (!(std::sqrt(fit.ss_small) > kZeroResidual * std::sqrt(kernels::sum_squares(y)))) return 1.0;
  return p_value_beta(fit);
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    std::ostringstream msg;
    msg << "alpha must lie in (0, 1), got " << alpha;
    throw DomainError(msg.str());
  }
}

}  // namespace

RegionFrame::RegionFrame(const RegressorSet& regressors, const IdSet& null_set, const IdSet& full_set)
    : null_(regressors.n()), basis_(regressors.n()) {
  if (!id_subset(null_set, full_set)) throw DomainError("null set must be a subset of the full set");
  regressors.check_subset(full_set);
  if (full_set.size() >= regressors.n()) throw DomainError("full set must have fewer than n elements");
  for (const auto& id : null_set) {
    if (!null_.append(regressors.column(id))) {
      throw SingularityError("regressor '" + id + "' is linearly dependent on the preceding columns", id);
    }
  }
  OrthoBasis combined = null_;
  for (const auto& id : id_difference(full_set, null_set)) {
    if (!combined.append(regressors.column(id))) {
      throw SingularityError("regressor '" + id + "' is linearly dependent on the preceding columns", id);
    }
    const auto w = combined[combined.size() - 1];
    basis_.append_orthonormal(Vector(w.begin(), w.end()));
  }
}

Vector RegionFrame::embed(std::span<const double> coords) const {
  if (coords.size() != dim()) throw DomainError("coordinate vector has the wrong length");
  Vector v(n(), 0.0);
  for (std::size_t i = 0; i < dim(); ++i) kernels::axpy(coords[i], basis_[i], v);
  return v;
}

Vector RegionFrame::coordinates(std::span<const double> v) const { return basis_.coefficients(v); }

Vector RegionFrame::ambient(std::span<const double> beta) const {
  if (beta.size() == dim()) return embed(beta);
  if (beta.size() != n()) {
    std::ostringstream msg;
    msg << "beta must have length " << dim() << " (frame coordinates) or " << n() << " (ambient)";
    throw DomainError(msg.str());
  }
  const double scale = std::max(1.0, std::sqrt(kernels::sum_squares(beta)));
  const Vector in_null = null_.coefficients(beta);
  if (std::sqrt(kernels::sum_squares(in_null)) > kSubspaceTol * scale) {
    throw DomainError("beta is not orthogonal to V_N");
  }
  const Vector proj = embed(coordinates(beta));
  double off = 0.0;
  for (std::size_t i = 0; i < n(); ++i) off += (beta[i] - proj[i]) * (beta[i] - proj[i]);
  if (std::sqrt(off) > kSubspaceTol * scale) throw DomainError("beta does not lie in V_N*");
  return Vector(beta.begin(), beta.end());
}

void RegionQuery::validate() const {
  check_alpha(alpha);
  if (plan) plan->validate();
  if (!plan && stat && stat->kind() != TauStatistic::Kind::f_ratio) {
    throw DomainError("exact region membership is only available for the F statistic");
  }
}

Membership region_contains(const RegionQuery& query, std::span<const double> y, const RegressorSet& regressors,
                           const IdSet& null_set, const IdSet& full_set) {
  query.validate();
  if (y.size() != regressors.n()) throw DomainError("response length does not match the regressors");
  const IdSet extras = id_difference(full_set, null_set);
  if (query.stat && query.stat->kind() == TauStatistic::Kind::f_ratio && !same_ids(query.stat->ids(), extras)) {
    throw DomainError("F statistic extras must equal N* \\ N");
  }
  const RegionFrame frame(regressors, null_set, full_set);
  const Vector beta = frame.ambient(query.beta);
  Vector shifted(y.begin(), y.end());
  kernels::axpy(-1.0, beta, shifted);

  Membership m;
  if (!query.plan) {
    m.p_value = exact_pi(shifted, regressors, null_set, full_set);
  } else {
    const TauStatistic stat = query.stat ? *query.stat : TauStatistic::f_ratio(extras);
    const PValueReport r = rotation_pvalue(stat, shifted, regressors, null_set, *query.plan);
    m.p_value = *r.p_mc;
    m.mc_se = r.mc_se;
  }
  m.contained = m.p_value >= query.alpha;
  return m;
}

double Ellipsoid::distance(std::span<const double> coords) const {
  if (coords.size() != center.size()) throw DomainError("coordinate vector has the wrong length");
  double d = 0.0;
  for (std::size_t i = 0; i < center.size(); ++i) d += (coords[i] - center[i]) * (coords[i] - center[i]);
  return std::sqrt(d);
}

bool Ellipsoid::contains(std::span<const double> coords) const { return distance(coords) <= radius; }

Ellipsoid scheffe_ellipsoid(std::span<const double> y, const RegressorSet& regressors, const IdSet& null_set,
                            const IdSet& full_set, double alpha) {
  check_alpha(alpha);
  const NestedFit fit = nested_fit(y, regressors, null_set, full_set);
  const RegionFrame frame(regressors, null_set, full_set);
  Ellipsoid e;
  e.center = frame.coordinates(y);
  if (!(std::sqrt(fit.ss_large) > kZeroResidual * std::sqrt(kernels::sum_squares(y)))) {
    e.degenerate = true;
    return e;
  }
  const double a = 0.5 * static_cast<double>(fit.p_star - fit.p);
  const double b = 0.5 * static_cast<double>(fit.n - fit.p_star);
  const double q = numerics::beta_quantile({a, b}, 1.0 - alpha);
  e.radius = q >= 1.0 ? std::numeric_limits<double>::infinity() : std::sqrt(fit.ss_large * q / (1.0 - q));
  return e;
}

CoverageEstimate coverage_sim(const GaussianLinearModel& model, const RegressorSet& regressors,
                              const IdSet& null_set, const IdSet& full_set, double alpha, std::size_t trials,
                              std::uint64_t seed) {
  check_alpha(alpha);
  if (trials < 1) throw DomainError("coverage simulation needs at least one trial");
  const RegionFrame frame(regressors, null_set, full_set);
  const Vector beta = frame.embed(frame.coordinates(model.mean(regressors)));

  std::vector<unsigned char> covered(trials, 0);
  parallel_for(trials, [&](std::size_t t) {
    Rng rng = stream_rng(seed, t);
    Vector y = model.draw(regressors, rng);
    kernels::axpy(-1.0, beta, y);
    covered[t] = exact_pi(y, regressors, null_set, full_set) >= alpha ? 1 : 0;
  });
  std::size_t hits = 0;
  for (unsigned char c : covered) hits += c;

  CoverageEstimate est;
  est.trials = trials;
  const double tr = static_cast<double>(trials);
  est.coverage = static_cast<double>(hits) / tr;
  est.se = std::sqrt(est.coverage * (1.0 - est.coverage) / tr);
  est.nominal_se = std::sqrt(alpha * (1.0 - alpha) / tr);
  return est;
}

}  // namespace exactls
