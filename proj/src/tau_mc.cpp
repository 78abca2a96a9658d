#include "exactls/tau_mc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "exactls/errors.hpp"
#include "exactls/kernels.hpp"
#include "exactls/parallel.hpp"

namespace exactls {

namespace {

constexpr double kStandardizedTol = 1e-10;
constexpr double kSufficiencyTol = 1e-9;
constexpr double kSaturated = std::numeric_limits<double>::max();

OrthoBasis null_basis(const RegressorSet& regressors, const IdSet& null_set) {
  OrthoBasis basis(regressors.n());
  for (const auto& id : null_set) {
    if (!basis.append(regressors.column(id))) {
      throw SingularityError("regressor '" + id + "' is linearly dependent on the preceding columns", id);
    }
  }
  return basis;
}

// Orthonormal vectors completing `base` to a basis of span(base, extras).
// With `strict`, a dependent extra throws SingularityError; otherwise it is skipped.
OrthoBasis extension_basis(const OrthoBasis& base, const RegressorSet& regressors, const IdSet& extras,
                           bool strict) {
  OrthoBasis combined = base;
  OrthoBasis ext(base.dim());
  for (const auto& id : extras) {
    if (combined.append(regressors.column(id))) {
      const auto v = combined[combined.size() - 1];
      ext.append_orthonormal(Vector(v.begin(), v.end()));
    } else if (strict) {
      throw SingularityError("regressor '" + id + "' is linearly dependent on the preceding columns", id);
    }
  }
  return ext;
}

bool disjoint(const IdSet& a, const IdSet& b) { return id_difference(a, b).size() == a.size(); }

// Compiled tau for a fixed set of regressors.
class Evaluator {
 public:
  Evaluator(const TauStatistic& stat, const RegressorSet& regressors, const IdSet& null_set,
            const OrthoBasis& base)
      : stat_(stat), regressors_(regressors), null_set_(null_set), base_(base) {
    const auto p = static_cast<long>(null_set.size());
    n_ = static_cast<long>(regressors.n());
    switch (stat.kind()) {
      case TauStatistic::Kind::f_ratio:
        exts_.push_back(extension_basis(base, regressors, stat.ids(), true));
        p_star_.push_back(p + static_cast<long>(stat.ids().size()));
        break;
      case TauStatistic::Kind::multiple_f:
        for (const auto& m : stat.family()) {
          exts_.push_back(extension_basis(base, regressors, m, true));
          p_star_.push_back(p + static_cast<long>(m.size()));
        }
        break;
      case TauStatistic::Kind::multiple_t:
        exts_.push_back(extension_basis(base, regressors, stat.ids(), false));
        break;
      case TauStatistic::Kind::custom:
        break;
    }
    p_ = p;
  }

  double operator()(std::span<const double> y) const {
    switch (stat_.kind()) {
      case TauStatistic::Kind::custom:
        return stat_.function()(y, regressors_, null_set_);
      case TauStatistic::Kind::multiple_t:
        return multiple_t(y);
      default:
        return max_f(y);
    }
  }

 private:
  double max_f(std::span<const double> y) const {
    Vector r(y.begin(), y.end());
    base_.project_out(r);
    const double ss_n = kernels::sum_squares(r);
    const double y2 = kernels::sum_squares(y);
    if (!(ss_n > kZeroResidual * kZeroResidual * y2)) return 0.0;
    double best = 0.0;
    Vector r_star(r.size());
    for (std::size_t l = 0; l < exts_.size(); ++l) {
      std::copy(r.begin(), r.end(), r_star.begin());
      exts_[l].project_out(r_star);
      const double ss_star = std::min(kernels::sum_squares(r_star), ss_n);
      NestedFit fit{ss_n, ss_star, p_, p_star_[l], n_};
      const FStatistic f = f_statistic(fit);
      best = std::max(best, f.value);
      if (f.saturated) break;
    }
    return best;
  }

  double multiple_t(std::span<const double> y) const {
    Vector r(y.begin(), y.end());
    base_.project_out(r);
    exts_[0].project_out(r);
    const double ss_star = kernels::sum_squares(r);
    const double y2 = kernels::sum_squares(y);
    if (!(ss_star > kZeroResidual * kZeroResidual * y2)) {
      throw DataError("multiple T statistic is undefined: SS_N* = 0");
    }
    double best = 0.0;
    for (const auto& id : stat_.ids()) best = std::max(best, std::fabs(kernels::dot(regressors_.column(id), y)));
    return best / std::sqrt(ss_star);
  }

  const TauStatistic& stat_;
  const RegressorSet& regressors_;
  const IdSet& null_set_;
  const OrthoBasis& base_;
  std::vector<OrthoBasis> exts_;
  std::vector<long> p_star_;
  long p_ = 0;
  long n_ = 0;
};

RegressorSet rotated_copy(const RegressorSet& regressors, const IdSet& ids, const haar::HaarRotation& t) {
  RegressorSet out = regressors;
  for (const auto& id : ids) out.replace(id, t.apply(regressors.column(id)));
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// TauStatistic

TauStatistic TauStatistic::f_ratio(IdSet extras) {
  if (extras.empty()) throw DomainError("F statistic needs at least one extra regressor");
  TauStatistic s;
  s.kind_ = Kind::f_ratio;
  s.name_ = "f_ratio";
  s.ids_ = std::move(extras);
  return s;
}

TauStatistic TauStatistic::multiple_t(IdSet candidates) {
  if (candidates.empty()) throw DomainError("multiple T statistic needs at least one candidate");
  TauStatistic s;
  s.kind_ = Kind::multiple_t;
  s.name_ = "multiple_t";
  s.ids_ = std::move(candidates);
  return s;
}

TauStatistic TauStatistic::multiple_f(std::vector<IdSet> family) {
  if (family.empty()) throw DomainError("multiple F statistic needs a non-empty family");
  for (const auto& m : family) {
    if (m.empty()) throw DomainError("multiple F statistic: every subset must be non-empty");
  }
  TauStatistic s;
  s.kind_ = Kind::multiple_f;
  s.name_ = "multiple_f";
  s.family_ = std::move(family);
  return s;
}

TauStatistic TauStatistic::custom(std::string name, CustomTau fn) {
  if (!fn) throw DomainError("custom statistic needs a callable");
  TauStatistic s;
  s.kind_ = Kind::custom;
  s.name_ = std::move(name);
  s.fn_ = std::move(fn);
  return s;
}

IdSet TauStatistic::involved(const RegressorSet& regressors, const IdSet& null_set) const {
  switch (kind_) {
    case Kind::f_ratio:
    case Kind::multiple_t:
      return ids_;
    case Kind::multiple_f: {
      IdSet all;
      for (const auto& m : family_) all = id_union(all, m);
      return all;
    }
    case Kind::custom:
      return id_difference(regressors.ids(), null_set);
  }
  return {};
}

void TauStatistic::check(const RegressorSet& regressors, const IdSet& null_set) const {
  regressors.check_subset(null_set);
  const std::size_t n = regressors.n();
  const std::size_t p = null_set.size();
  if (p + 1 >= n) {
    std::ostringstream msg;
    msg << "rotation tests need p < n - 1 (p=" << p << ", n=" << n << ")";
    throw DomainError(msg.str());
  }
  const OrthoBasis base = null_basis(regressors, null_set);
  auto check_extra = [&](const IdSet& m, const char* what) {
    regressors.check_subset(m);
    if (!disjoint(m, null_set)) throw DomainError(std::string(what) + " must not overlap the null set");
    if (p + m.size() >= n) throw DomainError(std::string(what) + ": p + #M must be smaller than n");
    (void)extension_basis(base, regressors, m, true);
  };
  switch (kind_) {
    case Kind::f_ratio:
      check_extra(ids_, "F statistic extras");
      break;
    case Kind::multiple_f:
      for (const auto& m : family_) check_extra(m, "multiple F subset");
      break;
    case Kind::multiple_t: {
      regressors.check_subset(ids_);
      if (!disjoint(ids_, null_set)) throw DomainError("multiple T candidates must not overlap the null set");
      for (const auto& id : ids_) {
        const auto x = regressors.column(id);
        const double norm = std::sqrt(kernels::sum_squares(x));
        if (std::fabs(norm - 1.0) > kStandardizedTol) {
          throw DomainError("multiple T candidate '" + id + "' is not unit length; standardize it first");
        }
        for (std::size_t j = 0; j < base.size(); ++j) {
          if (std::fabs(kernels::dot(base[j], x)) > kStandardizedTol) {
            throw DomainError("multiple T candidate '" + id + "' is not orthogonal to V_N; standardize it first");
          }
        }
      }
      break;
    }
    case Kind::custom:
      break;
  }
}

std::string_view evaluation_name(Evaluation e) noexcept {
  return e == Evaluation::rotate_response ? "rotate_response" : "rotate_regressors";
}

void RotationPlan::validate() const {
  if (replications < 1) throw DomainError("rotation plan needs at least one replication");
}

// ---------------------------------------------------------------------------
// Evaluation

double eval_tau(const TauStatistic& stat, std::span<const double> y, const RegressorSet& regressors,
                const IdSet& null_set) {
  if (y.size() != regressors.n()) throw DomainError("response length does not match the regressors");
  stat.check(regressors, null_set);
  const OrthoBasis base = null_basis(regressors, null_set);
  return Evaluator(stat, regressors, null_set, base)(y);
}

double inner_product_discrepancy(const TauStatistic& stat, std::span<const double> y,
                                 const RegressorSet& regressors, const IdSet& null_set, Rng& rng) {
  const double before = eval_tau(stat, y, regressors, null_set);
  const haar::HaarRotation s = haar::sample_haar(regressors.n(), haar::Method::polar, rng);
  const RegressorSet rotated = rotated_copy(regressors, regressors.ids(), s);
  const Vector sy = s.apply(y);
  const double after = eval_tau(stat, sy, rotated, null_set);
  if (before == after) return 0.0;
  if (!std::isfinite(before) || !std::isfinite(after)) return std::numeric_limits<double>::infinity();
  return std::fabs(before - after) / std::max(1.0, std::fabs(before));
}

std::vector<double> rotation_replicates(const TauStatistic& stat, std::span<const double> y,
                                        const RegressorSet& regressors, const IdSet& null_set,
                                        const RotationPlan& plan) {
  plan.validate();
  stat.check(regressors, null_set);
  const ProjectionState state = build_projection(y, regressors, null_set);
  const haar::Stabilizer stab(state.basis());
  const OrthoBasis& base = state.basis();
  const double scale = std::sqrt(state.ss());
  const IdSet moved = stat.involved(regressors, null_set);

  std::vector<double> tau(plan.replications);
  if (plan.evaluation == Evaluation::rotate_response) {
    const Evaluator ev(stat, regressors, null_set, base);
    const auto y_hat = state.y_hat();
    parallel_for(plan.replications, [&](std::size_t i) {
      Rng rng = stream_rng(plan.seed, i);
      Vector yr = haar::sample_unit_complement(stab, rng);
      for (std::size_t j = 0; j < yr.size(); ++j) yr[j] = y_hat[j] + scale * yr[j];
      tau[i] = ev(yr);
    });
  } else {
    parallel_for(plan.replications, [&](std::size_t i) {
      Rng rng = stream_rng(plan.seed, i);
      const haar::HaarRotation t = haar::sample_haar_fixing(stab, haar::Method::gram_schmidt, rng);
      const RegressorSet rotated = rotated_copy(regressors, moved, t);
      tau[i] = Evaluator(stat, rotated, null_set, base)(y);
    });
  }
  return tau;
}

PValueReport rotation_pvalue(const TauStatistic& stat, std::span<const double> y,
                             const RegressorSet& regressors, const IdSet& null_set,
                             const RotationPlan& plan) {
  plan.validate();
  const double observed = eval_tau(stat, y, regressors, null_set);
  if (stat.kind() == TauStatistic::Kind::custom) {
    Rng rng = stream_rng(plan.seed, std::numeric_limits<std::uint64_t>::max());
    const double d = inner_product_discrepancy(stat, y, regressors, null_set, rng);
    if (!(d <= kSufficiencyTol)) {
      std::ostringstream msg;
      msg << "custom statistic '" << stat.name()
          << "' is not a function of inner products (relative discrepancy " << d << ")";
      throw DomainError(msg.str());
    }
  }
  const std::vector<double> tau = rotation_replicates(stat, y, regressors, null_set, plan);
  std::size_t hits = 0;
  for (double t : tau) hits += t >= observed ? 1 : 0;

  const McEstimate est = add_one_estimate(hits, plan.replications);
  PValueReport report;
  report.statistic = observed;
  report.saturated = observed == kSaturated && stat.kind() != TauStatistic::Kind::custom;
  report.p_mc = est.p;
  report.mc_se = est.se;
  report.replications = plan.replications;
  report.seed = plan.seed;
  report.method = PValueMethod::mc_rotation;
  if (stat.kind() == TauStatistic::Kind::f_ratio) {
    const NestedFit fit = nested_fit(y, regressors, null_set, id_union(null_set, stat.ids()));
    if (fit.ss_small > 0.0) report.p_exact = p_value_beta(fit);
  }
  return report;
}

RegressorSet standardize_candidates(const RegressorSet& regressors, const IdSet& null_set,
                                    const IdSet& candidate_ids) {
  regressors.check_subset(null_set);
  regressors.check_subset(candidate_ids);
  if (!disjoint(candidate_ids, null_set)) throw DomainError("candidates must not overlap the null set");
  const OrthoBasis base = null_basis(regressors, null_set);
  RegressorSet out(regressors.n());
  for (const auto& id : null_set) {
    const auto x = regressors.column(id);
    out.add(id, Vector(x.begin(), x.end()));
  }
  IdSet bad;
  for (const auto& id : candidate_ids) {
    const auto x = regressors.column(id);
    Vector w(x.begin(), x.end());
    base.project_out(w);
    const double norm = std::sqrt(kernels::sum_squares(w));
    if (!(norm > kRankTolerance * std::sqrt(kernels::sum_squares(x)))) {
      bad.push_back(id);
      continue;
    }
    for (double& v : w) v /= norm;
    out.add(id, std::move(w));
  }
  if (!bad.empty()) {
    std::string list;
    for (const auto& id : bad) list += (list.empty() ? "" : ", ") + id;
    throw SingularityError("candidates lie in V_N: " + list, bad.front());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Null simulation

Vector GaussianLinearModel::mean(const RegressorSet& regressors) const {
  Vector mu(regressors.n(), 0.0);
  for (const auto& [id, theta] : coefficients) kernels::axpy(theta, regressors.column(id), mu);
  return mu;
}

Vector GaussianLinearModel::draw(const RegressorSet& regressors, Rng& rng) const {
  Vector y = mean(regressors);
  if (sigma == 0.0) return y;
  Vector eps = standard_normal_vector(rng, regressors.n());
  double scale = sigma;
  if (noise == NoiseShape::scaled_spherical) {
    std::chi_squared_distribution<double> chi2(2.0);
    scale /= std::sqrt(chi2(rng) / 2.0);
  }
  kernels::axpy(scale, eps, y);
  return y;
}

UniformityReport null_simulation(const TauStatistic& stat, const RegressorSet& regressors,
                                 const IdSet& null_set, const GaussianLinearModel& model,
                                 std::size_t trials, const std::optional<RotationPlan>& plan,
                                 std::uint64_t seed) {
  if (trials < 1) throw DomainError("null simulation needs at least one trial");
  if (!(model.sigma >= 0.0) || !std::isfinite(model.sigma)) throw DomainError("noise scale must be >= 0");
  for (const auto& [id, theta] : model.coefficients) {
    if (!regressors.contains(id)) throw DomainError("model coefficient for unknown regressor '" + id + "'");
    if (theta != 0.0 && std::find(null_set.begin(), null_set.end(), id) == null_set.end()) {
      throw DomainError("null simulation requires theta = 0 outside N (regressor '" + id + "')");
    }
  }
  if (!plan && stat.kind() != TauStatistic::Kind::f_ratio) {
    throw DomainError("exact null simulation is only available for the F statistic");
  }
  stat.check(regressors, null_set);

  UniformityReport report;
  report.trials = trials;
  report.p_values.resize(trials);
  auto exact_p = [&](const Vector& y) {
    const NestedFit fit = nested_fit(y, regressors, null_set, id_union(null_set, stat.ids()));
    if (!(std::sqrt(fit.ss_small) > kZeroResidual * std::sqrt(kernels::sum_squares(y)))) return 1.0;
    return p_value_beta(fit);
  };
  if (plan) {
    for (std::size_t t = 0; t < trials; ++t) {
      Rng rng = stream_rng(seed, t);
      const Vector y = model.draw(regressors, rng);
      RotationPlan inner = *plan;
      inner.seed = rng();
      report.p_values[t] = *rotation_pvalue(stat, y, regressors, null_set, inner).p_mc;
    }
  } else {
    parallel_for(trials, [&](std::size_t t) {
      Rng rng = stream_rng(seed, t);
      report.p_values[t] = exact_p(model.draw(regressors, rng));
    });
  }
  report.ks = ks::uniform(report.p_values);
  return report;
}

}  // namespace exactls
