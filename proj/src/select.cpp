#include "exactls/select.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "exactls/errors.hpp"
#include "exactls/kernels.hpp"
#include "exactls/numerics.hpp"
#include "exactls/parallel.hpp"
#include "exactls/rng.hpp"

namespace exactls {

namespace {

// Cached projected norms are refreshed by explicit projection once they drop
// below this fraction of their last exact value.
constexpr double kRefreshRatio = 1e-4;

std::uint64_t checked_count(std::size_t d, std::size_t k) {
  // C(d + k, k) built as prod (d + i) / i, dividing out gcds so every
  // intermediate is an exact binomial coefficient.
  std::uint64_t c = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    const std::uint64_t g = std::gcd(c, i);
    const std::uint64_t factor = (d + i) / (i / g);
    if (__builtin_mul_overflow(c / g, factor, &c)) throw ResourceError("interaction count overflows 64 bits");
  }
  return c;
}

}  // namespace

void InteractionSpec::validate() const {
  if (base_count < 1) throw DomainError("interaction expansion needs at least one covariate");
  if (max_order < 1) throw DomainError("max_order must be at least 1");
}

std::uint64_t interaction_count(const InteractionSpec& spec) {
  spec.validate();
  const std::uint64_t c = checked_count(spec.base_count, spec.max_order);
  return spec.include_intercept ? c : c - 1;
}

InteractionStream::InteractionStream(DenseMatrix data, std::vector<std::string> names, InteractionSpec spec,
                                     StreamBudget budget)
    : spec_(spec) {
  spec_.validate();
  if (spec_.base_count != data.cols() || names.size() != data.cols()) {
    throw DomainError("covariate matrix, names and base_count disagree");
  }
  if (spec_.max_order > budget.max_order || spec_.base_count > std::numeric_limits<std::uint16_t>::max()) {
    std::ostringstream msg;
    msg << "interaction order " << spec_.max_order << " exceeds the budget of " << budget.max_order;
    throw ResourceError(msg.str());
  }
  count_ = interaction_count(spec_);
  if (count_ > budget.max_candidates) {
    std::ostringstream msg;
    msg << "interaction expansion of order " << spec_.max_order << " over " << spec_.base_count
        << " covariates yields " << count_ << " candidates, above the budget of " << budget.max_candidates;
    throw ResourceError(msg.str());
  }
  for (std::size_t j = 0; j < data.cols(); ++j) {
    for (double v : data.col(j)) {
      if (!std::isfinite(v)) throw DataError("covariate '" + names[j] + "' contains a non-finite value");
    }
  }
  data_ = std::move(data);
  names_ = std::move(names);

  const std::size_t d = spec_.base_count;
  const std::size_t k = spec_.max_order;
  degree_.reserve(count_);
  terms_.reserve(count_ * k);
  std::vector<std::uint16_t> t(k, 0);
  for (std::size_t m = spec_.include_intercept ? 0 : 1; m <= k; ++m) {
    std::fill(t.begin(), t.end(), 0);
    while (true) {
      degree_.push_back(static_cast<std::uint8_t>(m));
      terms_.insert(terms_.end(), t.begin(), t.end());
      // Next non-decreasing tuple of length m in lexicographic order.
      std::size_t i = m;
      while (i > 0 && t[i - 1] == d - 1) --i;
      if (i == 0) break;
      const std::uint16_t v = static_cast<std::uint16_t>(t[i - 1] + 1);
      for (std::size_t j = i - 1; j < m; ++j) t[j] = v;
    }
  }
}

std::vector<std::size_t> InteractionStream::term(std::uint64_t id) const {
  if (id >= count_) throw DomainError("candidate id out of range");
  const std::size_t k = spec_.max_order;
  std::vector<std::size_t> out(degree_[id]);
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = terms_[id * k + j];
  return out;
}

std::string InteractionStream::name(std::uint64_t id) const {
  const auto t = term(id);
  if (t.empty()) return "_const";
  std::string s = names_[t[0]];
  for (std::size_t j = 1; j < t.size(); ++j) s += "*" + names_[t[j]];
  return s;
}

void InteractionStream::fill(std::uint64_t first, std::size_t count, std::span<double> out) const {
  const std::size_t n = rows();
  const std::size_t k = spec_.max_order;
  if (first + count > count_ || out.size() < n * count) throw DomainError("fill request out of range");
  for (std::size_t c = 0; c < count; ++c) {
    const std::uint64_t id = first + c;
    const std::uint16_t* t = &terms_[id * k];
    auto col = out.subspan(c * n, n);
    switch (degree_[id]) {
      case 0:
        std::fill(col.begin(), col.end(), 1.0);
        break;
      case 1: {
        const auto z = data_.col(t[0]);
        std::copy(z.begin(), z.end(), col.begin());
        break;
      }
      default:
        kernels::multiply(data_.col(t[0]), data_.col(t[1]), col);
        for (std::size_t j = 2; j < degree_[id]; ++j) kernels::multiply(col, data_.col(t[j]), col);
    }
  }
}

std::unique_ptr<InteractionStream> expand_interactions(const DenseMatrix& data, std::vector<std::string> names,
                                                       const InteractionSpec& spec, StreamBudget budget) {
  return std::make_unique<InteractionStream>(data, std::move(names), spec, budget);
}

MaterializedCandidates::MaterializedCandidates(const RegressorSet& set) : rows_(set.n()), names_(set.ids()) {
  data_.reserve(rows_ * names_.size());
  for (const auto& id : names_) {
    const auto x = set.column(id);
    data_.insert(data_.end(), x.begin(), x.end());
  }
}

MaterializedCandidates::MaterializedCandidates(const CandidateSource& source) : rows_(source.rows()) {
  const std::uint64_t q = source.size();
  names_.reserve(q);
  for (std::uint64_t j = 0; j < q; ++j) names_.push_back(source.name(j));
  data_.resize(rows_ * q);
  source.fill(0, q, data_);
}

void MaterializedCandidates::fill(std::uint64_t first, std::size_t count, std::span<double> out) const {
  if (first + count > names_.size() || out.size() < rows_ * count) throw DomainError("fill request out of range");
  std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(first * rows_), rows_ * count, out.begin());
}

double adjust_pvalue(double p, std::uint64_t q, Adjustment method) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("p-value outside [0, 1]");
  if (q <= 1) return p;
  const double qd = static_cast<double>(q);
  if (method == Adjustment::bonferroni) return std::min(1.0, qd * p);
  if (p >= 1.0) return 1.0;
  return std::clamp(-std::expm1(qd * std::log1p(-p)), 0.0, 1.0);
}

void SelectionOptions::validate() const {
  if (!(alpha0 >= 0.0 && alpha0 <= 1.0)) throw DomainError("alpha0 must lie in [0, 1]");
  if (block_cols < 1) throw DomainError("block size must be at least one column");
}

std::string_view stop_reason_name(StopReason r) noexcept {
  switch (r) {
    case StopReason::threshold_exceeded:
      return "threshold_exceeded";
    case StopReason::max_steps:
      return "max_steps";
    case StopReason::residual_zero:
      return "residual_zero";
    case StopReason::candidates_exhausted:
      return "candidates_exhausted";
  }
  return "unknown";
}

IdSet SelectionTrace::selected() const {
  IdSet ids;
  for (const auto& s : steps) ids.push_back(s.id);
  return ids;
}

void SelectionTrace::validate(double alpha0) const {
  double prev = ss_initial;
  for (const auto& s : steps) {
    if (!(s.ss_after < prev)) throw DomainError("selection trace: SS is not strictly decreasing");
    if (!(s.p_adjusted <= alpha0)) throw DomainError("selection trace: accepted step above the threshold");
    prev = s.ss_after;
  }
}

namespace {

struct BlockBest {
  double drop = -1.0;
  std::uint64_t id = 0;
  std::uint64_t eligible = 0;
};

// Per-candidate scan state kept between steps.
struct ScanCache {
  std::vector<double> raw2;   // ||x||^2
  std::vector<double> ref2;   // last exactly computed projected norm^2
  std::vector<double> proj2;  // current projected norm^2
  std::vector<unsigned char> alive;
};

}  // namespace

SelectionTrace stepwise_select(std::span<const double> y, const CandidateSource& candidates,
                               const SelectionOptions& options) {
  options.validate();
  const std::size_t n = candidates.rows();
  const std::uint64_t q_total = candidates.size();
  if (n < 2) throw DomainError("selection needs n > 1");
  if (y.size() != n) throw DomainError("response length does not match the candidates");
  if (q_total == 0) throw DomainError("candidate stream is empty");
  for (double v : y) {
    if (!std::isfinite(v)) throw DataError("response contains a non-finite value");
  }

  SelectionTrace trace;
  trace.n = n;
  trace.candidate_count = q_total;
  trace.max_steps = options.max_steps.value_or(n / 10);

  ProjectionState state = ProjectionState::empty(y);
  trace.ss_initial = state.ss();
  const double y2 = state.ss();
  if (y2 == 0.0) {
    trace.stop = StopReason::residual_zero;
    return trace;
  }

  const std::size_t block = options.block_cols;
  const std::size_t blocks = static_cast<std::size_t>((q_total + block - 1) / block);
  ScanCache cache;
  cache.raw2.resize(q_total);
  cache.ref2.resize(q_total);
  cache.proj2.resize(q_total);
  cache.alive.assign(q_total, 1);
  bool first_scan = true;
  Vector b_new;  // basis vector added by the previous step, not yet applied to the cache

  while (true) {
    if (trace.steps.size() >= trace.max_steps) {
      trace.stop = StopReason::max_steps;
      break;
    }
    const std::size_t p = state.rank();
    if (p + 2 > n) {
      trace.stop = StopReason::candidates_exhausted;
      break;
    }

    const auto r = state.residual();
    const OrthoBasis& basis = state.basis();
    std::vector<BlockBest> best(blocks);
    parallel_for(blocks, [&](std::size_t blk) {
      const std::uint64_t first = static_cast<std::uint64_t>(blk) * block;
      const std::size_t count = static_cast<std::size_t>(std::min<std::uint64_t>(block, q_total - first));
      std::vector<double> buf(n * count);
      candidates.fill(first, count, buf);
      Vector w(n);
      BlockBest local;
      for (std::size_t c = 0; c < count; ++c) {
        const std::uint64_t j = first + c;
        const std::span<const double> x(buf.data() + c * n, n);
        if (first_scan) {
          const double raw2 = kernels::sum_squares(x);
          if (!std::isfinite(raw2)) {
            if (std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); })) {
              throw NumericalError("candidate '" + candidates.name(j) + "' overflows its squared norm; rescale covariates");
            }
            throw DataError("candidate '" + candidates.name(j) + "' contains a non-finite value");
          }
          cache.raw2[j] = cache.ref2[j] = cache.proj2[j] = raw2;
          if (!(raw2 > 0.0)) cache.alive[j] = 0;
        }
        if (!cache.alive[j]) continue;
        double xr;
        if (!b_new.empty()) {
          const auto [xb, xr_] = kernels::dot2(x, b_new, r);
          cache.proj2[j] -= xb * xb;
          xr = xr_;
        } else {
          xr = kernels::dot(x, r);
        }
        if (cache.proj2[j] < kRefreshRatio * cache.ref2[j]) {
          std::copy(x.begin(), x.end(), w.begin());
          basis.project_out(w);
          cache.proj2[j] = cache.ref2[j] = kernels::sum_squares(w);
          if (!(cache.proj2[j] > kRankTolerance * kRankTolerance * cache.raw2[j])) {
            cache.alive[j] = 0;
            continue;
          }
          xr = kernels::dot(w, r);
        }
        ++local.eligible;
        const double drop = xr * xr / cache.proj2[j];
        if (drop > local.drop) {
          local.drop = drop;
          local.id = j;
        }
      }
      best[blk] = local;
    });
    first_scan = false;
    b_new.clear();

    BlockBest overall;
    for (const auto& b : best) {
      overall.eligible += b.eligible;
      if (b.eligible > 0 && b.drop > overall.drop) {
        overall.drop = b.drop;
        overall.id = b.id;
      }
    }
    if (overall.eligible == 0) {
      trace.stop = StopReason::candidates_exhausted;
      break;
    }

    Vector x(n);
    candidates.fill(overall.id, 1, x);
    const std::string id = candidates.name(overall.id);
    Extension ext = extend_with_column(state, x, id);
    cache.alive[overall.id] = 0;
    if (!ext.added) continue;  // numerically inside V_N after all; rescan without it

    SelectionStep step;
    step.candidate = overall.id;
    step.id = id;
    step.ss_before = state.ss();
    step.ss_after = std::min(ext.state.ss(), state.ss());
    step.scanned = overall.eligible;
    const double a = 0.5 * static_cast<double>(n - p - 1);
    step.p_raw = numerics::beta_cdf({a, 0.5}, std::clamp(step.ss_after / step.ss_before, 0.0, 1.0));
    step.p_adjusted = adjust_pvalue(step.p_raw, step.scanned, options.adjustment);
    if (!(step.p_adjusted <= options.alpha0) || !(step.ss_after < step.ss_before)) {
      trace.rejected = step;
      trace.stop = StopReason::threshold_exceeded;
      break;
    }
    state = std::move(ext.state);
    const auto added = state.basis()[state.rank() - 1];
    b_new.assign(added.begin(), added.end());
    trace.steps.push_back(std::move(step));
    if (!(std::sqrt(state.ss()) > kZeroResidual * std::sqrt(y2))) {
      trace.stop = StopReason::residual_zero;
      break;
    }
  }
  return trace;
}

NullRate selection_null_rate(const CandidateSource& candidates, double alpha0, std::size_t trials,
                             std::uint64_t seed, Adjustment adjustment, std::size_t block_cols) {
  if (trials < 1) throw DomainError("null rate needs at least one trial");
  SelectionOptions opt;
  opt.alpha0 = alpha0;
  opt.max_steps = 1;
  opt.adjustment = adjustment;
  opt.block_cols = block_cols;
  opt.validate();
  NullRate out;
  out.trials = trials;
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng = stream_rng(seed, t);
    const Vector y = standard_normal_vector(rng, candidates.rows());
    if (!stepwise_select(y, candidates, opt).steps.empty()) ++out.selected;
  }
  const double tr = static_cast<double>(trials);
  out.rate = static_cast<double>(out.selected) / tr;
  out.se = std::sqrt(std::max(out.rate * (1.0 - out.rate), alpha0 * (1.0 - alpha0)) / tr);
  return out;
}

SyntheticData synthetic_interactions(std::size_t n, std::size_t d, bool planted, double snr, std::uint64_t seed) {
  if (n < 2 || d < 1) throw DomainError("synthetic data needs n >= 2 and d >= 1");
  if (planted && (d < 9 || !(snr > 0.0))) throw DomainError("planted model needs d >= 9 and snr > 0");
  SyntheticData out;
  out.covariates = DenseMatrix(n, d);
  Rng rng = stream_rng(seed, 0);
  fill_standard_normal(rng, out.covariates.data());
  for (std::size_t j = 0; j < d; ++j) out.names.push_back("z" + std::to_string(j + 1));
  out.y.assign(n, 0.0);
  if (planted) {
    const std::vector<std::vector<std::size_t>> terms = {{0}, {1, 2}, {3, 4, 5}, {6, 7}, {8}};
    for (const auto& t : terms) {
      std::string name;
      for (std::size_t i = 0; i < n; ++i) {
        double v = 1.0;
        for (std::size_t j : t) v *= out.covariates(i, j);
        out.y[i] += v;
      }
      for (std::size_t j : t) name += (name.empty() ? "" : "*") + out.names[j];
      out.planted.push_back(name);
    }
  }
  const double noise_sd = planted ? std::sqrt(5.0 / snr) : 1.0;
  Rng noise = stream_rng(seed, 1);
  std::normal_distribution<double> z(0.0, noise_sd);
  for (double& v : out.y) v += z(noise);
  return out;
}

}  // namespace exactls
