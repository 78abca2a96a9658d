#include "exactls/projection.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_set>

#include "exactls/errors.hpp"
#include "exactls/kernels.hpp"

namespace exactls {

// ---------------------------------------------------------------------------
// RegressorSet

void RegressorSet::add(std::string id, Vector column) {
  if (column.size() != n_) {
    std::ostringstream msg;
    msg << "regressor '" << id << "' has length " << column.size() << ", expected " << n_;
    throw DomainError(msg.str());
  }
  if (index_.count(id) != 0) throw DomainError("duplicate regressor id '" + id + "'");
  index_.emplace(id, ids_.size());
  ids_.push_back(std::move(id));
  columns_.push_back(std::move(column));
}

void RegressorSet::replace(std::string_view id, Vector column) {
  const auto it = index_.find(std::string(id));
  if (it == index_.end()) throw DomainError("unknown regressor id '" + std::string(id) + "'");
  if (column.size() != n_) throw DomainError("replacement column has wrong length");
  columns_[it->second] = std::move(column);
}

bool RegressorSet::contains(std::string_view id) const {
  return index_.count(std::string(id)) != 0;
}

std::span<const double> RegressorSet::column(std::string_view id) const {
  const auto it = index_.find(std::string(id));
  if (it == index_.end()) throw DomainError("unknown regressor id '" + std::string(id) + "'");
  return columns_[it->second];
}

void RegressorSet::check_subset(const IdSet& ids) const {
  std::unordered_set<std::string> seen;
  for (const auto& id : ids) {
    if (!contains(id)) throw DomainError("unknown regressor id '" + id + "'");
    if (!seen.insert(id).second) throw DomainError("regressor id '" + id + "' listed twice");
  }
}

IdSet id_union(const IdSet& a, const IdSet& b) {
  IdSet out = a;
  for (const auto& id : b) {
    if (std::find(a.begin(), a.end(), id) == a.end()) out.push_back(id);
  }
  return out;
}

IdSet id_difference(const IdSet& a, const IdSet& b) {
  IdSet out;
  for (const auto& id : a) {
    if (std::find(b.begin(), b.end(), id) == b.end()) out.push_back(id);
  }
  return out;
}

bool id_subset(const IdSet& a, const IdSet& b) {
  return std::all_of(a.begin(), a.end(),
                     [&](const std::string& id) { return std::find(b.begin(), b.end(), id) != b.end(); });
}

// ---------------------------------------------------------------------------
// OrthoBasis

void OrthoBasis::project_out(std::span<double> x) const noexcept {
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& v : vectors_) {
      const double c = kernels::dot(*v, x);
      kernels::axpy(-c, *v, x);
    }
  }
}

bool OrthoBasis::append(std::span<const double> x, double rel_tol) {
  if (x.size() != n_) throw DomainError("vector length does not match basis dimension");
  const double norm = std::sqrt(kernels::sum_squares(x));
  Vector w(x.begin(), x.end());
  project_out(w);
  const double rest = std::sqrt(kernels::sum_squares(w));
  if (!(rest > rel_tol * norm) || rest == 0.0) return false;
  for (double& v : w) v /= rest;
  vectors_.push_back(std::make_shared<const Vector>(std::move(w)));
  return true;
}

void OrthoBasis::append_orthonormal(Vector v) {
  if (v.size() != n_) throw DomainError("vector length does not match basis dimension");
  vectors_.push_back(std::make_shared<const Vector>(std::move(v)));
}

Vector OrthoBasis::coefficients(std::span<const double> x) const {
  Vector c(vectors_.size());
  for (std::size_t j = 0; j < vectors_.size(); ++j) c[j] = kernels::dot(*vectors_[j], x);
  return c;
}

// ---------------------------------------------------------------------------
// ProjectionState

struct ProjectionAccess {
  static ProjectionState make(OrthoBasis basis, IdSet ids, std::shared_ptr<const Vector> y) {
    ProjectionState s;
    s.basis_ = std::move(basis);
    s.ids_ = std::move(ids);
    s.y_ = std::move(y);
    s.residual_.assign(s.y_->begin(), s.y_->end());
    s.basis_.project_out(s.residual_);
    s.y_hat_.resize(s.residual_.size());
    for (std::size_t i = 0; i < s.residual_.size(); ++i) s.y_hat_[i] = (*s.y_)[i] - s.residual_[i];
    s.ss_ = kernels::sum_squares(s.residual_);
    return s;
  }

  static ProjectionState extended(const ProjectionState& old, Vector unit, std::string id,
                                  double coef) {
    ProjectionState s;
    s.basis_ = old.basis_;
    s.basis_.append_orthonormal(unit);
    s.ids_ = old.ids_;
    s.ids_.push_back(std::move(id));
    s.y_ = old.y_;
    s.residual_ = old.residual_;
    kernels::axpy(-coef, unit, s.residual_);
    s.y_hat_.resize(s.residual_.size());
    for (std::size_t i = 0; i < s.residual_.size(); ++i) s.y_hat_[i] = (*s.y_)[i] - s.residual_[i];
    s.ss_ = kernels::sum_squares(s.residual_);
    return s;
  }
};

ProjectionState ProjectionState::empty(std::span<const double> y) {
  return ProjectionAccess::make(OrthoBasis(y.size()), {},
                                std::make_shared<const Vector>(y.begin(), y.end()));
}

ProjectionState ProjectionState::reproject(std::span<const double> y) const {
  if (y.size() != n()) throw DomainError("response length does not match projection dimension");
  return ProjectionAccess::make(basis_, ids_, std::make_shared<const Vector>(y.begin(), y.end()));
}

ProjectionState build_projection(std::span<const double> y, const RegressorSet& regressors,
                                 const IdSet& subset) {
  if (y.size() != regressors.n()) {
    std::ostringstream msg;
    msg << "response has length " << y.size() << " but regressors have length " << regressors.n();
    throw DomainError(msg.str());
  }
  regressors.check_subset(subset);
  if (subset.size() >= regressors.n()) {
    std::ostringstream msg;
    msg << "subset of size " << subset.size() << " needs fewer elements than n = " << regressors.n();
    throw DomainError(msg.str());
  }
  OrthoBasis basis(y.size());
  for (const auto& id : subset) {
    if (!basis.append(regressors.column(id))) {
      throw SingularityError("regressor '" + id + "' is linearly dependent on the preceding columns",
                             id);
    }
  }
  return ProjectionAccess::make(std::move(basis), subset,
                                std::make_shared<const Vector>(y.begin(), y.end()));
}

namespace {

struct Complement {
  Vector unit;        // normalised complement component, empty if dependent
  double coef = 0.0;  // unit^T residual
};

Complement complement_of(const ProjectionState& state, std::span<const double> x) {
  if (x.size() != state.n()) {
    std::ostringstream msg;
    msg << "column has length " << x.size() << ", expected " << state.n();
    throw DomainError(msg.str());
  }
  Complement out;
  const double norm = std::sqrt(kernels::sum_squares(x));
  Vector w(x.begin(), x.end());
  state.basis().project_out(w);
  const double rest = std::sqrt(kernels::sum_squares(w));
  if (!(rest > kRankTolerance * norm) || rest == 0.0) return out;
  for (double& v : w) v /= rest;
  out.coef = kernels::dot(w, state.residual());
  out.unit = std::move(w);
  return out;
}

}  // namespace

Extension extend_with_column(const ProjectionState& state, std::span<const double> x,
                             std::string id) {
  Complement comp = complement_of(state, x);
  if (comp.unit.empty()) return Extension{state, 0.0, false};
  Extension ext;
  ext.ss_drop = comp.coef * comp.coef;
  ext.state = ProjectionAccess::extended(state, std::move(comp.unit), std::move(id), comp.coef);
  ext.added = true;
  return ext;
}

double peek_ss_drop(const ProjectionState& state, std::span<const double> x) {
  const Complement comp = complement_of(state, x);
  return comp.coef * comp.coef;
}

Vector project_onto_complement(const ProjectionState& state, std::span<const double> x) {
  if (x.size() != state.n()) throw DomainError("vector length does not match projection dimension");
  Vector w(x.begin(), x.end());
  state.basis().project_out(w);
  return w;
}

}  // namespace exactls
