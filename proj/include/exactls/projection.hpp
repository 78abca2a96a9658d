#pragma once

// Least squares core: orthonormal bases of V_N = span(x_nu : nu in N),
// projections, residuals and residual sums of squares, with O(n p)
// single-column extension.
//
// Orthogonalisation is modified Gram-Schmidt with one reorthogonalisation
// pass. A column is treated as linearly dependent on the current basis when
// the norm of its complement component is at most kRankTolerance times its
// own norm.

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace exactls {

using Vector = std::vector<double>;
using IdSet = std::vector<std::string>;

inline constexpr double kRankTolerance = 1e-8;
/// Residuals with ||y - y_hat|| <= kZeroResidual * ||y|| count as zero.
inline constexpr double kZeroResidual = 1e-10;

/// Named regressor columns x_nu, all of length n, in insertion order.
class RegressorSet {
 public:
  explicit RegressorSet(std::size_t n = 0) : n_(n) {}

  std::size_t n() const noexcept { return n_; }
  std::size_t size() const noexcept { return ids_.size(); }
  const std::vector<std::string>& ids() const noexcept { return ids_; }

  /// Throws DomainError on a length mismatch or a duplicate id.
  void add(std::string id, Vector column);
  /// Replaces an existing column (same length).
  void replace(std::string_view id, Vector column);

  bool contains(std::string_view id) const;
  std::span<const double> column(std::string_view id) const;

  /// Throws DomainError unless every id is present and ids are unique.
  void check_subset(const IdSet& ids) const;

 private:
  std::size_t n_;
  std::vector<std::string> ids_;
  std::vector<Vector> columns_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// ids in `a` followed by ids of `b` not already in `a`.
IdSet id_union(const IdSet& a, const IdSet& b);
/// ids in `a` that are not in `b`, order preserved.
IdSet id_difference(const IdSet& a, const IdSet& b);
/// True if every id of `a` occurs in `b`.
bool id_subset(const IdSet& a, const IdSet& b);

/// Orthonormal vectors in R^n. Copies share the stored vectors.
class OrthoBasis {
 public:
  explicit OrthoBasis(std::size_t n = 0) : n_(n) {}

  std::size_t dim() const noexcept { return n_; }
  std::size_t size() const noexcept { return vectors_.size(); }
  std::span<const double> operator[](std::size_t j) const noexcept { return *vectors_[j]; }

  /// Removes the component of x lying in the span (two MGS sweeps).
  void project_out(std::span<double> x) const noexcept;

  /// Appends the normalised complement component of x. Returns false and
  /// leaves the basis unchanged when x is numerically inside the span.
  bool append(std::span<const double> x, double rel_tol = kRankTolerance);

  /// Appends a vector the caller guarantees to be unit length and orthogonal
  /// to the current basis.
  void append_orthonormal(Vector v);

  /// Coefficients b_j^T x for every basis vector.
  Vector coefficients(std::span<const double> x) const;

 private:
  std::size_t n_;
  std::vector<std::shared_ptr<const Vector>> vectors_;
};

/// Projection of a fixed response y onto V_N.
class ProjectionState {
 public:
  /// N = empty set: y_hat = 0 and SS = ||y||^2.
  static ProjectionState empty(std::span<const double> y);

  std::size_t n() const noexcept { return basis_.dim(); }
  std::size_t rank() const noexcept { return basis_.size(); }
  const OrthoBasis& basis() const noexcept { return basis_; }
  const IdSet& ids() const noexcept { return ids_; }

  std::span<const double> y() const noexcept { return *y_; }
  std::span<const double> y_hat() const noexcept { return y_hat_; }
  std::span<const double> residual() const noexcept { return residual_; }
  /// SS_N = ||y - y_hat||^2.
  double ss() const noexcept { return ss_; }

  /// Same subspace, different response.
  ProjectionState reproject(std::span<const double> y) const;

 private:
  friend ProjectionState build_projection(std::span<const double>, const RegressorSet&,
                                          const IdSet&);
  friend struct ProjectionAccess;

  OrthoBasis basis_;
  IdSet ids_;
  std::shared_ptr<const Vector> y_;
  Vector y_hat_;
  Vector residual_;
  double ss_ = 0.0;
};

/// Result of adding one column to a projection.
struct Extension {
  ProjectionState state;
  double ss_drop = 0.0;  // SS_N - SS_{N + x}
  bool added = false;    // false when x was numerically inside V_N
};

/// Projects y onto V_N. Throws SingularityError naming the first column that
/// is dependent on the earlier ones, DomainError on size mismatches or when
/// #N >= n.
ProjectionState build_projection(std::span<const double> y, const RegressorSet& regressors,
                                 const IdSet& subset);

/// Adds x to the basis; ss_drop = (r^T x~)^2 with x~ the normalised
/// complement component of x. If x lies in V_N the state is returned unchanged
/// with ss_drop = 0.
Extension extend_with_column(const ProjectionState& state, std::span<const double> x,
                             std::string id = {});

/// The ss_drop extend_with_column would report, without building a new state.
double peek_ss_drop(const ProjectionState& state, std::span<const double> x);

/// Orthogonal projection of x onto the complement of V_N.
Vector project_onto_complement(const ProjectionState& state, std::span<const double> x);

}  // namespace exactls
