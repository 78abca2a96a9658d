#pragma once

// Confidence regions C_alpha(y) = {beta in W : pi(y - beta) >= alpha} with
// W = V_{N*} intersected with the orthogonal complement of V_N. For the F
// statistic the region is the Scheffe ellipsoid
//   ||beta - P_W y||^2 <= SS_{N*} q / (1 - q),
//   q = beta_quantile((p* - p)/2, (n - p*)/2, 1 - alpha).

#include <cstdint>
#include <optional>
#include <span>

#include "exactls/projection.hpp"
#include "exactls/tau_mc.hpp"

namespace exactls {

/// Orthonormal basis w_1..w_{p*-p} of W.
class RegionFrame {
 public:
  /// Throws DomainError unless N is a subset of N* and #N* < n,
  /// SingularityError when N* is linearly dependent.
  RegionFrame(const RegressorSet& regressors, const IdSet& null_set, const IdSet& full_set);

  std::size_t n() const noexcept { return basis_.dim(); }
  std::size_t dim() const noexcept { return basis_.size(); }
  const OrthoBasis& basis() const noexcept { return basis_; }
  const OrthoBasis& null_basis() const noexcept { return null_; }

  /// sum_i coords_i w_i
  Vector embed(std::span<const double> coords) const;
  /// (w_i^T v)_i, the coordinates of P_W v.
  Vector coordinates(std::span<const double> v) const;
  /// Maps beta to R^n: frame coordinates (length dim) are embedded, ambient
  /// vectors (length n) are checked to lie in W within 1e-10 (DomainError).
  Vector ambient(std::span<const double> beta) const;

 private:
  OrthoBasis null_;
  OrthoBasis basis_;
};

struct RegionQuery {
  Vector beta;  // frame coordinates, or an ambient vector of length n
  double alpha = 0.05;
  std::optional<TauStatistic> stat;  // nullopt: F statistic of N against N*
  std::optional<RotationPlan> plan;  // nullopt: exact beta p-value (f_ratio only)

  void validate() const;
};

struct Membership {
  bool contained = false;
  double p_value = 1.0;
  std::optional<double> mc_se;
};

Membership region_contains(const RegionQuery& query, std::span<const double> y, const RegressorSet& regressors,
                           const IdSet& null_set, const IdSet& full_set);

struct Ellipsoid {
  Vector center;  // frame coordinates
  double radius = 0.0;
  bool degenerate = false;  // zero residual in V_{N*}: the region is {center}

  /// ||coords - center|| <= radius
  bool contains(std::span<const double> coords) const;
  double distance(std::span<const double> coords) const;
};

Ellipsoid scheffe_ellipsoid(std::span<const double> y, const RegressorSet& regressors, const IdSet& null_set,
                            const IdSet& full_set, double alpha);

struct CoverageEstimate {
  double coverage = 0.0;
  double se = 0.0;          // binomial SE at the observed coverage
  double nominal_se = 0.0;  // sqrt(alpha (1 - alpha) / trials)
  std::size_t trials = 0;
};

/// Fraction of simulated responses whose exact F-region contains the true
/// beta = P_W mu.
CoverageEstimate coverage_sim(const GaussianLinearModel& model, const RegressorSet& regressors,
                              const IdSet& null_set, const IdSet& full_set, double alpha, std::size_t trials,
                              std::uint64_t seed);

}  // namespace exactls
