#pragma once

// Rotation p-values pi(y) = P(tau(T y) >= tau(y) | y) for T ~ Haar on the
// stabilizer of V_N, for the F statistic, the multiple T statistic, the
// multiple F statistic and caller-supplied statistics.
//
// Two evaluations with the same law:
//   rotate_response    tau(y_hat + ||eps_hat|| u), u uniform on the unit
//                      sphere of V_N's complement
//   rotate_regressors  tau(y, (T x_nu)_nu) with the regressors rotated

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "exactls/exact_test.hpp"
#include "exactls/haar.hpp"
#include "exactls/ks.hpp"
#include "exactls/projection.hpp"
#include "exactls/rng.hpp"

namespace exactls {

/// Custom statistic: must depend on y and the regressors only through inner
/// products and must be reentrant.
using CustomTau =
    std::function<double(std::span<const double> y, const RegressorSet& regressors, const IdSet& null_set)>;

class TauStatistic {
 public:
  enum class Kind { f_ratio, multiple_t, multiple_f, custom };

  /// F statistic of N against N + extras.
  static TauStatistic f_ratio(IdSet extras);
  /// max_nu |x_nu^T y| / SS_{N*}^{1/2} over standardized candidates.
  static TauStatistic multiple_t(IdSet candidates);
  /// max_lambda F_lambda, F_lambda the F statistic of N against N + M_lambda.
  static TauStatistic multiple_f(std::vector<IdSet> family);
  static TauStatistic custom(std::string name, CustomTau fn);

  Kind kind() const noexcept { return kind_; }
  const std::string& name() const noexcept { return name_; }
  /// Extras for f_ratio, candidates for multiple_t.
  const IdSet& ids() const noexcept { return ids_; }
  const std::vector<IdSet>& family() const noexcept { return family_; }
  const CustomTau& function() const noexcept { return fn_; }

  /// Regressors beyond N the statistic reads. Custom statistics read all of them.
  IdSet involved(const RegressorSet& regressors, const IdSet& null_set) const;

  /// Checks the kind-specific invariants against a data set. Throws
  /// DomainError (or SingularityError for dependent multiple_f subsets).
  void check(const RegressorSet& regressors, const IdSet& null_set) const;

 private:
  Kind kind_ = Kind::f_ratio;
  std::string name_;
  IdSet ids_;
  std::vector<IdSet> family_;
  CustomTau fn_;
};

enum class Evaluation { rotate_response, rotate_regressors };

std::string_view evaluation_name(Evaluation e) noexcept;

struct RotationPlan {
  std::size_t replications = 10000;
  std::uint64_t seed = kDefaultSeed;
  Evaluation evaluation = Evaluation::rotate_response;

  void validate() const;
};

/// tau(y). Saturated F values are reported as DBL_MAX. Throws DataError for
/// multiple_t when SS_{N*} = 0.
double eval_tau(const TauStatistic& stat, std::span<const double> y, const RegressorSet& regressors,
                const IdSet& null_set);

/// Monte Carlo estimate of pi(y). For f_ratio, p_exact carries the exact
/// beta value whenever SS_N > 0.
PValueReport rotation_pvalue(const TauStatistic& stat, std::span<const double> y,
                             const RegressorSet& regressors, const IdSet& null_set,
                             const RotationPlan& plan);

/// Replicate values tau(T y) for the given plan, in replicate order.
std::vector<double> rotation_replicates(const TauStatistic& stat, std::span<const double> y,
                                        const RegressorSet& regressors, const IdSet& null_set,
                                        const RotationPlan& plan);

/// Copy of the N columns plus every candidate replaced by its normalised
/// projection onto V_N's complement. Throws SingularityError listing the
/// candidates that lie in V_N.
RegressorSet standardize_candidates(const RegressorSet& regressors, const IdSet& null_set,
                                    const IdSet& candidate_ids);

/// Compares tau on (y, x) with tau on (S y, S x) for a random orthogonal S.
/// Returns the largest relative discrepancy.
double inner_product_discrepancy(const TauStatistic& stat, std::span<const double> y,
                                 const RegressorSet& regressors, const IdSet& null_set, Rng& rng);

enum class NoiseShape {
  spherical_gaussian,  // eps ~ N(0, I_n)
  scaled_spherical,    // heavy-tailed radius times uniform direction (multivariate t, 2 df)
};

/// y = sum_nu theta_nu x_nu + sigma eps.
struct GaussianLinearModel {
  std::vector<std::pair<std::string, double>> coefficients;
  double sigma = 1.0;
  NoiseShape noise = NoiseShape::spherical_gaussian;

  Vector mean(const RegressorSet& regressors) const;
  Vector draw(const RegressorSet& regressors, Rng& rng) const;
};

struct UniformityReport {
  std::vector<double> p_values;
  ks::Result ks;
  std::size_t trials = 0;
};

/// Simulates y from the model and records one p-value per trial: the rotation
/// p-value when a plan is given, the exact beta p-value otherwise (f_ratio
/// only). Requires theta_nu = 0 outside N.
UniformityReport null_simulation(const TauStatistic& stat, const RegressorSet& regressors,
                                 const IdSet& null_set, const GaussianLinearModel& model,
                                 std::size_t trials, const std::optional<RotationPlan>& plan,
                                 std::uint64_t seed);

}  // namespace exactls
