#pragma once

// Exact p-values for nested least squares fits N subset N*.
//
// The classical F-test p-value 1 - F_{p*-p, n-p*}(F) equals
// B_{(n-p*)/2, (p*-p)/2}(SS_{N*} / SS_N), and the latter is also the exact
// probability that replacing the extra regressors by white noise reduces the
// residual sum of squares at least as much as the real regressors did. The
// Monte Carlo verifier below draws those replacements explicitly.

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "exactls/haar.hpp"
#include "exactls/projection.hpp"
#include "exactls/rng.hpp"

namespace exactls {

struct NestedFit {
  double ss_small = 0.0;  // SS_N
  double ss_large = 0.0;  // SS_{N*}
  long p = 0;             // #N
  long p_star = 0;        // #N*
  long n = 0;

  /// Throws DomainError unless 0 <= ss_large <= ss_small and 0 <= p < p* < n.
  void validate() const;
  double ratio() const noexcept { return ss_small > 0.0 ? ss_large / ss_small : 1.0; }
};

/// Projects y onto V_N and V_{N*} (N must be a subset of N*) and collects the
/// residual sums.
NestedFit nested_fit(std::span<const double> y, const RegressorSet& regressors, const IdSet& null_set,
                     const IdSet& full_set);

enum class PValueMethod { exact_beta, classical_f, mc_rotation, mc_regressor_replacement };

std::string_view method_name(PValueMethod m) noexcept;

struct PValueReport {
  double statistic = 0.0;
  bool saturated = false;  // statistic is +infinity (SS_{N*} = 0 < SS_N)
  std::optional<double> p_exact;
  std::optional<double> p_mc;
  std::optional<double> mc_se;
  std::size_t replications = 0;
  std::uint64_t seed = 0;
  PValueMethod method = PValueMethod::exact_beta;

  /// Throws DomainError when the report is internally inconsistent.
  void validate() const;
};

/// Add-one Monte Carlo p-value (1 + hits) / (1 + replications) and its
/// binomial standard error.
struct McEstimate {
  double p = 1.0;
  double se = 0.0;
};
McEstimate add_one_estimate(std::size_t hits, std::size_t replications);

struct FStatistic {
  double value = 0.0;      // finite; DBL_MAX when saturated
  bool saturated = false;
};

/// ((SS_N - SS_{N*}) / (p* - p)) / (SS_{N*} / (n - p*)), with 0/0 := 0.
FStatistic f_statistic(const NestedFit& fit);

/// 1 - F_{p*-p, n-p*}(F).
double p_value_classical(const NestedFit& fit);

/// B_{(n-p*)/2, (p*-p)/2}(SS_{N*} / SS_N). Throws DataError when SS_N = 0.
double p_value_beta(const NestedFit& fit);

/// Random replacement regressors. Both kinds satisfy the invariance
/// condition under which the ratio SS_{N*}/SS_N is Beta distributed.
enum class NoiseKind {
  gaussian_iid,  // independent N(0, I_n) columns
  haar_columns,  // T s_j for T ~ Haar on O_n(V_N) and fixed orthonormal s_j in V_N's complement
};

/// Precomputed state for drawing SS_{N*}/SS_N with k random replacements.
class ReplacementSampler {
 public:
  ReplacementSampler(std::span<const double> y, const RegressorSet& regressors, const IdSet& null_set,
                     std::size_t k, NoiseKind noise);

  /// One replicate of the ratio. Throws NumericalError when the projected
  /// replacements do not span a k-dimensional space.
  double sample(Rng& rng) const;

  const ProjectionState& base() const noexcept { return base_; }

 private:
  ProjectionState base_;
  std::size_t k_;
  NoiseKind noise_;
  std::shared_ptr<const haar::Stabilizer> stabilizer_;  // haar_columns only
};

double theorem1_sample(std::span<const double> y, const RegressorSet& regressors, const IdSet& null_set,
                       std::size_t k, NoiseKind noise, Rng& rng);

/// Monte Carlo p-value: fraction (add-one corrected) of replicates whose
/// ratio is <= the observed SS_{N*}/SS_N. p_exact carries p_value_beta.
PValueReport mc_regressor_pvalue(std::span<const double> y, const RegressorSet& regressors,
                                 const IdSet& null_set, const IdSet& full_set,
                                 std::size_t replications, std::uint64_t seed,
                                 NoiseKind noise = NoiseKind::gaussian_iid);

}  // namespace exactls
