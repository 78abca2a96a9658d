#pragma once

// Forward stepwise selection over a streamed candidate set.
//
// Candidates are the interaction columns f(z) = prod_j z_{i_j} over all
// multisets {i_1 <= ... <= i_m} of the d covariates with m <= k, enumerated
// in graded lexicographic order (m = 0 is the intercept "_const"). Columns
// are generated block by block; only per-candidate scalars are kept between
// steps.
//
// Each step adds the candidate with the largest reduction in SS and assigns
// it the single-replacement p-value B_{(n-p-1)/2, 1/2}(SS_new / SS_old),
// adjusted for the q candidates scanned.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "exactls/matrix.hpp"
#include "exactls/projection.hpp"

namespace exactls {

/// Column provider for the selection scan.
class CandidateSource {
 public:
  virtual ~CandidateSource() = default;
  virtual std::size_t rows() const = 0;
  virtual std::uint64_t size() const = 0;
  virtual std::string name(std::uint64_t id) const = 0;
  /// Writes columns first .. first + count - 1 into `out` (column-major,
  /// rows() x count).
  virtual void fill(std::uint64_t first, std::size_t count, std::span<double> out) const = 0;
};

struct InteractionSpec {
  std::size_t base_count = 0;  // d
  std::size_t max_order = 1;   // k
  bool include_intercept = true;

  void validate() const;
};

struct StreamBudget {
  std::uint64_t max_candidates = 5'000'000;
  std::size_t max_order = 16;
};

/// Number of multisets of size <= k drawn from d items, C(d + k, k), less one
/// without the intercept. Throws ResourceError on overflow.
std::uint64_t interaction_count(const InteractionSpec& spec);

class InteractionStream final : public CandidateSource {
 public:
  /// `data` is n x d. Throws DataError for non-finite covariates and
  /// ResourceError when the expansion exceeds the budget; nothing is computed
  /// before these checks pass.
  InteractionStream(DenseMatrix data, std::vector<std::string> names, InteractionSpec spec,
                    StreamBudget budget = {});

  std::size_t rows() const override { return data_.rows(); }
  std::uint64_t size() const override { return count_; }
  std::string name(std::uint64_t id) const override;
  void fill(std::uint64_t first, std::size_t count, std::span<double> out) const override;

  /// Covariate indices of candidate `id`, non-decreasing.
  std::vector<std::size_t> term(std::uint64_t id) const;
  const InteractionSpec& spec() const noexcept { return spec_; }

 private:
  DenseMatrix data_;
  std::vector<std::string> names_;
  InteractionSpec spec_;
  std::uint64_t count_ = 0;
  std::vector<std::uint8_t> degree_;   // per candidate
  std::vector<std::uint16_t> terms_;   // max_order slots per candidate
};

/// Builds the candidate stream (no column is materialised).
std::unique_ptr<InteractionStream> expand_interactions(const DenseMatrix& data, std::vector<std::string> names,
                                                       const InteractionSpec& spec, StreamBudget budget = {});

/// Candidates held in memory, e.g. the columns of a RegressorSet.
class MaterializedCandidates final : public CandidateSource {
 public:
  explicit MaterializedCandidates(const RegressorSet& set);
  /// Copies every column of another source.
  explicit MaterializedCandidates(const CandidateSource& source);

  std::size_t rows() const override { return rows_; }
  std::uint64_t size() const override { return names_.size(); }
  std::string name(std::uint64_t id) const override { return names_.at(id); }
  void fill(std::uint64_t first, std::size_t count, std::span<double> out) const override;

 private:
  std::size_t rows_ = 0;
  std::vector<std::string> names_;
  std::vector<double> data_;
};

enum class Adjustment { sidak, bonferroni };

/// Sidak 1 - (1 - p)^q or Bonferroni min(1, q p).
double adjust_pvalue(double p, std::uint64_t q, Adjustment method);

struct SelectionOptions {
  double alpha0 = 0.01;
  std::optional<std::size_t> max_steps;  // default n / 10
  Adjustment adjustment = Adjustment::sidak;
  std::size_t block_cols = 4096;

  void validate() const;
};

struct SelectionStep {
  std::uint64_t candidate = 0;
  std::string id;
  double ss_before = 0.0;
  double ss_after = 0.0;
  double p_raw = 1.0;
  double p_adjusted = 1.0;
  std::uint64_t scanned = 0;  // q, candidates eligible at this step
};

enum class StopReason { threshold_exceeded, max_steps, residual_zero, candidates_exhausted };

std::string_view stop_reason_name(StopReason r) noexcept;

struct SelectionTrace {
  std::vector<SelectionStep> steps;  // accepted steps
  std::optional<SelectionStep> rejected;  // best candidate of the final step when it failed the threshold
  StopReason stop = StopReason::candidates_exhausted;
  std::uint64_t candidate_count = 0;
  std::size_t n = 0;
  double ss_initial = 0.0;
  std::size_t max_steps = 0;

  IdSet selected() const;
  /// Throws DomainError when SS is not strictly decreasing or an accepted
  /// step misses the threshold.
  void validate(double alpha0) const;
};

/// Deterministic forward selection starting from the empty model.
SelectionTrace stepwise_select(std::span<const double> y, const CandidateSource& candidates,
                               const SelectionOptions& options = {});

struct NullRate {
  double rate = 0.0;
  double se = 0.0;
  std::size_t trials = 0;
  std::size_t selected = 0;
};

/// Fraction of pure-noise responses y ~ N(0, I_n) for which stepwise_select
/// accepts at least one candidate. Only the first step matters, so each trial
/// runs a single step. se is the larger of the binomial SEs at rate and alpha0.
NullRate selection_null_rate(const CandidateSource& candidates, double alpha0, std::size_t trials,
                             std::uint64_t seed, Adjustment adjustment = Adjustment::sidak,
                             std::size_t block_cols = 4096);

/// Synthetic covariates z1..zd ~ N(0, 1) iid and a response. With `planted`,
/// y = z1 + z2*z3 + z4*z5*z6 + z7*z8 + z9 + noise (needs d >= 9) with noise
/// variance 5 / snr, i.e. signal-to-noise ratio snr; otherwise y is pure noise.
struct SyntheticData {
  DenseMatrix covariates;
  std::vector<std::string> names;
  Vector y;
  IdSet planted;  // planted term names, empty for pure noise
};

SyntheticData synthetic_interactions(std::size_t n, std::size_t d, bool planted, double snr, std::uint64_t seed);

}  // namespace exactls
