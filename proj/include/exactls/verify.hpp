#pragma once

// Seeded distributional self-checks. Each suite returns one Check per
// property; KS checks pass when the p-value is at least the configured level,
// bound checks when the measured value is at most the threshold.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "exactls/ks.hpp"
#include "exactls/rng.hpp"

namespace exactls::verify {

enum class Suite { theorem1, haar, lemma1, numerics, coverage };

std::optional<Suite> parse_suite(std::string_view name);
std::string_view suite_name(Suite s) noexcept;

struct Check {
  std::string name;
  std::string kind;  // "ks" or "bound"
  double value = 0.0;
  double threshold = 0.0;
  bool passed = false;
  std::string detail;
};

struct SuiteReport {
  std::string suite;
  std::uint64_t seed = 0;
  std::size_t draws = 0;
  double level = 0.0;
  std::vector<Check> checks;

  bool passed() const;
  const Check* find(std::string_view name) const;
};

struct SuiteConfig {
  std::uint64_t seed = kDefaultSeed;
  std::size_t draws = 0;  // 0: suite default
  double level = 1e-3;
  bool broken_sampler = false;  // haar: swap in a deliberately non-uniform sampler
};

Check ks_check(std::string name, const ks::Result& r, double level);
Check bound_check(std::string name, double value, double threshold, std::string detail = {});

/// Replacement law: SS_{N*}/SS_N with white-noise (and Haar-column) replacements
/// against Beta((n-p*)/2, (p*-p)/2) for (n,p,p*) in {(20,2,5), (15,0,1), (30,5,29)}.
/// Default 20000 draws per case.
SuiteReport theorem1_suite(const SuiteConfig& cfg);

/// Haar sampler: orthogonality, stabilizer geometry, exact marginals, left
/// and transpose invariance, polar vs Gram-Schmidt. Default 10^5 draws.
SuiteReport haar_suite(const SuiteConfig& cfg);

/// Rotation null: T y against y_hat + ||eps_hat|| u, and uniformity of exact and
/// rotation p-values under the null for Gaussian and heavy-tailed spherical
/// noise. Default 2000 trials.
SuiteReport lemma1_suite(const SuiteConfig& cfg);

/// Special-function identities plus the gamma-sum, gamma-ratio and
/// beta-product laws. Default 10^5 draws.
SuiteReport numerics_suite(const SuiteConfig& cfg);

/// Coverage of the exact F region for alpha in {0.05, 0.1} under Gaussian and
/// heavy-tailed spherical noise, and ellipsoid/membership agreement.
/// Default 10^4 trials.
SuiteReport coverage_suite(const SuiteConfig& cfg);

SuiteReport run_suite(Suite s, const SuiteConfig& cfg);

}  // namespace exactls::verify
