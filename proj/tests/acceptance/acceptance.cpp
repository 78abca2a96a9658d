// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 on any failure.
// Criterion 8 runs first so its memory baseline is not inflated by the others.

#include <sys/resource.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <string>

#include "exactls/exact_test.hpp"
#include "exactls/numerics.hpp"
#include "exactls/select.hpp"
#include "exactls/tau_mc.hpp"
#include "exactls/verify.hpp"
#include "oracles.hpp"

using namespace exactls;

namespace {

constexpr std::uint64_t kSeed = 20240917;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool passed = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what;
    if (!ok) {
      passed = false;
      detail += " [failed]";
    }
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double resident_bytes() {
  std::ifstream statm("/proc/self/statm");
  long size = 0, resident = 0;
  statm >> size >> resident;
  return static_cast<double>(resident) * static_cast<double>(sysconf(_SC_PAGESIZE));
}

double peak_resident_bytes() {
  rusage u{};
  getrusage(RUSAGE_SELF, &u);
  return static_cast<double>(u.ru_maxrss) * 1024.0;
}

// Passes when every check whose name starts with one of `prefixes` passes (all checks if empty).
void require_suite(Outcome& o, const verify::SuiteReport& r, const std::vector<std::string>& prefixes = {}) {
  std::size_t used = 0;
  for (const auto& c : r.checks) {
    const bool wanted = prefixes.empty() || std::any_of(prefixes.begin(), prefixes.end(), [&](const std::string& p) {
                          return c.name.rfind(p, 0) == 0;
                        });
    if (!wanted) continue;
    ++used;
    o.require(c.passed, c.name + " " + c.kind + "=" + fmt("%.3g", c.value));
  }
  o.require(used > 0, r.suite + " checks found");
}

Outcome criterion8() {
  Outcome o;
  const double baseline = resident_bytes();
  const InteractionSpec spec{13, 7, true};

  const auto t0 = Clock::now();
  const auto first = synthetic_interactions(504, 13, true, 10.0, kSeed);
  const auto stream0 = expand_interactions(first.covariates, first.names, spec);
  const auto trace0 = stepwise_select(first.y, *stream0, {});
  const double wall = seconds_since(t0);
  o.require(stream0->size() == 77520, "candidates=" + std::to_string(stream0->size()));
  o.require(wall <= 60.0, "full run " + fmt("%.2f", wall) + " s");

  std::size_t recovered = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto data = s == 0 ? first : synthetic_interactions(504, 13, true, 10.0, kSeed + s);
    const auto stream = expand_interactions(data.covariates, data.names, spec);
    const auto trace = s == 0 ? trace0 : stepwise_select(data.y, *stream, {});
    const std::set<std::string> planted(data.planted.begin(), data.planted.end());
    std::set<std::string> head;
    for (std::size_t i = 0; i < std::min<std::size_t>(5, trace.steps.size()); ++i) head.insert(trace.steps[i].id);
    if (head == planted) ++recovered;
  }
  o.require(recovered == 20, "planted recovered " + std::to_string(recovered) + "/20");

  // Null rate on a fixed 77,520-column design with pure-noise responses.
  const auto noise = synthetic_interactions(504, 13, false, 10.0, kSeed + 100);
  const auto null_stream = expand_interactions(noise.covariates, noise.names, spec);
  const double alpha0 = 0.01;
  const auto rate = selection_null_rate(*null_stream, alpha0, 1000, kSeed + 101);
  o.require(rate.rate <= alpha0 + 2.0 * rate.se,
            "null rate " + fmt("%.4f", rate.rate) + " <= " + fmt("%.4f", alpha0 + 2.0 * rate.se));

  const double extra = peak_resident_bytes() - baseline;
  o.require(extra <= 1e9, "extra peak memory " + fmt("%.1f", extra / 1048576.0) + " MiB");
  return o;
}

Outcome criterion1() {
  Outcome o;
  Rng rng = stream_rng(kSeed, 1);
  std::uniform_int_distribution<std::size_t> n_dist(3, 50);
  double worst = 0.0;
  const auto t0 = Clock::now();
  for (int inst = 0; inst < 1000; ++inst) {
    const std::size_t n = n_dist(rng);
    const std::size_t p_star = std::uniform_int_distribution<std::size_t>(1, n - 1)(rng);
    const std::size_t p = std::uniform_int_distribution<std::size_t>(0, p_star - 1)(rng);
    RegressorSet regs(n);
    IdSet full;
    for (std::size_t j = 0; j < p_star; ++j) {
      full.push_back("x" + std::to_string(j));
      regs.add(full.back(), standard_normal_vector(rng, n));
    }
    std::shuffle(full.begin(), full.end(), rng);
    IdSet null_set(full.begin(), full.begin() + static_cast<std::ptrdiff_t>(p));
    auto y = standard_normal_vector(rng, n);
    const double shift = std::uniform_real_distribution<double>(0.0, 3.0)(rng);
    for (std::size_t i = 0; i < n; ++i) y[i] += shift * regs.column(full[0])[i];
    const auto fit = nested_fit(y, regs, null_set, full);
    worst = std::max(worst, std::fabs(p_value_classical(fit) - p_value_beta(fit)));
  }
  const double wall = seconds_since(t0);
  o.require(worst <= 1e-10, "max |classical - beta| " + fmt("%.2e", worst));
  o.require(wall < 1.0, fmt("%.3f", wall) + " s");
  return o;
}

Outcome criterion2() {
  Outcome o;
  const auto t0 = Clock::now();
  verify::SuiteConfig cfg;
  cfg.seed = kSeed;
  cfg.draws = 20000;
  const auto r = verify::theorem1_suite(cfg);
  const double wall = seconds_since(t0);
  require_suite(o, r);
  o.require(r.checks.size() == 6, std::to_string(r.checks.size()) + " cases");
  // Each case takes a fraction of the whole run.
  o.require(wall < 30.0, "all cases " + fmt("%.2f", wall) + " s");
  return o;
}

Outcome criterion3() {
  Outcome o;
  Rng rng = stream_rng(kSeed, 3);
  const std::size_t n = 30;
  const auto regs = oracle::random_regressors(n, 6, rng);
  const IdSet null_set = oracle::ids(0, 2), full = oracle::ids(0, 5);
  auto y = standard_normal_vector(rng, n);
  for (std::size_t i = 0; i < n; ++i) y[i] += 0.3 * regs.column("x3")[i];
  const double exact = p_value_beta(nested_fit(y, regs, null_set, full));
  const double se = std::sqrt(exact * (1.0 - exact) / 1e5);
  const auto t0 = Clock::now();
  for (auto mode : {Evaluation::rotate_response, Evaluation::rotate_regressors}) {
    RotationPlan plan{100000, kSeed, mode};
    const auto rep = rotation_pvalue(TauStatistic::f_ratio(id_difference(full, null_set)), y, regs, null_set, plan);
    const double dev = std::fabs(*rep.p_mc - exact) / se;
    o.require(dev <= 4.0, std::string(evaluation_name(mode)) + " " + fmt("%.5f", *rep.p_mc) + " vs " +
                              fmt("%.5f", exact) + " (" + fmt("%.2f", dev) + " SE)");
  }
  const double wall = seconds_since(t0);
  o.require(wall < 60.0, fmt("%.2f", wall) + " s");
  return o;
}

Outcome criterion4() {
  Outcome o;
  verify::SuiteConfig cfg;
  cfg.seed = kSeed;
  cfg.draws = 2000;
  require_suite(o, verify::lemma1_suite(cfg), {"null_exact_gaussian", "null_exact_heavy_tailed"});
  return o;
}

Outcome criterion5() {
  Outcome o;
  verify::SuiteConfig cfg;
  cfg.seed = kSeed;
  cfg.draws = 100000;
  require_suite(o, verify::haar_suite(cfg));
  return o;
}

Outcome criterion6() {
  Outcome o;
  const std::vector<double> shapes{0.5, 1.0, 1.5, 7.0, 20.0};
  const std::vector<double> us{0.01, 0.1, 0.25, 0.4, 0.5, 0.65, 0.8, 0.97};
  const std::vector<double> ps{1e-6, 1e-3, 0.05, 0.3, 0.5, 0.7, 0.95, 0.999, 1.0 - 1e-6};
  double grid = 0.0, refl = 0.0, trip = 0.0;
  std::size_t points = 0;
  for (double a : shapes) {
    for (double b : shapes) {
      const numerics::BetaParams ab{a, b}, ba{b, a};
      for (double u : us) {
        const double v = numerics::beta_cdf(ab, u);
        grid = std::max(grid, static_cast<double>(std::fabs(v - oracle::beta_cdf(a, b, u))));
        refl = std::max(refl, std::fabs(v + numerics::beta_cdf(ba, 1.0 - u) - 1.0));
        ++points;
      }
      for (double p : ps) trip = std::max(trip, std::fabs(numerics::beta_cdf(ab, numerics::beta_quantile(ab, p)) - p));
    }
  }
  o.require(points == 200, std::to_string(points) + " grid points");
  o.require(grid <= 1e-10, "max oracle error " + fmt("%.2e", grid));
  o.require(refl <= 1e-12, "reflection " + fmt("%.2e", refl));
  o.require(trip <= 1e-9, "quantile round trip " + fmt("%.2e", trip));
  return o;
}

Outcome criterion7() {
  Outcome o;
  verify::SuiteConfig cfg;
  cfg.seed = kSeed;
  cfg.draws = 10000;
  require_suite(o, verify::coverage_suite(cfg));
  return o;
}

Outcome criterion9() {
  Outcome o;
  verify::SuiteConfig cfg;
  cfg.seed = kSeed;
  cfg.draws = 100000;
  require_suite(o, verify::numerics_suite(cfg), {"gamma_sum", "gamma_ratio", "beta_product"});
  return o;
}

}  // namespace

int main() {
  std::vector<std::pair<int, std::function<Outcome()>>> order{
      {8, criterion8}, {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4},
      {5, criterion5}, {6, criterion6}, {7, criterion7}, {9, criterion9}};
  std::vector<std::pair<int, Outcome>> results;
  for (auto& [id, fn] : order) {
    Outcome out;
    try {
      out = fn();
    } catch (const std::exception& e) {
      out.require(false, std::string("exception: ") + e.what());
    }
    results.emplace_back(id, out);
  }
  std::sort(results.begin(), results.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  bool all = true;
  for (const auto& [id, out] : results) {
    std::printf("criterion %d: %s  %s\n", id, out.passed ? "PASS" : "FAIL", out.detail.c_str());
    all = all && out.passed;
  }
  return all ? 0 : 1;
}
