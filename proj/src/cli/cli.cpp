#include "cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <json.hpp>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include "csv.hpp"
#include "exactls/errors.hpp"
#include "exactls/exact_test.hpp"
#include "exactls/kernels.hpp"
#include "exactls/parallel.hpp"
#include "exactls/regions.hpp"
#include "exactls/select.hpp"
#include "exactls/tau_mc.hpp"
#include "exactls/verify.hpp"

namespace exactls::cli {

namespace {

using json = nlohmann::ordered_json;

struct Common {
  std::string format = "text";
  std::uint64_t seed = kDefaultSeed;
  unsigned threads = 0;
  bool json_mode() const { return format == "json"; }
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"text", "json"}))->capture_default_str();
  cmd->add_option("--seed", c.seed, "Random seed")->capture_default_str();
  cmd->add_option("--threads", c.threads, "Worker thread cap (0 = all cores); results do not depend on it")
      ->capture_default_str();
}

std::string num(double v) {
  std::ostringstream s;
  s << std::setprecision(12) << v;
  return s.str();
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json metadata(const Common& c) {
  json m;
  m["seed"] = c.seed;
  m["threads"] = thread_limit();
  m["simd"] = std::string(kernels::backend_name(kernels::active_backend()));
  m["rank_tolerance"] = kRankTolerance;
  m["zero_residual_tolerance"] = kZeroResidual;
  return m;
}

json report_json(const PValueReport& r) {
  json j;
  j["method"] = std::string(method_name(r.method));
  j["statistic"] = r.statistic;
  j["saturated"] = r.saturated;
  j["p_exact"] = r.p_exact ? json(*r.p_exact) : json(nullptr);
  j["p_mc"] = r.p_mc ? json(*r.p_mc) : json(nullptr);
  j["mc_se"] = r.mc_se ? json(*r.mc_se) : json(nullptr);
  j["replications"] = r.replications;
  j["seed"] = r.seed;
  return j;
}

void print_report(std::ostream& out, const PValueReport& r) {
  out << "method:       " << method_name(r.method) << "\n";
  out << "statistic:    " << (r.saturated ? std::string("inf") : num(r.statistic)) << "\n";
  if (r.p_exact) out << "p_exact:      " << num(*r.p_exact) << "\n";
  if (r.p_mc) {
    out << "p_mc:         " << num(*r.p_mc) << "\n";
    out << "mc_se:        " << num(*r.mc_se) << "\n";
    out << "replications: " << r.replications << "\n";
    out << "seed:         " << r.seed << "\n";
  }
}

void check_nested(const IdSet& null_set, const IdSet& full_set) {
  if (!id_subset(null_set, full_set)) throw UsageError("--null-set must be a subset of --full-set");
  if (id_difference(full_set, null_set).empty()) {
    throw UsageError("--full-set must contain at least one term beyond --null-set (p* > p)");
  }
}

// ---------------------------------------------------------------------------

struct FTestArgs {
  Common common;
  std::string data, response, null_set, full_set;
  std::size_t replications = 0;
};

int cmd_ftest(const FTestArgs& a, std::ostream& out) {
  const Dataset ds = read_csv_file(a.data);
  const IdSet null_set = split_list(a.null_set);
  const IdSet full_set = split_list(a.full_set);
  check_nested(null_set, full_set);
  const RegressorSet regs = regressors_for(ds, full_set);
  const auto y = ds.column(a.response);

  const NestedFit fit = nested_fit(y, regs, null_set, full_set);
  const FStatistic f = f_statistic(fit);
  const double p_classical = p_value_classical(fit);
  PValueReport report;
  report.statistic = f.value;
  report.saturated = f.saturated;
  report.p_exact = p_value_beta(fit);
  report.method = PValueMethod::exact_beta;
  if (a.replications > 0) {
    const PValueReport mc = mc_regressor_pvalue(y, regs, null_set, full_set, a.replications, a.common.seed);
    report.p_mc = mc.p_mc;
    report.mc_se = mc.mc_se;
    report.replications = mc.replications;
    report.seed = mc.seed;
  }
  report.validate();

  if (a.common.json_mode()) {
    json j;
    j["command"] = "ftest";
    j["response"] = a.response;
    j["null_set"] = null_set;
    j["full_set"] = full_set;
    j["n"] = fit.n;
    j["p"] = fit.p;
    j["p_star"] = fit.p_star;
    j["df1"] = fit.p_star - fit.p;
    j["df2"] = fit.n - fit.p_star;
    j["ss_small"] = fit.ss_small;
    j["ss_large"] = fit.ss_large;
    j["ratio"] = fit.ratio();
    j["p_classical"] = p_classical;
    j["p_beta"] = *report.p_exact;
    j["report"] = report_json(report);
    j["metadata"] = metadata(a.common);
    j["metadata"]["replications"] = a.replications;
    out << j.dump(2) << "\n";
  } else {
    out << "n = " << fit.n << ", p = " << fit.p << ", p* = " << fit.p_star << "\n";
    out << "SS_N:         " << num(fit.ss_small) << "\n";
    out << "SS_N*:        " << num(fit.ss_large) << "\n";
    out << "F:            " << (f.saturated ? std::string("inf") : num(f.value)) << "  (df " << fit.p_star - fit.p
        << ", " << fit.n - fit.p_star << ")\n";
    out << "p_classical:  " << num(p_classical) << "\n";
    out << "p_beta:       " << num(*report.p_exact) << "\n";
    if (report.p_mc) {
      out << "p_mc:         " << num(*report.p_mc) << " +- " << num(*report.mc_se) << " (" << report.replications
          << " replications, seed " << report.seed << ")\n";
    }
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct McTestArgs {
  Common common;
  std::string data, response, null_set, full_set, family;
  std::string stat = "f";
  std::string mode = "response";
  std::size_t replications = 10000;
};

int cmd_mctest(const McTestArgs& a, std::ostream& out) {
  const Dataset ds = read_csv_file(a.data);
  const IdSet null_set = split_list(a.null_set);
  IdSet full_set = split_list(a.full_set);
  std::vector<IdSet> family;
  if (a.stat == "multiple-f") {
    for (const auto& group : split_list(a.family, ';')) family.push_back(split_list(group));
    if (family.empty()) throw UsageError("--family is required for the multiple-f statistic");
    if (full_set.empty()) {
      full_set = null_set;
      for (const auto& m : family) full_set = id_union(full_set, m);
    }
    for (const auto& m : family) {
      if (!id_subset(m, full_set)) throw UsageError("--family terms must belong to --full-set");
    }
  }
  check_nested(null_set, full_set);
  const IdSet extras = id_difference(full_set, null_set);
  const auto y = ds.column(a.response);
  RegressorSet regs = regressors_for(ds, full_set);

  std::optional<TauStatistic> stat;
  std::optional<double> reference;
  if (a.stat == "f") {
    stat = TauStatistic::f_ratio(extras);
  } else if (a.stat == "multiple-t") {
    if (extras.size() == 1) {
      // One candidate: tau is monotone in |t|, so the exact F p-value is the reference.
      const NestedFit fit = nested_fit(y, regs, null_set, full_set);
      if (fit.ss_small > 0.0) reference = p_value_beta(fit);
    }
    regs = standardize_candidates(regs, null_set, extras);
    stat = TauStatistic::multiple_t(extras);
  } else {
    stat = TauStatistic::multiple_f(family);
  }

  RotationPlan plan;
  plan.replications = a.replications;
  plan.seed = a.common.seed;
  plan.evaluation = a.mode == "response" ? Evaluation::rotate_response : Evaluation::rotate_regressors;
  PValueReport report = rotation_pvalue(*stat, y, regs, null_set, plan);
  if (reference) report.p_exact = reference;

  if (a.common.json_mode()) {
    json j;
    j["command"] = "mctest";
    j["statistic_kind"] = stat->name();
    j["mode"] = std::string(evaluation_name(plan.evaluation));
    j["response"] = a.response;
    j["null_set"] = null_set;
    j["full_set"] = full_set;
    if (!family.empty()) j["family"] = family;
    j["n"] = regs.n();
    j["report"] = report_json(report);
    j["metadata"] = metadata(a.common);
    j["metadata"]["replications"] = plan.replications;
    out << j.dump(2) << "\n";
  } else {
    out << "statistic kind: " << stat->name() << " (" << evaluation_name(plan.evaluation) << ")\n";
    print_report(out, report);
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct SelectArgs {
  Common common;
  std::string data, response, covariates;
  std::size_t max_order = 2;
  double alpha0 = 0.01;
  std::optional<std::size_t> max_steps;
  std::size_t block_cols = 4096;
  std::string adjustment = "sidak";
  bool no_intercept = false;
  std::uint64_t max_candidates = StreamBudget{}.max_candidates;
};

int cmd_select(const SelectArgs& a, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  const Dataset ds = read_csv_file(a.data);
  std::vector<std::string> names = split_list(a.covariates);
  if (names.empty()) {
    for (const auto& nm : ds.names) {
      if (nm != a.response) names.push_back(nm);
    }
  }
  const auto y = ds.column(a.response);
  DenseMatrix z(ds.rows, names.size());
  for (std::size_t j = 0; j < names.size(); ++j) {
    if (names[j] == a.response) throw UsageError("the response cannot also be a covariate");
    const auto c = ds.column(names[j]);
    std::copy(c.begin(), c.end(), z.col(j).begin());
  }
  InteractionSpec spec;
  spec.base_count = names.size();
  spec.max_order = a.max_order;
  spec.include_intercept = !a.no_intercept;
  StreamBudget budget;
  budget.max_candidates = a.max_candidates;
  const auto stream = expand_interactions(z, names, spec, budget);

  SelectionOptions opt;
  opt.alpha0 = a.alpha0;
  opt.max_steps = a.max_steps;
  opt.block_cols = a.block_cols;
  opt.adjustment = a.adjustment == "sidak" ? Adjustment::sidak : Adjustment::bonferroni;
  const SelectionTrace trace = stepwise_select(y, *stream, opt);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  auto step_json = [](const SelectionStep& s) {
    json j;
    j["id"] = s.id;
    j["candidate"] = s.candidate;
    j["ss_before"] = s.ss_before;
    j["ss_after"] = s.ss_after;
    j["p_raw"] = s.p_raw;
    j["p_adjusted"] = s.p_adjusted;
    j["scanned"] = s.scanned;
    return j;
  };
  if (a.common.json_mode()) {
    json j;
    j["command"] = "select";
    j["response"] = a.response;
    j["covariates"] = names;
    j["n"] = trace.n;
    j["max_order"] = a.max_order;
    j["candidates"] = trace.candidate_count;
    j["ss_initial"] = trace.ss_initial;
    j["steps"] = json::array();
    for (const auto& s : trace.steps) j["steps"].push_back(step_json(s));
    j["rejected"] = trace.rejected ? step_json(*trace.rejected) : json(nullptr);
    j["stop_reason"] = std::string(stop_reason_name(trace.stop));
    j["selected"] = trace.selected();
    j["metadata"] = metadata(a.common);
    j["metadata"]["alpha0"] = a.alpha0;
    j["metadata"]["max_steps"] = trace.max_steps;
    j["metadata"]["adjustment"] = a.adjustment;
    j["metadata"]["block_cols"] = a.block_cols;
    j["metadata"]["max_candidates"] = a.max_candidates;
    out << j.dump(2) << "\n";
    err << "wall_seconds: " << num(wall) << "\n";
  } else {
    out << "n: " << trace.n << "\n";
    out << "candidates: " << trace.candidate_count << "\n";
    out << "alpha0: " << a.alpha0 << " (" << a.adjustment << "), max_steps: " << trace.max_steps << "\n";
    out << std::left << std::setw(6) << "step" << std::setw(24) << "term" << std::setw(21) << "SS_after"
        << std::setw(21) << "p_raw" << std::setw(21) << "p_adjusted" << "scanned\n";
    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
      const auto& s = trace.steps[i];
      out << std::setw(6) << i + 1 << std::setw(24) << s.id << std::setw(21) << num(s.ss_after) << std::setw(21)
          << num(s.p_raw) << std::setw(21) << num(s.p_adjusted) << s.scanned << "\n";
    }
    if (trace.rejected) {
      out << "rejected: " << trace.rejected->id << " (p_adjusted " << num(trace.rejected->p_adjusted) << ")\n";
    }
    out << "stop: " << stop_reason_name(trace.stop) << "\n";
    out << "wall_seconds: " << num(wall) << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct RegionArgs {
  Common common;
  std::string data, response, null_set, full_set, beta;
  double alpha = 0.05;
};

int cmd_region(const RegionArgs& a, std::ostream& out) {
  const Dataset ds = read_csv_file(a.data);
  const IdSet null_set = split_list(a.null_set);
  const IdSet full_set = split_list(a.full_set);
  check_nested(null_set, full_set);
  const RegressorSet regs = regressors_for(ds, full_set);
  const auto y = ds.column(a.response);
  const Ellipsoid e = scheffe_ellipsoid(y, regs, null_set, full_set, a.alpha);
  std::optional<Membership> member;
  Vector beta;
  if (!a.beta.empty()) {
    for (const auto& v : split_list(a.beta)) {
      try {
        beta.push_back(std::stod(v));
      } catch (const std::exception&) {
        throw UsageError("--beta expects numbers, got '" + v + "'");
      }
    }
    RegionQuery q;
    q.beta = beta;
    q.alpha = a.alpha;
    member = region_contains(q, y, regs, null_set, full_set);
  }
  if (a.common.json_mode()) {
    json j;
    j["command"] = "region";
    j["alpha"] = a.alpha;
    j["null_set"] = null_set;
    j["full_set"] = full_set;
    j["center"] = e.center;
    j["radius"] = number_or_null(e.radius);
    j["degenerate"] = e.degenerate;
    if (member) {
      j["beta"] = beta;
      j["p_value"] = member->p_value;
      j["contained"] = member->contained;
    }
    j["metadata"] = metadata(a.common);
    out << j.dump(2) << "\n";
  } else {
    out << "frame: orthonormal basis of span(" << a.full_set << ") orthogonal to span(" << a.null_set << ")\n";
    out << "center:";
    for (double c : e.center) out << " " << num(c);
    out << "\nradius: " << num(e.radius) << (e.degenerate ? " (degenerate)" : "") << "\n";
    if (member) {
      out << "p_value: " << num(member->p_value) << "\n";
      out << "contained: " << (member->contained ? "yes" : "no") << "\n";
    }
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct VerifyArgs {
  Common common;
  std::string suite;
  std::size_t draws = 0;
  double level = 1e-3;
  bool broken_sampler = false;
};

int cmd_verify(const VerifyArgs& a, std::ostream& out) {
  const auto suite = verify::parse_suite(a.suite);
  if (!suite) throw UsageError("unknown suite '" + a.suite + "'");
  verify::SuiteConfig cfg;
  cfg.seed = a.common.seed;
  cfg.draws = a.draws;
  cfg.level = a.level;
  cfg.broken_sampler = a.broken_sampler;
  const verify::SuiteReport r = verify::run_suite(*suite, cfg);
  if (a.common.json_mode()) {
    json j;
    j["command"] = "verify";
    j["suite"] = r.suite;
    j["passed"] = r.passed();
    j["checks"] = json::array();
    for (const auto& c : r.checks) {
      j["checks"].push_back({{"name", c.name}, {"kind", c.kind}, {"value", number_or_null(c.value)},
                             {"threshold", c.threshold}, {"passed", c.passed}, {"detail", c.detail}});
    }
    j["metadata"] = metadata(a.common);
    j["metadata"]["draws"] = r.draws;
    j["metadata"]["level"] = r.level;
    j["metadata"]["broken_sampler"] = a.broken_sampler;
    out << j.dump(2) << "\n";
  } else {
    out << "suite " << r.suite << " (seed " << r.seed << ", draws " << r.draws << ", level " << r.level << ")\n";
    for (const auto& c : r.checks) {
      out << (c.passed ? "PASS " : "FAIL ") << std::left << std::setw(44) << c.name << " " << c.kind << " "
          << num(c.value) << (c.kind == "ks" ? " >= " : " <= ") << num(c.threshold) << "  " << c.detail << "\n";
    }
    out << (r.passed() ? "verdict: pass" : "verdict: fail") << "\n";
  }
  return r.passed() ? kExitOk : kExitVerification;
}

// ---------------------------------------------------------------------------

struct SynthArgs {
  Common common;
  std::size_t rows = 504;
  std::size_t covariates = 13;
  std::string kind = "planted";
  double snr = 10.0;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  const SyntheticData d = synthetic_interactions(a.rows, a.covariates, a.kind == "planted", a.snr, a.common.seed);
  std::vector<std::string> names = d.names;
  std::vector<Vector> cols;
  for (std::size_t j = 0; j < d.covariates.cols(); ++j) {
    const auto c = d.covariates.col(j);
    cols.emplace_back(c.begin(), c.end());
  }
  names.push_back("y");
  cols.push_back(d.y);
  write_csv(out, names, cols);
  return kExitOk;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::usage:
      return kExitUsage;
    case ErrorKind::domain:
    case ErrorKind::data:
    case ErrorKind::singular:
      return kExitData;
    case ErrorKind::numerical:
    case ErrorKind::resource:
      return kExitNumerical;
  }
  return kExitNumerical;
}

std::string_view kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::usage:
      return "usage";
    case ErrorKind::domain:
      return "domain";
    case ErrorKind::data:
      return "data";
    case ErrorKind::singular:
      return "singular";
    case ErrorKind::numerical:
      return "numerical";
    case ErrorKind::resource:
      return "resource";
  }
  return "unknown";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact and Monte Carlo p-values for nested least squares fits"};
  app.require_subcommand(1);

  FTestArgs ft;
  auto* ftest = app.add_subcommand("ftest", "Exact F / beta p-value for nested fits N in N*");
  ftest->add_option("data", ft.data, "CSV file with a header row")->required();
  ftest->add_option("--response", ft.response, "Response column")->required();
  ftest->add_option("--null-set", ft.null_set, "Comma separated terms of N (a, a*b, _const)");
  ftest->add_option("--full-set", ft.full_set, "Comma separated terms of N*")->required();
  ftest->add_option("--replications", ft.replications, "Monte Carlo cross-check replications (0 = off)")
      ->capture_default_str();
  add_common(ftest, ft.common);

  McTestArgs mc;
  auto* mctest = app.add_subcommand("mctest", "Rotation p-value for the F, multiple T or multiple F statistic");
  mctest->add_option("data", mc.data, "CSV file with a header row")->required();
  mctest->add_option("--response", mc.response, "Response column")->required();
  mctest->add_option("--null-set", mc.null_set, "Comma separated terms of N");
  mctest->add_option("--full-set", mc.full_set, "Comma separated terms of N*");
  mctest->add_option("--stat", mc.stat, "Test statistic")
      ->check(CLI::IsMember({"f", "multiple-t", "multiple-f"}))
      ->capture_default_str();
  mctest->add_option("--family", mc.family, "multiple-f subsets, e.g. 'a,b;c'");
  mctest->add_option("--mode", mc.mode, "Rotate the response or the regressors")
      ->check(CLI::IsMember({"response", "regressors"}))
      ->capture_default_str();
  mctest->add_option("--replications", mc.replications, "Monte Carlo replications")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_common(mctest, mc.common);

  SelectArgs sel;
  auto* select = app.add_subcommand("select", "Stepwise selection over interaction columns");
  select->add_option("data", sel.data, "CSV file with a header row")->required();
  select->add_option("--response", sel.response, "Response column")->required();
  select->add_option("--covariates", sel.covariates, "Comma separated covariates (default: all other columns)");
  select->add_option("--max-order", sel.max_order, "Maximal interaction order k")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  select->add_option("--alpha0", sel.alpha0, "Adjusted p-value threshold")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  select->add_option("--max-steps", sel.max_steps, "Step limit (default n / 10)");
  select->add_option("--block-cols", sel.block_cols, "Candidate columns generated per block")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  select->add_option("--adjustment", sel.adjustment, "Multiplicity adjustment")
      ->check(CLI::IsMember({"sidak", "bonferroni"}))
      ->capture_default_str();
  select->add_flag("--no-intercept", sel.no_intercept, "Leave out the _const candidate");
  select->add_option("--max-candidates", sel.max_candidates, "Candidate budget")->capture_default_str();
  add_common(select, sel.common);

  RegionArgs rg;
  auto* region = app.add_subcommand("region", "Scheffe confidence ellipsoid and membership query");
  region->add_option("data", rg.data, "CSV file with a header row")->required();
  region->add_option("--response", rg.response, "Response column")->required();
  region->add_option("--null-set", rg.null_set, "Comma separated terms of N");
  region->add_option("--full-set", rg.full_set, "Comma separated terms of N*")->required();
  region->add_option("--alpha", rg.alpha, "Level")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  region->add_option("--beta", rg.beta, "Coordinates of beta in the region frame, comma separated");
  add_common(region, rg.common);

  VerifyArgs vf;
  auto* verify_cmd = app.add_subcommand("verify", "Run a seeded self-verification suite");
  verify_cmd->add_option("suite", vf.suite, "theorem1 | haar | lemma1 | numerics | coverage")->required();
  verify_cmd->add_option("--draws", vf.draws, "Draws or trials (0 = suite default)")->capture_default_str();
  verify_cmd->add_option("--level", vf.level, "KS significance level")->capture_default_str();
  verify_cmd->add_flag("--broken-sampler", vf.broken_sampler, "Swap in a non-uniform rotation sampler (mutation check)");
  add_common(verify_cmd, vf.common);

  SynthArgs sy;
  auto* synth = app.add_subcommand("synth", "Write a synthetic interaction data set as CSV");
  synth->add_option("--rows", sy.rows, "Rows n")->capture_default_str();
  synth->add_option("--covariates", sy.covariates, "Covariates d")->capture_default_str();
  synth->add_option("--kind", sy.kind, "planted or noise")
      ->check(CLI::IsMember({"planted", "noise"}))
      ->capture_default_str();
  synth->add_option("--snr", sy.snr, "Signal-to-noise ratio of the planted model")->capture_default_str();
  add_common(synth, sy.common);

  std::vector<const char*> argv;
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  const Common* common = &sy.common;
  if (ftest->parsed()) common = &ft.common;
  if (mctest->parsed()) common = &mc.common;
  if (select->parsed()) common = &sel.common;
  if (region->parsed()) common = &rg.common;
  if (verify_cmd->parsed()) common = &vf.common;
  if (synth->parsed()) common = &sy.common;

  set_thread_limit(common->threads);
  try {
    if (ftest->parsed()) return cmd_ftest(ft, out);
    if (mctest->parsed()) return cmd_mctest(mc, out);
    if (select->parsed()) return cmd_select(sel, out, err);
    if (region->parsed()) return cmd_region(rg, out);
    if (verify_cmd->parsed()) return cmd_verify(vf, out);
    return cmd_synth(sy, out);
  } catch (const Error& e) {
    if (common->json_mode()) {
      json j;
      j["error"] = {{"kind", std::string(kind_name(e.kind()))}, {"message", e.what()}};
      if (const auto* s = dynamic_cast<const SingularityError*>(&e)) j["error"]["column"] = s->column();
      out << j.dump(2) << "\n";
    }
    err << "error (" << kind_name(e.kind()) << "): " << e.what() << "\n";
    return exit_code_for(e.kind());
  }
}

}  // namespace exactls::cli
