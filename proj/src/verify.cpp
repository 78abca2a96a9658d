#include "exactls/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "exactls/errors.hpp"
#include "exactls/exact_test.hpp"
#include "exactls/haar.hpp"
#include "exactls/kernels.hpp"
#include "exactls/numerics.hpp"
#include "exactls/parallel.hpp"
#include "exactls/regions.hpp"
#include "exactls/tau_mc.hpp"

namespace exactls::verify {

namespace {

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

std::size_t draws_or(const SuiteConfig& cfg, std::size_t fallback) { return cfg.draws ? cfg.draws : fallback; }

SuiteReport make_report(std::string_view name, const SuiteConfig& cfg, std::size_t draws) {
  SuiteReport r;
  r.suite = std::string(name);
  r.seed = cfg.seed;
  r.draws = draws;
  r.level = cfg.level;
  return r;
}

// Sub-seeds keep every check on its own family of streams.
std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t tag) {
  Rng rng = stream_rng(seed, 0x9e3779b97f4a7c15ULL ^ tag);
  return rng();
}

RegressorSet gaussian_regressors(std::size_t n, std::size_t m, Rng& rng, bool intercept = false) {
  RegressorSet set(n);
  for (std::size_t j = 0; j < m; ++j) {
    Vector x = standard_normal_vector(rng, n);
    if (intercept && j == 0) std::fill(x.begin(), x.end(), 1.0);
    set.add("x" + std::to_string(j), std::move(x));
  }
  return set;
}

IdSet first_ids(std::size_t m) {
  IdSet ids;
  for (std::size_t j = 0; j < m; ++j) ids.push_back("x" + std::to_string(j));
  return ids;
}

std::function<double(double)> beta_law(double a, double b) {
  return [a, b](double u) { return numerics::beta_cdf({a, b}, std::clamp(u, 0.0, 1.0)); };
}

Vector times(const DenseMatrix& t, std::span<const double> x) {
  Vector out(t.rows(), 0.0);
  for (std::size_t j = 0; j < t.cols(); ++j) kernels::axpy(x[j], t.col(j), out);
  return out;
}

double trace(const DenseMatrix& t) {
  double s = 0.0;
  for (std::size_t i = 0; i < t.rows(); ++i) s += t(i, i);
  return s;
}

// Mutation fixture: Gram-Schmidt applied to Uniform(0, 1) entries. The
// result is orthogonal but concentrated near the positive orthant.
DenseMatrix broken_orthogonal(std::size_t m, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  DenseMatrix z(m, m);
  for (double& v : z.data()) v = unif(rng);
  for (std::size_t k = 0; k < m; ++k) {
    auto tk = z.col(k);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t j = 0; j < k; ++j) kernels::axpy(-kernels::dot(z.col(j), tk), z.col(j), tk);
    }
    const double norm = std::sqrt(kernels::sum_squares(tk));
    for (double& v : tk) v /= norm;
  }
  return z;
}

double gamma_draw(Rng& rng, double shape, double scale) {
  std::gamma_distribution<double> g(shape, scale);
  return g(rng);
}

}  // namespace

std::optional<Suite> parse_suite(std::string_view name) {
  for (Suite s : {Suite::theorem1, Suite::haar, Suite::lemma1, Suite::numerics, Suite::coverage}) {
    if (suite_name(s) == name) return s;
  }
  return std::nullopt;
}

std::string_view suite_name(Suite s) noexcept {
  switch (s) {
    case Suite::theorem1:
      return "theorem1";
    case Suite::haar:
      return "haar";
    case Suite::lemma1:
      return "lemma1";
    case Suite::numerics:
      return "numerics";
    case Suite::coverage:
      return "coverage";
  }
  return "unknown";
}

bool SuiteReport::passed() const {
  return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

const Check* SuiteReport::find(std::string_view name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

Check ks_check(std::string name, const ks::Result& r, double level) {
  Check c;
  c.name = std::move(name);
  c.kind = "ks";
  c.value = r.p_value;
  c.threshold = level;
  c.passed = r.passes(level);
  c.detail = "D=" + fmt(r.distance) + " n_eff=" + fmt(r.effective_n);
  return c;
}

Check bound_check(std::string name, double value, double threshold, std::string detail) {
  Check c;
  c.name = std::move(name);
  c.kind = "bound";
  c.value = value;
  c.threshold = threshold;
  c.passed = value <= threshold;
  c.detail = std::move(detail);
  return c;
}

// ---------------------------------------------------------------------------

SuiteReport theorem1_suite(const SuiteConfig& cfg) {
  const std::size_t draws = draws_or(cfg, 20000);
  SuiteReport report = make_report("theorem1", cfg, draws);
  struct Case {
    std::size_t n, p, p_star;
  };
  const Case cases[] = {{20, 2, 5}, {15, 0, 1}, {30, 5, 29}};
  std::uint64_t tag = 0;
  for (const Case& c : cases) {
    for (NoiseKind noise : {NoiseKind::gaussian_iid, NoiseKind::haar_columns}) {
      ++tag;
      Rng setup = stream_rng(sub_seed(cfg.seed, tag), 0);
      const RegressorSet regs = gaussian_regressors(c.n, c.p, setup, c.p > 0);
      const Vector y = standard_normal_vector(setup, c.n);
      const ReplacementSampler sampler(y, regs, first_ids(c.p), c.p_star - c.p, noise);
      std::vector<double> ratios(draws);
      const std::uint64_t seed = sub_seed(cfg.seed, 1000 + tag);
      parallel_for(draws, [&](std::size_t i) {
        Rng rng = stream_rng(seed, i);
        ratios[i] = sampler.sample(rng);
      });
      const double a = 0.5 * static_cast<double>(c.n - c.p_star);
      const double b = 0.5 * static_cast<double>(c.p_star - c.p);
      std::ostringstream name;
      name << "ratio_law_n" << c.n << "_p" << c.p << "_pstar" << c.p_star << "_"
           << (noise == NoiseKind::gaussian_iid ? "gaussian" : "haar_columns");
      report.checks.push_back(ks_check(name.str(), ks::one_sample(ratios, beta_law(a, b)), cfg.level));
    }
  }
  return report;
}

SuiteReport haar_suite(const SuiteConfig& cfg) {
  const std::size_t draws = draws_or(cfg, 100000);
  SuiteReport report = make_report("haar", cfg, draws);
  constexpr std::size_t n = 4;
  Vector probe(n);
  for (std::size_t i = 0; i < n; ++i) probe[i] = static_cast<double>(i + 1);
  const double pn = std::sqrt(kernels::sum_squares(probe));
  for (double& v : probe) v /= pn;

  Rng fixed_rng = stream_rng(sub_seed(cfg.seed, 1), 0);
  const DenseMatrix s = haar::sample_orthogonal(n, haar::Method::polar, fixed_rng);

  auto draw_gs = [&](Rng& rng) {
    return cfg.broken_sampler ? broken_orthogonal(n, rng) : haar::sample_orthogonal(n, haar::Method::gram_schmidt, rng);
  };

  std::vector<double> gs_first(draws), gs_trace(draws), polar_first(draws), polar_trace(draws);
  std::vector<double> left_trace(draws), transpose_first(draws), defect(draws);
  const std::uint64_t seed_a = sub_seed(cfg.seed, 2);
  const std::uint64_t seed_b = sub_seed(cfg.seed, 3);
  const std::uint64_t seed_c = sub_seed(cfg.seed, 4);
  parallel_for(draws, [&](std::size_t i) {
    Rng ra = stream_rng(seed_a, i);
    const DenseMatrix t = draw_gs(ra);
    Rng rb = stream_rng(seed_b, i);
    const DenseMatrix tp = haar::sample_orthogonal(n, haar::Method::polar, rb);
    Rng rc = stream_rng(seed_c, i);
    const DenseMatrix t2 = draw_gs(rc);
    gs_first[i] = times(t, probe)[0];
    gs_trace[i] = trace(t);
    polar_first[i] = times(tp, probe)[0];
    polar_trace[i] = trace(tp);
    left_trace[i] = trace(multiply(s, t2));
    transpose_first[i] = times(transpose(t2), probe)[0];
    defect[i] = std::max(orthogonality_defect(t), orthogonality_defect(tp));
  });
  const double max_defect = *std::max_element(defect.begin(), defect.end());
  report.checks.push_back(bound_check("orthogonality_defect_over_n", max_defect / n, 1e-12,
                                      "max ||T^T T - I||_F / n over both constructions"));

  // A coordinate of a uniform point on S^{m-1} maps to Beta((m-1)/2, (m-1)/2) under t -> (t+1)/2.
  auto sphere_law = [](std::size_t m) {
    const double h = 0.5 * static_cast<double>(m - 1);
    return [h](double t) { return numerics::beta_cdf({h, h}, std::clamp(0.5 * (t + 1.0), 0.0, 1.0)); };
  };
  report.checks.push_back(ks_check("gram_schmidt_marginal", ks::one_sample(gs_first, sphere_law(n)), cfg.level));
  report.checks.push_back(ks_check("polar_marginal", ks::one_sample(polar_first, sphere_law(n)), cfg.level));
  report.checks.push_back(ks_check("polar_vs_gram_schmidt_trace", ks::two_sample(polar_trace, gs_trace), cfg.level));
  report.checks.push_back(ks_check("polar_vs_gram_schmidt_probe", ks::two_sample(polar_first, gs_first), cfg.level));
  report.checks.push_back(ks_check("left_invariance_trace", ks::two_sample(left_trace, gs_trace), cfg.level));
  report.checks.push_back(ks_check("transpose_invariance_probe", ks::two_sample(transpose_first, gs_first), cfg.level));

  // Stabilizer of a random 2-dimensional subspace of R^6.
  constexpr std::size_t ns = 6;
  Rng sub_rng = stream_rng(sub_seed(cfg.seed, 5), 0);
  OrthoBasis v(ns);
  for (int j = 0; j < 2; ++j) v.append(standard_normal_vector(sub_rng, ns));
  const haar::Stabilizer stab(v);
  const Vector xa = standard_normal_vector(sub_rng, ns);
  const Vector xb = standard_normal_vector(sub_rng, ns);
  const double gram = kernels::dot(xa, xb);
  const auto w = stab.complement().col(1);
  const auto c0 = stab.complement().col(0);
  std::vector<double> fix_err(draws), geo_err(draws), stab_coord(draws), unit_coord(draws);
  const std::uint64_t seed_d = sub_seed(cfg.seed, 6);
  const std::uint64_t seed_e = sub_seed(cfg.seed, 7);
  parallel_for(draws, [&](std::size_t i) {
    Rng rd = stream_rng(seed_d, i);
    const haar::HaarRotation t = haar::sample_haar_fixing(stab, haar::Method::gram_schmidt, rd);
    double err = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) {
      const Vector tv = t.apply(v[j]);
      for (std::size_t k = 0; k < ns; ++k) err = std::max(err, std::fabs(tv[k] - v[j][k]));
    }
    fix_err[i] = err;
    geo_err[i] = std::fabs(kernels::dot(t.apply(xa), t.apply(xb)) - gram);
    stab_coord[i] = kernels::dot(t.apply(w), c0);
    Rng re = stream_rng(seed_e, i);
    unit_coord[i] = kernels::dot(haar::sample_unit_complement(stab, re), c0);
  });
  report.checks.push_back(bound_check("stabilizer_fixes_subspace", *std::max_element(fix_err.begin(), fix_err.end()),
                                      1e-12, "max |T v - v| over V basis vectors"));
  report.checks.push_back(bound_check("stabilizer_preserves_geometry",
                                      *std::max_element(geo_err.begin(), geo_err.end()), 1e-10,
                                      "max |(T x)^T (T w) - x^T w|"));
  report.checks.push_back(ks_check("stabilizer_complement_marginal", ks::one_sample(stab_coord, sphere_law(ns - 2)),
                                   cfg.level));
  report.checks.push_back(ks_check("unit_complement_marginal", ks::one_sample(unit_coord, sphere_law(ns - 2)),
                                   cfg.level));
  return report;
}

SuiteReport lemma1_suite(const SuiteConfig& cfg) {
  const std::size_t trials = draws_or(cfg, 2000);
  SuiteReport report = make_report("lemma1", cfg, trials);
  constexpr std::size_t n = 12;
  Rng setup = stream_rng(sub_seed(cfg.seed, 1), 0);
  const RegressorSet regs = gaussian_regressors(n, 5, setup, true);
  const IdSet null_set = {"x0", "x1", "x2"};
  const Vector y = standard_normal_vector(setup, n);
  const ProjectionState state = build_projection(y, regs, null_set);
  const haar::Stabilizer stab(state.basis());
  const Vector a1 = standard_normal_vector(setup, n);
  const Vector a2 = standard_normal_vector(setup, n);

  // (ii) <=> (iii): T y and y_hat + ||eps_hat|| u agree in law.
  const std::size_t draws = std::max<std::size_t>(trials * 10, 20000);
  std::vector<double> ty1(draws), ty2(draws), uy1(draws), uy2(draws);
  const double scale = std::sqrt(state.ss());
  const std::uint64_t seed_t = sub_seed(cfg.seed, 2);
  const std::uint64_t seed_u = sub_seed(cfg.seed, 3);
  parallel_for(draws, [&](std::size_t i) {
    Rng rt = stream_rng(seed_t, i);
    const Vector ty = haar::sample_haar_fixing(stab, haar::Method::gram_schmidt, rt).apply(y);
    Rng ru = stream_rng(seed_u, i);
    Vector uy = haar::sample_unit_complement(stab, ru);
    for (std::size_t k = 0; k < n; ++k) uy[k] = state.y_hat()[k] + scale * uy[k];
    ty1[i] = kernels::dot(a1, ty);
    ty2[i] = kernels::dot(a2, ty);
    uy1[i] = kernels::dot(a1, uy);
    uy2[i] = kernels::dot(a2, uy);
  });
  report.checks.push_back(ks_check("rotation_vs_sphere_probe1", ks::two_sample(ty1, uy1), cfg.level));
  report.checks.push_back(ks_check("rotation_vs_sphere_probe2", ks::two_sample(ty2, uy2), cfg.level));

  const TauStatistic f = TauStatistic::f_ratio({"x3", "x4"});
  GaussianLinearModel model;
  model.coefficients = {{"x0", 1.0}, {"x1", 2.0}, {"x2", -0.5}};
  model.sigma = 0.7;
  const auto exact_gauss = null_simulation(f, regs, null_set, model, trials, std::nullopt, sub_seed(cfg.seed, 4));
  report.checks.push_back(ks_check("null_exact_gaussian", exact_gauss.ks, cfg.level));
  model.noise = NoiseShape::scaled_spherical;
  const auto exact_heavy = null_simulation(f, regs, null_set, model, trials, std::nullopt, sub_seed(cfg.seed, 5));
  report.checks.push_back(ks_check("null_exact_heavy_tailed", exact_heavy.ks, cfg.level));

  const std::size_t rot_trials = std::max<std::size_t>(trials / 5, 50);
  RotationPlan plan;
  plan.replications = rot_trials;
  model.noise = NoiseShape::spherical_gaussian;
  const auto rot_resp = null_simulation(f, regs, null_set, model, rot_trials, plan, sub_seed(cfg.seed, 6));
  report.checks.push_back(ks_check("null_rotation_response_gaussian", rot_resp.ks, cfg.level));
  plan.evaluation = Evaluation::rotate_regressors;
  model.noise = NoiseShape::scaled_spherical;
  const auto rot_reg = null_simulation(f, regs, null_set, model, rot_trials, plan, sub_seed(cfg.seed, 7));
  report.checks.push_back(ks_check("null_rotation_regressors_heavy_tailed", rot_reg.ks, cfg.level));

  model.sigma = 0.0;
  const auto degenerate = null_simulation(f, regs, null_set, model, 20, std::nullopt, sub_seed(cfg.seed, 8));
  double worst = 0.0;
  for (double p : degenerate.p_values) worst = std::max(worst, std::fabs(1.0 - p));
  report.checks.push_back(bound_check("sigma_zero_gives_p_one", worst, 0.0, "max |1 - p| with y = mu"));
  return report;
}

SuiteReport numerics_suite(const SuiteConfig& cfg) {
  const std::size_t draws = draws_or(cfg, 100000);
  SuiteReport report = make_report("numerics", cfg, draws);
  const std::uint64_t clamps_before = numerics::clamp_warnings();

  Rng rng = stream_rng(sub_seed(cfg.seed, 1), 0);
  std::uniform_real_distribution<double> log_shape(std::log(0.1), std::log(50.0));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double refl = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double a = std::exp(log_shape(rng));
    const double b = std::exp(log_shape(rng));
    const double u = unit(rng);
    refl = std::max(refl, std::fabs(numerics::beta_cdf({a, b}, u) + numerics::beta_cdf({b, a}, 1.0 - u) - 1.0));
  }
  report.checks.push_back(bound_check("reflection_identity", refl, 1e-12, "10^4 random (a, b, u)"));

  double closed = std::fabs(numerics::f_cdf({2, 3}, 1.5) - (1.0 - std::pow(0.5, 1.5)));
  for (double b : {0.5, 1.0, 1.5, 7.0}) {
    for (double u : {0.01, 0.2, 0.5, 0.8, 0.99}) {
      closed = std::max(closed, std::fabs(numerics::beta_cdf({1.0, b}, u) - (1.0 - std::pow(1.0 - u, b))));
      closed = std::max(closed, std::fabs(numerics::beta_cdf({b, 1.0}, u) - std::pow(u, b)));
    }
  }
  report.checks.push_back(bound_check("closed_forms", closed, 1e-13, "Beta(1,b), Beta(a,1), F(2,3)"));

  double round_trip = 0.0;
  for (double a : {0.5, 1.0, 1.5, 7.0}) {
    for (double b : {0.5, 1.0, 1.5, 7.0}) {
      for (double p : {1e-6, 1e-3, 0.05, 0.25, 0.5, 0.75, 0.95, 0.999}) {
        round_trip = std::max(round_trip, std::fabs(numerics::beta_cdf({a, b}, numerics::beta_quantile({a, b}, p)) - p));
      }
    }
  }
  report.checks.push_back(bound_check("quantile_round_trip", round_trip, 1e-9, "|B(Q(p)) - p|"));

  // Sum of l squared normals ~ Gamma(l/2, 2).
  constexpr int ell = 3;
  std::vector<double> chi(draws);
  const std::uint64_t seed_chi = sub_seed(cfg.seed, 2);
  parallel_for(draws, [&](std::size_t i) {
    Rng r = stream_rng(seed_chi, i);
    std::normal_distribution<double> z(0.0, 1.0);
    double s = 0.0;
    for (int j = 0; j < ell; ++j) {
      const double v = z(r);
      s += v * v;
    }
    chi[i] = s;
  });
  report.checks.push_back(ks_check(
      "gamma_sum_law", ks::one_sample(chi, [](double x) { return numerics::gamma_cdf(0.5 * ell, std::max(0.0, x) / 2.0); }),
      cfg.level));

  // Y_a / (Y_a + Y_b) ~ Beta(a, b), independent of Y_a + Y_b.
  struct Shapes {
    double a, b, c;
  };
  std::uint64_t tag = 10;
  for (const Shapes sh : {Shapes{0.5, 1.5, 2.0}, Shapes{3.0, 0.5, 1.0}}) {
    ++tag;
    std::vector<double> ratio(draws), total(draws);
    const std::uint64_t seed_g = sub_seed(cfg.seed, tag);
    parallel_for(draws, [&](std::size_t i) {
      Rng r = stream_rng(seed_g, i);
      const double ya = gamma_draw(r, sh.a, sh.c);
      const double yb = gamma_draw(r, sh.b, sh.c);
      ratio[i] = ya / (ya + yb);
      total[i] = ya + yb;
    });
    const std::string suffix = "_a" + fmt(sh.a) + "_b" + fmt(sh.b);
    report.checks.push_back(ks_check("gamma_ratio_law" + suffix, ks::one_sample(ratio, beta_law(sh.a, sh.b)), cfg.level));
    double mr = 0.0, mt = 0.0;
    for (std::size_t i = 0; i < draws; ++i) {
      mr += ratio[i];
      mt += total[i];
    }
    mr /= static_cast<double>(draws);
    mt /= static_cast<double>(draws);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < draws; ++i) {
      sxy += (ratio[i] - mr) * (total[i] - mt);
      sxx += (ratio[i] - mr) * (ratio[i] - mr);
      syy += (total[i] - mt) * (total[i] - mt);
    }
    report.checks.push_back(bound_check("gamma_ratio_independence" + suffix, std::fabs(sxy / std::sqrt(sxx * syy)), 0.01,
                                        "|corr(Y_a + Y_b, ratio)|"));
  }

  // prod_j Beta(a + (j-1) delta, delta) ~ Beta(a, k delta).
  {
    constexpr double a = 2.0, delta = 0.5;
    constexpr int k = 4;
    std::vector<double> prod(draws);
    const std::uint64_t seed_p = sub_seed(cfg.seed, 20);
    parallel_for(draws, [&](std::size_t i) {
      Rng r = stream_rng(seed_p, i);
      double v = 1.0;
      for (int j = 0; j < k; ++j) {
        const double g1 = gamma_draw(r, a + j * delta, 1.0);
        const double g2 = gamma_draw(r, delta, 1.0);
        v *= g1 / (g1 + g2);
      }
      prod[i] = v;
    });
    report.checks.push_back(ks_check("beta_product_law", ks::one_sample(prod, beta_law(a, k * delta)), cfg.level));
  }

  report.checks.push_back(bound_check("clamp_warnings", static_cast<double>(numerics::clamp_warnings() - clamps_before),
                                      0.0, "probability clamps above 1e-9"));
  return report;
}

SuiteReport coverage_suite(const SuiteConfig& cfg) {
  const std::size_t trials = draws_or(cfg, 10000);
  SuiteReport report = make_report("coverage", cfg, trials);
  constexpr std::size_t n = 20;
  Rng setup = stream_rng(sub_seed(cfg.seed, 1), 0);
  const RegressorSet regs = gaussian_regressors(n, 5, setup, true);
  const IdSet null_set = {"x0", "x1"};
  const IdSet full_set = {"x0", "x1", "x2", "x3"};

  GaussianLinearModel model;
  model.coefficients = {{"x0", 1.0}, {"x1", -0.5}, {"x2", 0.8}, {"x3", 1.2}};
  std::uint64_t tag = 10;
  for (double alpha : {0.05, 0.1}) {
    for (NoiseShape shape : {NoiseShape::spherical_gaussian, NoiseShape::scaled_spherical}) {
      model.noise = shape;
      const CoverageEstimate est =
          coverage_sim(model, regs, null_set, full_set, alpha, trials, sub_seed(cfg.seed, ++tag));
      const std::string name = std::string("coverage_alpha") + fmt(alpha) + "_" +
                               (shape == NoiseShape::spherical_gaussian ? "gaussian" : "heavy_tailed");
      const double dev = std::fabs(est.coverage - (1.0 - alpha));
      report.checks.push_back(bound_check(name, dev / est.nominal_se, 2.0,
                                          "coverage=" + fmt(est.coverage) + " se=" + fmt(est.nominal_se) +
                                              " (value in SE units)"));
    }
  }

  // Mean outside V_{N*}: the region over-covers.
  model.noise = NoiseShape::spherical_gaussian;
  model.coefficients.emplace_back("x4", 0.9);
  const CoverageEstimate off = coverage_sim(model, regs, null_set, full_set, 0.1, trials, sub_seed(cfg.seed, 30));
  report.checks.push_back(bound_check("coverage_mean_outside_full_model", (0.9 - off.coverage) / off.nominal_se, 2.0,
                                      "coverage=" + fmt(off.coverage) + " (shortfall in SE units)"));

  // Ellipsoid against exact membership.
  std::size_t disagreements = 0;
  std::size_t probes = 0;
  Rng inst_rng = stream_rng(sub_seed(cfg.seed, 40), 0);
  std::uniform_int_distribution<std::size_t> pick_n(8, 30);
  std::uniform_int_distribution<std::size_t> pick_k(1, 3);
  std::uniform_real_distribution<double> radial(0.0, 2.0);
  for (int inst = 0; inst < 50; ++inst) {
    const std::size_t ni = pick_n(inst_rng);
    const std::size_t p = pick_k(inst_rng) - 1;
    const std::size_t k = pick_k(inst_rng);
    const RegressorSet r = gaussian_regressors(ni, p + k, inst_rng, p > 0);
    Vector y = standard_normal_vector(inst_rng, ni);
    kernels::axpy(0.7, r.column("x" + std::to_string(p)), y);
    const IdSet nn = first_ids(p);
    const IdSet ns = first_ids(p + k);
    const double alpha = 0.1;
    const Ellipsoid e = scheffe_ellipsoid(y, r, nn, ns, alpha);
    for (int j = 0; j < 100; ++j) {
      Vector dir = standard_normal_vector(inst_rng, k);
      const double dn = std::sqrt(kernels::sum_squares(dir));
      const double rad = e.radius * radial(inst_rng);
      RegionQuery q;
      q.alpha = alpha;
      q.beta = e.center;
      for (std::size_t i = 0; i < k; ++i) q.beta[i] += rad * dir[i] / dn;
      const double dist = e.distance(q.beta);
      if (std::fabs(dist - e.radius) <= 1e-8 * std::max(1.0, e.radius)) continue;
      ++probes;
      if (region_contains(q, y, r, nn, ns).contained != e.contains(q.beta)) ++disagreements;
    }
  }
  report.checks.push_back(bound_check("ellipsoid_membership_agreement", static_cast<double>(disagreements), 0.0,
                                      "disagreements over " + std::to_string(probes) + " probes"));
  return report;
}

SuiteReport run_suite(Suite s, const SuiteConfig& cfg) {
  if (!(cfg.level > 0.0 && cfg.level < 1.0)) throw DomainError("verification level must lie in (0, 1)");
  switch (s) {
    case Suite::theorem1:
      return theorem1_suite(cfg);
    case Suite::haar:
      return haar_suite(cfg);
    case Suite::lemma1:
      return lemma1_suite(cfg);
    case Suite::numerics:
      return numerics_suite(cfg);
    case Suite::coverage:
      return coverage_suite(cfg);
  }
  throw UsageError("unknown suite");
}

}  // namespace exactls::verify
