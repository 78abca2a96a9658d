#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "exactls/errors.hpp"
#include "exactls/exact_test.hpp"
#include "exactls/kernels.hpp"
#include "exactls/regions.hpp"
#include "oracles.hpp"

using namespace exactls;

namespace {

struct Instance {
  RegressorSet regs;
  Vector y;
  IdSet N{"x0", "x1"};
  IdSet Nstar{"x0", "x1", "x2", "x3", "x4"};
};

Instance make_instance(std::uint64_t seed, std::size_t n = 20) {
  Rng rng = stream_rng(seed, 0);
  Instance inst{oracle::random_regressors(n, 6, rng), standard_normal_vector(rng, n)};
  for (std::size_t i = 0; i < n; ++i) inst.y[i] += 1.0 + 0.5 * inst.regs.column("x2")[i];
  return inst;
}

Vector unit_direction(std::size_t dim, Rng& rng) {
  auto d = standard_normal_vector(rng, dim);
  const double s = std::sqrt(kernels::sum_squares(d));
  for (double& v : d) v /= s;
  return d;
}

}  // namespace

TEST_CASE("frame spans V_N* minus V_N") {
  const auto inst = make_instance(61);
  const RegionFrame frame(inst.regs, inst.N, inst.Nstar);
  CHECK(frame.dim() == 3);
  CHECK(frame.n() == 20);
  for (std::size_t i = 0; i < frame.dim(); ++i) {
    for (std::size_t j = 0; j < frame.null_basis().size(); ++j) {
      CHECK(std::fabs(kernels::dot(frame.basis()[i], frame.null_basis()[j])) <= 1e-12);
    }
  }
  const Vector coords{0.3, -1.2, 2.0};
  const auto v = frame.embed(coords);
  const auto back = frame.coordinates(v);
  for (std::size_t i = 0; i < 3; ++i) CHECK(back[i] == doctest::Approx(coords[i]).epsilon(1e-12));
  const auto amb = frame.ambient(v);
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(amb[i] == doctest::Approx(v[i]).epsilon(1e-12));
  // x0 lies in V_N, not in W.
  CHECK_THROWS_AS((void)frame.ambient(inst.regs.column("x0")), DomainError);
  CHECK_THROWS_AS((void)frame.ambient(Vector{1.0, 2.0}), DomainError);
  CHECK_THROWS_AS(RegionFrame(inst.regs, {"x5"}, inst.Nstar), DomainError);
}

TEST_CASE("center, far points and duality") {
  const auto inst = make_instance(62);
  const RegionFrame frame(inst.regs, inst.N, inst.Nstar);
  const auto center = frame.coordinates(inst.y);

  RegionQuery q;
  q.beta = center;
  for (double alpha : {0.01, 0.5, 0.99}) {
    q.alpha = alpha;
    const auto m = region_contains(q, inst.y, inst.regs, inst.N, inst.Nstar);
    CHECK(m.contained);
    CHECK(m.p_value == doctest::Approx(1.0));
  }
  q.alpha = 0.05;
  q.beta = {1e4, -1e4, 1e4};
  const auto far = region_contains(q, inst.y, inst.regs, inst.N, inst.Nstar);
  CHECK_FALSE(far.contained);
  CHECK(far.p_value < 1e-12);

  const double p0 = p_value_beta(nested_fit(inst.y, inst.regs, inst.N, inst.Nstar));
  for (double alpha : {0.001, 0.01, 0.05, 0.2, 0.6}) {
    q.alpha = alpha;
    q.beta = {0.0, 0.0, 0.0};
    const auto m = region_contains(q, inst.y, inst.regs, inst.N, inst.Nstar);
    CHECK(m.p_value == doctest::Approx(p0).epsilon(1e-12));
    CHECK(m.contained == (p0 >= alpha));
  }
}

TEST_CASE("query validation") {
  const auto inst = make_instance(63);
  RegionQuery q;
  q.beta = {0.0, 0.0, 0.0};
  q.alpha = 0.0;
  CHECK_THROWS_AS((void)region_contains(q, inst.y, inst.regs, inst.N, inst.Nstar), DomainError);
  q.alpha = 1.0;
  CHECK_THROWS_AS((void)region_contains(q, inst.y, inst.regs, inst.N, inst.Nstar), DomainError);
  q.alpha = 0.1;
  q.beta = {0.0, 0.0};
  CHECK_THROWS_AS((void)region_contains(q, inst.y, inst.regs, inst.N, inst.Nstar), DomainError);
  q.beta = {0.0, 0.0, 0.0};
  q.stat = TauStatistic::multiple_f({{"x2"}, {"x3", "x4"}});
  CHECK_THROWS_AS((void)region_contains(q, inst.y, inst.regs, inst.N, inst.Nstar), DomainError);
}

TEST_CASE("ellipsoid boundary flips membership") {
  const auto inst = make_instance(64);
  for (double alpha : {0.01, 0.05, 0.3}) {
    const auto e = scheffe_ellipsoid(inst.y, inst.regs, inst.N, inst.Nstar, alpha);
    CHECK_FALSE(e.degenerate);
    Rng rng = stream_rng(64, static_cast<std::uint64_t>(alpha * 1000));
    for (int rep = 0; rep < 10; ++rep) {
      const auto d = unit_direction(3, rng);
      RegionQuery q;
      q.alpha = alpha;
      for (double scale : {1.0 - 1e-6, 1.0 + 1e-6}) {
        q.beta = e.center;
        for (std::size_t i = 0; i < 3; ++i) q.beta[i] += scale * e.radius * d[i];
        CHECK(region_contains(q, inst.y, inst.regs, inst.N, inst.Nstar).contained == (scale < 1.0));
      }
      q.beta = e.center;
      for (std::size_t i = 0; i < 3; ++i) q.beta[i] += e.radius * d[i];
      CHECK(region_contains(q, inst.y, inst.regs, inst.N, inst.Nstar).p_value == doctest::Approx(alpha).epsilon(1e-8));
    }
  }
}

TEST_CASE("ellipsoid and membership agree on random probes") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto inst = make_instance(100 + seed, 12 + seed);
    const double alpha = 0.02 + 0.05 * static_cast<double>(seed);
    const auto e = scheffe_ellipsoid(inst.y, inst.regs, inst.N, inst.Nstar, alpha);
    Rng rng = stream_rng(200 + seed, 0);
    std::uniform_real_distribution<double> radius(0.0, 2.0);
    for (int probe = 0; probe < 100; ++probe) {
      const auto d = unit_direction(3, rng);
      const double r = radius(rng) * e.radius;
      RegionQuery q;
      q.alpha = alpha;
      q.beta = e.center;
      for (std::size_t i = 0; i < 3; ++i) q.beta[i] += r * d[i];
      if (std::fabs(e.distance(q.beta) - e.radius) <= 1e-8 * std::max(1.0, e.radius)) continue;
      CHECK(region_contains(q, inst.y, inst.regs, inst.N, inst.Nstar).contained == e.contains(q.beta));
    }
  }
}

TEST_CASE("ellipsoid limits") {
  const auto inst = make_instance(65);
  const auto tight = scheffe_ellipsoid(inst.y, inst.regs, inst.N, inst.Nstar, 1.0 - 1e-12);
  const auto loose = scheffe_ellipsoid(inst.y, inst.regs, inst.N, inst.Nstar, 1e-12);
  const auto mid = scheffe_ellipsoid(inst.y, inst.regs, inst.N, inst.Nstar, 0.05);
  CHECK(tight.radius < 1e-3 * mid.radius);
  CHECK(loose.radius > 5.0 * mid.radius);
  double prev = 0.0;
  for (double alpha : {0.9, 0.5, 0.1, 1e-3, 1e-6}) {
    const double r = scheffe_ellipsoid(inst.y, inst.regs, inst.N, inst.Nstar, alpha).radius;
    CHECK(r > prev);
    prev = r;
  }

  // y in V_N*: SS_N* = 0 and the region collapses to its center.
  Vector exact(inst.y.size());
  for (std::size_t i = 0; i < exact.size(); ++i) exact[i] = inst.regs.column("x0")[i] + inst.regs.column("x3")[i];
  const auto point = scheffe_ellipsoid(exact, inst.regs, inst.N, inst.Nstar, 0.05);
  CHECK(point.degenerate);
  CHECK(point.radius == 0.0);
  CHECK(point.contains(point.center));
}

TEST_CASE("Monte Carlo membership agrees away from the boundary") {
  const auto inst = make_instance(66);
  const auto e = scheffe_ellipsoid(inst.y, inst.regs, inst.N, inst.Nstar, 0.1);
  RegionQuery q;
  q.alpha = 0.1;
  q.plan = RotationPlan{2000, 5, Evaluation::rotate_response};
  q.beta = e.center;
  q.beta[0] += 0.3 * e.radius;
  auto m = region_contains(q, inst.y, inst.regs, inst.N, inst.Nstar);
  CHECK(m.contained);
  CHECK(m.mc_se);
  q.beta = e.center;
  q.beta[1] += 2.0 * e.radius;
  q.plan->evaluation = Evaluation::rotate_regressors;
  m = region_contains(q, inst.y, inst.regs, inst.N, inst.Nstar);
  CHECK_FALSE(m.contained);
}

TEST_CASE("coverage simulation") {
  Rng rng = stream_rng(67, 0);
  auto regs = oracle::random_regressors(20, 5, rng);
  const IdSet N{"x0", "x1"}, Nstar{"x0", "x1", "x2", "x3"};
  GaussianLinearModel model{{{"x0", 1.0}, {"x2", 0.7}, {"x3", -0.4}}, 1.3, NoiseShape::spherical_gaussian};
  const auto cov = coverage_sim(model, regs, N, Nstar, 0.1, 3000, 11);
  CHECK(cov.trials == 3000);
  CHECK(std::fabs(cov.coverage - 0.9) <= 3.0 * cov.nominal_se);
  model.noise = NoiseShape::scaled_spherical;
  CHECK(std::fabs(coverage_sim(model, regs, N, Nstar, 0.1, 3000, 12).coverage - 0.9) <= 3.0 * cov.nominal_se);

  GaussianLinearModel outside{{{"x0", 1.0}, {"x4", 1.5}}, 1.0, NoiseShape::spherical_gaussian};
  const auto over = coverage_sim(outside, regs, N, Nstar, 0.1, 2000, 13);
  CHECK(over.coverage >= 0.9 - 2.0 * over.nominal_se);

  model.sigma = 0.0;
  CHECK(coverage_sim(model, regs, N, Nstar, 0.1, 50, 14).coverage == 1.0);
}
