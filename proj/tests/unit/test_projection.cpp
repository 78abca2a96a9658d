#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "exactls/errors.hpp"
#include "exactls/kernels.hpp"
#include "exactls/projection.hpp"
#include "exactls/rng.hpp"
#include "oracles.hpp"

using namespace exactls;

namespace {

double norm2(std::span<const double> v) { return kernels::sum_squares(v); }

void check_state_invariants(const ProjectionState& s) {
  const auto& b = s.basis();
  for (std::size_t i = 0; i < b.size(); ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double d = kernels::dot(b[i], b[j]);
      CHECK(std::fabs(d - (i == j ? 1.0 : 0.0)) <= 1e-10);
    }
  }
  const double ny = std::sqrt(norm2(s.y()));
  for (std::size_t j = 0; j < b.size(); ++j) CHECK(std::fabs(kernels::dot(b[j], s.residual())) <= 1e-10 * ny);
  const double r2 = norm2(s.residual());
  CHECK(std::fabs(s.ss() - r2) <= 1e-12 * std::max(r2, 1e-300));
  const double pyth = norm2(s.y()) - norm2(s.y_hat());
  CHECK(std::fabs(s.ss() - pyth) <= 1e-10 * norm2(s.y()));
}

}  // namespace

TEST_CASE("mean projection") {
  RegressorSet regs(3);
  regs.add("x0", {1, 1, 1});
  const Vector y{1, 2, 3};
  const auto s = build_projection(y, regs, {"x0"});
  for (double v : s.y_hat()) CHECK(v == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(s.ss() == doctest::Approx(2.0).epsilon(1e-15));
  check_state_invariants(s);
}

TEST_CASE("empty set") {
  Rng rng = stream_rng(1, 0);
  const auto y = standard_normal_vector(rng, 9);
  RegressorSet regs(9);
  const auto s = build_projection(y, regs, {});
  CHECK(s.rank() == 0);
  CHECK(s.ss() == doctest::Approx(norm2(y)).epsilon(1e-15));
  for (double v : s.y_hat()) CHECK(v == 0.0);
  const auto e = ProjectionState::empty(y);
  CHECK(e.ss() == doctest::Approx(norm2(y)).epsilon(1e-15));
}

TEST_CASE("SS matches the normal-equations oracle") {
  Rng rng = stream_rng(2, 0);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 10 + rep % 30;
    const std::size_t p = 1 + rep % 7;
    auto regs = oracle::random_regressors(n, p, rng);
    const auto y = standard_normal_vector(rng, n);
    const auto ids = oracle::ids(0, p);
    const auto s = build_projection(y, regs, ids);
    check_state_invariants(s);
    const double ref = oracle::normal_equations_ss(y, regs, ids);
    CHECK(std::fabs(s.ss() - ref) <= 1e-9 * ref);
    CHECK(std::fabs(s.ss() - oracle::qr_ss(y, regs, ids)) <= 1e-12 * norm2(y));
  }
}

TEST_CASE("rank deficiency names the column") {
  Rng rng = stream_rng(3, 0);
  auto regs = oracle::random_regressors(12, 3, rng);
  Vector combo(12);
  const auto a = regs.column("x1");
  const auto b = regs.column("x2");
  for (std::size_t i = 0; i < 12; ++i) combo[i] = 2.0 * a[i] - b[i];
  regs.add("dup", combo);
  const auto y = standard_normal_vector(rng, 12);
  try {
    (void)build_projection(y, regs, {"x0", "x1", "x2", "dup"});
    FAIL("expected SingularityError");
  } catch (const SingularityError& e) {
    CHECK(e.column() == "dup");
  }
}

TEST_CASE("dimension and membership errors") {
  RegressorSet regs(4);
  regs.add("a", {1, 2, 3, 4});
  CHECK_THROWS_AS(regs.add("a", {1, 1, 1, 1}), DomainError);
  CHECK_THROWS_AS(regs.add("b", {1, 1, 1}), DomainError);
  const Vector y{1, 0, 0, 0};
  CHECK_THROWS_AS((void)build_projection(Vector{1, 2}, regs, {"a"}), DomainError);
  CHECK_THROWS_AS((void)build_projection(y, regs, {"zz"}), DomainError);
  const auto s = build_projection(y, regs, {"a"});
  CHECK_THROWS_AS((void)peek_ss_drop(s, Vector{1, 2}), DomainError);
  CHECK_THROWS_AS((void)extend_with_column(s, Vector{1, 2}), DomainError);
  CHECK_THROWS_AS((void)project_onto_complement(s, Vector{1, 2}), DomainError);
  RegressorSet full(2);
  full.add("u", {1, 0});
  full.add("v", {0, 1});
  CHECK_THROWS_AS((void)build_projection(Vector{1, 1}, full, {"u", "v"}), DomainError);
}

TEST_CASE("extend_with_column") {
  Rng rng = stream_rng(4, 0);
  const std::size_t n = 25;
  auto regs = oracle::random_regressors(n, 6, rng);
  const auto y = standard_normal_vector(rng, n);
  const auto base = build_projection(y, regs, oracle::ids(0, 3));

  SUBCASE("column inside V_N") {
    Vector inside(n);
    for (std::size_t i = 0; i < n; ++i) inside[i] = regs.column("x1")[i] - 3.0 * regs.column("x2")[i];
    const auto e = extend_with_column(base, inside);
    CHECK_FALSE(e.added);
    CHECK(e.ss_drop == 0.0);
    CHECK(e.state.rank() == base.rank());
    CHECK(peek_ss_drop(base, inside) == 0.0);
  }
  SUBCASE("residual column fits perfectly") {
    const Vector r(base.residual().begin(), base.residual().end());
    const auto e = extend_with_column(base, r);
    CHECK(e.added);
    CHECK(e.ss_drop == doctest::Approx(base.ss()).epsilon(1e-12));
    CHECK(e.state.ss() <= 1e-12 * norm2(y));
    CHECK(peek_ss_drop(base, r) == doctest::Approx(base.ss()).epsilon(1e-12));
  }
  SUBCASE("chain equals a full rebuild") {
    ProjectionState s = base;
    for (std::size_t j = 3; j < 6; ++j) {
      const auto id = "x" + std::to_string(j);
      const double peek = peek_ss_drop(s, regs.column(id));
      auto e = extend_with_column(s, regs.column(id), id);
      CHECK(e.added);
      CHECK(std::fabs(peek - e.ss_drop) <= 1e-12 * std::max(1.0, e.ss_drop));
      CHECK(e.state.ss() == doctest::Approx(s.ss() - e.ss_drop).epsilon(1e-12));
      s = std::move(e.state);
      check_state_invariants(s);
      const auto rebuilt = build_projection(y, regs, oracle::ids(0, j + 1));
      CHECK(std::fabs(s.ss() - rebuilt.ss()) <= 1e-9 * rebuilt.ss());
    }
    CHECK(s.ids().size() == 6);
  }
}

TEST_CASE("project_onto_complement") {
  Rng rng = stream_rng(5, 0);
  const std::size_t n = 15;
  auto regs = oracle::random_regressors(n, 4, rng);
  const auto y = standard_normal_vector(rng, n);
  const auto ids = oracle::ids(0, 4);
  const auto s = build_projection(y, regs, ids);

  const auto zero = project_onto_complement(s, regs.column("x2"));
  CHECK(std::sqrt(norm2(zero)) <= 1e-12 * std::sqrt(norm2(regs.column("x2"))));

  const Vector r(s.residual().begin(), s.residual().end());
  const auto same = project_onto_complement(s, r);
  for (std::size_t i = 0; i < n; ++i) CHECK(same[i] == doctest::Approx(r[i]).epsilon(1e-12).scale(1.0));

  // Dense oracle (I - X (X'X)^{-1} X') x.
  const auto x = standard_normal_vector(rng, n);
  const Eigen::MatrixXd X = oracle::to_eigen(regs, ids);
  const Eigen::VectorXd xv = oracle::to_eigen(x);
  const Eigen::VectorXd ref = xv - X * X.colPivHouseholderQr().solve(xv);
  const auto got = project_onto_complement(s, x);
  for (std::size_t i = 0; i < n; ++i) CHECK(std::fabs(got[i] - ref(static_cast<Eigen::Index>(i))) <= 1e-10);
  for (std::size_t j = 0; j < s.basis().size(); ++j) {
    CHECK(std::fabs(kernels::dot(s.basis()[j], got)) <= 1e-10 * std::sqrt(norm2(x)));
  }
}

TEST_CASE("monotonicity, order independence and scale") {
  Rng rng = stream_rng(6, 0);
  const std::size_t n = 30;
  auto regs = oracle::random_regressors(n, 8, rng);
  const auto y = standard_normal_vector(rng, n);
  double prev = norm2(y);
  for (std::size_t p = 1; p <= 8; ++p) {
    const double ss = build_projection(y, regs, oracle::ids(0, p)).ss();
    CHECK(ss <= prev + 1e-12 * norm2(y));
    prev = ss;
  }
  auto ids = oracle::ids(0, 8);
  const double ref = build_projection(y, regs, ids).ss();
  for (int perm = 0; perm < 20; ++perm) {
    std::shuffle(ids.begin(), ids.end(), rng);
    CHECK(std::fabs(build_projection(y, regs, ids).ss() - ref) <= 1e-9 * ref);
  }
  Vector y3 = y;
  for (double& v : y3) v *= 3.0;
  CHECK(build_projection(y3, regs, ids).ss() == doctest::Approx(9.0 * ref).epsilon(1e-12));
}

TEST_CASE("reproject keeps the subspace") {
  Rng rng = stream_rng(7, 0);
  auto regs = oracle::random_regressors(20, 5, rng);
  const auto y = standard_normal_vector(rng, 20);
  const auto z = standard_normal_vector(rng, 20);
  const auto s = build_projection(y, regs, oracle::ids(0, 5));
  const auto r = s.reproject(z);
  CHECK(r.ss() == doctest::Approx(build_projection(z, regs, oracle::ids(0, 5)).ss()).epsilon(1e-12));
  check_state_invariants(r);
}

TEST_CASE("id set helpers") {
  const IdSet a{"a", "b", "c"}, b{"c", "d"};
  CHECK(id_union(a, b) == IdSet{"a", "b", "c", "d"});
  CHECK(id_difference(a, b) == IdSet{"a", "b"});
  CHECK(id_subset(IdSet{"c"}, a));
  CHECK_FALSE(id_subset(b, a));
}
