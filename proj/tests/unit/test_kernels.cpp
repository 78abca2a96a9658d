#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "exactls/errors.hpp"
#include "exactls/kernels.hpp"
#include "exactls/rng.hpp"

using namespace exactls;
namespace k = exactls::kernels;

namespace {

std::vector<k::Backend> available_vector_backends() {
  std::vector<k::Backend> out;
  for (auto b : {k::Backend::avx2, k::Backend::neon}) {
    if (k::backend_available(b)) out.push_back(b);
  }
  return out;
}

// Relative-to-magnitude tolerance for reductions summed in a different order.
double reduction_tol(const std::vector<double>& a, const std::vector<double>& b) {
  double mag = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) mag += std::fabs(a[i] * b[i]);
  return 1e-14 * (mag + 1.0);
}

}  // namespace

TEST_CASE("scalar backend is always available") {
  CHECK(k::backend_available(k::Backend::scalar));
  CHECK(k::backend_name(k::Backend::scalar) == "scalar");
}

TEST_CASE("vector kernels agree with the scalar reference") {
  Rng rng = stream_rng(11, 0);
  const auto backends = available_vector_backends();
  if (backends.empty()) MESSAGE("no vector backend on this machine; only the scalar path is exercised");
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 15u, 16u, 17u, 33u, 100u, 1001u}) {
    auto a = standard_normal_vector(rng, n);
    auto b = standard_normal_vector(rng, n);
    auto c = standard_normal_vector(rng, n);
    const double dot_ref = k::scalar::dot(a.data(), b.data(), n);
    const double ss_ref = k::scalar::sum_squares(a.data(), n);
    const auto d2_ref = k::scalar::dot2(a.data(), b.data(), c.data(), n);
    std::vector<double> axpy_ref = b;
    k::scalar::axpy(0.37, a.data(), axpy_ref.data(), n);
    std::vector<double> mul_ref(n);
    k::scalar::multiply(a.data(), b.data(), mul_ref.data(), n);

    for (auto backend : backends) {
      CAPTURE(n);
      CAPTURE(k::backend_name(backend));
      k::set_backend(backend);
      CHECK(std::fabs(k::dot(a, b) - dot_ref) <= reduction_tol(a, b));
      CHECK(std::fabs(k::sum_squares(a) - ss_ref) <= reduction_tol(a, a));
      const auto d2 = k::dot2(a, b, c);
      CHECK(std::fabs(d2.first - d2_ref.first) <= reduction_tol(a, b));
      CHECK(std::fabs(d2.second - d2_ref.second) <= reduction_tol(a, c));
      std::vector<double> y = b;
      k::axpy(0.37, a, y);
      for (std::size_t i = 0; i < n; ++i) CHECK(y[i] == doctest::Approx(axpy_ref[i]).epsilon(1e-15));
      std::vector<double> m(n);
      k::multiply(a, b, m);
      for (std::size_t i = 0; i < n; ++i) CHECK(m[i] == mul_ref[i]);
    }
  }
  k::set_backend(k::Backend::scalar);
}

TEST_CASE("dispatch follows set_backend") {
  const auto initial = k::active_backend();
  k::set_backend(k::Backend::scalar);
  CHECK(k::active_backend() == k::Backend::scalar);
  std::vector<double> a{1, 2, 3}, b{4, 5, 6};
  CHECK(k::dot(a, b) == 32.0);
  CHECK(k::sum_squares(a) == 14.0);
  k::set_backend(initial);
  CHECK(k::active_backend() == initial);
}

TEST_CASE("unavailable backends are rejected") {
  for (auto b : {k::Backend::avx2, k::Backend::neon}) {
    if (!k::backend_available(b)) CHECK_THROWS_AS(k::set_backend(b), DomainError);
  }
}
