#include <atomic>
#include <cstdlib>
#include <cstring>
#include <string>

#include "exactls/errors.hpp"
#include "exactls/kernels.hpp"

namespace exactls::kernels {

namespace {

struct Table {
  double (*dot)(const double*, const double*, std::size_t) noexcept;
  double (*sum_squares)(const double*, std::size_t) noexcept;
  void (*axpy)(double, const double*, double*, std::size_t) noexcept;
  void (*multiply)(const double*, const double*, double*, std::size_t) noexcept;
  std::pair<double, double> (*dot2)(const double*, const double*, const double*,
                                    std::size_t) noexcept;
};

constexpr Table kScalar{scalar::dot, scalar::sum_squares, scalar::axpy, scalar::multiply,
                        scalar::dot2};
#if defined(__x86_64__) || defined(_M_X64)
constexpr Table kAvx2{avx2::dot, avx2::sum_squares, avx2::axpy, avx2::multiply, avx2::dot2};
#endif
#if defined(__aarch64__) || defined(__ARM_NEON)
constexpr Table kNeon{neon::dot, neon::sum_squares, neon::axpy, neon::multiply, neon::dot2};
#endif

const Table* table_for(Backend b) noexcept {
  switch (b) {
#if defined(__x86_64__) || defined(_M_X64)
    case Backend::avx2:
      return &kAvx2;
#endif
#if defined(__aarch64__) || defined(__ARM_NEON)
    case Backend::neon:
      return &kNeon;
#endif
    default:
      return &kScalar;
  }
}

Backend detect() noexcept {
  // EXACTLS_SIMD=scalar forces the reference kernels.
  if (const char* env = std::getenv("EXACTLS_SIMD"); env != nullptr && std::strcmp(env, "scalar") == 0) {
    return Backend::scalar;
  }
  if (backend_available(Backend::avx2)) return Backend::avx2;
  if (backend_available(Backend::neon)) return Backend::neon;
  return Backend::scalar;
}

struct State {
  std::atomic<Backend> backend{detect()};
  std::atomic<const Table*> table{table_for(backend.load())};
};

State& state() noexcept {
  static State s;
  return s;
}

inline const Table& active() noexcept { return *state().table.load(std::memory_order_relaxed); }

}  // namespace

std::string_view backend_name(Backend b) noexcept {
  switch (b) {
    case Backend::scalar:
      return "scalar";
    case Backend::avx2:
      return "avx2";
    case Backend::neon:
      return "neon";
  }
  return "unknown";
}

bool backend_available(Backend b) noexcept {
  switch (b) {
    case Backend::scalar:
      return true;
    case Backend::avx2:
#if (defined(__x86_64__) || defined(_M_X64)) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Backend::neon:
#if defined(__aarch64__) || defined(__ARM_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Backend active_backend() noexcept { return state().backend.load(); }

void set_backend(Backend b) {
  if (!backend_available(b)) {
    throw DomainError("SIMD backend '" + std::string(backend_name(b)) + "' is not available");
  }
  state().backend.store(b);
  state().table.store(table_for(b));
}

double dot(std::span<const double> a, std::span<const double> b) noexcept {
  return active().dot(a.data(), b.data(), a.size());
}

double sum_squares(std::span<const double> a) noexcept {
  return active().sum_squares(a.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) noexcept {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

void multiply(std::span<const double> a, std::span<const double> b, std::span<double> out) noexcept {
  active().multiply(a.data(), b.data(), out.data(), a.size());
}

std::pair<double, double> dot2(std::span<const double> x, std::span<const double> a,
                               std::span<const double> b) noexcept {
  return active().dot2(x.data(), a.data(), b.data(), x.size());
}

}  // namespace exactls::kernels
