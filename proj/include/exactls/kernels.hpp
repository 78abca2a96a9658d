#pragma once

// Dense vector kernels used by every inner loop in the library.
//
// Each kernel has a scalar reference implementation and vectorised variants
// (AVX2+FMA on x86-64, NEON on AArch64). The variant is picked once at
// startup from the CPU's capabilities; set_backend() overrides it, mainly
// for the equivalence tests. Vectorised reductions sum in a different order
// than the scalar loop, so results agree to rounding, not bitwise.

#include <cstddef>
#include <span>
#include <string_view>
#include <utility>

namespace exactls::kernels {

enum class Backend { scalar, avx2, neon };

std::string_view backend_name(Backend b) noexcept;

/// True when the running CPU (and this build) can execute `b`.
bool backend_available(Backend b) noexcept;

/// Backend currently used by the dispatching entry points below.
Backend active_backend() noexcept;

/// Throws DomainError when `b` is unavailable.
void set_backend(Backend b);

double dot(std::span<const double> a, std::span<const double> b) noexcept;
double sum_squares(std::span<const double> a) noexcept;
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y) noexcept;
/// out = a .* b (element-wise)
void multiply(std::span<const double> a, std::span<const double> b, std::span<double> out) noexcept;
/// Returns (x.a, x.b) in one pass over x.
std::pair<double, double> dot2(std::span<const double> x, std::span<const double> a,
                               std::span<const double> b) noexcept;

// Direct access to the individual variants. Sizes are taken from the first
// argument; callers guarantee equal lengths.
namespace scalar {
double dot(const double* a, const double* b, std::size_t n) noexcept;
double sum_squares(const double* a, std::size_t n) noexcept;
void axpy(double alpha, const double* x, double* y, std::size_t n) noexcept;
void multiply(const double* a, const double* b, double* out, std::size_t n) noexcept;
std::pair<double, double> dot2(const double* x, const double* a, const double* b,
                               std::size_t n) noexcept;
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n) noexcept;
double sum_squares(const double* a, std::size_t n) noexcept;
void axpy(double alpha, const double* x, double* y, std::size_t n) noexcept;
void multiply(const double* a, const double* b, double* out, std::size_t n) noexcept;
std::pair<double, double> dot2(const double* x, const double* a, const double* b,
                               std::size_t n) noexcept;
}  // namespace avx2
#endif

#if defined(__aarch64__) || defined(__ARM_NEON)
namespace neon {
double dot(const double* a, const double* b, std::size_t n) noexcept;
double sum_squares(const double* a, std::size_t n) noexcept;
void axpy(double alpha, const double* x, double* y, std::size_t n) noexcept;
void multiply(const double* a, const double* b, double* out, std::size_t n) noexcept;
std::pair<double, double> dot2(const double* x, const double* a, const double* b,
                               std::size_t n) noexcept;
}  // namespace neon
#endif

}  // namespace exactls::kernels
