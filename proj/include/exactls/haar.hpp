#pragma once

// Sampling from normalized Haar measure on the orthogonal group O_n and on
// the stabilizer O_n(V) = {S in O_n : S v = v for all v in V}.
//
// Two constructions start from a matrix Z of iid N(0,1) entries:
//   polar         T = Z (Z^T Z)^{-1/2}
//   gram_schmidt  T = Gram-Schmidt orthonormalisation of Z's columns
// Stabilizer rotations are represented implicitly as
//   T = I + B (S_o - I) B^T
// where B holds an orthonormal basis of V's complement and S_o ~ Haar on
// O_{n-q}. Applying T costs O(n (n - q)).

#include <cstddef>
#include <memory>
#include <span>

#include "exactls/matrix.hpp"
#include "exactls/projection.hpp"
#include "exactls/rng.hpp"

namespace exactls::haar {

enum class Method { polar, gram_schmidt };

/// Orthonormal basis of V together with a completion spanning V's complement.
class Stabilizer {
 public:
  /// Throws DomainError unless `subspace` is orthonormal within 1e-10 and
  /// has dimension q < n.
  explicit Stabilizer(OrthoBasis subspace);

  std::size_t n() const noexcept { return fixed_.dim(); }
  std::size_t q() const noexcept { return fixed_.size(); }
  const OrthoBasis& fixed() const noexcept { return fixed_; }
  /// n x (n - q) matrix whose columns are orthonormal and orthogonal to V.
  const DenseMatrix& complement() const noexcept { return *complement_; }
  std::shared_ptr<const DenseMatrix> complement_ptr() const noexcept { return complement_; }

 private:
  OrthoBasis fixed_;
  std::shared_ptr<const DenseMatrix> complement_;
};

class HaarRotation {
 public:
  std::size_t n() const noexcept { return n_; }
  Method method() const noexcept { return method_; }
  /// Orthonormal basis of the pointwise fixed subspace (possibly empty).
  const OrthoBasis& fixed_basis() const noexcept { return fixed_; }
  bool implicit() const noexcept { return complement_ != nullptr; }
  /// S_o for stabilizer samples, the full matrix otherwise.
  const DenseMatrix& block() const noexcept { return block_; }

  Vector apply(std::span<const double> x) const;
  Vector apply_transpose(std::span<const double> x) const;
  /// Materialises the n x n matrix.
  DenseMatrix dense() const;

 private:
  friend HaarRotation sample_haar(std::size_t, Method, Rng&);
  friend HaarRotation sample_haar_fixing(const Stabilizer&, Method, Rng&);

  std::size_t n_ = 0;
  Method method_ = Method::gram_schmidt;
  OrthoBasis fixed_;
  std::shared_ptr<const DenseMatrix> complement_;
  DenseMatrix block_;
};

/// m x m Haar-distributed orthogonal matrix. A numerically singular Gaussian
/// draw is redrawn once; a second failure throws NumericalError.
DenseMatrix sample_orthogonal(std::size_t m, Method method, Rng& rng);

/// T ~ Haar_n.
HaarRotation sample_haar(std::size_t n, Method method, Rng& rng);

/// T ~ Haar_{n,V}: T v = v for v in V, uniform otherwise.
HaarRotation sample_haar_fixing(const Stabilizer& stabilizer, Method method, Rng& rng);
HaarRotation sample_haar_fixing(const OrthoBasis& subspace, Method method, Rng& rng);

/// Uniform unit vector on the sphere of V's complement:
/// u = (sum Z_i^2)^{-1/2} sum Z_i b_i over the complement basis b_i.
Vector sample_unit_complement(const Stabilizer& stabilizer, Rng& rng);
Vector sample_unit_complement(const OrthoBasis& subspace, Rng& rng);

}  // namespace exactls::haar
