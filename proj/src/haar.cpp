#include "exactls/haar.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "exactls/errors.hpp"
#include "exactls/kernels.hpp"

namespace exactls::haar {

namespace {

constexpr double kOrthonormalInputTol = 1e-10;

DenseMatrix gaussian_matrix(std::size_t m, Rng& rng) {
  DenseMatrix z(m, m);
  fill_standard_normal(rng, z.data());
  return z;
}

// Polar factor Z (Z^T Z)^{-1/2}, computed as U V^T from the SVD Z = U S V^T.
bool polar_factor(const DenseMatrix& z, DenseMatrix& out) {
  const auto m = static_cast<Eigen::Index>(z.rows());
  Eigen::Map<const Eigen::MatrixXd> zm(z.data().data(), m, m);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(zm, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  if (!(s(m - 1) > 1e-13 * s(0))) return false;
  const Eigen::MatrixXd t = svd.matrixU() * svd.matrixV().transpose();
  out = DenseMatrix(z.rows(), z.cols());
  Eigen::Map<Eigen::MatrixXd>(out.data().data(), m, m) = t;
  return true;
}

// t_1 = z_1 / |z_1|, t_k = normalised component of z_k orthogonal to
// t_1..t_{k-1}. Raw signs from the draw are kept.
bool gram_schmidt_factor(const DenseMatrix& z, DenseMatrix& out) {
  const std::size_t m = z.rows();
  out = z;
  for (std::size_t k = 0; k < m; ++k) {
    auto tk = out.col(k);
    const double norm = std::sqrt(kernels::sum_squares(tk));
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t j = 0; j < k; ++j) kernels::axpy(-kernels::dot(out.col(j), tk), out.col(j), tk);
    }
    const double rest = std::sqrt(kernels::sum_squares(tk));
    if (!(rest > 1e-10 * norm)) return false;
    for (double& v : tk) v /= rest;
  }
  return true;
}

}  // namespace

Stabilizer::Stabilizer(OrthoBasis subspace) : fixed_(std::move(subspace)) {
  const std::size_t n = fixed_.dim();
  const std::size_t q = fixed_.size();
  if (q >= n) {
    std::ostringstream msg;
    msg << "stabilizer subspace dimension " << q << " must be smaller than n = " << n;
    throw DomainError(msg.str());
  }
  for (std::size_t i = 0; i < q; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double g = kernels::dot(fixed_[i], fixed_[j]) - (i == j ? 1.0 : 0.0);
      if (std::fabs(g) > kOrthonormalInputTol) {
        std::ostringstream msg;
        msg << "subspace basis is not orthonormal (Gram entry (" << i << "," << j
            << ") deviates by " << g << ")";
        throw DomainError(msg.str());
      }
    }
  }
  auto comp = std::make_shared<DenseMatrix>(n, n - q);
  if (q == 0) {
    for (std::size_t i = 0; i < n; ++i) (*comp)(i, i) = 1.0;
  } else {
    const auto ni = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd v(ni, static_cast<Eigen::Index>(q));
    for (std::size_t j = 0; j < q; ++j) {
      for (std::size_t i = 0; i < n; ++i) v(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = fixed_[j][i];
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(v);
    const Eigen::MatrixXd full = qr.householderQ() * Eigen::MatrixXd::Identity(ni, ni);
    for (std::size_t j = q; j < n; ++j) {
      for (std::size_t i = 0; i < n; ++i) {
        (*comp)(i, j - q) = full(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
    }
    // One projection sweep against V tightens orthogonality to the fixed vectors.
    for (std::size_t j = 0; j < n - q; ++j) {
      auto c = comp->col(j);
      fixed_.project_out(c);
      for (std::size_t k = 0; k < j; ++k) kernels::axpy(-kernels::dot(comp->col(k), c), comp->col(k), c);
      const double norm = std::sqrt(kernels::sum_squares(c));
      for (double& x : c) x /= norm;
    }
  }
  complement_ = std::move(comp);
}

DenseMatrix sample_orthogonal(std::size_t m, Method method, Rng& rng) {
  DenseMatrix out;
  for (int attempt = 0; attempt < 2; ++attempt) {
    const DenseMatrix z = gaussian_matrix(m, rng);
    const bool ok = method == Method::polar ? polar_factor(z, out) : gram_schmidt_factor(z, out);
    if (ok) return out;
  }
  throw NumericalError("Gaussian draw for Haar sampling was numerically singular twice");
}

HaarRotation sample_haar(std::size_t n, Method method, Rng& rng) {
  if (n == 0) throw DomainError("Haar sampling needs n >= 1");
  HaarRotation t;
  t.n_ = n;
  t.method_ = method;
  t.fixed_ = OrthoBasis(n);
  t.block_ = sample_orthogonal(n, method, rng);
  return t;
}

HaarRotation sample_haar_fixing(const Stabilizer& stabilizer, Method method, Rng& rng) {
  HaarRotation t;
  t.n_ = stabilizer.n();
  t.method_ = method;
  t.fixed_ = stabilizer.fixed();
  t.complement_ = stabilizer.complement_ptr();
  t.block_ = sample_orthogonal(stabilizer.n() - stabilizer.q(), method, rng);
  return t;
}

HaarRotation sample_haar_fixing(const OrthoBasis& subspace, Method method, Rng& rng) {
  return sample_haar_fixing(Stabilizer(subspace), method, rng);
}

Vector HaarRotation::apply(std::span<const double> x) const {
  if (x.size() != n_) throw DomainError("vector length does not match rotation dimension");
  if (!complement_) {
    Vector out(n_, 0.0);
    for (std::size_t k = 0; k < n_; ++k) kernels::axpy(x[k], block_.col(k), out);
    return out;
  }
  const DenseMatrix& b = *complement_;
  const std::size_t m = b.cols();
  Vector coords(m);
  for (std::size_t j = 0; j < m; ++j) coords[j] = kernels::dot(b.col(j), x);
  Vector rotated(m, 0.0);
  for (std::size_t k = 0; k < m; ++k) kernels::axpy(coords[k], block_.col(k), rotated);
  Vector out(x.begin(), x.end());
  for (std::size_t j = 0; j < m; ++j) kernels::axpy(rotated[j] - coords[j], b.col(j), out);
  return out;
}

Vector HaarRotation::apply_transpose(std::span<const double> x) const {
  if (x.size() != n_) throw DomainError("vector length does not match rotation dimension");
  if (!complement_) {
    Vector out(n_);
    for (std::size_t j = 0; j < n_; ++j) out[j] = kernels::dot(block_.col(j), x);
    return out;
  }
  const DenseMatrix& b = *complement_;
  const std::size_t m = b.cols();
  Vector coords(m);
  for (std::size_t j = 0; j < m; ++j) coords[j] = kernels::dot(b.col(j), x);
  Vector rotated(m);
  for (std::size_t j = 0; j < m; ++j) rotated[j] = kernels::dot(block_.col(j), coords);
  Vector out(x.begin(), x.end());
  for (std::size_t j = 0; j < m; ++j) kernels::axpy(rotated[j] - coords[j], b.col(j), out);
  return out;
}

DenseMatrix HaarRotation::dense() const {
  if (!complement_) return block_;
  DenseMatrix out(n_, n_);
  Vector e(n_, 0.0);
  for (std::size_t j = 0; j < n_; ++j) {
    e[j] = 1.0;
    const Vector col = apply(e);
    std::copy(col.begin(), col.end(), out.col(j).begin());
    e[j] = 0.0;
  }
  return out;
}

Vector sample_unit_complement(const Stabilizer& stabilizer, Rng& rng) {
  const DenseMatrix& b = stabilizer.complement();
  const std::size_t m = b.cols();
  Vector z = standard_normal_vector(rng, m);
  const double inv_norm = 1.0 / std::sqrt(kernels::sum_squares(z));
  Vector u(stabilizer.n(), 0.0);
  for (std::size_t j = 0; j < m; ++j) kernels::axpy(z[j] * inv_norm, b.col(j), u);
  return u;
}

Vector sample_unit_complement(const OrthoBasis& subspace, Rng& rng) {
  return sample_unit_complement(Stabilizer(subspace), rng);
}

}  // namespace exactls::haar
