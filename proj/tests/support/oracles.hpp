#pragma once

// Reference implementations for tests. Nothing here shares code with the
// library: integrals use Boost's tanh-sinh quadrature in long double, least
// squares uses Eigen's dense solvers.

#include <Eigen/Dense>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <span>
#include <vector>

#include "exactls/matrix.hpp"
#include "exactls/projection.hpp"
#include "exactls/rng.hpp"

namespace oracle {

// int_0^x t^(a-1) (1-t)^(b-1) dt for x <= 1/2, where only t = 0 can be singular.
inline long double lower_beta_integral(long double a, long double b, long double x) {
  if (x <= 0) return 0;
  static thread_local boost::math::quadrature::tanh_sinh<long double> integrator(15);
  auto f = [=](long double t) { return std::pow(t, a - 1) * std::pow(1 - t, b - 1); };
  return integrator.integrate(f, 0.0L, x, 1e-18L);
}

inline long double beta_function(long double a, long double b) {
  return lower_beta_integral(a, b, 0.5L) + lower_beta_integral(b, a, 0.5L);
}

/// Regularized incomplete beta by quadrature.
inline double beta_cdf(double a, double b, double u) {
  if (u <= 0) return 0.0;
  if (u >= 1) return 1.0;
  const long double total = beta_function(a, b);
  if (u <= 0.5) return static_cast<double>(lower_beta_integral(a, b, u) / total);
  return static_cast<double>(1 - lower_beta_integral(b, a, 1.0L - static_cast<long double>(u)) / total);
}

inline Eigen::MatrixXd to_eigen(const exactls::RegressorSet& regs, const exactls::IdSet& ids) {
  Eigen::MatrixXd x(regs.n(), ids.size());
  for (std::size_t j = 0; j < ids.size(); ++j) {
    const auto c = regs.column(ids[j]);
    for (std::size_t i = 0; i < regs.n(); ++i) x(i, j) = c[i];
  }
  return x;
}

inline Eigen::VectorXd to_eigen(std::span<const double> v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

/// y'y - y'X (X'X)^{-1} X'y.
inline double normal_equations_ss(std::span<const double> y, const exactls::RegressorSet& regs,
                                  const exactls::IdSet& ids) {
  const Eigen::VectorXd yv = to_eigen(y);
  if (ids.empty()) return yv.squaredNorm();
  const Eigen::MatrixXd x = to_eigen(regs, ids);
  const Eigen::VectorXd xty = x.transpose() * yv;
  const Eigen::VectorXd coef = (x.transpose() * x).ldlt().solve(xty);
  return yv.squaredNorm() - xty.dot(coef);
}

/// Residual sum of squares through Householder QR, the better conditioned route.
inline double qr_ss(std::span<const double> y, const exactls::RegressorSet& regs, const exactls::IdSet& ids) {
  const Eigen::VectorXd yv = to_eigen(y);
  if (ids.empty()) return yv.squaredNorm();
  const Eigen::MatrixXd x = to_eigen(regs, ids);
  const Eigen::VectorXd coef = x.colPivHouseholderQr().solve(yv);
  return (yv - x * coef).squaredNorm();
}

inline Eigen::MatrixXd to_eigen(const exactls::DenseMatrix& m) {
  return Eigen::Map<const Eigen::MatrixXd>(m.data().data(), static_cast<Eigen::Index>(m.rows()),
                                           static_cast<Eigen::Index>(m.cols()));
}

/// Random orthogonal matrix from Eigen's QR of a Gaussian matrix.
inline Eigen::MatrixXd random_orthogonal(std::size_t n, exactls::Rng& rng) {
  Eigen::MatrixXd z(n, n);
  std::normal_distribution<double> normal;
  for (Eigen::Index j = 0; j < z.cols(); ++j)
    for (Eigen::Index i = 0; i < z.rows(); ++i) z(i, j) = normal(rng);
  return z.householderQr().householderQ();
}

inline exactls::RegressorSet random_regressors(std::size_t n, std::size_t count, exactls::Rng& rng,
                                               bool with_constant = true) {
  exactls::RegressorSet regs(n);
  std::size_t first = 0;
  if (with_constant && count > 0) {
    regs.add("x0", exactls::Vector(n, 1.0));
    first = 1;
  }
  for (std::size_t j = first; j < count; ++j) regs.add("x" + std::to_string(j), exactls::standard_normal_vector(rng, n));
  return regs;
}

inline exactls::IdSet ids(std::size_t from, std::size_t to) {
  exactls::IdSet out;
  for (std::size_t j = from; j < to; ++j) out.push_back("x" + std::to_string(j));
  return out;
}

}  // namespace oracle
