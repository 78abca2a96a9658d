#include "exactls/matrix.hpp"

#include <cmath>

#include "exactls/errors.hpp"
#include "exactls/kernels.hpp"

namespace exactls {

double orthogonality_defect(const DenseMatrix& m) {
  double sum = 0.0;
  for (std::size_t i = 0; i < m.cols(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const double g = kernels::dot(m.col(i), m.col(j)) - (i == j ? 1.0 : 0.0);
      sum += g * g;
    }
  }
  return std::sqrt(sum);
}

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw DomainError("matrix product dimension mismatch");
  DenseMatrix out(a.rows(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    for (std::size_t k = 0; k < a.cols(); ++k) kernels::axpy(b(k, j), a.col(k), out.col(j));
  }
  return out;
}

DenseMatrix transpose(const DenseMatrix& a) {
  DenseMatrix out(a.cols(), a.rows());
  for (std::size_t j = 0; j < a.cols(); ++j) {
    for (std::size_t i = 0; i < a.rows(); ++i) out(j, i) = a(i, j);
  }
  return out;
}

}  // namespace exactls
