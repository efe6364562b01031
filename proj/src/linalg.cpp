#include "pnd/linalg.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pnd {

Matrix cholesky(const Matrix& a, double jitter) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("cholesky: matrix is not square");
  Matrix l = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double pivot = a(j, j) - l.row(j).head(j).squaredNorm();
    if (pivot < -jitter) {
      throw std::domain_error("cholesky: indefinite matrix (pivot " + std::to_string(pivot) +
                              " at row " + std::to_string(j) + ")");
    }
    if (pivot <= jitter) {
      // Zero direction: the rest of the column must vanish as well.
      for (Eigen::Index i = j + 1; i < n; ++i) {
        double r = a(i, j) - l.row(i).head(j).dot(l.row(j).head(j));
        if (std::abs(r) > std::sqrt(jitter) * (1.0 + std::abs(a(i, j))))
          throw std::domain_error("cholesky: indefinite matrix at row " + std::to_string(i));
      }
      continue;
    }
    double ljj = std::sqrt(pivot);
    l(j, j) = ljj;
    for (Eigen::Index i = j + 1; i < n; ++i)
      l(i, j) = (a(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / ljj;
  }
  return l;
}

bool is_psd(const Matrix& a, double jitter) {
  try {
    cholesky(a, jitter);
    return true;
  } catch (const std::domain_error&) {
    return false;
  }
}

}  // namespace pnd
