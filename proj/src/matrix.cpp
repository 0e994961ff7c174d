#include "narme/matrix.hpp"

#include <cmath>
#include <stdexcept>

namespace narme {

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(rows.size(), rows.size() ? rows.begin()->size() : 0);
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != m.cols_) throw std::invalid_argument("from_rows: ragged rows");
    std::size_t j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

bool Matrix::all_finite() const {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matmul: inner dimensions differ");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) throw std::invalid_argument("matmul_nt: inner dimensions differ");
  Matrix c(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.rows(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(j, k);
      c(i, j) = s;
    }
  return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw std::invalid_argument("matmul_tn: inner dimensions differ");
  Matrix c(a.cols(), b.cols());
  for (std::size_t k = 0; k < a.rows(); ++k)
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double aki = a(k, i);
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aki * b(k, j);
    }
  return c;
}

static void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (!a.same_shape(b)) throw std::invalid_argument(std::string(what) + ": shape mismatch");
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "hadamard");
  Matrix c = a;
  for (std::size_t i = 0; i < c.size(); ++i) c.data()[i] *= b.data()[i];
  return c;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "operator+");
  Matrix c = a;
  for (std::size_t i = 0; i < c.size(); ++i) c.data()[i] += b.data()[i];
  return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "operator-");
  Matrix c = a;
  for (std::size_t i = 0; i < c.size(); ++i) c.data()[i] -= b.data()[i];
  return c;
}

Matrix col_sums(const Matrix& a) {
  Matrix c(1, a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(0, j) += a(i, j);
  return c;
}

Matrix take_rows(const Matrix& a, std::span<const std::size_t> idx) {
  Matrix c(idx.size(), a.cols());
  for (std::size_t r = 0; r < idx.size(); ++r) {
    if (idx[r] >= a.rows()) throw std::invalid_argument("take_rows: index out of range");
    for (std::size_t j = 0; j < a.cols(); ++j) c(r, j) = a(idx[r], j);
  }
  return c;
}

}  // namespace narme
