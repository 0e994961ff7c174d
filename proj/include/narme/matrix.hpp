#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace narme {

/// Dense row-major matrix of doubles. The only storage type used by the
/// library; shape [rows, cols] with element (i, j) at data[i*cols + j].
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }
  bool same_shape(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::span<double> flat() { return data_; }
  std::span<const double> flat() const { return data_; }

  void fill(double v) { data_.assign(data_.size(), v); }
  bool all_finite() const;

  bool operator==(const Matrix& o) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// C = A * B, shapes [m,k] x [k,n] -> [m,n].
Matrix matmul(const Matrix& a, const Matrix& b);
/// C = A * B^T, shapes [m,k] x [n,k] -> [m,n].
Matrix matmul_nt(const Matrix& a, const Matrix& b);
/// C = A^T * B, shapes [k,m] x [k,n] -> [m,n].
Matrix matmul_tn(const Matrix& a, const Matrix& b);

Matrix hadamard(const Matrix& a, const Matrix& b);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);

/// Sum over rows -> row vector [1, cols].
Matrix col_sums(const Matrix& a);

/// Extract the given rows, in order.
Matrix take_rows(const Matrix& a, std::span<const std::size_t> idx);

}  // namespace narme
