#pragma once

#include <cstddef>
#include <vector>

namespace permalign {

/// Dense row-major matrix of 64-bit floats. Value semantics throughout;
/// nothing here mutates shared state.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  double* row_ptr(std::size_t i) { return data_.data() + i * cols_; }
  const double* row_ptr(std::size_t i) const { return data_.data() + i * cols_; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool same_shape(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }
  bool is_square() const { return rows_ == cols_; }

  bool operator==(const Matrix& other) const = default;

  bool all_finite() const;
  double max_abs() const;
  double frobenius_norm() const;
  /// Sum of diagonal entries; the matrix must be square.
  double trace() const;
  /// Largest |a_ij - a_ji| over the matrix; 0 for exactly symmetric input.
  double max_symmetry_gap() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// a * b
Matrix multiply(const Matrix& a, const Matrix& b);
/// a * b^T without materializing the transpose
Matrix multiply_abt(const Matrix& a, const Matrix& b);
/// a^T * b without materializing the transpose
Matrix multiply_atb(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);

Matrix add(const Matrix& a, const Matrix& b);
Matrix subtract(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& a, double factor);
/// t*a + (1-t)*b entrywise
Matrix convex_combination(const Matrix& a, const Matrix& b, double t);

double max_abs_diff(const Matrix& a, const Matrix& b);

}  // namespace permalign
