#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace pcae {

/// Dense row-major matrix of doubles.
///
/// Data matrices follow the column-per-sample convention throughout the
/// library: a p x n matrix holds n samples of dimension p.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> values);
  /// n x 1 column.
  static Matrix column(std::span<const double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::vector<double> col(std::size_t c) const;
  void set_col(std::size_t c, std::span<const double> values);

  Matrix transpose() const;
  /// Columns [indices...] in the given order.
  Matrix select_cols(std::span<const std::size_t> indices) const;
  /// Leading `count` rows.
  Matrix top_rows(std::size_t count) const;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s);

  bool operator==(const Matrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(Matrix a, double s);
Matrix operator*(double s, Matrix a);

/// Matrix product A*B.
Matrix matmul(const Matrix& a, const Matrix& b);
/// A^T * B without materializing the transpose.
Matrix matmul_tn(const Matrix& a, const Matrix& b);
/// A * B^T without materializing the transpose.
Matrix matmul_nt(const Matrix& a, const Matrix& b);
inline Matrix operator*(const Matrix& a, const Matrix& b) { return matmul(a, b); }

double trace(const Matrix& a);
double max_abs(const Matrix& a);
double frobenius_norm(const Matrix& a);
bool all_finite(const Matrix& a);

/// Per-row arithmetic mean (one entry per row).
std::vector<double> row_means(const Matrix& a);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
/// Euclidean distance between columns i and j of `a`.
double column_distance(const Matrix& a, std::size_t i, std::size_t j);

}  // namespace pcae
