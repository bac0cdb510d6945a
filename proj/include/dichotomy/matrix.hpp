#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace dichotomy {

using Vector = std::vector<double>;

/// Dense row-major real matrix. Small by construction (at most |S|^2 x |S|^2).
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }

  const std::vector<double>& data() const { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator*(double k, const Matrix& a);

/// Row vector times matrix: (v^T M)^T.
Vector left_multiply(std::span<const double> v, const Matrix& m);

/// Neumaier-compensated sum.
double compensated_sum(std::span<const double> xs);

class CompensatedAccumulator {
 public:
  void add(double x);
  double value() const { return sum_ + correction_; }

 private:
  double sum_ = 0.0;
  double correction_ = 0.0;
};

using BoolMatrix = std::vector<std::vector<bool>>;

BoolMatrix positive_pattern(const Matrix& m);
BoolMatrix boolean_product(const BoolMatrix& a, const BoolMatrix& b);
bool all_true(const BoolMatrix& m);

}  // namespace dichotomy
