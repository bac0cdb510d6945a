#include "dichotomy/matrix.hpp"

#include <cmath>
#include <stdexcept>

namespace dichotomy {

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw std::invalid_argument("ragged matrix literal");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matrix product dimension mismatch");
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      CompensatedAccumulator acc;
      for (std::size_t k = 0; k < a.cols(); ++k) acc.add(a(i, k) * b(k, j));
      out(i, j) = acc.value();
    }
  }
  return out;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("matrix sum dimension mismatch");
  Matrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) + b(i, j);
  return out;
}

Matrix operator*(double k, const Matrix& a) {
  Matrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = k * a(i, j);
  return out;
}

Vector left_multiply(std::span<const double> v, const Matrix& m) {
  if (v.size() != m.rows()) throw std::invalid_argument("vector-matrix dimension mismatch");
  Vector out(m.cols(), 0.0);
  for (std::size_t j = 0; j < m.cols(); ++j) {
    CompensatedAccumulator acc;
    for (std::size_t i = 0; i < m.rows(); ++i) acc.add(v[i] * m(i, j));
    out[j] = acc.value();
  }
  return out;
}

void CompensatedAccumulator::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    correction_ += (sum_ - t) + x;
  } else {
    correction_ += (x - t) + sum_;
  }
  sum_ = t;
}

double compensated_sum(std::span<const double> xs) {
  CompensatedAccumulator acc;
  for (double x : xs) acc.add(x);
  return acc.value();
}

BoolMatrix positive_pattern(const Matrix& m) {
  BoolMatrix out(m.rows(), std::vector<bool>(m.cols(), false));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out[i][j] = m(i, j) > 0.0;
  return out;
}

BoolMatrix boolean_product(const BoolMatrix& a, const BoolMatrix& b) {
  const std::size_t n = a.size();
  const std::size_t p = b.empty() ? 0 : b.front().size();
  BoolMatrix out(n, std::vector<bool>(p, false));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < b.size(); ++k)
      if (a[i][k])
        for (std::size_t j = 0; j < p; ++j)
          if (b[k][j]) out[i][j] = true;
  return out;
}

bool all_true(const BoolMatrix& m) {
  for (const auto& r : m)
    for (bool b : r)
      if (!b) return false;
  return true;
}

}  // namespace dichotomy
