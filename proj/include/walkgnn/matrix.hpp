#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "walkgnn/errors.hpp"

namespace walkgnn {

// Row-major double matrix. Deliberately minimal: the models in this library
// work on graphs of desk scale, and every summation order must stay fixed for
// bit-reproducible runs, so the handful of kernels below are written out
// explicitly instead of delegating to a BLAS.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> entries;  // rows * cols, row-major

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), entries(r * c, fill) {}

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  double& operator()(std::size_t i, std::size_t j) { return entries[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return entries[i * cols + j]; }

  std::span<const double> row(std::size_t i) const {
    return {entries.data() + i * cols, cols};
  }
  std::span<double> row(std::size_t i) { return {entries.data() + i * cols, cols}; }

  bool all_finite() const {
    for (double x : entries)
      if (!std::isfinite(x)) return false;
    return true;
  }

  bool operator==(const DenseMatrix&) const = default;
};

inline std::vector<double> matvec(const DenseMatrix& m, std::span<const double> x) {
  if (x.size() != m.cols)
    throw DimensionError("matvec: vector size " + std::to_string(x.size()) +
                         " does not match matrix cols " + std::to_string(m.cols));
  std::vector<double> y(m.rows, 0.0);
  for (std::size_t i = 0; i < m.rows; ++i) {
    double acc = 0.0;
    const double* w = m.entries.data() + i * m.cols;
    for (std::size_t j = 0; j < m.cols; ++j) acc += w[j] * x[j];
    y[i] = acc;
  }
  return y;
}

// y_i = sum_j m(j,i) x_j, the transpose product used by the Gram operator.
inline std::vector<double> matvec_transposed(const DenseMatrix& m, std::span<const double> x) {
  if (x.size() != m.rows)
    throw DimensionError("matvec_transposed: vector size does not match matrix rows");
  std::vector<double> y(m.cols, 0.0);
  for (std::size_t i = 0; i < m.rows; ++i) {
    const double* w = m.entries.data() + i * m.cols;
    for (std::size_t j = 0; j < m.cols; ++j) y[j] += w[j] * x[i];
  }
  return y;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("dot: size mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

// y += a * x
inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw DimensionError("axpy: size mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

inline double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("euclidean_distance: size mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

}  // namespace walkgnn
