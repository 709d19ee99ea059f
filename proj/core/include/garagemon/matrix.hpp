#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace garagemon {

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// A·x = y problem statement. Construction validates shape and finiteness.
struct LinearSystem {
  Matrix a;
  std::vector<double> y;

  // Throws DimensionError when shapes disagree or are empty, InputError
  // when any entry is NaN or infinite.
  LinearSystem(Matrix a_in, std::vector<double> y_in);

  std::size_t rows() const { return a.rows(); }
  std::size_t cols() const { return a.cols(); }
  bool square() const { return a.rows() == a.cols(); }
};

std::vector<double> multiply(const Matrix& a, std::span<const double> x);

// Euclidean norm of A·x − y. Summation runs over a fixed chunk layout so
// the value is identical no matter who computes it (see solvers internals).
double residual_norm(const LinearSystem& system, std::span<const double> x);

namespace detail {
inline constexpr std::size_t kResidualChunks = 16;
// Partial sum of squared residual entries for chunk c of the fixed layout.
double residual_chunk_sq(const LinearSystem& system, std::span<const double> x, std::size_t chunk);
}  // namespace detail

}  // namespace garagemon
