#include "garagemon/matrix.hpp"

#include <cmath>
#include <utility>

#include "garagemon/errors.hpp"

namespace garagemon {

LinearSystem::LinearSystem(Matrix a_in, std::vector<double> y_in)
    : a(std::move(a_in)), y(std::move(y_in)) {
  if (a.rows() == 0 || a.cols() == 0)
    throw DimensionError("linear system: matrix must have at least one row and column");
  if (y.size() != a.rows())
    throw DimensionError("linear system: right-hand side length " + std::to_string(y.size()) +
                         " does not match row count " + std::to_string(a.rows()));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (double v : a.row(i))
      if (!std::isfinite(v)) throw InputError("linear system: non-finite matrix entry");
  for (double v : y)
    if (!std::isfinite(v)) throw InputError("linear system: non-finite right-hand side entry");
}

std::vector<double> multiply(const Matrix& a, std::span<const double> x) {
  std::vector<double> out(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto row = a.row(i);
    double sum = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) sum += row[j] * x[j];
    out[i] = sum;
  }
  return out;
}

namespace detail {

double residual_chunk_sq(const LinearSystem& system, std::span<const double> x, std::size_t chunk) {
  const std::size_t n = system.rows();
  const std::size_t begin = chunk * n / kResidualChunks;
  const std::size_t end = (chunk + 1) * n / kResidualChunks;
  double sum = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    const auto row = system.a.row(i);
    double r = -system.y[i];
    for (std::size_t j = 0; j < row.size(); ++j) r += row[j] * x[j];
    sum += r * r;
  }
  return sum;
}

}  // namespace detail

double residual_norm(const LinearSystem& system, std::span<const double> x) {
  double total = 0.0;
  for (std::size_t c = 0; c < detail::kResidualChunks; ++c)
    total += detail::residual_chunk_sq(system, x, c);
  return std::sqrt(total);
}

}  // namespace garagemon
