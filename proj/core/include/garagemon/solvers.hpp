#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "garagemon/matrix.hpp"

namespace garagemon::solvers {

enum class Method { gauss, jacobi, gauss_seidel };

// Accepts "gauss", "jacobi", "gauss-seidel"; throws ConfigError otherwise.
Method parse_method(std::string_view name);
std::string_view method_name(Method method);

struct SolveResult {
  std::vector<double> x;
  double residual_norm = 0.0;  // Euclidean norm of A·x − y
  int iterations = 0;          // completed sweeps; 0 for direct methods
  bool converged = false;
};

inline constexpr double kPivotTolerance = 1e-12;

// Weak row dominance (|a_ii| >= sum of off-diagonal magnitudes) on every
// row, strict on at least one. Throws DimensionError for non-square input.
bool is_diagonally_dominant(const LinearSystem& system);

// Gaussian elimination with partial pivoting. With workers > 1 the row
// updates of each elimination step are partitioned across a worker pool;
// the result is bit-identical for any worker count because each row's
// arithmetic is independent of the partitioning.
SolveResult gauss_eliminate(const LinearSystem& system, int workers = 1);

// Jacobi iteration from x0 = 0; stops when ‖A·x − y‖₂ <= tol or after
// max_iter sweeps. Each sweep reads only the previous iterate, so the
// solution is bit-identical for any worker count.
SolveResult jacobi(const LinearSystem& system, double tol, int max_iter, int workers = 1);

// Gauss-Seidel iteration: ascending row order, in-sweep reuse of updated
// entries, strictly sequential. Stop rule identical to jacobi.
SolveResult gauss_seidel(const LinearSystem& system, double tol, int max_iter);

struct BenchConfig {
  Method method = Method::gauss;
  std::size_t n = 2;
  int workers = 1;
  int trials = 1;
  std::uint64_t seed = 0;
};

struct TimingEntry {
  Method method = Method::gauss;
  std::size_t n = 0;
  int workers = 1;
  double mean_s = 0.0;
  double stddev_s = 0.0;
  double mean_residual = 0.0;
};

class TimingReport {
 public:
  // Entries are keyed by (method, n, workers); duplicates are rejected.
  void add(const TimingEntry& entry);
  void merge(const TimingReport& other);
  const std::vector<TimingEntry>& entries() const { return entries_; }

  std::string to_table() const;
  std::string to_jsonl() const;

 private:
  std::vector<TimingEntry> entries_;
};

// Seeded strictly dominant test family: a_ii = n, off-diagonal uniform in
// [0,1), right-hand side uniform in [-1,1).
LinearSystem make_bench_system(std::size_t n, std::uint64_t seed);

// Monte-Carlo timing: `trials` independent seeded systems, wall time of the
// solve only. Gauss-Seidel ignores workers > 1 and is recorded as serial.
TimingReport bench_solve(const BenchConfig& config);

}  // namespace garagemon::solvers
