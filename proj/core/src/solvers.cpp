#include "garagemon/solvers.hpp"

#include <algorithm>
#include <array>
#include <barrier>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>
#include <utility>

#include <json.hpp>

#include "garagemon/errors.hpp"
#include "garagemon/rng.hpp"

namespace garagemon::solvers {

namespace {

constexpr double kBenchTol = 1e-10;
constexpr int kBenchMaxIter = 10000;

void require_square(const LinearSystem& system, const char* op) {
  if (!system.square())
    throw DimensionError(std::string(op) + ": system must be square, got " +
                         std::to_string(system.rows()) + "x" + std::to_string(system.cols()));
}

int clamp_workers(int workers, const char* op) {
  if (workers < 1) throw InputError(std::string(op) + ": workers must be >= 1");
  return workers;
}

// [begin, end) slice of [lo, hi) for worker t of w.
std::pair<std::size_t, std::size_t> slice(std::size_t lo, std::size_t hi, int w, int t) {
  const std::size_t len = hi - lo;
  const auto b = lo + len * static_cast<std::size_t>(t) / static_cast<std::size_t>(w);
  const auto e = lo + len * static_cast<std::size_t>(t + 1) / static_cast<std::size_t>(w);
  return {b, e};
}

// --- Gaussian elimination ---------------------------------------------

std::size_t select_pivot(const Matrix& aug, std::size_t k) {
  std::size_t p = k;
  double best = std::fabs(aug(k, k));
  for (std::size_t i = k + 1; i < aug.rows(); ++i) {
    const double v = std::fabs(aug(i, k));
    if (v > best) {
      best = v;
      p = i;
    }
  }
  return p;
}

void swap_rows(Matrix& aug, std::size_t i, std::size_t j) {
  if (i == j) return;
  auto ri = aug.row(i);
  auto rj = aug.row(j);
  std::swap_ranges(ri.begin(), ri.end(), rj.begin());
}

// Shared by the serial and threaded paths: identical per-row arithmetic.
void eliminate_rows(Matrix& aug, std::size_t k, std::size_t begin, std::size_t end) {
  const std::size_t m = aug.cols();
  const auto pivot_row = aug.row(k);
  for (std::size_t i = begin; i < end; ++i) {
    const double factor = aug(i, k) / pivot_row[k];
    if (factor == 0.0) continue;
    auto r = aug.row(i);
    for (std::size_t j = k; j < m; ++j) r[j] -= factor * pivot_row[j];
  }
}

std::vector<double> back_substitute(const Matrix& aug) {
  const std::size_t n = aug.rows();
  std::vector<double> x(n, 0.0);
  for (std::size_t ii = n; ii-- > 0;) {
    double sum = aug(ii, n);
    for (std::size_t j = ii + 1; j < n; ++j) sum -= aug(ii, j) * x[j];
    x[ii] = sum / aug(ii, ii);
  }
  return x;
}

// Prepares pivot column k: selects, checks, swaps. Returns false when the
// pivot is below the singularity threshold.
bool prepare_pivot(Matrix& aug, std::size_t k) {
  const std::size_t p = select_pivot(aug, k);
  if (std::fabs(aug(p, k)) < kPivotTolerance) return false;
  swap_rows(aug, k, p);
  return true;
}

void eliminate_serial(Matrix& aug) {
  const std::size_t n = aug.rows();
  for (std::size_t k = 0; k < n; ++k) {
    if (!prepare_pivot(aug, k))
      throw SingularMatrixError("gauss: pivot below " + std::to_string(kPivotTolerance) +
                                " at column " + std::to_string(k));
    if (k + 1 < n) eliminate_rows(aug, k, k + 1, n);
  }
}

// Below this many remaining rows a step is barrier-bound, not compute-bound;
// the tail runs serially. Row arithmetic is row-independent, so the cutover
// does not change a single bit of the result.
constexpr std::size_t kParallelTailRows = 64;

void eliminate_parallel(Matrix& aug, int workers) {
  const std::size_t n = aug.rows();

  struct Shared {
    std::size_t k = 0;
    bool done = false;
    bool singular = false;
    std::size_t singular_at = 0;
  } sh;

  if (!prepare_pivot(aug, 0)) {
    throw SingularMatrixError("gauss: pivot below " + std::to_string(kPivotTolerance) +
                              " at column 0");
  }

  auto on_step_done = [&sh, &aug, n]() noexcept {
    ++sh.k;
    if (sh.k >= n || n - sh.k <= kParallelTailRows) {
      sh.done = true;
      return;
    }
    if (!prepare_pivot(aug, sh.k)) {
      sh.singular = true;
      sh.singular_at = sh.k;
      sh.done = true;
      return;
    }
    if (sh.k == n - 1) sh.done = true;  // last pivot checked, nothing left to eliminate
  };

  if (n - sh.k > kParallelTailRows) {
    std::barrier sync(workers, on_step_done);
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) {
      pool.emplace_back([&, t] {
        while (!sh.done) {
          const auto [b, e] = slice(sh.k + 1, n, workers, t);
          eliminate_rows(aug, sh.k, b, e);
          sync.arrive_and_wait();
        }
      });
    }
    pool.clear();  // join
  }

  if (sh.singular)
    throw SingularMatrixError("gauss: pivot below " + std::to_string(kPivotTolerance) +
                              " at column " + std::to_string(sh.singular_at));

  // Serial tail from wherever the pool stopped.
  for (std::size_t k = sh.k; k < n; ++k) {
    if (!prepare_pivot(aug, k))
      throw SingularMatrixError("gauss: pivot below " + std::to_string(kPivotTolerance) +
                                " at column " + std::to_string(k));
    if (k + 1 < n) eliminate_rows(aug, k, k + 1, n);
  }
}

// --- Jacobi -------------------------------------------------------------

// Next iterate of row i from the previous iterate only.
double jacobi_row(const Matrix& a, const std::vector<double>& y,
                  const std::vector<double>& x_old, std::size_t i) {
  const auto row = a.row(i);
  double sum = 0.0;
  for (std::size_t j = 0; j < row.size(); ++j)
    if (j != i) sum += row[j] * x_old[j];
  return (y[i] - sum) / row[i];
}

void check_iterative_args(const LinearSystem& system, double tol, int max_iter, const char* op) {
  require_square(system, op);
  if (!(tol > 0.0)) throw InputError(std::string(op) + ": tol must be > 0");
  if (max_iter < 1) throw InputError(std::string(op) + ": max_iter must be >= 1");
  for (std::size_t i = 0; i < system.rows(); ++i)
    if (system.a(i, i) == 0.0)
      throw ZeroDiagonalError(std::string(op) + ": zero diagonal entry at row " +
                              std::to_string(i));
}

SolveResult jacobi_serial(const LinearSystem& system, double tol, int max_iter) {
  const std::size_t n = system.rows();
  std::vector<double> x(n, 0.0);
  std::vector<double> next(n, 0.0);

  double resid = residual_norm(system, x);
  if (resid <= tol) return {std::move(x), resid, 0, true};

  int it = 0;
  bool converged = false;
  while (it < max_iter) {
    for (std::size_t i = 0; i < n; ++i) next[i] = jacobi_row(system.a, system.y, x, i);
    x.swap(next);
    ++it;
    resid = residual_norm(system, x);
    if (!std::isfinite(resid)) {
      resid = std::numeric_limits<double>::infinity();
      break;
    }
    if (resid <= tol) {
      converged = true;
      break;
    }
  }
  return {std::move(x), resid, it, converged};
}

SolveResult jacobi_parallel(const LinearSystem& system, double tol, int max_iter, int workers) {
  const std::size_t n = system.rows();

  std::vector<double> buf_a(n, 0.0);
  std::vector<double> buf_b(n, 0.0);

  double resid0 = residual_norm(system, buf_a);
  if (resid0 <= tol) return {std::move(buf_a), resid0, 0, true};

  struct Shared {
    std::vector<double>* cur;
    std::vector<double>* nxt;
    std::array<double, detail::kResidualChunks> parts{};
    double resid = 0.0;
    int it = 0;
    int phase = 0;  // 0: sweep, 1: residual
    bool stop = false;
    bool converged = false;
  } sh;
  sh.cur = &buf_a;
  sh.nxt = &buf_b;

  auto on_phase_done = [&sh, &system, tol, max_iter]() noexcept {
    if (sh.phase == 0) {
      std::swap(sh.cur, sh.nxt);  // *cur now holds the fresh iterate
      sh.phase = 1;
      return;
    }
    // Fixed chunk order: the total is independent of the worker count.
    double total = 0.0;
    for (double p : sh.parts) total += p;
    sh.resid = std::sqrt(total);
    ++sh.it;
    if (!std::isfinite(sh.resid)) {
      sh.resid = std::numeric_limits<double>::infinity();
      sh.stop = true;
    } else if (sh.resid <= tol) {
      sh.converged = true;
      sh.stop = true;
    } else if (sh.it >= max_iter) {
      sh.stop = true;
    }
    sh.phase = 0;
  };

  std::barrier sync(workers, on_phase_done);

  std::vector<std::jthread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&, t] {
      while (!sh.stop) {
        if (sh.phase == 0) {
          const auto [b, e] = slice(0, n, workers, t);
          for (std::size_t i = b; i < e; ++i)
            (*sh.nxt)[i] = jacobi_row(system.a, system.y, *sh.cur, i);
        } else {
          for (std::size_t c = static_cast<std::size_t>(t); c < detail::kResidualChunks;
               c += static_cast<std::size_t>(workers))
            sh.parts[c] = detail::residual_chunk_sq(system, *sh.cur, c);
        }
        sync.arrive_and_wait();
      }
    });
  }
  pool.clear();  // join

  return {std::move(*sh.cur), sh.resid, sh.it, sh.converged};
}

SolveResult dispatch_solve(Method method, const LinearSystem& system, int workers) {
  switch (method) {
    case Method::gauss:
      return gauss_eliminate(system, workers);
    case Method::jacobi:
      return jacobi(system, kBenchTol, kBenchMaxIter, workers);
    case Method::gauss_seidel:
      return gauss_seidel(system, kBenchTol, kBenchMaxIter);
  }
  throw ConfigError("bench: unknown method");
}

}  // namespace

Method parse_method(std::string_view name) {
  if (name == "gauss") return Method::gauss;
  if (name == "jacobi") return Method::jacobi;
  if (name == "gauss-seidel") return Method::gauss_seidel;
  throw ConfigError("unknown method name: '" + std::string(name) +
                    "' (expected gauss, jacobi or gauss-seidel)");
}

std::string_view method_name(Method method) {
  switch (method) {
    case Method::gauss:
      return "gauss";
    case Method::jacobi:
      return "jacobi";
    case Method::gauss_seidel:
      return "gauss-seidel";
  }
  return "?";
}

bool is_diagonally_dominant(const LinearSystem& system) {
  require_square(system, "is_diagonally_dominant");
  bool one_strict = false;
  for (std::size_t i = 0; i < system.rows(); ++i) {
    const auto row = system.a.row(i);
    double off = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j)
      if (j != i) off += std::fabs(row[j]);
    const double diag = std::fabs(row[i]);
    if (diag < off) return false;
    if (diag > off) one_strict = true;
  }
  return one_strict;
}

SolveResult gauss_eliminate(const LinearSystem& system, int workers) {
  require_square(system, "gauss");
  workers = clamp_workers(workers, "gauss");
  const std::size_t n = system.rows();

  Matrix aug(n, n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const auto src = system.a.row(i);
    auto dst = aug.row(i);
    std::copy(src.begin(), src.end(), dst.begin());
    dst[n] = system.y[i];
  }

  if (workers > 1 && n >= 2)
    eliminate_parallel(aug, workers);
  else
    eliminate_serial(aug);

  SolveResult result;
  result.x = back_substitute(aug);
  result.residual_norm = residual_norm(system, result.x);
  result.iterations = 0;
  result.converged = true;
  return result;
}

SolveResult jacobi(const LinearSystem& system, double tol, int max_iter, int workers) {
  check_iterative_args(system, tol, max_iter, "jacobi");
  workers = clamp_workers(workers, "jacobi");
  if (workers > 1 && system.rows() >= 2)
    return jacobi_parallel(system, tol, max_iter, workers);
  return jacobi_serial(system, tol, max_iter);
}

SolveResult gauss_seidel(const LinearSystem& system, double tol, int max_iter) {
  check_iterative_args(system, tol, max_iter, "gauss-seidel");
  const std::size_t n = system.rows();
  std::vector<double> x(n, 0.0);

  double resid = residual_norm(system, x);
  if (resid <= tol) return {std::move(x), resid, 0, true};

  int it = 0;
  bool converged = false;
  while (it < max_iter) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = system.a.row(i);
      double sum = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) sum += row[j] * x[j];
      x[i] = (system.y[i] - sum) / row[i];
    }
    ++it;
    resid = residual_norm(system, x);
    if (!std::isfinite(resid)) {
      resid = std::numeric_limits<double>::infinity();
      break;
    }
    if (resid <= tol) {
      converged = true;
      break;
    }
  }
  return {std::move(x), resid, it, converged};
}

void TimingReport::add(const TimingEntry& entry) {
  for (const auto& e : entries_)
    if (e.method == entry.method && e.n == entry.n && e.workers == entry.workers)
      throw InputError("timing report: duplicate entry for (" +
                       std::string(method_name(entry.method)) + ", n=" + std::to_string(entry.n) +
                       ", workers=" + std::to_string(entry.workers) + ")");
  entries_.push_back(entry);
}

void TimingReport::merge(const TimingReport& other) {
  for (const auto& e : other.entries_) add(e);
}

std::string TimingReport::to_table() const {
  std::ostringstream out;
  out << "method        n     workers  mean_s        stddev_s      mean_residual\n";
  for (const auto& e : entries_) {
    char line[160];
    std::snprintf(line, sizeof line, "%-12s  %-5zu %-8d %-13.6g %-13.6g %-13.6g\n",
                  std::string(method_name(e.method)).c_str(), e.n, e.workers, e.mean_s,
                  e.stddev_s, e.mean_residual);
    out << line;
  }
  return out.str();
}

std::string TimingReport::to_jsonl() const {
  std::ostringstream out;
  for (const auto& e : entries_) {
    nlohmann::json j{{"method", std::string(method_name(e.method))},
                     {"n", e.n},
                     {"workers", e.workers},
                     {"mean_s", e.mean_s},
                     {"stddev_s", e.stddev_s},
                     {"mean_residual", e.mean_residual}};
    out << j.dump() << "\n";
  }
  return out.str();
}

LinearSystem make_bench_system(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      a(i, j) = (i == j) ? static_cast<double>(n) : rng.uniform();
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = rng.uniform(-1.0, 1.0);
  return {std::move(a), std::move(y)};
}

TimingReport bench_solve(const BenchConfig& config) {
  if (config.n < 2) throw ConfigError("bench: n must be >= 2");
  if (config.workers < 1) throw ConfigError("bench: workers must be >= 1");
  if (config.trials < 1) throw ConfigError("bench: trials must be >= 1");

  const int trials = config.trials;
  std::vector<double> times(static_cast<std::size_t>(trials));
  std::vector<double> residuals(static_cast<std::size_t>(trials));

  for (int t = 0; t < trials; ++t) {
    const LinearSystem system =
        make_bench_system(config.n, Rng::mix(config.seed, static_cast<std::uint64_t>(t)));
    const auto t0 = std::chrono::steady_clock::now();
    const SolveResult r = dispatch_solve(config.method, system, config.workers);
    const auto t1 = std::chrono::steady_clock::now();
    times[static_cast<std::size_t>(t)] = std::chrono::duration<double>(t1 - t0).count();
    residuals[static_cast<std::size_t>(t)] = r.residual_norm;
  }

  const double mean_t = std::accumulate(times.begin(), times.end(), 0.0) / trials;
  double var = 0.0;
  if (trials > 1) {
    for (double v : times) var += (v - mean_t) * (v - mean_t);
    var /= trials - 1;
  }
  const double mean_r = std::accumulate(residuals.begin(), residuals.end(), 0.0) / trials;

  TimingEntry entry;
  entry.method = config.method;
  entry.n = config.n;
  // A strict-order sweep cannot be split; record Gauss-Seidel as serial.
  entry.workers = (config.method == Method::gauss_seidel) ? 1 : config.workers;
  entry.mean_s = mean_t;
  entry.stddev_s = std::sqrt(var);
  entry.mean_residual = mean_r;

  TimingReport report;
  report.add(entry);
  return report;
}

}  // namespace garagemon::solvers
