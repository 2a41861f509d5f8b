#pragma once

#include <cstdint>
#include <cmath>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace flowbound {

// Row-major dense matrix, the shape used for sample batches (n rows, d columns).
struct Matrix {
  long rows = 0;
  long cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(long r, long c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, 0.0) {}

  double* row(long i) { return data.data() + static_cast<size_t>(i) * cols; }
  const double* row(long i) const { return data.data() + static_cast<size_t>(i) * cols; }
  double& at(long i, long j) { return data[static_cast<size_t>(i) * cols + j]; }
  double at(long i, long j) const { return data[static_cast<size_t>(i) * cols + j]; }
};

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Derive an independent stream seed; used to split RNG work across chunks so
// results do not depend on how the index range is partitioned.
inline uint64_t derive_seed(uint64_t seed, uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ (0x517cc1b727220a95ull * (stream + 1)));
}

// Deterministic normal generator: mt19937_64 + Box-Muller on explicit uniforms.
// std::normal_distribution is implementation-defined, this is not.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(splitmix64(seed)) {}

  double uniform() {  // (0, 1)
    return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  uint64_t next_u64() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

// Run fn(begin, end) over [0, n) split across threads. Each range writes only
// its own slots, so the result is identical to the single-thread execution.
template <class Fn>
void parallel_for(long n, Fn&& fn, long min_grain = 1024) {
  const unsigned hw = std::thread::hardware_concurrency();
  const long max_threads = hw == 0 ? 1 : static_cast<long>(hw);
  long n_threads = std::min<long>(max_threads, (n + min_grain - 1) / min_grain);
  if (n_threads <= 1) {
    fn(0L, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(n_threads));
  const long chunk = (n + n_threads - 1) / n_threads;
  for (long t = 0; t < n_threads; ++t) {
    const long b = t * chunk;
    const long e = std::min(n, b + chunk);
    if (b >= e) break;
    pool.emplace_back([&fn, b, e] { fn(b, e); });
  }
  for (auto& th : pool) th.join();
}

inline double l2_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Largest absolute eigenvalue of a symmetric d x d matrix (row-major), via
// cyclic Jacobi. Dimensions here are small (d <= ~16).
double sym_spectral_norm(const double* a, int d);

}  // namespace flowbound
