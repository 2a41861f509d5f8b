#include "flowbound/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace flowbound {

std::string w2_method_name(W2Method m) {
  switch (m) {
    case W2Method::Exact1D: return "exact_1d";
    case W2Method::GaussianClosedForm: return "gaussian_closed_form";
    case W2Method::Sliced: return "sliced";
    case W2Method::LpOracle: return "lp_oracle";
    case W2Method::Product1D: return "product_1d";
  }
  return "?";
}

W2Estimate w2_1d_exact(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw std::invalid_argument("w2_1d_exact: samples must have equal size");
  if (a.empty()) throw std::invalid_argument("w2_1d_exact: empty samples");
  std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  double acc = 0.0;
  for (size_t i = 0; i < sa.size(); ++i) {
    const double d = sa[i] - sb[i];
    acc += d * d;
  }
  W2Estimate out;
  out.value = std::sqrt(acc / static_cast<double>(sa.size()));
  out.method = W2Method::Exact1D;
  out.n = static_cast<long>(sa.size());
  return out;
}

W2Estimate w2_gaussian(std::span<const double> mu1, std::span<const double> var1,
                       std::span<const double> mu2, std::span<const double> var2) {
  const size_t d = mu1.size();
  if (var1.size() != d || mu2.size() != d || var2.size() != d)
    throw std::invalid_argument("w2_gaussian: dimension mismatch");
  double acc = 0.0;
  for (size_t j = 0; j < d; ++j) {
    if (!(var1[j] >= 0.0) || !(var2[j] >= 0.0))
      throw std::invalid_argument("w2_gaussian: variances must be >= 0");
    const double dm = mu1[j] - mu2[j];
    const double ds = std::sqrt(var1[j]) - std::sqrt(var2[j]);
    acc += dm * dm + ds * ds;
  }
  W2Estimate out;
  out.value = std::sqrt(acc);
  out.method = W2Method::GaussianClosedForm;
  return out;
}

W2Estimate sliced_w2(const Matrix& a, const Matrix& b, int n_projections,
                     uint64_t seed) {
  if (a.cols != b.cols) throw std::invalid_argument("sliced_w2: dimension mismatch");
  if (a.rows != b.rows)
    throw std::invalid_argument("sliced_w2: samples must have equal size");
  if (n_projections < 1)
    throw std::invalid_argument("sliced_w2: n_projections must be >= 1");
  const int d = static_cast<int>(a.cols);
  const long n = a.rows;

  std::vector<double> sq(static_cast<size_t>(n_projections), 0.0);
  parallel_for(
      n_projections,
      [&](long pb, long pe) {
        std::vector<double> dir(static_cast<size_t>(d));
        std::vector<double> pa(static_cast<size_t>(n)), pb_(static_cast<size_t>(n));
        for (long p = pb; p < pe; ++p) {
          Rng rng(derive_seed(seed, static_cast<uint64_t>(p)));
          double norm = 0.0;
          do {
            for (int j = 0; j < d; ++j) dir[j] = rng.normal();
            norm = l2_norm(dir);
          } while (norm < 1e-12);
          for (int j = 0; j < d; ++j) dir[j] /= norm;
          for (long i = 0; i < n; ++i) {
            const double* ra = a.row(i);
            const double* rb = b.row(i);
            double xa = 0.0, xb = 0.0;
            for (int j = 0; j < d; ++j) {
              xa += ra[j] * dir[j];
              xb += rb[j] * dir[j];
            }
            pa[i] = xa;
            pb_[i] = xb;
          }
          std::sort(pa.begin(), pa.end());
          std::sort(pb_.begin(), pb_.end());
          double acc = 0.0;
          for (long i = 0; i < n; ++i) {
            const double di = pa[i] - pb_[i];
            acc += di * di;
          }
          sq[p] = acc / static_cast<double>(n);
        }
      },
      1);

  const double mean_sq =
      std::accumulate(sq.begin(), sq.end(), 0.0) / n_projections;
  double var_sq = 0.0;
  for (double s : sq) var_sq += (s - mean_sq) * (s - mean_sq);
  var_sq = n_projections > 1 ? var_sq / (n_projections - 1) : 0.0;
  const double se_mean_sq = std::sqrt(var_sq / n_projections);

  W2Estimate out;
  out.value = std::sqrt(mean_sq);
  out.method = W2Method::Sliced;
  out.n_projections = n_projections;
  out.n = n;
  // delta method: se(sqrt(m)) = se(m) / (2 sqrt(m))
  out.stderr_ = out.value > 0.0 ? se_mean_sq / (2.0 * out.value) : se_mean_sq;
  return out;
}

W2Estimate lp_oracle(const Matrix& a, const Matrix& b) {
  if (a.cols != b.cols) throw std::invalid_argument("lp_oracle: dimension mismatch");
  if (a.rows != b.rows)
    throw std::invalid_argument("lp_oracle: samples must have equal size");
  const long n = a.rows;
  if (n < 1 || n > 8)
    throw std::invalid_argument("lp_oracle: brute force supports 1 <= n <= 8");
  const int d = static_cast<int>(a.cols);
  std::vector<double> cost(static_cast<size_t>(n) * n);
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int c = 0; c < d; ++c) {
        const double diff = a.at(i, c) - b.at(j, c);
        acc += diff * diff;
      }
      cost[static_cast<size_t>(i) * n + j] = acc;
    }
  std::vector<int> perm(static_cast<size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double acc = 0.0;
    for (long i = 0; i < n; ++i) acc += cost[static_cast<size_t>(i) * n + perm[i]];
    best = std::min(best, acc);
  } while (std::next_permutation(perm.begin(), perm.end()));
  W2Estimate out;
  out.value = std::sqrt(best / static_cast<double>(n));
  out.method = W2Method::LpOracle;
  out.n = n;
  return out;
}

W2Estimate w2_product_1d(const Matrix& a, const Matrix& b) {
  if (a.cols != b.cols)
    throw std::invalid_argument("w2_product_1d: dimension mismatch");
  if (a.rows != b.rows)
    throw std::invalid_argument("w2_product_1d: samples must have equal size");
  const int d = static_cast<int>(a.cols);
  const long n = a.rows;
  std::vector<double> col_a(static_cast<size_t>(n)), col_b(static_cast<size_t>(n));
  double acc = 0.0;
  for (int j = 0; j < d; ++j) {
    for (long i = 0; i < n; ++i) {
      col_a[i] = a.at(i, j);
      col_b[i] = b.at(i, j);
    }
    const double w = w2_1d_exact(col_a, col_b).value;
    acc += w * w;
  }
  W2Estimate out;
  out.value = std::sqrt(acc);
  out.method = W2Method::Product1D;
  out.n = n;
  return out;
}

}  // namespace flowbound
