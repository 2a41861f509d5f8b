#include "flowbound/target.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>

namespace flowbound {

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112;
}

double sym_spectral_norm(const double* a, int d) {
  if (d == 1) return std::fabs(a[0]);
  // Cyclic Jacobi on a copy; converges fast for the small d used here.
  std::vector<double> m(a, a + static_cast<size_t>(d) * d);
  auto at = [&](int i, int j) -> double& { return m[static_cast<size_t>(i) * d + j]; };
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) off += at(i, j) * at(i, j);
    if (off < 1e-26) break;
    for (int p = 0; p < d; ++p) {
      for (int q = p + 1; q < d; ++q) {
        if (std::fabs(at(p, q)) < 1e-300) continue;
        const double theta = 0.5 * (at(q, q) - at(p, p)) / at(p, q);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < d; ++k) {
          const double mkp = at(k, p), mkq = at(k, q);
          at(k, p) = c * mkp - s * mkq;
          at(k, q) = s * mkp + c * mkq;
        }
        for (int k = 0; k < d; ++k) {
          const double mpk = at(p, k), mqk = at(q, k);
          at(p, k) = c * mpk - s * mqk;
          at(q, k) = s * mpk + c * mqk;
        }
      }
    }
  }
  double best = 0.0;
  for (int i = 0; i < d; ++i) best = std::max(best, std::fabs(at(i, i)));
  return best;
}

GaussianMixture::GaussianMixture(std::vector<double> weights,
                                 std::vector<std::vector<double>> means,
                                 std::vector<std::vector<double>> variances) {
  const size_t k = weights.size();
  if (k == 0) throw std::invalid_argument("mixture: needs at least one component");
  if (means.size() != k || variances.size() != k)
    throw std::invalid_argument("mixture: weights/means/variances size mismatch");
  d_ = static_cast<int>(means[0].size());
  if (d_ == 0) throw std::invalid_argument("mixture: dimension must be >= 1");
  double wsum = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw std::invalid_argument("mixture: weights must be positive");
    wsum += w;
  }
  if (std::fabs(wsum - 1.0) > 1e-9)
    throw std::invalid_argument("mixture: weights must sum to 1");
  weights_ = std::move(weights);
  for (double& w : weights_) w /= wsum;
  means_.reserve(k * d_);
  vars_.reserve(k * d_);
  for (size_t i = 0; i < k; ++i) {
    if (static_cast<int>(means[i].size()) != d_ ||
        static_cast<int>(variances[i].size()) != d_)
      throw std::invalid_argument("mixture: inconsistent component dimension");
    for (int j = 0; j < d_; ++j) {
      if (!(variances[i][j] > 0.0))
        throw std::invalid_argument("mixture: variances must be positive");
      means_.push_back(means[i][j]);
      vars_.push_back(variances[i][j]);
    }
  }
}

GaussianMixture GaussianMixture::standard_normal(int dim) {
  return GaussianMixture({1.0}, {std::vector<double>(dim, 0.0)},
                         {std::vector<double>(dim, 1.0)});
}

double GaussianMixture::log_density(std::span<const double> x) const {
  const int k = num_components();
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> lw(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i) {
    double e = std::log(weights_[i]);
    for (int j = 0; j < d_; ++j) {
      const double dm = x[j] - mean(i, j);
      e -= 0.5 * (dm * dm / variance(i, j) + std::log(variance(i, j)) + kLog2Pi);
    }
    lw[i] = e;
    best = std::max(best, e);
  }
  double acc = 0.0;
  for (int i = 0; i < k; ++i) acc += std::exp(lw[i] - best);
  return best + std::log(acc);
}

void GaussianMixture::score(std::span<const double> x, std::span<double> out) const {
  const int k = num_components();
  // responsibilities via log-sum-exp
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> lw(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i) {
    double e = std::log(weights_[i]);
    for (int j = 0; j < d_; ++j) {
      const double dm = x[j] - mean(i, j);
      e -= 0.5 * (dm * dm / variance(i, j) + std::log(variance(i, j)) + kLog2Pi);
    }
    lw[i] = e;
    best = std::max(best, e);
  }
  double z = 0.0;
  for (int i = 0; i < k; ++i) {
    lw[i] = std::exp(lw[i] - best);
    z += lw[i];
  }
  std::fill(out.begin(), out.end(), 0.0);
  for (int i = 0; i < k; ++i) {
    const double r = lw[i] / z;
    for (int j = 0; j < d_; ++j)
      out[j] -= r * (x[j] - mean(i, j)) / variance(i, j);
  }
}

std::vector<double> GaussianMixture::score(std::span<const double> x) const {
  std::vector<double> out(static_cast<size_t>(d_));
  score(x, out);
  return out;
}

void GaussianMixture::hessian_log_density(std::span<const double> x,
                                          std::span<double> out) const {
  const int k = num_components();
  std::vector<double> lw(static_cast<size_t>(k));
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < k; ++i) {
    double e = std::log(weights_[i]);
    for (int j = 0; j < d_; ++j) {
      const double dm = x[j] - mean(i, j);
      e -= 0.5 * (dm * dm / variance(i, j) + std::log(variance(i, j)) + kLog2Pi);
    }
    lw[i] = e;
    best = std::max(best, e);
  }
  double z = 0.0;
  for (int i = 0; i < k; ++i) {
    lw[i] = std::exp(lw[i] - best);
    z += lw[i];
  }
  // H = sum_i r_i (-diag(1/v_i) + s_i s_i^T) - s s^T  with s = sum_i r_i s_i
  std::vector<double> si(static_cast<size_t>(d_)), s(static_cast<size_t>(d_), 0.0);
  std::fill(out.begin(), out.end(), 0.0);
  for (int i = 0; i < k; ++i) {
    const double r = lw[i] / z;
    for (int j = 0; j < d_; ++j) {
      si[j] = -(x[j] - mean(i, j)) / variance(i, j);
      s[j] += r * si[j];
    }
    for (int a = 0; a < d_; ++a) {
      out[static_cast<size_t>(a) * d_ + a] -= r / variance(i, a);
      for (int b = 0; b < d_; ++b)
        out[static_cast<size_t>(a) * d_ + b] += r * si[a] * si[b];
    }
  }
  for (int a = 0; a < d_; ++a)
    for (int b = 0; b < d_; ++b)
      out[static_cast<size_t>(a) * d_ + b] -= s[a] * s[b];
}

GaussianMixture GaussianMixture::forward_marginal(const Schedule& schedule,
                                                  double t) const {
  const double c0 = schedule.c0(t);
  const double c1 = schedule.c1(t);
  const int k = num_components();
  std::vector<std::vector<double>> ms(static_cast<size_t>(k)),
      vs(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i) {
    ms[i].resize(static_cast<size_t>(d_));
    vs[i].resize(static_cast<size_t>(d_));
    for (int j = 0; j < d_; ++j) {
      ms[i][j] = mean(i, j) / c0;
      vs[i][j] = variance(i, j) / (c0 * c0) + c1;
    }
  }
  return GaussianMixture(weights_, std::move(ms), std::move(vs));
}

void GaussianMixture::score_t(const Schedule& schedule, double t,
                              std::span<const double> x,
                              std::span<double> out) const {
  forward_marginal(schedule, t).score(x, out);
}

Matrix GaussianMixture::sample(long n, uint64_t seed) const {
  Matrix out(n, d_);
  const int k = num_components();
  std::vector<double> cumw(static_cast<size_t>(k));
  double acc = 0.0;
  for (int i = 0; i < k; ++i) {
    acc += weights_[i];
    cumw[i] = acc;
  }
  cumw[k - 1] = 1.0;
  constexpr long kChunk = 4096;  // chunked seeding: partition-independent draws
  const long n_chunks = (n + kChunk - 1) / kChunk;
  parallel_for(n_chunks, [&](long cb, long ce) {
    for (long c = cb; c < ce; ++c) {
      Rng rng(derive_seed(seed, static_cast<uint64_t>(c)));
      const long b = c * kChunk, e = std::min(n, b + kChunk);
      for (long i = b; i < e; ++i) {
        const double u = rng.uniform();
        int comp = static_cast<int>(std::lower_bound(cumw.begin(), cumw.end(), u) -
                                    cumw.begin());
        if (comp >= k) comp = k - 1;
        double* row = out.row(i);
        for (int j = 0; j < d_; ++j)
          row[j] = mean(comp, j) + std::sqrt(variance(comp, j)) * rng.normal();
      }
    }
  }, 1);
  return out;
}

double GaussianMixture::x0_l2_norm() const {
  double m2 = 0.0;
  for (int i = 0; i < num_components(); ++i)
    for (int j = 0; j < d_; ++j)
      m2 += weights_[i] * (mean(i, j) * mean(i, j) + variance(i, j));
  return std::sqrt(m2);
}

double GaussianMixture::score_norm_at_origin() const {
  std::vector<double> x(static_cast<size_t>(d_), 0.0);
  return l2_norm(score(x));
}

std::vector<double> GaussianMixture::mixture_mean() const {
  std::vector<double> m(static_cast<size_t>(d_), 0.0);
  for (int i = 0; i < num_components(); ++i)
    for (int j = 0; j < d_; ++j) m[j] += weights_[i] * mean(i, j);
  return m;
}

void GaussianMixture::bounding_box(double padding_std, std::vector<double>& lo,
                                   std::vector<double>& hi) const {
  lo.assign(static_cast<size_t>(d_), std::numeric_limits<double>::infinity());
  hi.assign(static_cast<size_t>(d_), -std::numeric_limits<double>::infinity());
  for (int i = 0; i < num_components(); ++i) {
    for (int j = 0; j < d_; ++j) {
      const double sd = std::sqrt(variance(i, j));
      lo[j] = std::min(lo[j], mean(i, j) - padding_std * sd);
      hi[j] = std::max(hi[j], mean(i, j) + padding_std * sd);
    }
  }
}

namespace {

int grid_points_per_axis(const GridSpec& grid, int d) {
  if (grid.points_per_axis > 0) return grid.points_per_axis;
  if (d == 1) return 401;
  if (d == 2) return 61;
  // keep the total grid size near the 2D default for higher dimensions
  int p = static_cast<int>(std::floor(std::pow(4000.0, 1.0 / d)));
  return std::max(5, p);
}

// Visit every point of the axis-aligned grid.
template <class Fn>
void for_each_grid_point(const std::vector<double>& lo,
                         const std::vector<double>& hi, int per_axis, Fn&& fn) {
  const int d = static_cast<int>(lo.size());
  std::vector<int> idx(static_cast<size_t>(d), 0);
  std::vector<double> x(static_cast<size_t>(d));
  while (true) {
    for (int j = 0; j < d; ++j)
      x[j] = per_axis == 1 ? lo[j]
                           : lo[j] + (hi[j] - lo[j]) * idx[j] / (per_axis - 1);
    fn(x);
    int j = 0;
    for (; j < d; ++j) {
      if (++idx[j] < per_axis) break;
      idx[j] = 0;
    }
    if (j == d) break;
  }
}

}  // namespace

double estimate_l0(const GaussianMixture& gmm, const GridSpec& grid) {
  const int d = gmm.dim();
  std::vector<double> lo, hi;
  gmm.bounding_box(grid.padding_std, lo, hi);
  const int per_axis = grid_points_per_axis(grid, d);
  std::vector<double> hess(static_cast<size_t>(d) * d);
  double best = 0.0;
  for_each_grid_point(lo, hi, per_axis, [&](const std::vector<double>& x) {
    gmm.hessian_log_density(x, hess);
    best = std::max(best, sym_spectral_norm(hess.data(), d));
  });
  return best;
}

double estimate_l1(const GaussianMixture& gmm, const Schedule& schedule, double T,
                   double h, const GridSpec& grid) {
  if (!(T > 0.0) || !(h > 0.0) || h > T)
    throw std::invalid_argument("estimate_l1: requires 0 < h <= T");
  const int d = gmm.dim();
  std::vector<double> lo, hi;
  gmm.bounding_box(grid.padding_std, lo, hi);
  const int per_axis = grid_points_per_axis(grid, d);

  std::vector<std::vector<double>> pts;
  for_each_grid_point(lo, hi, per_axis,
                      [&](const std::vector<double>& x) { pts.push_back(x); });

  const long K = std::lround(T / h);
  std::vector<double> sl(static_cast<size_t>(d)), sr(static_cast<size_t>(d));
  double best = 0.0;
  for (long k = 1; k <= K; ++k) {
    const double u_left = T - (k - 1) * h;  // forward time at t_{k-1}
    const GaussianMixture ml = gmm.forward_marginal(schedule, u_left);
    for (double u : {u_left - 0.5 * h, u_left - h}) {  // mid and right endpoint
      if (u < 0.0) u = 0.0;
      const GaussianMixture mr = gmm.forward_marginal(schedule, u);
      for (const auto& x : pts) {
        ml.score(x, sl);
        mr.score(x, sr);
        double diff2 = 0.0, x2 = 0.0;
        for (int j = 0; j < d; ++j) {
          const double dj = sl[j] - sr[j];
          diff2 += dj * dj;
          x2 += x[j] * x[j];
        }
        const double ratio = std::sqrt(diff2) / (h * (1.0 + std::sqrt(x2)));
        best = std::max(best, ratio);
      }
    }
  }
  return best;
}

namespace {

double weak_profile_rhs(double alpha0, double m0, double r) {
  if (m0 == 0.0) return -alpha0 * r * r;
  const double sm = std::sqrt(m0);
  return -alpha0 * r * r + r * 2.0 * sm * std::tanh(0.5 * sm * r);
}

}  // namespace

WeakConcavityCheck verify_weak_concavity(const ScoreFn& score, int dim,
                                         double alpha0, double m0,
                                         std::span<const double> box_lo,
                                         std::span<const double> box_hi,
                                         const PairSamplerSpec& spec) {
  if (!(alpha0 > 0.0)) throw std::invalid_argument("verify: alpha0 must be > 0");
  if (m0 < 0.0) throw std::invalid_argument("verify: m0 must be >= 0");
  WeakConcavityCheck out;
  double diam2 = 0.0;
  for (int j = 0; j < dim; ++j) {
    const double w = box_hi[j] - box_lo[j];
    diam2 += w * w;
  }
  const double r_max = spec.r_max > 0.0 ? spec.r_max : 4.0 * std::sqrt(diam2);

  Rng rng(derive_seed(spec.seed, 0x77ea4ull));
  std::vector<double> x(static_cast<size_t>(dim)), y(static_cast<size_t>(dim));
  std::vector<double> sx(static_cast<size_t>(dim)), sy(static_cast<size_t>(dim));
  std::vector<double> u(static_cast<size_t>(dim));

  for (int c = 0; c < spec.n_centers; ++c) {
    std::vector<double> center(static_cast<size_t>(dim));
    for (int j = 0; j < dim; ++j)
      center[j] = box_lo[j] + (box_hi[j] - box_lo[j]) * rng.uniform();
    const int dirs = dim == 1 ? 1 : 2;
    for (int s = 0; s < spec.n_separations; ++s) {
      const double frac = spec.n_separations == 1
                              ? 0.0
                              : static_cast<double>(s) / (spec.n_separations - 1);
      const double r = spec.r_min * std::pow(r_max / spec.r_min, frac);
      for (int dir = 0; dir < dirs; ++dir) {
        if (dim == 1) {
          u[0] = 1.0;
        } else {
          double norm = 0.0;
          do {
            for (int j = 0; j < dim; ++j) u[j] = rng.normal();
            norm = l2_norm(u);
          } while (norm < 1e-12);
          for (int j = 0; j < dim; ++j) u[j] /= norm;
        }
        for (int j = 0; j < dim; ++j) {
          x[j] = center[j] + 0.5 * r * u[j];
          y[j] = center[j] - 0.5 * r * u[j];
        }
        score(x, sx);
        score(y, sy);
        double lhs = 0.0;
        for (int j = 0; j < dim; ++j) lhs += (sx[j] - sy[j]) * (x[j] - y[j]);
        const double rhs = weak_profile_rhs(alpha0, m0, r);
        if (lhs > rhs + 1e-10 * std::max(1.0, std::fabs(rhs))) {
          out.ok = false;
          out.x = x;
          out.y = y;
          out.lhs = lhs;
          out.rhs = rhs;
          return out;
        }
      }
    }
  }
  return out;
}

WeakConcavityCheck verify_weak_concavity(const GaussianMixture& gmm, double alpha0,
                                         double m0, const PairSamplerSpec& spec) {
  std::vector<double> lo, hi;
  gmm.bounding_box(6.0, lo, hi);
  ScoreFn fn = [&gmm](std::span<const double> x, std::span<double> out) {
    gmm.score(x, out);
  };
  return verify_weak_concavity(fn, gmm.dim(), alpha0, m0, lo, hi, spec);
}

void perturbed_score(const GaussianMixture& gmm, const Schedule& schedule,
                     double t, std::span<const double> x, double eps,
                     uint64_t seed, std::span<double> out) {
  const int d = gmm.dim();
  gmm.score_t(schedule, t, x, out);
  if (eps == 0.0) return;
  // direction determined by (x, t, seed) alone
  uint64_t h = splitmix64(seed ^ 0x9d5ab1e5f00dull);
  uint64_t bits;
  std::memcpy(&bits, &t, sizeof(bits));
  h = splitmix64(h ^ bits);
  for (int j = 0; j < d; ++j) {
    std::memcpy(&bits, &x[j], sizeof(bits));
    h = splitmix64(h ^ bits);
  }
  std::vector<double> u(static_cast<size_t>(d));
  for (uint64_t salt = 0;; ++salt) {
    Rng rng(h ^ salt);
    for (int j = 0; j < d; ++j) u[j] = rng.normal();
    const double norm = l2_norm(u);
    if (norm >= 1e-12) {
      for (int j = 0; j < d; ++j) out[j] += eps * u[j] / norm;
      return;
    }
  }
}

bool is_product_form(const GaussianMixture& gmm, double tol) {
  if (gmm.num_components() <= 1) return true;
  int differing = 0;
  for (int j = 0; j < gmm.dim(); ++j) {
    bool same = true;
    for (int k = 1; k < gmm.num_components(); ++k) {
      if (std::abs(gmm.mean(k, j) - gmm.mean(0, j)) > tol ||
          std::abs(gmm.variance(k, j) - gmm.variance(0, j)) > tol) {
        same = false;
        break;
      }
    }
    if (!same) ++differing;
  }
  return differing <= 1;
}

}  // namespace flowbound
