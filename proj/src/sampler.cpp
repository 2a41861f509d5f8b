#include "flowbound/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

namespace flowbound {

void ExactMixtureScore::eval(double u, const double* states, long n,
                             double* out) const {
  const GaussianMixture marg = gmm_.forward_marginal(schedule_, u);
  const int d = gmm_.dim();
  parallel_for(n, [&](long b, long e) {
    for (long i = b; i < e; ++i)
      marg.score(std::span<const double>(states + i * d, d),
                 std::span<double>(out + i * d, d));
  });
}

void PerturbedMixtureScore::eval(double u, const double* states, long n,
                                 double* out) const {
  const int d = gmm_.dim();
  parallel_for(n, [&](long b, long e) {
    for (long i = b; i < e; ++i)
      perturbed_score(gmm_, schedule_, u,
                      std::span<const double>(states + i * d, d), eps_, seed_,
                      std::span<double>(out + i * d, d));
  });
}

double grid_forward_time(const SamplerConfig& config, long k) {
  if (k < 0 || k > config.K)
    throw std::invalid_argument("grid_forward_time: k out of range");
  return config.T * static_cast<double>(config.K - k) / static_cast<double>(config.K);
}

static void validate_config(const SamplerConfig& config) {
  if (!(config.T > 0.0)) throw std::invalid_argument("sampler: T must be > 0");
  if (config.K < 1) throw std::invalid_argument("sampler: K must be >= 1");
  if (config.init == InitMode::Stationary && !config.schedule.is_vp())
    throw std::invalid_argument(
        "sampler: stationary init requires a VP schedule (VE marginals do not converge)");
}

Matrix init_samples(const SamplerConfig& config, int dim, long n) {
  validate_config(config);
  const double sd =
      config.init == InitMode::HatPT ? std::sqrt(config.schedule.c1(config.T)) : 1.0;
  Matrix z(n, dim);
  constexpr long kChunk = 4096;
  const long n_chunks = (n + kChunk - 1) / kChunk;
  parallel_for(n_chunks, [&](long cb, long ce) {
    for (long c = cb; c < ce; ++c) {
      Rng rng(derive_seed(config.seed, static_cast<uint64_t>(c)));
      const long b = c * kChunk, e = std::min(n, b + kChunk);
      for (long i = b; i < e; ++i) {
        double* row = z.row(i);
        for (int j = 0; j < dim; ++j) row[j] = sd * rng.normal();
      }
    }
  }, 1);
  return z;
}

double step_weight(const SamplerConfig& config, long k) {
  if (k < 1 || k > config.K) throw std::invalid_argument("step_weight: k out of range");
  return config.schedule.step_weight(grid_forward_time(config, k),
                                     grid_forward_time(config, k - 1));
}

namespace {

// Shared core: one update with precomputed decay and half-weight.
void apply_step(Matrix& z, const double* scores, double decay, double half_w,
                long step_index) {
  const long n = z.rows;
  const int d = static_cast<int>(z.cols);
  std::atomic<long> bad_row{-1};
  parallel_for(n, [&](long b, long e) {
    for (long i = b; i < e; ++i) {
      double* row = z.row(i);
      const double* s = scores + i * d;
      bool ok = true;
      for (int j = 0; j < d; ++j) {
        row[j] = decay * row[j] + half_w * s[j];
        ok = ok && std::isfinite(row[j]);
      }
      if (!ok) {
        long expected = -1;
        bad_row.compare_exchange_strong(expected, i);
      }
    }
  });
  if (bad_row.load() >= 0) throw NonFiniteSampleError(step_index, bad_row.load());
}

}  // namespace

void step(const SamplerConfig& config, const ScoreOracle& oracle, Matrix& z, long k) {
  validate_config(config);
  if (k < 1 || k > config.K) throw std::invalid_argument("step: k out of range");
  const double u_right = grid_forward_time(config, k);
  const double u_left = grid_forward_time(config, k - 1);
  const double decay = std::exp(config.schedule.int_f(u_right, u_left));
  const double half_w = 0.5 * config.schedule.step_weight(u_right, u_left);
  Matrix scores(z.rows, z.cols);
  oracle.eval(u_left, z.data.data(), z.rows, scores.data.data());
  apply_step(z, scores.data.data(), decay, half_w, k);
}

Matrix run_from(const SamplerConfig& config, const ScoreOracle& oracle,
                const Matrix& z0) {
  validate_config(config);
  if (static_cast<int>(z0.cols) != oracle.dim())
    throw std::invalid_argument("run: z0 dimension mismatch with oracle");
  Matrix z = z0;
  Matrix scores(z.rows, z.cols);
  for (long k = 1; k <= config.K; ++k) {
    const double u_right = grid_forward_time(config, k);
    const double u_left = grid_forward_time(config, k - 1);
    const double decay = std::exp(config.schedule.int_f(u_right, u_left));
    const double half_w = 0.5 * config.schedule.step_weight(u_right, u_left);
    oracle.eval(u_left, z.data.data(), z.rows, scores.data.data());
    apply_step(z, scores.data.data(), decay, half_w, k);
  }
  return z;
}

Matrix run(const SamplerConfig& config, const ScoreOracle& oracle, long n) {
  return run_from(config, oracle, init_samples(config, oracle.dim(), n));
}

Matrix reference_flow(const SamplerConfig& config, const ScoreOracle& oracle,
                      const Matrix& z0, int substeps_per_step) {
  validate_config(config);
  if (substeps_per_step < 1)
    throw std::invalid_argument("reference_flow: substeps_per_step must be >= 1");
  const long M = config.K * substeps_per_step;
  const double hr = config.T / static_cast<double>(M);
  const long n = z0.rows;
  const int d = static_cast<int>(z0.cols);
  const long nd = n * d;

  Matrix y = z0;
  Matrix k1(n, d), k2(n, d), k3(n, d), k4(n, d), tmp(n, d);

  auto velocity = [&](double u, const Matrix& state, Matrix& out) {
    // dY/dt = f(u) Y + (1/2) g^2(u) score(Y, u) with u the forward time
    oracle.eval(u, state.data.data(), n, out.data.data());
    const double fu = config.schedule.f(u);
    const double half_g2 = 0.5 * config.schedule.g2(u);
    parallel_for(nd, [&](long b, long e) {
      for (long i = b; i < e; ++i)
        out.data[i] = fu * state.data[i] + half_g2 * out.data[i];
    });
  };

  for (long m = 0; m < M; ++m) {
    const double u0 = config.T * static_cast<double>(M - m) / static_cast<double>(M);
    const double u_mid = config.T * (static_cast<double>(M - m) - 0.5) /
                         static_cast<double>(M);
    const double u1 = config.T * static_cast<double>(M - m - 1) / static_cast<double>(M);

    velocity(u0, y, k1);
    for (long i = 0; i < nd; ++i) tmp.data[i] = y.data[i] + 0.5 * hr * k1.data[i];
    velocity(u_mid, tmp, k2);
    for (long i = 0; i < nd; ++i) tmp.data[i] = y.data[i] + 0.5 * hr * k2.data[i];
    velocity(u_mid, tmp, k3);
    for (long i = 0; i < nd; ++i) tmp.data[i] = y.data[i] + hr * k3.data[i];
    velocity(u1, tmp, k4);
    for (long i = 0; i < nd; ++i)
      y.data[i] += hr / 6.0 *
                   (k1.data[i] + 2.0 * k2.data[i] + 2.0 * k3.data[i] + k4.data[i]);
  }
  for (long i = 0; i < nd; ++i)
    if (!std::isfinite(y.data[i]))
      throw NonFiniteSampleError(M, i / d);
  return y;
}

}  // namespace flowbound
