#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>

#include "flowbound/common.hpp"
#include "flowbound/schedule.hpp"
#include "flowbound/target.hpp"

namespace flowbound {

// Score model evaluated at a forward time on a batch of states.
class ScoreOracle {
 public:
  virtual ~ScoreOracle() = default;
  virtual int dim() const = 0;
  // states/out are row-major n x dim; u is forward time.
  virtual void eval(double u, const double* states, long n, double* out) const = 0;
};

// Closed-form mixture score at the forward marginal.
class ExactMixtureScore final : public ScoreOracle {
 public:
  ExactMixtureScore(GaussianMixture gmm, Schedule schedule)
      : gmm_(std::move(gmm)), schedule_(std::move(schedule)) {}
  int dim() const override { return gmm_.dim(); }
  void eval(double u, const double* states, long n, double* out) const override;

 private:
  GaussianMixture gmm_;
  Schedule schedule_;
};

// Exact score plus a deterministic unit-norm error of magnitude eps.
class PerturbedMixtureScore final : public ScoreOracle {
 public:
  PerturbedMixtureScore(GaussianMixture gmm, Schedule schedule, double eps,
                        uint64_t seed)
      : gmm_(std::move(gmm)), schedule_(std::move(schedule)), eps_(eps), seed_(seed) {
    if (!(eps >= 0.0)) throw std::invalid_argument("perturbed score: eps must be >= 0");
  }
  int dim() const override { return gmm_.dim(); }
  void eval(double u, const double* states, long n, double* out) const override;

 private:
  GaussianMixture gmm_;
  Schedule schedule_;
  double eps_;
  uint64_t seed_;
};

class ZeroScore final : public ScoreOracle {
 public:
  explicit ZeroScore(int d) : d_(d) {}
  int dim() const override { return d_; }
  void eval(double, const double*, long n, double* out) const override {
    std::fill(out, out + n * static_cast<long>(d_), 0.0);
  }

 private:
  int d_;
};

enum class InitMode {
  HatPT,       // N(0, c1(T) I): the tractable surrogate for the forward marginal
  Stationary,  // N(0, I): only meaningful for VP schedules
};

struct SamplerConfig {
  Schedule schedule;
  double T;
  long K;
  InitMode init = InitMode::HatPT;
  uint64_t seed = 0;
};

struct NonFiniteSampleError : std::runtime_error {
  NonFiniteSampleError(long step_, long row_)
      : std::runtime_error("sampler: non-finite state at step " +
                           std::to_string(step_) + ", row " + std::to_string(row_)),
        step(step_),
        row(row_) {}
  long step;
  long row;
};

// Reverse-time grid in forward time: u_k = T (K - k) / K, so u_0 = T, u_K = 0.
double grid_forward_time(const SamplerConfig& config, long k);

Matrix init_samples(const SamplerConfig& config, int dim, long n);

// W_k = int_{u_k}^{u_{k-1}} e^{int_f(u_k, u)} g^2(u) du; the update applies
// half of it against the score frozen at u_{k-1}.
double step_weight(const SamplerConfig& config, long k);

// One exponential-integrator update in place:
// z <- e^{int_f(u_k, u_{k-1})} z + (W_k / 2) score(z, u_{k-1}).
void step(const SamplerConfig& config, const ScoreOracle& oracle, Matrix& z, long k);

// Full reverse pass: init (unless z0 given) then K steps with a non-finite
// guard after each.
Matrix run(const SamplerConfig& config, const ScoreOracle& oracle, long n);
Matrix run_from(const SamplerConfig& config, const ScoreOracle& oracle,
                const Matrix& z0);

// High-accuracy RK4 integration of the probability flow
// dY/dt = f(T-t) Y + (1/2) g^2(T-t) score(Y, T-t)
// from the same initial points, substeps_per_step per sampler step.
Matrix reference_flow(const SamplerConfig& config, const ScoreOracle& oracle,
                      const Matrix& z0, int substeps_per_step = 100);

}  // namespace flowbound
