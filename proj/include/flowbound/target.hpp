#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "flowbound/common.hpp"
#include "flowbound/schedule.hpp"

namespace flowbound {

// Mixture of Gaussians with diagonal covariances; the ground-truth target
// whose score is available in closed form at every forward time.
class GaussianMixture {
 public:
  // weights must be positive and sum to 1 (tolerance 1e-9, then renormalized);
  // every component must have the same dimension and positive variances.
  GaussianMixture(std::vector<double> weights,
                  std::vector<std::vector<double>> means,
                  std::vector<std::vector<double>> variances);

  static GaussianMixture standard_normal(int dim);

  int dim() const { return d_; }
  int num_components() const { return static_cast<int>(weights_.size()); }
  const std::vector<double>& weights() const { return weights_; }
  // Component k, coordinate j (row-major k x d).
  double mean(int k, int j) const { return means_[static_cast<size_t>(k) * d_ + j]; }
  double variance(int k, int j) const { return vars_[static_cast<size_t>(k) * d_ + j]; }

  double log_density(std::span<const double> x) const;
  void score(std::span<const double> x, std::span<double> out) const;
  std::vector<double> score(std::span<const double> x) const;
  // Row-major d x d Hessian of log density.
  void hessian_log_density(std::span<const double> x, std::span<double> out) const;

  // Marginal of the forward dynamics at time t: means mu/c0, variances
  // sigma^2/c0^2 + c1, weights unchanged.
  GaussianMixture forward_marginal(const Schedule& schedule, double t) const;
  void score_t(const Schedule& schedule, double t, std::span<const double> x,
               std::span<double> out) const;

  Matrix sample(long n, uint64_t seed) const;

  // sqrt(E ||X||^2) under the mixture.
  double x0_l2_norm() const;
  double score_norm_at_origin() const;
  std::vector<double> mixture_mean() const;

  // Axis-aligned box covering all component means +/- padding_std stddevs.
  void bounding_box(double padding_std, std::vector<double>& lo,
                    std::vector<double>& hi) const;

 private:
  int d_;
  std::vector<double> weights_;
  std::vector<double> means_;  // k x d row-major
  std::vector<double> vars_;   // k x d row-major
};

// Known constants of a target, inputs to the error bound. alpha0/m0 describe
// weak log-concavity, l0 bounds the score's spatial Lipschitz constant, l1 the
// score's drift in time across one step, score_err the L2 score accuracy.
struct TargetConstants {
  double alpha0 = 0.0;
  double m0 = 0.0;
  double l0 = 0.0;
  double l1 = 0.0;
  double score_err = 0.0;
  double x0_norm = 0.0;
  double score_at_origin = 0.0;
  // "user" | "estimated" | "verified" per constant, for reporting.
  std::vector<std::pair<std::string, std::string>> provenance;
};

struct GridSpec {
  int points_per_axis = 0;  // 0: 401 in 1D, 61 in 2D, auto-shrunk above
  double padding_std = 6.0;
};

// Max spectral norm of the log-density Hessian over the grid.
double estimate_l0(const GaussianMixture& gmm, const GridSpec& grid = {});

// Max over the grid and over step intervals of
// ||score_t(x, T-t) - score_t(x, T-t_{k-1})|| / (h (1+||x||)).
double estimate_l1(const GaussianMixture& gmm, const Schedule& schedule,
                   double T, double h, const GridSpec& grid = {});

struct PairSamplerSpec {
  int n_centers = 64;
  int n_separations = 48;
  double r_min = 1e-4;
  double r_max = 0.0;  // 0: four box diameters
  uint64_t seed = 0;
};

struct WeakConcavityCheck {
  bool ok = true;
  std::vector<double> x, y;  // first violating pair when !ok
  double lhs = 0.0, rhs = 0.0;
};

using ScoreFn = std::function<void(std::span<const double> x, std::span<double> out)>;

// Falsification search for <s(x)-s(y), x-y> <= -alpha0 r^2 + r f_{m0}(r) with
// f_M(r) = 2 sqrt(M) tanh(sqrt(M) r / 2). Returns the first violating pair.
WeakConcavityCheck verify_weak_concavity(const ScoreFn& score, int dim,
                                         double alpha0, double m0,
                                         std::span<const double> box_lo,
                                         std::span<const double> box_hi,
                                         const PairSamplerSpec& spec = {});
WeakConcavityCheck verify_weak_concavity(const GaussianMixture& gmm, double alpha0,
                                         double m0, const PairSamplerSpec& spec = {});

// Exact score plus a deterministic unit-norm perturbation of magnitude eps;
// the direction depends only on (x, t, seed).
void perturbed_score(const GaussianMixture& gmm, const Schedule& schedule,
                     double t, std::span<const double> x, double eps,
                     uint64_t seed, std::span<double> out);

// True when the mixture factorizes across coordinates: components may differ
// in at most one coordinate, so the density is a product of 1D marginals and
// per-coordinate W2 combination is exact.
bool is_product_form(const GaussianMixture& gmm, double tol = 1e-12);

}  // namespace flowbound
