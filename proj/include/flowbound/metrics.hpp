#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "flowbound/common.hpp"

namespace flowbound {

enum class W2Method {
  Exact1D,             // sorted quantile coupling, exact in 1D
  GaussianClosedForm,  // diagonal Gaussians
  Sliced,              // mean of squared 1D distances over random projections
  LpOracle,            // brute-force assignment, n <= 8
  Product1D,           // per-coordinate Exact1D combined for product targets
};

std::string w2_method_name(W2Method m);

struct W2Estimate {
  double value = 0.0;
  W2Method method = W2Method::Exact1D;
  double stderr_ = 0.0;   // projection noise (Sliced only)
  int n_projections = 0;  // Sliced only
  long n = 0;             // sample count per side
};

// Exact 2-Wasserstein distance between two equal-size empirical 1D samples.
W2Estimate w2_1d_exact(std::span<const double> a, std::span<const double> b);

// Closed form for diagonal Gaussians:
// sqrt(||mu1-mu2||^2 + sum_j (sqrt(v1_j) - sqrt(v2_j))^2).
W2Estimate w2_gaussian(std::span<const double> mu1, std::span<const double> var1,
                       std::span<const double> mu2, std::span<const double> var2);

// Sliced estimate: sqrt of the mean squared Exact1D distance over seeded
// random directions. Lower-bound-flavored: projections contract W2, so on
// smooth targets the value sits below the full distance; stderr_ covers
// projection noise only (delta method on the mean of squares).
W2Estimate sliced_w2(const Matrix& a, const Matrix& b, int n_projections = 256,
                     uint64_t seed = 0);

// Exact empirical W2 via brute-force assignment; rows <= 8.
W2Estimate lp_oracle(const Matrix& a, const Matrix& b);

// Per-coordinate Exact1D distances combined as sqrt(sum of squares); equals
// the true W2 for product-form targets.
W2Estimate w2_product_1d(const Matrix& a, const Matrix& b);

}  // namespace flowbound
