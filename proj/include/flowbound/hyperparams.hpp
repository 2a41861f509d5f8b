#pragma once

#include <cstdint>
#include <string>

#include "flowbound/bounds.hpp"
#include "flowbound/schedule.hpp"

namespace flowbound {

// Horizon/step/score-budget choices that drive the total error to epsilon,
// one recipe per schedule family. The step size is first set by the family
// formula (h_formula), then rounded so the horizon splits into K equal steps.
struct Plan {
  std::string family;
  std::vector<double> schedule_params;
  double epsilon = 0.0;
  int dim = 0;
  double T = 0.0;
  double h_formula = 0.0;  // family formula value before rounding
  double h = 0.0;          // T / K, the step actually used
  long K = 0;
  double score_budget = 0.0;  // largest admissible score error
  double constant_c = 1.0;
  double scale = 0.0;  // sqrt(d) or the supplied x0_norm
  bool used_x0_norm = false;
};

// x0_norm > 0 replaces the sqrt(d) scale for targets whose norm is not
// O(sqrt(d)). constant_c > 1 tightens every formula via epsilon/constant_c.
Plan plan(const Schedule& schedule, double epsilon, int dim,
          double constant_c = 1.0, double x0_norm = 0.0);

// Evaluate the certified bound at the planned (T, K) with the plan's score
// budget as score_err.
BoundReport certify(const Plan& plan_, const Schedule& schedule,
                    const TargetConstants& constants, int dim);

struct StepSizeComparison {
  double ode_h;  // 1 / (sqrt(d) T^{rho+1})
  double sde_h;  // e^{-T^{rho+1}} / sqrt(d)
};

// Deterministic-flow step size against the stochastic-sampler step size for
// the polynomial VP family at horizon T.
StepSizeComparison step_size_comparison(double rho, double T, int dim);

struct CalibrationResult {
  double constant_c = 1.0;
  double epsilon = 0.0;
  double measured_w2 = 0.0;
  double ratio = 0.0;  // measured / epsilon at the accepted constant
  int evaluations = 0;
};

// One-shot fit of constant_c on the standard-Gaussian OU benchmark: doubles the
// constant until the sampler run at the planned (T, h) measures below epsilon.
// The formulas are upper-bound-driven, so the constant is never pushed below 1.
CalibrationResult calibrate_constant(double epsilon, int dim, long n,
                                     uint64_t seed);

}  // namespace flowbound
