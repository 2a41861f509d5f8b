#include "flowbound/hyperparams.hpp"

#include <cmath>

#include "flowbound/metrics.hpp"
#include "flowbound/sampler.hpp"

namespace flowbound {

Plan plan(const Schedule& schedule, double epsilon, int dim, double constant_c,
          double x0_norm) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("plan: epsilon must be > 0");
  if (dim < 1) throw std::invalid_argument("plan: dim must be >= 1");
  if (!(constant_c > 0.0))
    throw std::invalid_argument("plan: constant_c must be > 0");
  if (x0_norm < 0.0) throw std::invalid_argument("plan: x0_norm must be >= 0");

  Plan out;
  out.family = schedule.family_name();
  out.schedule_params = schedule.params();
  out.epsilon = epsilon;
  out.dim = dim;
  out.constant_c = constant_c;
  out.used_x0_norm = x0_norm > 0.0;
  const double scale = out.used_x0_norm ? x0_norm : std::sqrt(dim);
  out.scale = scale;
  const double eps = epsilon / constant_c;  // calibrated effective target
  if (!(eps < scale))
    throw std::invalid_argument(
        "plan: requires epsilon/constant_c < sqrt(d) (or x0_norm)");

  const auto params = schedule.params();
  switch (schedule.family()) {
    case ScheduleFamily::VE_EXP:
      out.T = std::log(scale / eps);
      out.h_formula = eps * eps * eps / (scale * scale * scale);
      out.score_budget = eps * eps / scale;
      break;
    case ScheduleFamily::VE_POLY: {
      const double c = params[2];
      out.T = std::pow(scale * scale / (eps * eps), 1.0 / (2.0 * c + 1.0));
      out.h_formula = eps * eps * eps / (scale * scale * scale);
      out.score_budget = eps * eps / scale;
      break;
    }
    case ScheduleFamily::OU:
    case ScheduleFamily::VP_CONST: {
      const double lg = std::log(scale / eps);
      out.T = lg;
      out.h_formula = eps / (scale * lg);
      out.score_budget = eps / lg;
      break;
    }
    case ScheduleFamily::VP_LINEAR: {
      const double lg = std::log(scale / eps);
      out.T = std::sqrt(lg);
      out.h_formula = eps / (scale * lg);
      out.score_budget = eps / lg;
      break;
    }
    case ScheduleFamily::VP_POLY: {
      const double rho = params[2];
      const double lg = std::log(scale / eps);
      out.T = std::pow(lg, 1.0 / (rho + 1.0));
      out.h_formula = eps / (scale * lg);
      out.score_budget = eps / lg;
      break;
    }
  }
  if (!(out.T > 0.0))
    throw std::invalid_argument("plan: horizon came out nonpositive; epsilon too large");
  out.K = static_cast<long>(std::ceil(out.T / out.h_formula));
  out.h = out.T / static_cast<double>(out.K);
  return out;
}

BoundReport certify(const Plan& plan_, const Schedule& schedule,
                    const TargetConstants& constants, int dim) {
  TargetConstants c = constants;
  c.score_err = plan_.score_budget;
  return total_bound(make_bound_inputs(schedule, c, plan_.T, plan_.K, dim));
}

StepSizeComparison step_size_comparison(double rho, double T, int dim) {
  if (!(T > 0.0)) throw std::invalid_argument("step_size_comparison: T must be > 0");
  if (rho < 0.0)
    throw std::invalid_argument("step_size_comparison: rho must be >= 0");
  if (dim < 1) throw std::invalid_argument("step_size_comparison: dim must be >= 1");
  const double root_d = std::sqrt(static_cast<double>(dim));
  const double tp = std::pow(T, rho + 1.0);
  return {1.0 / (root_d * tp), std::exp(-tp) / root_d};
}

CalibrationResult calibrate_constant(double epsilon, int dim, long n,
                                     uint64_t seed) {
  if (n < 2) throw std::invalid_argument("calibrate: n must be >= 2");
  const Schedule ou = Schedule::ou();
  const GaussianMixture target = GaussianMixture::standard_normal(dim);
  CalibrationResult out;
  out.epsilon = epsilon;
  double c = 1.0;
  for (int iter = 0; iter < 24; ++iter) {
    const Plan p = plan(ou, epsilon, dim, c);
    SamplerConfig config{ou, p.T, p.K, InitMode::HatPT, derive_seed(seed, 1)};
    const ExactMixtureScore oracle(target, ou);
    const Matrix generated = run(config, oracle, n);
    const Matrix reference = target.sample(n, derive_seed(seed, 2));
    const double w2 = w2_product_1d(generated, reference).value;
    ++out.evaluations;
    out.constant_c = c;
    out.measured_w2 = w2;
    out.ratio = w2 / epsilon;
    if (w2 <= epsilon) return out;
    c *= 2.0;
  }
  throw std::runtime_error("calibrate: did not reach the target within 24 doublings");
}

}  // namespace flowbound
