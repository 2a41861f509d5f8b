#include "flowbound/bounds.hpp"

#include <cmath>
#include <limits>

#include "flowbound/quadrature.hpp"

namespace flowbound {

BoundInputs make_bound_inputs(const Schedule& schedule,
                              const TargetConstants& constants, double T, long K,
                              int dim) {
  if (!(T > 0.0)) throw std::invalid_argument("bound inputs: T must be > 0");
  if (K < 1) throw std::invalid_argument("bound inputs: K must be >= 1");
  if (dim < 1) throw std::invalid_argument("bound inputs: dim must be >= 1");
  if (!(constants.l1 >= 0.0))
    throw std::invalid_argument("bound inputs: l1 must be >= 0");
  if (!(constants.score_err >= 0.0))
    throw std::invalid_argument("bound inputs: score_err must be >= 0");
  if (!(constants.x0_norm >= 0.0))
    throw std::invalid_argument("bound inputs: x0_norm must be >= 0");
  return BoundInputs{
      ConcavityProfile(schedule, constants.alpha0, constants.m0, constants.l0),
      constants, T, K, dim};
}

namespace {

// Forward-time endpoints of step k: u in [right, left], left = T-t_{k-1}.
struct StepSpan {
  double right;
  double left;
};

StepSpan step_span(const BoundInputs& in, long k) {
  if (k < 1 || k > in.K) throw std::invalid_argument("bound: step index out of range");
  const double right =
      in.T * static_cast<double>(in.K - k) / static_cast<double>(in.K);
  const double left =
      in.T * static_cast<double>(in.K - k + 1) / static_cast<double>(in.K);
  return {right, left};
}

double quad(const std::function<double(double)>& fn, double a, double b) {
  return integrate(fn, a, b).value;
}

// Integrate over [a, b] split at the breakpoints falling inside; the
// integrands built from lipschitz_t kink there, and a kink sitting between
// the sample nodes of a panel slips past the quadrature error estimate.
double quad_split(const std::function<double(double)>& fn, double a, double b,
                  const std::vector<double>& breakpoints) {
  double acc = 0.0;
  double lo = a;
  for (double brk : breakpoints) {
    if (brk <= lo) continue;
    if (brk >= b) break;
    acc += integrate(fn, lo, brk).value;
    lo = brk;
  }
  return acc + integrate(fn, lo, b).value;
}

}  // namespace

double omega_t(const BoundInputs& in, double t) {
  const double decay = std::exp(-2.0 * in.profile.schedule.int_f(0.0, t));
  const double x0 = in.constants.x0_norm;
  return std::sqrt(decay * x0 * x0 +
                   static_cast<double>(in.dim) * in.profile.schedule.c1(t));
}

double omega_T(const BoundInputs& in) {
  return detail::sup_scan([&](double t) { return omega_t(in, t); }, 0.0, in.T);
}

double theta_T(const BoundInputs& in) {
  // objective(w) = exp(-1/2 int_w^T g^2 k) e^{-int_f(0,w)} x0.
  // Cumulative grid of int_0^w g^2 k keeps each objective call cheap.
  const int n_cells = 2048;
  const auto& sched = in.profile.schedule;
  auto integrand = [&](double u) { return sched.g2(u) * k_t(in.profile, u); };
  std::vector<double> prefix(n_cells + 1, 0.0);
  for (int i = 0; i < n_cells; ++i) {
    const double a = in.T * i / n_cells;
    const double b = in.T * (i + 1) / n_cells;
    prefix[i + 1] = prefix[i] + quad(integrand, a, b);
  }
  const double total = prefix[n_cells];
  auto objective = [&](double w) {
    const int cell = std::min(
        n_cells - 1, static_cast<int>(std::floor(w / in.T * n_cells)));
    const double w_cell = in.T * cell / n_cells;
    const double int_0_w = prefix[cell] + quad(integrand, w_cell, w);
    const double log_val = -0.5 * (total - int_0_w) - sched.int_f(0.0, w);
    return std::exp(log_val);
  };
  return in.constants.x0_norm * detail::sup_scan(objective, 0.0, in.T);
}

double delta_k(const BoundInputs& in, long k, double t) {
  const StepSpan s = step_span(in, k);
  const double t_left = in.T - s.left;
  const double t_right = in.T - s.right;
  if (t < t_left - 1e-12 * in.T || t > t_right + 1e-12 * in.T)
    throw std::invalid_argument("delta_k: t outside step interval");
  const double u = in.T - t;
  const auto& sched = in.profile.schedule;
  const double g2 = sched.g2(u);
  const double L = lipschitz_t(in.profile, u);
  return 0.5 * std::exp(-sched.int_f(std::min(u, s.left), s.left)) * g2 *
             k_t(in.profile, u) -
         0.125 * in.h() * g2 * g2 * L * L;
}

namespace {

double gamma_core(const Schedule& sched, double l1, double h, double u_right,
                  double u_left, const std::function<double(double)>& k_fn,
                  const std::function<double(double)>& l_fn,
                  const std::vector<double>& l_kinks) {
  auto integrand = [&](double u) {
    const double g2 = sched.g2(u);
    const double L = l_fn(u);
    return 0.5 * std::exp(-sched.int_f(u, u_left)) * g2 * k_fn(u) -
           0.125 * h * g2 * g2 * L * L;
  };
  const double d_int = quad_split(integrand, u_right, u_left, l_kinks);
  return 1.0 - d_int + 0.5 * l1 * h * sched.int_g2(u_right, u_left);
}

}  // namespace

double gamma_kh(const BoundInputs& in, long k) {
  const StepSpan s = step_span(in, k);
  return gamma_core(
      in.profile.schedule, in.constants.l1, in.h(), s.right, s.left,
      [&](double u) { return k_t(in.profile, u); },
      [&](double u) { return lipschitz_t(in.profile, u); },
      lipschitz_kinks(in.profile, in.T));
}

namespace {

double nu_core(const BoundInputs& in, long k, double theta, double omega,
               const std::vector<double>& l_kinks) {
  const StepSpan s = step_span(in, k);
  const auto& sched = in.profile.schedule;
  const double drift = quad_split(
      [&](double u) {
        return sched.f(u) + 0.5 * sched.g2(u) * lipschitz_t(in.profile, u);
      },
      s.right, s.left, l_kinks);
  const double diffusion = 0.5 * sched.int_g2(s.right, s.left);
  return (theta + omega) * drift +
         (in.constants.l1 * (in.T + in.h()) + in.constants.score_at_origin) *
             diffusion;
}

}  // namespace

double nu_kh(const BoundInputs& in, long k) {
  return nu_core(in, k, theta_T(in), omega_T(in),
                 lipschitz_kinks(in.profile, in.T));
}

double e0(const BoundInputs& in) {
  const auto& sched = in.profile.schedule;
  const double t_shift = tau(in.profile);
  auto integrand = [&](double u) {
    return sched.g2(u) * std::fabs(k_t(in.profile, u));
  };
  // |k| has a kink at tau; integrate the smooth pieces separately.
  double acc = 0.0;
  if (t_shift > 0.0 && t_shift < in.T) {
    acc = quad(integrand, 0.0, t_shift) + quad(integrand, t_shift, in.T);
  } else {
    acc = quad(integrand, 0.0, in.T);
  }
  return big_c(in.profile) * std::exp(-0.5 * acc) * in.constants.x0_norm;
}

namespace {

// Everything shared by e1/e2/total_bound: per-step contraction factors,
// weights and prefactors, plus the tail products of gamma.
struct StepTable {
  std::vector<double> gamma;
  std::vector<double> log_tailprod;  // entry k-1: sum_{j>k} log gamma_j
  std::vector<double> weight;        // W_k
  std::vector<double> prefactor;     // c0(u_k) = e^{int_f(0, u_k)}
  std::vector<double> nu;
  std::vector<double> sqrt_q;        // sqrt(int (e^{int_f} g^2 L)^2)
  double theta = 0.0;
  double omega = 0.0;
};

StepTable build_step_table(const BoundInputs& in) {
  StepTable tab;
  const long K = in.K;
  tab.gamma.resize(K);
  tab.log_tailprod.assign(K, 0.0);
  tab.weight.resize(K);
  tab.prefactor.resize(K);
  tab.nu.resize(K);
  tab.sqrt_q.resize(K);
  tab.theta = theta_T(in);
  tab.omega = omega_T(in);
  const auto& sched = in.profile.schedule;
  const double h = in.h();
  const std::vector<double> l_kinks = lipschitz_kinks(in.profile, in.T);

  for (long k = 1; k <= K; ++k) {
    const StepSpan s = step_span(in, k);
    const double g = gamma_core(
        sched, in.constants.l1, h, s.right, s.left,
        [&](double u) { return k_t(in.profile, u); },
        [&](double u) { return lipschitz_t(in.profile, u); }, l_kinks);
    if (!(g > 0.0)) throw InvalidRegimeError(k, g);
    tab.gamma[k - 1] = g;
    tab.weight[k - 1] = sched.step_weight(s.right, s.left);
    tab.prefactor[k - 1] = std::exp(sched.int_f(0.0, s.right));
    tab.nu[k - 1] = nu_core(in, k, tab.theta, tab.omega, l_kinks);
    const double q = quad_split(
        [&](double u) {
          const double v = std::exp(sched.int_f(s.right, u)) * sched.g2(u) *
                           lipschitz_t(in.profile, u);
          return v * v;
        },
        s.right, s.left, l_kinks);
    tab.sqrt_q[k - 1] = std::sqrt(std::max(0.0, q));
  }
  // suffix sums of log gamma: products of the later contraction factors
  for (long k = K - 1; k >= 1; --k)
    tab.log_tailprod[k - 1] = tab.log_tailprod[k] + std::log(tab.gamma[k]);
  return tab;
}

double e1_from_table(const BoundInputs& in, const StepTable& tab) {
  const double h = in.h();
  const double l1 = in.constants.l1;
  double acc = 0.0;
  for (long k = 1; k <= in.K; ++k) {
    const double tail = std::exp(tab.log_tailprod[k - 1]);
    const double first = 0.5 * l1 * h * (1.0 + tab.theta + tab.omega) *
                         tab.weight[k - 1];
    const double second =
        0.5 * std::sqrt(h) * tab.nu[k - 1] * tab.sqrt_q[k - 1];
    acc += tail * tab.prefactor[k - 1] * (first + second);
  }
  return acc;
}

double e2_from_table(const BoundInputs& in, const StepTable& tab) {
  double acc = 0.0;
  for (long k = 1; k <= in.K; ++k)
    acc += std::exp(tab.log_tailprod[k - 1]) * tab.prefactor[k - 1] * 0.5 *
           in.constants.score_err * tab.weight[k - 1];
  return acc;
}

}  // namespace

double e1(const BoundInputs& in) { return e1_from_table(in, build_step_table(in)); }

double e2(const BoundInputs& in) { return e2_from_table(in, build_step_table(in)); }

double h_bar(const BoundInputs& in) {
  return detail::h_bar_general(
      in.profile.schedule, in.constants.l1, tau(in.profile), in.T,
      [&](double u) { return k_t(in.profile, u); },
      [&](double u) { return lipschitz_t(in.profile, u); });
}

BoundReport total_bound(const BoundInputs& in) {
  BoundReport rep;
  const StepTable tab = build_step_table(in);
  rep.tau = tau(in.profile);
  rep.big_c = big_c(in.profile);
  rep.theta = tab.theta;
  rep.omega = tab.omega;
  rep.h_bar = h_bar(in);
  rep.e0 = e0(in);
  rep.e1 = e1_from_table(in, tab);
  rep.e2 = e2_from_table(in, tab);
  rep.total = rep.e0 + rep.e1 + rep.e2;
  rep.regime_split_index =
      static_cast<long>(std::floor(static_cast<double>(in.K) - rep.tau / in.h()));
  rep.vacuous =
      rep.total > 10.0 * (in.constants.x0_norm + std::sqrt(in.dim));
  rep.gamma = tab.gamma;
  rep.log_gamma_tailprod = tab.log_tailprod;
  rep.nu = tab.nu;
  return rep;
}

double ou_bound(double T, double h, double eps, int dim, double x0_norm,
                double constant_c) {
  if (!(T > 0.0) || !(h > 0.0))
    throw std::invalid_argument("ou_bound: requires T > 0 and h > 0");
  if (eps < 0.0) throw std::invalid_argument("ou_bound: eps must be >= 0");
  const double grow = std::exp(T * h);
  return constant_c *
         (std::exp(-T) * x0_norm +
          grow * T * h * (x0_norm + std::sqrt(static_cast<double>(dim)) + T) +
          grow * T * eps);
}

namespace detail {

double gamma_general(const Schedule& schedule, double l1, double T, long K, long k,
                     const std::function<double(double)>& k_fn,
                     const std::function<double(double)>& l_fn,
                     const std::vector<double>& l_kinks) {
  if (k < 1 || k > K) throw std::invalid_argument("gamma_general: k out of range");
  const double u_right = T * static_cast<double>(K - k) / static_cast<double>(K);
  const double u_left = T * static_cast<double>(K - k + 1) / static_cast<double>(K);
  return gamma_core(schedule, l1, T / static_cast<double>(K), u_right, u_left,
                    k_fn, l_fn, l_kinks);
}

double h_bar_general(const Schedule& schedule, double l1, double tau_value,
                     double T, const std::function<double(double)>& k_fn,
                     const std::function<double(double)>& l_fn, int n_grid) {
  // first term: log 2 over the largest drift rate on [0, T]
  const double f_max =
      sup_scan([&](double t) { return schedule.f(t); }, 0.0, T, 512);
  double bound = f_max > 0.0 ? std::log(2.0) / f_max
                             : std::numeric_limits<double>::infinity();
  // second term: grid over (tau, T]; absent when tau >= T
  if (tau_value < T) {
    for (int i = 1; i <= n_grid; ++i) {
      const double t = tau_value + (T - tau_value) * i / n_grid;
      const double g2 = schedule.g2(t);
      const double L = l_fn(t);
      const double denom = 0.125 * g2 * g2 * L * L + 0.5 * l1 * g2;
      if (denom <= 0.0) continue;
      bound = std::min(bound, 0.25 * g2 * k_fn(t) / denom);
    }
  }
  return bound;
}

}  // namespace detail

}  // namespace flowbound
