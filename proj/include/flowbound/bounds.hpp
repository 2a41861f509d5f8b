#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "flowbound/concavity.hpp"
#include "flowbound/target.hpp"

namespace flowbound {

// Everything the certified error bound needs. The profile repeats the
// target constants (alpha0, m0, l0); construct via make_bound_inputs to keep
// them consistent.
struct BoundInputs {
  ConcavityProfile profile;
  TargetConstants constants;
  double T = 0.0;
  long K = 0;
  int dim = 0;

  double h() const { return T / static_cast<double>(K); }
};

BoundInputs make_bound_inputs(const Schedule& schedule,
                              const TargetConstants& constants, double T, long K,
                              int dim);

// Raised when some gamma_j <= 0: the one-step contraction factors are not
// usable at this step size and the bound does not apply.
struct InvalidRegimeError : std::runtime_error {
  InvalidRegimeError(long step_, double gamma_)
      : std::runtime_error("bound not applicable: gamma_" + std::to_string(step_) +
                           " = " + std::to_string(gamma_) + " <= 0"),
        step(step_),
        gamma(gamma_) {}
  long step;
  double gamma;
};

struct BoundReport {
  double e0 = 0.0;  // initialization error
  double e1 = 0.0;  // discretization error
  double e2 = 0.0;  // score-error propagation
  double total = 0.0;
  double tau = 0.0;
  double big_c = 1.0;
  double theta = 0.0;
  double omega = 0.0;
  double h_bar = 0.0;
  long regime_split_index = 0;  // floor(K - tau/h)
  bool vacuous = false;         // total > 10 (x0_norm + sqrt(dim))
  std::vector<double> gamma;               // gamma[k-1], k = 1..K
  std::vector<double> log_gamma_tailprod;  // entry k-1: sum_{j>k} log gamma_j
  std::vector<double> nu;                  // nu[k-1]
};

// sqrt(e^{-2 int_0^t f} x0^2 + dim * c1(t)) and its sup over [0, T].
double omega_t(const BoundInputs& in, double t);
double omega_T(const BoundInputs& in);

// sup_{w in [0,T]} exp(-1/2 int_w^T g^2 k) e^{-int_f(0,w)} x0.
double theta_T(const BoundInputs& in);

// Integrand of the contraction factor at reverse time t inside step k:
// (1/2) e^{-int_f(u, u_left)} g^2(u) k(u) - (h/8) g^4(u) L(u)^2, u = T - t.
double delta_k(const BoundInputs& in, long k, double t);

// gamma_k = 1 - int_step delta_k + (1/2) l1 h int_step g^2.
double gamma_kh(const BoundInputs& in, long k);

// nu_k = (theta + omega) int_step (f + g^2 L / 2)
//        + (l1 (T + h) + |score at origin|) int_step g^2 / 2.
double nu_kh(const BoundInputs& in, long k);

double e0(const BoundInputs& in);
double e1(const BoundInputs& in);
double e2(const BoundInputs& in);

BoundReport total_bound(const BoundInputs& in);

// Step-size threshold for the clean contraction regime:
// min(log 2 / max_t f, min over a grid on (tau, T] of
//     (g^2 k / 4) / (g^4 L^2 / 8 + l1 g^2 / 2)).
double h_bar(const BoundInputs& in);

// Packaged OU-schedule bound:
// c (e^{-T} x0 + e^{Th} T h (x0 + sqrt(d) + T) + e^{Th} T eps).
double ou_bound(double T, double h, double eps, int dim, double x0_norm,
                double constant_c = 1.0);

namespace detail {
// Formula cores over caller-supplied rate/Lipschitz functions of forward
// time, for synthetic cross-checks. Pass the kink locations of l_fn in
// l_kinks; the step integrals split there.
double gamma_general(const Schedule& schedule, double l1, double T, long K, long k,
                     const std::function<double(double)>& k_fn,
                     const std::function<double(double)>& l_fn,
                     const std::vector<double>& l_kinks = {});
double h_bar_general(const Schedule& schedule, double l1, double tau_value, double T,
                     const std::function<double(double)>& k_fn,
                     const std::function<double(double)>& l_fn, int n_grid = 4096);
}  // namespace detail

}  // namespace flowbound
