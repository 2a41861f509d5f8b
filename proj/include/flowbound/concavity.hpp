#pragma once

#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "flowbound/schedule.hpp"

namespace flowbound {

// Weak-log-concavity profile of a target under a noising schedule. alpha0 is
// the large-scale convexity rate, m0 the tanh-profile magnitude (0 means
// strongly log-concave), l0 the score Lipschitz bound at time zero.
struct ConcavityProfile {
  Schedule schedule;
  double alpha0;
  double m0;
  double l0;

  ConcavityProfile(Schedule s, double a0, double m, double l)
      : schedule(std::move(s)), alpha0(a0), m0(m), l0(l) {
    if (!(alpha0 > 0.0)) throw std::invalid_argument("profile: alpha0 must be > 0");
    if (!(m0 >= 0.0)) throw std::invalid_argument("profile: m0 must be >= 0");
    if (!(l0 > 0.0)) throw std::invalid_argument("profile: l0 must be > 0");
  }
};

// Propagated convexity rate alpha(t) = alpha0 c0^2 / (1 + alpha0 c0^2 c1).
double alpha_t(const ConcavityProfile& p, double t);
// Propagated profile magnitude m(t) = m0 c0^2 / (1 + alpha0 c0^2 c1)^2.
double m_t(const ConcavityProfile& p, double t);
// Effective strong-convexity rate k(t) = alpha(t) - m(t).
double k_t(const ConcavityProfile& p, double t);

// First time k(t) turns nonnegative: 0 when m0 <= alpha0, else the unique
// root of c0^2 c1 = (m0 - alpha0) / alpha0^2. Closed form per family.
double tau(const ConcavityProfile& p);
// Same value via doubling bracket + bisection (|interval| <= 1e-10).
double tau_bisection(const ConcavityProfile& p);

// Score Lipschitz bound at time t:
// max(min(1 / c1, c0^2 l0), -k(t)); the 1/c1 branch is +inf at t = 0.
double lipschitz_t(const ConcavityProfile& p, double t);

// Ascending times in (0, t_hi) where lipschitz_t switches branch. Quadrature
// over any integrand built from lipschitz_t must split at these points: a
// kink hiding between the sample nodes of a panel is invisible to the
// error estimate. Contains the root of c0^2 c1 = 1 / l0 (where the min picks
// the other branch) and any crossings of -k with the min envelope on (0, tau).
std::vector<double> lipschitz_kinks(const ConcavityProfile& p, double t_hi);

// sup over [0, T] of min(c0^2, 1 / (c0 c1)^2).
double xi(const Schedule& schedule, double T);
// sup over [0, T] of min(c0^2, 1 / c1); xi <= eta always.
double eta(const Schedule& schedule, double T);

// Contraction-loss constant over the shifted regime:
// exp(|alpha0 - m0| / min(alpha0^2, 1) * xi(tau) * int_0^tau g^2); 1 when
// m0 <= alpha0.
double big_c(const ConcavityProfile& p);

// k(t) >= -|alpha0 - m0| min(c0^2, 1 / (alpha0 c0 c1)^2).
double k_lower_bound(const ConcavityProfile& p, double t);
// sup_{t <= T} lipschitz_t <= max(max(l0, 1), |alpha0 - m0| / min(alpha0^2, 1)) * eta(T).
double l_upper_bound(const ConcavityProfile& p, double T);

namespace detail {
// Max of fn over [a, b]: dense grid then golden-section refinement around the
// best cell. fn need not be unimodal globally; the grid pins the basin.
double sup_scan(const std::function<double(double)>& fn, double a, double b,
                int n_grid = 4096);
}  // namespace detail

}  // namespace flowbound
