#include "flowbound/concavity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace flowbound {

namespace detail {

double sup_scan(const std::function<double(double)>& fn, double a, double b,
                int n_grid) {
  if (b < a) throw std::invalid_argument("sup_scan: requires a <= b");
  if (b == a) return fn(a);
  double best = -std::numeric_limits<double>::infinity();
  int best_i = 0;
  for (int i = 0; i <= n_grid; ++i) {
    const double t = a + (b - a) * i / n_grid;
    const double v = fn(t);
    if (v > best) {
      best = v;
      best_i = i;
    }
  }
  // golden-section refinement inside the bracketing cells
  double lo = a + (b - a) * std::max(0, best_i - 1) / n_grid;
  double hi = a + (b - a) * std::min(n_grid, best_i + 1) / n_grid;
  const double gr = 0.6180339887498949;
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = fn(x1), f2 = fn(x2);
  for (int it = 0; it < 80 && hi - lo > 1e-13 * (b - a); ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = fn(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = fn(x1);
    }
  }
  return std::max({best, f1, f2});
}

}  // namespace detail

namespace {

// Denominator 1 + alpha0 * c0^2 c1, shared by alpha_t / m_t.
double denom(const ConcavityProfile& p, double t) {
  return 1.0 + p.alpha0 * p.schedule.c0sq_c1(t);
}

}  // namespace

double alpha_t(const ConcavityProfile& p, double t) {
  const double c0 = p.schedule.c0(t);
  return p.alpha0 * c0 * c0 / denom(p, t);
}

double m_t(const ConcavityProfile& p, double t) {
  if (p.m0 == 0.0) return 0.0;
  const double c0 = p.schedule.c0(t);
  const double den = denom(p, t);
  return p.m0 * c0 * c0 / (den * den);
}

double k_t(const ConcavityProfile& p, double t) {
  return alpha_t(p, t) - m_t(p, t);
}

namespace {

// Unique root of c0^2 c1 = thr, closed form per family.
double threshold_crossing(const Schedule& schedule, double thr) {
  if (schedule.is_vp()) return schedule.big_b_inv(std::log1p(thr));
  // VE: c0 = 1, so the threshold condition is c1(t) = thr.
  switch (schedule.family()) {
    case ScheduleFamily::VE_EXP: {
      const double a = schedule.params()[0], b = schedule.params()[1];
      if (b == 0.0) return thr / (a * a);
      return std::log1p(2.0 * b * thr / (a * a)) / (2.0 * b);
    }
    case ScheduleFamily::VE_POLY: {
      const auto prm = schedule.params();
      const double a = prm[0], b = prm[1], c = prm[2];
      const double pw = 2.0 * c + 1.0;
      return (std::pow(std::pow(b, pw) + a * pw * thr, 1.0 / pw) - b) / a;
    }
    default:
      throw std::logic_error("threshold_crossing: unhandled family");
  }
}

}  // namespace

double tau(const ConcavityProfile& p) {
  if (p.m0 <= p.alpha0) return 0.0;
  return threshold_crossing(p.schedule,
                            (p.m0 - p.alpha0) / (p.alpha0 * p.alpha0));
}

double tau_bisection(const ConcavityProfile& p) {
  if (p.m0 <= p.alpha0) return 0.0;
  const double thr = (p.m0 - p.alpha0) / (p.alpha0 * p.alpha0);
  auto phi = [&](double t) { return p.schedule.c0sq_c1(t) - thr; };
  double hi = 1.0;
  int guard = 0;
  while (phi(hi) <= 0.0) {
    hi *= 2.0;
    if (++guard > 200)
      throw std::runtime_error("tau_bisection: bracket did not close");
  }
  double lo = 0.0;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (phi(mid) > 0.0)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

double lipschitz_t(const ConcavityProfile& p, double t) {
  const double c1 = p.schedule.c1(t);
  const double c0 = p.schedule.c0(t);
  const double grow = c0 * c0 * p.l0;
  const double shrink = c1 > 0.0 ? 1.0 / c1 : std::numeric_limits<double>::infinity();
  return std::max(std::min(shrink, grow), -k_t(p, t));
}

std::vector<double> lipschitz_kinks(const ConcavityProfile& p, double t_hi) {
  if (!(t_hi > 0.0)) return {};
  std::vector<double> kinks;
  // min branch switch: c0^2 l0 = 1 / c1, i.e. c0^2 c1 = 1 / l0. Kept even
  // when the -k branch covers it there; a split where the integrand happens
  // to be smooth costs one extra panel and nothing else.
  const double t_min = threshold_crossing(p.schedule, 1.0 / p.l0);
  if (t_min > 0.0 && t_min < t_hi) kinks.push_back(t_min);
  // max branch switch: -k crosses the min envelope, possible only on (0, tau)
  // where k < 0. Sign scan plus bisection; phi is continuous.
  const double t_neg = std::min(tau(p), t_hi);
  if (t_neg > 0.0) {
    auto phi = [&](double t) {
      const double c1 = p.schedule.c1(t);
      const double c0 = p.schedule.c0(t);
      const double grow = c0 * c0 * p.l0;
      const double shrink =
          c1 > 0.0 ? 1.0 / c1 : std::numeric_limits<double>::infinity();
      return std::min(shrink, grow) + k_t(p, t);
    };
    const int n = 1024;
    double t_prev = 0.0;
    double v_prev = phi(0.0);
    for (int i = 1; i <= n; ++i) {
      const double t = t_neg * i / n;
      const double v = phi(t);
      if ((v_prev <= 0.0) != (v <= 0.0)) {
        double lo = t_prev, hi = t;
        for (int it = 0; it < 100 && hi - lo > 1e-15 * t_neg; ++it) {
          const double mid = 0.5 * (lo + hi);
          if ((phi(mid) <= 0.0) == (v_prev <= 0.0))
            lo = mid;
          else
            hi = mid;
        }
        const double root = 0.5 * (lo + hi);
        if (root > 0.0 && root < t_hi) kinks.push_back(root);
      }
      t_prev = t;
      v_prev = v;
    }
  }
  std::sort(kinks.begin(), kinks.end());
  return kinks;
}

double xi(const Schedule& schedule, double T) {
  if (T < 0.0) throw std::invalid_argument("xi: requires T >= 0");
  auto fn = [&schedule](double t) {
    const double c0 = schedule.c0(t);
    const double c1 = schedule.c1(t);
    const double prod = c0 * c1;
    const double inv = prod > 0.0 ? 1.0 / (prod * prod)
                                  : std::numeric_limits<double>::infinity();
    return std::min(c0 * c0, inv);
  };
  return detail::sup_scan(fn, 0.0, T);
}

double eta(const Schedule& schedule, double T) {
  if (T < 0.0) throw std::invalid_argument("eta: requires T >= 0");
  auto fn = [&schedule](double t) {
    const double c0 = schedule.c0(t);
    const double c1 = schedule.c1(t);
    const double inv = c1 > 0.0 ? 1.0 / c1 : std::numeric_limits<double>::infinity();
    return std::min(c0 * c0, inv);
  };
  return detail::sup_scan(fn, 0.0, T);
}

double big_c(const ConcavityProfile& p) {
  const double t = tau(p);
  if (t == 0.0) return 1.0;
  const double gap = std::fabs(p.alpha0 - p.m0) / std::min(p.alpha0 * p.alpha0, 1.0);
  return std::exp(gap * xi(p.schedule, t) * p.schedule.int_g2(0.0, t));
}

double k_lower_bound(const ConcavityProfile& p, double t) {
  const double c0 = p.schedule.c0(t);
  const double c1 = p.schedule.c1(t);
  const double prod = p.alpha0 * c0 * c1;
  const double inv = prod > 0.0 ? 1.0 / (prod * prod)
                                : std::numeric_limits<double>::infinity();
  return -std::fabs(p.alpha0 - p.m0) * std::min(c0 * c0, inv);
}

double l_upper_bound(const ConcavityProfile& p, double T) {
  const double lead = std::max(std::max(p.l0, 1.0),
                               std::fabs(p.alpha0 - p.m0) /
                                   std::min(p.alpha0 * p.alpha0, 1.0));
  return lead * eta(p.schedule, T);
}

}  // namespace flowbound
