#include "flowbound/schedule.hpp"

#include <cmath>
#include <stdexcept>

namespace flowbound {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

Schedule::Schedule(ScheduleFamily fam, double a, double b, double c)
    : family_(fam), a_(a), b_(b), c_(c) {
  switch (family_) {
    case ScheduleFamily::OU:
      break;
    case ScheduleFamily::VE_EXP:
      require(a_ > 0.0, "ve_exp: leading coefficient a must be > 0");
      require(b_ >= 0.0, "ve_exp: rate b must be >= 0");
      break;
    case ScheduleFamily::VE_POLY:
      require(a_ > 0.0, "ve_poly: leading coefficient a must be > 0");
      require(b_ >= 0.0, "ve_poly: offset b must be >= 0");
      require(c_ >= 0.0, "ve_poly: exponent c must be >= 0");
      break;
    case ScheduleFamily::VP_CONST:
      require(b_ > 0.0, "vp_const: rate b must be > 0");
      break;
    case ScheduleFamily::VP_LINEAR:
      require(a_ >= 0.0, "vp_linear: slope a must be >= 0");
      require(b_ >= 0.0, "vp_linear: offset b must be >= 0");
      require(a_ > 0.0 || b_ > 0.0, "vp_linear: rate must be positive for t > 0");
      break;
    case ScheduleFamily::VP_POLY:
      require(a_ >= 0.0, "vp_poly: slope a must be >= 0");
      require(b_ >= 0.0, "vp_poly: offset b must be >= 0");
      require(c_ >= 0.0, "vp_poly: exponent rho must be >= 0");
      require(a_ > 0.0 || b_ > 0.0, "vp_poly: rate must be positive for t > 0");
      break;
  }
  validate(50.0);
}

void Schedule::validate(double t_max) const {
  // Sample-grid sanity: f >= 0 everywhere, g > 0 for t > 0.
  const int n = 256;
  for (int i = 0; i <= n; ++i) {
    const double t = t_max * i / n;
    if (!(f(t) >= 0.0) || !std::isfinite(f(t)))
      throw std::invalid_argument("schedule: f(t) must be finite and >= 0");
    if (t > 0.0 && !(g(t) > 0.0))
      throw std::invalid_argument("schedule: g(t) must be > 0 for t > 0");
    if (!std::isfinite(g(t)))
      throw std::invalid_argument("schedule: g(t) must be finite");
  }
}

Schedule Schedule::ou() { return Schedule(ScheduleFamily::OU, 0, 0, 0); }
Schedule Schedule::ve_exp(double a, double b) {
  return Schedule(ScheduleFamily::VE_EXP, a, b, 0);
}
Schedule Schedule::ve_poly(double a, double b, double c) {
  return Schedule(ScheduleFamily::VE_POLY, a, b, c);
}
Schedule Schedule::vp_const(double b) {
  return Schedule(ScheduleFamily::VP_CONST, 0, b, 0);
}
Schedule Schedule::vp_linear(double a, double b) {
  return Schedule(ScheduleFamily::VP_LINEAR, a, b, 0);
}
Schedule Schedule::vp_poly(double a, double b, double rho) {
  return Schedule(ScheduleFamily::VP_POLY, a, b, rho);
}

Schedule Schedule::from_name(const std::string& family,
                             const std::vector<double>& p) {
  auto need = [&](size_t n) {
    if (p.size() != n)
      throw std::invalid_argument("schedule '" + family + "' expects " +
                                  std::to_string(n) + " parameter(s)");
  };
  if (family == "ou") { need(0); return ou(); }
  if (family == "ve_exp") { need(2); return ve_exp(p[0], p[1]); }
  if (family == "ve_poly") { need(3); return ve_poly(p[0], p[1], p[2]); }
  if (family == "vp_const") { need(1); return vp_const(p[0]); }
  if (family == "vp_linear") { need(2); return vp_linear(p[0], p[1]); }
  if (family == "vp_poly") { need(3); return vp_poly(p[0], p[1], p[2]); }
  throw std::invalid_argument("unknown schedule family: " + family);
}

std::string Schedule::family_name() const {
  switch (family_) {
    case ScheduleFamily::OU: return "ou";
    case ScheduleFamily::VE_EXP: return "ve_exp";
    case ScheduleFamily::VE_POLY: return "ve_poly";
    case ScheduleFamily::VP_CONST: return "vp_const";
    case ScheduleFamily::VP_LINEAR: return "vp_linear";
    case ScheduleFamily::VP_POLY: return "vp_poly";
  }
  return "?";
}

std::vector<double> Schedule::params() const {
  switch (family_) {
    case ScheduleFamily::OU: return {};
    case ScheduleFamily::VE_EXP: return {a_, b_};
    case ScheduleFamily::VE_POLY: return {a_, b_, c_};
    case ScheduleFamily::VP_CONST: return {b_};
    case ScheduleFamily::VP_LINEAR: return {a_, b_};
    case ScheduleFamily::VP_POLY: return {a_, b_, c_};
  }
  return {};
}

bool Schedule::is_vp() const {
  return family_ == ScheduleFamily::OU || family_ == ScheduleFamily::VP_CONST ||
         family_ == ScheduleFamily::VP_LINEAR || family_ == ScheduleFamily::VP_POLY;
}

bool Schedule::is_ve() const {
  return family_ == ScheduleFamily::VE_EXP || family_ == ScheduleFamily::VE_POLY;
}

double Schedule::f(double t) const {
  switch (family_) {
    case ScheduleFamily::OU: return 1.0;
    case ScheduleFamily::VE_EXP:
    case ScheduleFamily::VE_POLY: return 0.0;
    case ScheduleFamily::VP_CONST: return 0.5 * b_;
    case ScheduleFamily::VP_LINEAR: return 0.5 * (b_ + a_ * t);
    case ScheduleFamily::VP_POLY: return 0.5 * std::pow(b_ + a_ * t, c_);
  }
  return 0.0;
}

double Schedule::g2(double t) const {
  switch (family_) {
    case ScheduleFamily::OU: return 2.0;
    case ScheduleFamily::VE_EXP: {
      const double ge = a_ * std::exp(b_ * t);
      return ge * ge;
    }
    case ScheduleFamily::VE_POLY: return std::pow(b_ + a_ * t, 2.0 * c_);
    case ScheduleFamily::VP_CONST: return b_;
    case ScheduleFamily::VP_LINEAR: return b_ + a_ * t;
    case ScheduleFamily::VP_POLY: return std::pow(b_ + a_ * t, c_);
  }
  return 0.0;
}

double Schedule::g(double t) const { return std::sqrt(g2(t)); }

double Schedule::big_b(double t) const {
  switch (family_) {
    case ScheduleFamily::OU: return 2.0 * t;
    case ScheduleFamily::VP_CONST: return b_ * t;
    case ScheduleFamily::VP_LINEAR: return b_ * t + 0.5 * a_ * t * t;
    case ScheduleFamily::VP_POLY: {
      if (a_ == 0.0) return std::pow(b_, c_) * t;
      const double p = c_ + 1.0;
      return (std::pow(b_ + a_ * t, p) - std::pow(b_, p)) / (a_ * p);
    }
    default:
      throw std::invalid_argument("big_b: defined for VP families only");
  }
}

double Schedule::big_b_inv(double y) const {
  if (y < 0.0) throw std::invalid_argument("big_b_inv: y must be >= 0");
  switch (family_) {
    case ScheduleFamily::OU: return 0.5 * y;
    case ScheduleFamily::VP_CONST: return y / b_;
    case ScheduleFamily::VP_LINEAR: {
      if (a_ == 0.0) return y / b_;
      // bt + a t^2 / 2 = y, positive root
      return (-b_ + std::sqrt(b_ * b_ + 2.0 * a_ * y)) / a_;
    }
    case ScheduleFamily::VP_POLY: {
      if (a_ == 0.0) return y / std::pow(b_, c_);
      const double p = c_ + 1.0;
      return (std::pow(std::pow(b_, p) + a_ * p * y, 1.0 / p) - b_) / a_;
    }
    default:
      throw std::invalid_argument("big_b_inv: defined for VP families only");
  }
}

double Schedule::int_f(double s, double t) const {
  if (s > t) throw std::invalid_argument("int_f: requires s <= t");
  switch (family_) {
    case ScheduleFamily::OU: return t - s;
    case ScheduleFamily::VE_EXP:
    case ScheduleFamily::VE_POLY: return 0.0;
    default: return 0.5 * (big_b(t) - big_b(s));
  }
}

double Schedule::log_c0(double t) const { return int_f(0.0, t); }
double Schedule::c0(double t) const { return std::exp(log_c0(t)); }

double Schedule::int_g2(double s, double t) const {
  if (s > t) throw std::invalid_argument("int_g2: requires s <= t");
  switch (family_) {
    case ScheduleFamily::OU: return 2.0 * (t - s);
    case ScheduleFamily::VE_EXP: {
      if (b_ == 0.0) return a_ * a_ * (t - s);
      return a_ * a_ * (std::exp(2.0 * b_ * t) - std::exp(2.0 * b_ * s)) / (2.0 * b_);
    }
    case ScheduleFamily::VE_POLY: {
      if (a_ == 0.0) return std::pow(b_, 2.0 * c_) * (t - s);
      const double p = 2.0 * c_ + 1.0;
      return (std::pow(b_ + a_ * t, p) - std::pow(b_ + a_ * s, p)) / (a_ * p);
    }
    default: return big_b(t) - big_b(s);
  }
}

double Schedule::c1(double t) const {
  if (t < 0.0) throw std::invalid_argument("c1: requires t >= 0");
  if (is_ve()) return int_g2(0.0, t);
  return -std::expm1(-big_b(t));  // VP: 1 - e^{-B(t)}
}

double Schedule::c0sq_c1(double t) const {
  if (is_ve()) return c1(t);
  return std::expm1(big_b(t));  // VP: e^{B(t)} - 1
}

double Schedule::step_weight(double u0, double u1) const {
  if (u0 > u1) throw std::invalid_argument("step_weight: requires u0 <= u1");
  if (is_ve()) return int_g2(u0, u1);
  // VP: int e^{(B(u)-B(u0))/2} beta(u) du = 2 (e^{(B(u1)-B(u0))/2} - 1)
  return 2.0 * std::expm1(0.5 * (big_b(u1) - big_b(u0)));
}

double Schedule::int_f_quad(double s, double t, const QuadratureSettings& q) const {
  if (s > t) throw std::invalid_argument("int_f_quad: requires s <= t");
  return integrate([this](double u) { return f(u); }, s, t, q).value;
}

double Schedule::int_g2_quad(double s, double t, const QuadratureSettings& q) const {
  if (s > t) throw std::invalid_argument("int_g2_quad: requires s <= t");
  return integrate([this](double u) { return g2(u); }, s, t, q).value;
}

double Schedule::c1_quad(double t, const QuadratureSettings& q) const {
  return integrate(
             [this, t](double s) {
               return std::exp(-2.0 * int_f(s, t)) * g2(s);
             },
             0.0, t, q)
      .value;
}

double Schedule::big_b_quad(double t, const QuadratureSettings& q) const {
  return integrate([this](double u) { return 2.0 * f(u); }, 0.0, t, q).value;
}

double Schedule::step_weight_quad(double u0, double u1,
                                  const QuadratureSettings& q) const {
  if (u0 > u1) throw std::invalid_argument("step_weight_quad: requires u0 <= u1");
  return integrate(
             [this, u0](double u) { return std::exp(int_f(u0, u)) * g2(u); },
             u0, u1, q)
      .value;
}

}  // namespace flowbound
