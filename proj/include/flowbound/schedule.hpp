#pragma once

#include <optional>
#include <string>
#include <vector>

#include "flowbound/quadrature.hpp"

namespace flowbound {

// Forward noising dynamics dX = -f(t) X dt + g(t) dB, described by one of six
// parametric families. "VP" families satisfy f = g^2 / 2 with rate
// beta(t) = 2 f(t) and B(t) = int_0^t beta; "VE" families have f = 0.
enum class ScheduleFamily { OU, VE_EXP, VE_POLY, VP_CONST, VP_LINEAR, VP_POLY };

class Schedule {
 public:
  static Schedule ou();                                       // f=1, g=sqrt(2)
  static Schedule ve_exp(double a, double b);                 // g = a e^{bt}
  static Schedule ve_poly(double a, double b, double c);      // g = (b+at)^c
  static Schedule vp_const(double b);                         // beta = b
  static Schedule vp_linear(double a, double b);              // beta = b+at
  static Schedule vp_poly(double a, double b, double rho);    // beta = (b+at)^rho

  static Schedule from_name(const std::string& family,
                            const std::vector<double>& params);

  ScheduleFamily family() const { return family_; }
  std::string family_name() const;
  std::vector<double> params() const;
  bool is_vp() const;
  bool is_ve() const;

  double f(double t) const;
  double g(double t) const;
  double g2(double t) const;

  // int_s^t f(u) du, closed form. Requires s <= t.
  double int_f(double s, double t) const;
  // c0(t) = exp(int_0^t f); log_c0 avoids overflow at large horizons.
  double c0(double t) const;
  double log_c0(double t) const;
  // c1(t) = int_0^t exp(-2 int_s^t f) g^2(s) ds, closed form per family.
  double c1(double t) const;
  // int_s^t g^2(u) du, closed form.
  double int_g2(double s, double t) const;
  // int_0^t exp(2 int_0^s f) g^2(s) ds == c0(t)^2 c1(t); expm1-based for VP.
  double c0sq_c1(double t) const;
  // B(t) = int_0^t beta for VP families; throws for VE.
  double big_b(double t) const;
  // Inverse of B on [0, inf); throws for VE.
  double big_b_inv(double y) const;
  // Exponential-integrator step weight int_{u0}^{u1} exp(int_{u0}^{u} f) g^2(u) du
  // in forward time, closed form per family. Requires u0 <= u1.
  double step_weight(double u0, double u1) const;

  // Quadrature counterparts of the closed forms, for cross-checking.
  double int_f_quad(double s, double t, const QuadratureSettings& = {}) const;
  double c1_quad(double t, const QuadratureSettings& = {}) const;
  double int_g2_quad(double s, double t, const QuadratureSettings& = {}) const;
  double big_b_quad(double t, const QuadratureSettings& = {}) const;
  double step_weight_quad(double u0, double u1, const QuadratureSettings& = {}) const;

 private:
  Schedule(ScheduleFamily fam, double a, double b, double c);
  void validate(double t_max) const;

  ScheduleFamily family_;
  double a_ = 0.0;  // family parameters; meaning depends on the family
  double b_ = 0.0;
  double c_ = 0.0;
};

}  // namespace flowbound
