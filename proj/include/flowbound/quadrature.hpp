#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

namespace flowbound {

struct QuadratureSettings {
  double rel_tol = 1e-13;
  double abs_tol = 1e-15;
  int max_subdivisions = 2000;
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int subdivisions = 0;
  bool converged = true;
};

namespace detail {

// QUADPACK dqk15 abscissae/weights (7-point Gauss, 15-point Kronrod).
inline constexpr double kGk15X[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kGk15WK[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kGk15WG[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
inline void gk15(F& fn, double a, double b, double& value, double& error) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double f_mid = fn(mid);
  double f_lo[7], f_hi[7];
  double kronrod = kGk15WK[7] * f_mid;
  double gauss = kGk15WG[3] * f_mid;
  double resabs = kGk15WK[7] * std::fabs(f_mid);
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kGk15X[i];
    f_lo[i] = fn(mid - dx);
    f_hi[i] = fn(mid + dx);
    const double fsum = f_lo[i] + f_hi[i];
    kronrod += kGk15WK[i] * fsum;
    resabs += kGk15WK[i] * (std::fabs(f_lo[i]) + std::fabs(f_hi[i]));
    if (i % 2 == 1) gauss += kGk15WG[i / 2] * fsum;
  }
  // QUADPACK dqk15 error estimate: sharpen |K15 - G7| against the integrand's
  // own variation (resasc), never against the integral value; a smooth-looking
  // gap across a kink then still reports an honest error. Floor at the
  // roundoff level of int |f|.
  const double mean = kronrod * 0.5;
  double resasc = kGk15WK[7] * std::fabs(f_mid - mean);
  for (int i = 0; i < 7; ++i)
    resasc += kGk15WK[i] *
              (std::fabs(f_lo[i] - mean) + std::fabs(f_hi[i] - mean));
  value = kronrod * half;
  resabs *= std::fabs(half);
  resasc *= std::fabs(half);
  double err = std::fabs((kronrod - gauss) * half);
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  const double eps50 = 50.0 * std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / eps50)
    err = std::max(eps50 * resabs, err);
  error = err;
}

}  // namespace detail

// Adaptive Gauss-Kronrod integration of fn over [a, b]. Splits the interval
// with the largest error estimate until the summed estimate meets
// max(abs_tol, rel_tol * |integral|) or the subdivision budget is exhausted;
// in the latter case the best estimate is returned with converged = false.
template <class F>
QuadratureResult integrate(F&& fn, double a, double b,
                           const QuadratureSettings& settings = {}) {
  QuadratureResult out;
  if (a == b) return out;
  double sign = 1.0;
  if (a > b) {
    std::swap(a, b);
    sign = -1.0;
  }

  struct Interval {
    double a, b, value, error;
  };
  std::vector<Interval> heap;
  auto cmp = [](const Interval& x, const Interval& y) { return x.error < y.error; };

  Interval whole{a, b, 0.0, 0.0};
  detail::gk15(fn, a, b, whole.value, whole.error);
  heap.push_back(whole);

  double total_value = whole.value;
  double total_error = whole.error;
  int splits = 0;
  while (total_error > std::max(settings.abs_tol,
                                settings.rel_tol * std::fabs(total_value))) {
    if (splits >= settings.max_subdivisions) {
      out.converged = false;
      break;
    }
    std::pop_heap(heap.begin(), heap.end(), cmp);
    const Interval worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {  // interval at floating-point floor
      out.converged = false;
      heap.push_back(worst);
      std::push_heap(heap.begin(), heap.end(), cmp);
      break;
    }
    Interval left{worst.a, mid, 0.0, 0.0};
    Interval right{mid, worst.b, 0.0, 0.0};
    detail::gk15(fn, left.a, left.b, left.value, left.error);
    detail::gk15(fn, right.a, right.b, right.value, right.error);
    total_value += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end(), cmp);
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end(), cmp);
    ++splits;
  }

  // Re-sum for a tighter result than the incrementally updated accumulators.
  total_value = 0.0;
  total_error = 0.0;
  for (const Interval& iv : heap) {
    total_value += iv.value;
    total_error += iv.error;
  }
  out.value = sign * total_value;
  out.error_estimate = total_error;
  out.subdivisions = splits;
  return out;
}

}  // namespace flowbound
