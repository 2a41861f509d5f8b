#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "flowbound/hyperparams.hpp"

using flowbound::Plan;
using flowbound::plan;
using flowbound::Schedule;

TEST_CASE("frozen unit-rate plan") {
  const Plan p = plan(Schedule::vp_const(1.0), 0.1, 4);
  CHECK(p.T == doctest::Approx(2.9957322735539909).epsilon(1e-15));
  CHECK(p.h_formula == doctest::Approx(0.016690410034766703).epsilon(1e-15));
  CHECK(p.K == 180);
  CHECK(p.h == doctest::Approx(p.T / 180.0).epsilon(1e-16));
  CHECK(p.score_budget == doctest::Approx(0.033380820069533405).epsilon(1e-15));
  CHECK(p.scale == 2.0);
  CHECK_FALSE(p.used_x0_norm);
}

TEST_CASE("family formulas") {
  const double eps = 0.05;
  const int d = 3;
  const double scale = std::sqrt(3.0);
  const double lg = std::log(scale / eps);

  SUBCASE("exponential-growth family") {
    const Plan p = plan(Schedule::ve_exp(1.0, 1.0), eps, d);
    CHECK(p.T == doctest::Approx(lg).epsilon(1e-15));
    CHECK(p.h_formula ==
          doctest::Approx(eps * eps * eps / (scale * scale * scale)).epsilon(1e-15));
    CHECK(p.score_budget == doctest::Approx(eps * eps / scale).epsilon(1e-15));
  }
  SUBCASE("polynomial-growth family") {
    const Plan p = plan(Schedule::ve_poly(1.0, 0.5, 2.0), eps, d);
    CHECK(p.T == doctest::Approx(std::pow(scale * scale / (eps * eps), 0.2))
                     .epsilon(1e-15));
    CHECK(p.h_formula ==
          doctest::Approx(eps * eps * eps / (scale * scale * scale)).epsilon(1e-15));
  }
  SUBCASE("unit-rate and constant-rate families agree") {
    const Plan a = plan(Schedule::ou(), eps, d);
    const Plan b = plan(Schedule::vp_const(2.0), eps, d);
    CHECK(a.T == b.T);
    CHECK(a.h_formula == b.h_formula);
    CHECK(a.K == b.K);
    CHECK(a.T == doctest::Approx(lg).epsilon(1e-15));
    CHECK(a.h_formula == doctest::Approx(eps / (scale * lg)).epsilon(1e-15));
    CHECK(a.score_budget == doctest::Approx(eps / lg).epsilon(1e-15));
  }
  SUBCASE("linear-rate family shortens the horizon") {
    const Plan p = plan(Schedule::vp_linear(1.0, 0.5), eps, d);
    CHECK(p.T == doctest::Approx(std::sqrt(lg)).epsilon(1e-15));
    CHECK(p.h_formula == doctest::Approx(eps / (scale * lg)).epsilon(1e-15));
  }
  SUBCASE("polynomial-rate family") {
    const Plan p = plan(Schedule::vp_poly(1.0, 0.5, 2.0), eps, d);
    CHECK(p.T == doctest::Approx(std::pow(lg, 1.0 / 3.0)).epsilon(1e-15));
  }
}

TEST_CASE("step count is the rounded horizon split") {
  for (double eps : {0.3, 0.1, 0.05}) {
    for (int d : {1, 2, 8}) {
      const Plan p = plan(Schedule::ou(), eps, d);
      CHECK(p.K == static_cast<long>(std::ceil(p.T / p.h_formula)));
      CHECK(p.h == p.T / static_cast<double>(p.K));
      CHECK(p.h <= p.h_formula * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("norm override replaces the dimension scale") {
  const Plan p = plan(Schedule::ou(), 0.1, 4, 1.0, 5.0);
  CHECK(p.used_x0_norm);
  CHECK(p.scale == 5.0);
  CHECK(p.T == doctest::Approx(std::log(50.0)).epsilon(1e-15));
}

TEST_CASE("calibration constant rescales the target accuracy") {
  // doubling the constant with doubled epsilon leaves the effective target,
  // and hence the geometry, unchanged
  const Plan a = plan(Schedule::ou(), 0.1, 4, 1.0);
  const Plan b = plan(Schedule::ou(), 0.2, 4, 2.0);
  CHECK(a.T == b.T);
  CHECK(a.h_formula == b.h_formula);
  CHECK(a.K == b.K);
  CHECK(a.score_budget == b.score_budget);
  CHECK(b.epsilon == 0.2);
  CHECK(b.constant_c == 2.0);
}

TEST_CASE("plan input validation") {
  const Schedule ou = Schedule::ou();
  CHECK_THROWS_AS(plan(ou, 0.0, 2), std::invalid_argument);
  CHECK_THROWS_AS(plan(ou, -0.1, 2), std::invalid_argument);
  CHECK_THROWS_AS(plan(ou, 0.1, 0), std::invalid_argument);
  CHECK_THROWS_AS(plan(ou, 0.1, 2, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(plan(ou, 0.1, 2, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(plan(ou, 0.1, 2, 1.0, -0.5), std::invalid_argument);
  // effective target must stay below the scale
  CHECK_THROWS_AS(plan(ou, 3.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(plan(ou, 0.5, 1, 0.2), std::invalid_argument);
}

TEST_CASE("step size comparison for the polynomial-rate family") {
  const auto cmp = flowbound::step_size_comparison(1.0, 2.0, 4);
  CHECK(cmp.ode_h == doctest::Approx(1.0 / 8.0).epsilon(1e-15));
  CHECK(cmp.sde_h == doctest::Approx(std::exp(-4.0) / 2.0).epsilon(1e-15));
  // the deterministic flow tolerates polynomially small steps where the
  // stochastic sampler needs exponentially small ones
  CHECK(cmp.ode_h > cmp.sde_h);
  CHECK_THROWS_AS(flowbound::step_size_comparison(1.0, 0.0, 4),
                  std::invalid_argument);
  CHECK_THROWS_AS(flowbound::step_size_comparison(-1.0, 2.0, 4),
                  std::invalid_argument);
  CHECK_THROWS_AS(flowbound::step_size_comparison(1.0, 2.0, 0),
                  std::invalid_argument);
}

TEST_CASE("certification evaluates the bound at the planned point") {
  flowbound::TargetConstants c;
  c.alpha0 = 1.0;
  c.m0 = 0.0;
  c.l0 = 1.0;
  c.l1 = 0.0;
  c.score_err = 0.0;
  c.x0_norm = std::sqrt(2.0);
  c.score_at_origin = 0.0;
  const Plan p = plan(Schedule::ou(), 0.5, 2);
  const flowbound::BoundReport rep = flowbound::certify(p, Schedule::ou(), c, 2);
  CHECK(std::isfinite(rep.total));
  CHECK(rep.total > 0.0);
  CHECK(rep.e2 > 0.0);  // the score budget enters as score_err
}

TEST_CASE("constant calibration reaches the target") {
  const auto res = flowbound::calibrate_constant(0.5, 2, 4000, 1);
  CHECK(res.epsilon == 0.5);
  CHECK(res.constant_c >= 1.0);
  CHECK(res.measured_w2 <= 0.5);
  CHECK(res.ratio <= 1.0);
  CHECK(res.evaluations >= 1);
  CHECK_THROWS_AS(flowbound::calibrate_constant(0.5, 2, 1, 1),
                  std::invalid_argument);
}
