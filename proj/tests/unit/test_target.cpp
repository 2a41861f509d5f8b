#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "flowbound/common.hpp"
#include "flowbound/schedule.hpp"
#include "flowbound/target.hpp"

using flowbound::GaussianMixture;
using flowbound::GridSpec;
using flowbound::Rng;
using flowbound::Schedule;

namespace {

GaussianMixture three_component_1d() {
  return GaussianMixture({0.2, 0.5, 0.3}, {{-2.0}, {2.0}, {5.0}},
                         {{0.64}, {1.0}, {0.09}});
}

// central differences of log density / score as an independent oracle
std::vector<double> fd_score(const GaussianMixture& g,
                             std::span<const double> x, double h) {
  std::vector<double> out(x.size());
  std::vector<double> p(x.begin(), x.end()), m(x.begin(), x.end());
  for (size_t j = 0; j < x.size(); ++j) {
    p[j] = x[j] + h;
    m[j] = x[j] - h;
    out[j] = (g.log_density(p) - g.log_density(m)) / (2.0 * h);
    p[j] = x[j];
    m[j] = x[j];
  }
  return out;
}

}  // namespace

TEST_CASE("constructor validation") {
  CHECK_THROWS_AS(GaussianMixture({0.5, 0.4}, {{0.0}, {1.0}}, {{1.0}, {1.0}}),
                  std::invalid_argument);  // weights do not sum to 1
  CHECK_THROWS_AS(GaussianMixture({1.0}, {{0.0}}, {{0.0}}),
                  std::invalid_argument);  // zero variance
  CHECK_THROWS_AS(GaussianMixture({1.0}, {{0.0}}, {{-1.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      GaussianMixture({0.5, 0.5}, {{0.0}, {0.0, 1.0}}, {{1.0}, {1.0, 1.0}}),
      std::invalid_argument);  // ragged dimensions
}

TEST_CASE("standard normal exact facts") {
  const GaussianMixture g = GaussianMixture::standard_normal(2);
  const std::vector<double> x = {0.3, -1.2};
  CHECK(g.log_density(x) ==
        doctest::Approx(-std::log(2.0 * 3.14159265358979323846) -
                        0.5 * (x[0] * x[0] + x[1] * x[1]))
            .epsilon(1e-14));
  const auto s = g.score(x);
  CHECK(s[0] == doctest::Approx(-x[0]).epsilon(1e-14));
  CHECK(s[1] == doctest::Approx(-x[1]).epsilon(1e-14));
  std::vector<double> hess(4);
  g.hessian_log_density(x, hess);
  CHECK(hess[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(hess[3] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(hess[1] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(g.x0_l2_norm() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(g.score_norm_at_origin() == 0.0);
}

TEST_CASE("score matches finite differences") {
  const GaussianMixture g = three_component_1d();
  Rng rng(3);
  for (int i = 0; i < 25; ++i) {
    const std::vector<double> x = {-4.0 + 11.0 * rng.uniform()};
    const auto s = g.score(x);
    const auto fd = fd_score(g, x, 1e-5);
    CHECK(s[0] == doctest::Approx(fd[0]).epsilon(1e-6));
  }
}

TEST_CASE("hessian matches finite differences of the score") {
  const GaussianMixture g =
      GaussianMixture({0.4, 0.6}, {{-1.0, 0.5}, {1.5, -0.5}},
                      {{0.8, 1.2}, {1.0, 0.5}});
  Rng rng(5);
  for (int i = 0; i < 15; ++i) {
    std::vector<double> x = {-3.0 + 6.0 * rng.uniform(),
                             -3.0 + 6.0 * rng.uniform()};
    std::vector<double> hess(4);
    g.hessian_log_density(x, hess);
    const double h = 1e-5;
    for (int j = 0; j < 2; ++j) {
      std::vector<double> xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      const auto sp = g.score(xp);
      const auto sm = g.score(xm);
      for (int r = 0; r < 2; ++r) {
        const double fd = (sp[r] - sm[r]) / (2.0 * h);
        CHECK(hess[r * 2 + j] == doctest::Approx(fd).epsilon(2e-5));
      }
    }
  }
}

TEST_CASE("forward marginal shifts means and mixes in schedule noise") {
  const GaussianMixture g({1.0}, {{2.0}}, {{1.0}});
  const GaussianMixture m = g.forward_marginal(Schedule::ou(), 1.0);
  CHECK(m.mean(0, 0) == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-14));
  // unit variance is stationary for the unit-rate process
  CHECK(m.variance(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
  // score of the marginal equals score_t
  const std::vector<double> x = {0.7};
  std::vector<double> a(1), b(1);
  m.score(x, a);
  g.score_t(Schedule::ou(), 1.0, x, b);
  CHECK(a[0] == doctest::Approx(b[0]).epsilon(1e-14));
}

TEST_CASE("x0 norm of the three component benchmark") {
  CHECK(three_component_1d().x0_l2_norm() ==
        doctest::Approx(std::sqrt(10.955)).epsilon(1e-13));
}

TEST_CASE("estimate_l0 recovers the gaussian curvature exactly") {
  for (double var : {0.25, 1.0, 4.0}) {
    const GaussianMixture g({1.0}, {{0.0}}, {{var}});
    CHECK(flowbound::estimate_l0(g) == doctest::Approx(1.0 / var).epsilon(1e-12));
  }
}

TEST_CASE("weak concavity verifier accepts valid constants") {
  const GaussianMixture g = GaussianMixture::standard_normal(1);
  const auto ok = flowbound::verify_weak_concavity(g, 1.0, 0.0);
  CHECK(ok.ok);
  // symmetric pair at distance 3: exact constants alpha0=1, m0=a^2
  const GaussianMixture pair({0.5, 0.5}, {{-1.5}, {1.5}}, {{1.0}, {1.0}});
  CHECK(flowbound::verify_weak_concavity(pair, 1.0, 2.25).ok);
}

TEST_CASE("weak concavity verifier finds violations") {
  const GaussianMixture g = GaussianMixture::standard_normal(1);
  // claims stronger convexity than the target has
  const auto bad = flowbound::verify_weak_concavity(g, 2.0, 0.0);
  CHECK_FALSE(bad.ok);
  CHECK(bad.lhs > bad.rhs);
  CHECK(bad.x.size() == 1);
  const GaussianMixture pair({0.5, 0.5}, {{-1.5}, {1.5}}, {{1.0}, {1.0}});
  CHECK_FALSE(flowbound::verify_weak_concavity(pair, 1.0, 1.5).ok);
}

TEST_CASE("perturbed score shifts by exactly eps") {
  const GaussianMixture g =
      GaussianMixture({0.5, 0.5}, {{-1.0, 0.0}, {1.0, 0.0}},
                      {{1.0, 1.0}, {1.0, 1.0}});
  const Schedule s = Schedule::ou();
  Rng rng(9);
  for (int i = 0; i < 10; ++i) {
    const std::vector<double> x = {2.0 * rng.normal(), 2.0 * rng.normal()};
    const double t = 0.1 + 2.0 * rng.uniform();
    std::vector<double> exact(2), pert(2), pert2(2);
    g.score_t(s, t, x, exact);
    flowbound::perturbed_score(g, s, t, x, 0.05, 1234, pert);
    flowbound::perturbed_score(g, s, t, x, 0.05, 1234, pert2);
    const double dx = pert[0] - exact[0], dy = pert[1] - exact[1];
    CHECK(std::sqrt(dx * dx + dy * dy) == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(pert[0] == pert2[0]);  // deterministic in (x, t, seed)
    CHECK(pert[1] == pert2[1]);
  }
}

TEST_CASE("sampling is deterministic and matches moments") {
  const GaussianMixture g = three_component_1d();
  const auto a = g.sample(20000, 42);
  const auto b = g.sample(20000, 42);
  CHECK(a.rows == 20000);
  CHECK(a.cols == 1);
  CHECK(a.data == b.data);
  double mean = 0.0;
  for (long i = 0; i < a.rows; ++i) mean += a.at(i, 0);
  mean /= static_cast<double>(a.rows);
  const double true_mean = 0.2 * -2.0 + 0.5 * 2.0 + 0.3 * 5.0;
  CHECK(mean == doctest::Approx(true_mean).epsilon(0.02));
  double sq = 0.0;
  for (long i = 0; i < a.rows; ++i) sq += a.at(i, 0) * a.at(i, 0);
  CHECK(std::sqrt(sq / static_cast<double>(a.rows)) ==
        doctest::Approx(g.x0_l2_norm()).epsilon(0.02));
}

TEST_CASE("product form detection") {
  using flowbound::is_product_form;
  CHECK(is_product_form(GaussianMixture::standard_normal(3)));
  CHECK(is_product_form(three_component_1d()));
  const GaussianMixture one_axis({0.5, 0.5}, {{-1.5, 0.0}, {1.5, 0.0}},
                                 {{1.0, 1.0}, {1.0, 1.0}});
  CHECK(is_product_form(one_axis));
  const GaussianMixture two_axes({0.5, 0.5}, {{-1.5, -1.0}, {1.5, 1.0}},
                                 {{1.0, 1.0}, {1.0, 1.0}});
  CHECK_FALSE(is_product_form(two_axes));
  const GaussianMixture var_axis({0.5, 0.5}, {{-1.5, 0.0}, {1.5, 0.0}},
                                 {{1.0, 1.0}, {1.0, 2.0}});
  CHECK_FALSE(is_product_form(var_axis));
}

TEST_CASE("bounding box covers all components") {
  const GaussianMixture g = three_component_1d();
  std::vector<double> lo, hi;
  g.bounding_box(6.0, lo, hi);
  CHECK(lo[0] == doctest::Approx(-6.8).epsilon(1e-12));
  CHECK(hi[0] == doctest::Approx(8.0).epsilon(1e-12));
}

TEST_CASE("estimate_l1 is finite and scale aware") {
  const GaussianMixture g = three_component_1d();
  const double l1 = flowbound::estimate_l1(g, Schedule::ou(), 6.0, 0.01,
                                           GridSpec{101, 6.0});
  CHECK(std::isfinite(l1));
  CHECK(l1 > 0.0);
}
