#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "flowbound/common.hpp"
#include "flowbound/metrics.hpp"

using flowbound::Matrix;
using flowbound::Rng;
using flowbound::W2Estimate;

namespace {

Matrix column(const std::vector<double>& v) {
  Matrix m(static_cast<long>(v.size()), 1);
  for (size_t i = 0; i < v.size(); ++i) m.at(static_cast<long>(i), 0) = v[i];
  return m;
}

Matrix random_matrix(long n, int d, Rng& rng, double shift = 0.0) {
  Matrix m(n, d);
  for (long i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) m.at(i, j) = rng.normal() + shift;
  return m;
}

}  // namespace

TEST_CASE("exact 1d distance on hand-computed pairs") {
  // sorted coupling pairs 0-0.1 and 1-1.1: mean squared displacement 0.01
  const std::vector<double> a{0.0, 1.0};
  const std::vector<double> b{1.1, 0.1};
  const W2Estimate est = flowbound::w2_1d_exact(a, b);
  CHECK(est.value == doctest::Approx(0.1).epsilon(1e-13));
  CHECK(est.n == 2);

  // shifting a sample by c moves the distance to exactly |c|
  const std::vector<double> c{-1.0, 0.5, 2.0, 7.0};
  std::vector<double> shifted(c);
  for (double& x : shifted) x += 3.0;
  CHECK(flowbound::w2_1d_exact(c, shifted).value ==
        doctest::Approx(3.0).epsilon(1e-13));
}

TEST_CASE("w2 axioms on empirical samples") {
  Rng rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> a(16), b(16);
    for (auto& x : a) x = rng.normal();
    for (auto& x : b) x = 2.0 * rng.normal() + 0.5;
    CHECK(flowbound::w2_1d_exact(a, a).value == 0.0);
    CHECK(flowbound::w2_1d_exact(a, b).value ==
          doctest::Approx(flowbound::w2_1d_exact(b, a).value).epsilon(1e-14));
    CHECK(flowbound::w2_1d_exact(a, b).value >= 0.0);
  }
}

TEST_CASE("triangle inequality over random triples") {
  Rng rng(7);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> a(12), b(12), c(12);
    for (auto& x : a) x = rng.normal();
    for (auto& x : b) x = 1.5 * rng.normal() - 1.0;
    for (auto& x : c) x = 0.5 * rng.normal() + 2.0;
    const double ab = flowbound::w2_1d_exact(a, b).value;
    const double bc = flowbound::w2_1d_exact(b, c).value;
    const double ac = flowbound::w2_1d_exact(a, c).value;
    CHECK(ac <= ab + bc + 1e-10);
  }
}

TEST_CASE("mismatched sizes are rejected") {
  const std::vector<double> a{0.0, 1.0, 2.0};
  const std::vector<double> b{0.0, 1.0};
  CHECK_THROWS_AS(flowbound::w2_1d_exact(a, b), std::invalid_argument);
  Matrix ma(3, 2), mb(2, 2), mc(3, 3);
  CHECK_THROWS_AS(flowbound::w2_product_1d(ma, mb), std::invalid_argument);
  CHECK_THROWS_AS(flowbound::w2_product_1d(ma, mc), std::invalid_argument);
  CHECK_THROWS_AS(flowbound::sliced_w2(ma, mb), std::invalid_argument);
}

TEST_CASE("gaussian closed form") {
  const std::vector<double> mu1{0.0, 0.0}, var1{1.0, 4.0};
  const std::vector<double> mu2{3.0, 4.0}, var2{1.0, 1.0};
  // ||mu1-mu2||^2 = 25, sigma terms (1-1)^2 + (2-1)^2 = 1
  CHECK(flowbound::w2_gaussian(mu1, var1, mu2, var2).value ==
        doctest::Approx(std::sqrt(26.0)).epsilon(1e-14));
  CHECK(flowbound::w2_gaussian(mu1, var1, mu1, var1).value == 0.0);
  const std::vector<double> short_mu{0.0};
  CHECK_THROWS_AS(flowbound::w2_gaussian(short_mu, var1, mu2, var2),
                  std::invalid_argument);
}

TEST_CASE("assignment oracle agrees with the sorted coupling in 1d") {
  Rng rng(11);
  for (int rep = 0; rep < 50; ++rep) {
    const long n = 2 + static_cast<long>(rng.uniform() * 6.0);  // 2..8
    std::vector<double> a(n), b(n);
    for (auto& x : a) x = 3.0 * rng.uniform() - 1.0;
    for (auto& x : b) x = 4.0 * rng.uniform();
    const double oracle = flowbound::lp_oracle(column(a), column(b)).value;
    const double sorted = flowbound::w2_1d_exact(a, b).value;
    CHECK(oracle == doctest::Approx(sorted).epsilon(1e-10));
  }
}

TEST_CASE("assignment oracle rejects large inputs") {
  Matrix a(9, 1), b(9, 1);
  CHECK_THROWS_AS(flowbound::lp_oracle(a, b), std::invalid_argument);
  Matrix e(0, 1);
  CHECK_THROWS_AS(flowbound::lp_oracle(e, e), std::invalid_argument);
}

TEST_CASE("product combination") {
  Rng rng(13);
  std::vector<double> a(32), b(32);
  for (auto& x : a) x = rng.normal();
  for (auto& x : b) x = rng.normal() + 1.0;
  // in 1d the product estimator is the exact sorted coupling
  CHECK(flowbound::w2_product_1d(column(a), column(b)).value ==
        doctest::Approx(flowbound::w2_1d_exact(a, b).value).epsilon(1e-14));

  // in 2d it combines per-axis distances as sqrt(w_x^2 + w_y^2)
  Matrix ma(32, 2), mb(32, 2);
  std::vector<double> ax(32), ay(32), bx(32), by(32);
  for (long i = 0; i < 32; ++i) {
    ax[i] = rng.normal();
    ay[i] = 2.0 * rng.normal();
    bx[i] = rng.normal() - 0.5;
    by[i] = rng.normal();
    ma.at(i, 0) = ax[i];
    ma.at(i, 1) = ay[i];
    mb.at(i, 0) = bx[i];
    mb.at(i, 1) = by[i];
  }
  const double wx = flowbound::w2_1d_exact(ax, bx).value;
  const double wy = flowbound::w2_1d_exact(ay, by).value;
  CHECK(flowbound::w2_product_1d(ma, mb).value ==
        doctest::Approx(std::sqrt(wx * wx + wy * wy)).epsilon(1e-13));
}

TEST_CASE("sliced estimate is deterministic in its seed") {
  Rng rng(17);
  const Matrix a = random_matrix(400, 3, rng);
  const Matrix b = random_matrix(400, 3, rng, 0.7);
  const W2Estimate e1 = flowbound::sliced_w2(a, b, 64, 42);
  const W2Estimate e2 = flowbound::sliced_w2(a, b, 64, 42);
  const W2Estimate e3 = flowbound::sliced_w2(a, b, 64, 43);
  CHECK(e1.value == e2.value);
  CHECK(e1.stderr_ == e2.stderr_);
  CHECK(e1.value != e3.value);
  CHECK(e1.stderr_ >= 0.0);
  CHECK(e1.n_projections == 64);
}

TEST_CASE("sliced estimate sits at or below the exact distance") {
  // a 1d problem embedded in 2d: projections can only contract it
  Rng rng(19);
  Matrix a(300, 2), b(300, 2);
  std::vector<double> a1(300), b1(300);
  for (long i = 0; i < 300; ++i) {
    a1[i] = rng.normal();
    b1[i] = rng.normal() + 2.0;
    a.at(i, 0) = a1[i];
    a.at(i, 1) = 0.0;
    b.at(i, 0) = b1[i];
    b.at(i, 1) = 0.0;
  }
  const double exact = flowbound::w2_1d_exact(a1, b1).value;
  const W2Estimate sliced = flowbound::sliced_w2(a, b, 128, 3);
  CHECK(sliced.value <= exact * (1.0 + 1e-12));
  CHECK(sliced.value > 0.0);
}

TEST_CASE("method names round trip") {
  CHECK(flowbound::w2_method_name(flowbound::W2Method::Exact1D) == "exact_1d");
  CHECK(flowbound::w2_method_name(flowbound::W2Method::Sliced) == "sliced");
  CHECK(flowbound::w2_method_name(flowbound::W2Method::Product1D) == "product_1d");
}
