// Python bindings for the core operations: schedules, mixture targets,
// concavity profiles, the exponential-integrator sampler, the W2 error bound,
// horizon planning, and W2 estimators.
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <memory>

#include "flowbound/bounds.hpp"
#include "flowbound/concavity.hpp"
#include "flowbound/hyperparams.hpp"
#include "flowbound/metrics.hpp"
#include "flowbound/sampler.hpp"
#include "flowbound/schedule.hpp"
#include "flowbound/target.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
namespace fb = flowbound;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

fb::Matrix to_matrix(const DoubleArray& arr) {
  if (arr.ndim() != 2) throw std::invalid_argument("expected a 2D float array");
  fb::Matrix m(static_cast<long>(arr.shape(0)), static_cast<long>(arr.shape(1)));
  std::memcpy(m.data.data(), arr.data(), sizeof(double) * m.data.size());
  return m;
}

py::array_t<double> from_matrix(const fb::Matrix& m) {
  py::array_t<double> arr({m.rows, m.cols});
  std::memcpy(arr.mutable_data(), m.data.data(), sizeof(double) * m.data.size());
  return arr;
}

std::unique_ptr<fb::ScoreOracle> make_oracle(const fb::GaussianMixture& gmm,
                                             const fb::Schedule& schedule,
                                             double score_eps, uint64_t seed) {
  if (score_eps > 0.0)
    return std::make_unique<fb::PerturbedMixtureScore>(
        gmm, schedule, score_eps, fb::derive_seed(seed, 11));
  return std::make_unique<fb::ExactMixtureScore>(gmm, schedule);
}

fb::TargetConstants make_constants(double alpha0, double m0, double l0, double l1,
                                   double score_err, double x0_norm,
                                   double score_at_origin) {
  fb::TargetConstants c;
  c.alpha0 = alpha0;
  c.m0 = m0;
  c.l0 = l0;
  c.l1 = l1;
  c.score_err = score_err;
  c.x0_norm = x0_norm;
  c.score_at_origin = score_at_origin;
  return c;
}

py::dict report_to_dict(const fb::BoundReport& r) {
  py::dict d;
  d["e0"] = r.e0;
  d["e1"] = r.e1;
  d["e2"] = r.e2;
  d["total"] = r.total;
  d["tau"] = r.tau;
  d["big_c"] = r.big_c;
  d["theta"] = r.theta;
  d["omega"] = r.omega;
  d["h_bar"] = r.h_bar;
  d["regime_split_index"] = r.regime_split_index;
  d["vacuous"] = r.vacuous;
  d["gamma"] = r.gamma;
  d["log_gamma_tailprod"] = r.log_gamma_tailprod;
  d["nu"] = r.nu;
  return d;
}

py::dict estimate_to_dict(const fb::W2Estimate& est) {
  py::dict d;
  d["value"] = est.value;
  d["method"] = fb::w2_method_name(est.method);
  d["stderr"] = est.stderr_;
  d["n_projections"] = est.n_projections;
  d["n"] = est.n;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "probability-flow sampling with a certified 2-Wasserstein error bound";

  py::class_<fb::Schedule>(m, "Schedule")
      .def_static("ou", &fb::Schedule::ou)
      .def_static("ve_exp", &fb::Schedule::ve_exp, "a"_a, "b"_a)
      .def_static("ve_poly", &fb::Schedule::ve_poly, "a"_a, "b"_a, "c"_a)
      .def_static("vp_const", &fb::Schedule::vp_const, "b"_a)
      .def_static("vp_linear", &fb::Schedule::vp_linear, "a"_a, "b"_a)
      .def_static("vp_poly", &fb::Schedule::vp_poly, "a"_a, "b"_a, "rho"_a)
      .def_static("from_name", &fb::Schedule::from_name, "family"_a, "params"_a)
      .def_property_readonly("family", &fb::Schedule::family_name)
      .def_property_readonly("params", &fb::Schedule::params)
      .def("f", &fb::Schedule::f, "t"_a)
      .def("g", &fb::Schedule::g, "t"_a)
      .def("g2", &fb::Schedule::g2, "t"_a)
      .def("int_f", &fb::Schedule::int_f, "s"_a, "t"_a)
      .def("c0", &fb::Schedule::c0, "t"_a)
      .def("c1", &fb::Schedule::c1, "t"_a)
      .def("int_g2", &fb::Schedule::int_g2, "s"_a, "t"_a)
      .def("big_b", &fb::Schedule::big_b, "t"_a)
      .def("big_b_inv", &fb::Schedule::big_b_inv, "y"_a)
      .def("step_weight", &fb::Schedule::step_weight, "u0"_a, "u1"_a)
      .def("__repr__", [](const fb::Schedule& s) {
        std::string out = "Schedule(" + s.family_name();
        for (double p : s.params()) out += ", " + std::to_string(p);
        return out + ")";
      });

  py::class_<fb::GaussianMixture>(m, "GaussianMixture")
      .def(py::init<std::vector<double>, std::vector<std::vector<double>>,
                    std::vector<std::vector<double>>>(),
           "weights"_a, "means"_a, "variances"_a)
      .def_static("standard_normal", &fb::GaussianMixture::standard_normal, "dim"_a)
      .def_property_readonly("dim", &fb::GaussianMixture::dim)
      .def_property_readonly("num_components", &fb::GaussianMixture::num_components)
      .def("log_density",
           [](const fb::GaussianMixture& g, std::vector<double> x) {
             return g.log_density(x);
           },
           "x"_a)
      .def("score",
           [](const fb::GaussianMixture& g, std::vector<double> x) {
             return g.score(std::span<const double>(x));
           },
           "x"_a)
      .def("score_t",
           [](const fb::GaussianMixture& g, const fb::Schedule& s, double t,
              std::vector<double> x) {
             std::vector<double> out(static_cast<size_t>(g.dim()));
             g.score_t(s, t, x, out);
             return out;
           },
           "schedule"_a, "t"_a, "x"_a)
      .def("hessian_log_density",
           [](const fb::GaussianMixture& g, std::vector<double> x) {
             const long d = g.dim();
             fb::Matrix h(d, d);
             g.hessian_log_density(x, h.data);
             return from_matrix(h);
           },
           "x"_a)
      .def("forward_marginal", &fb::GaussianMixture::forward_marginal,
           "schedule"_a, "t"_a)
      .def("sample",
           [](const fb::GaussianMixture& g, long n, uint64_t seed) {
             return from_matrix(g.sample(n, seed));
           },
           "n"_a, "seed"_a = 0)
      .def("x0_l2_norm", &fb::GaussianMixture::x0_l2_norm)
      .def("score_norm_at_origin", &fb::GaussianMixture::score_norm_at_origin);

  py::class_<fb::ConcavityProfile>(m, "ConcavityProfile")
      .def(py::init<fb::Schedule, double, double, double>(), "schedule"_a,
           "alpha0"_a, "m0"_a, "l0"_a)
      .def_readonly("alpha0", &fb::ConcavityProfile::alpha0)
      .def_readonly("m0", &fb::ConcavityProfile::m0)
      .def_readonly("l0", &fb::ConcavityProfile::l0);

  m.def("alpha_t", &fb::alpha_t, "profile"_a, "t"_a);
  m.def("m_t", &fb::m_t, "profile"_a, "t"_a);
  m.def("k_t", &fb::k_t, "profile"_a, "t"_a);
  m.def("tau", &fb::tau, "profile"_a);
  m.def("lipschitz_t", &fb::lipschitz_t, "profile"_a, "t"_a);
  m.def("xi", &fb::xi, "schedule"_a, "T"_a);
  m.def("eta", &fb::eta, "schedule"_a, "T"_a);
  m.def("big_c", &fb::big_c, "profile"_a);

  m.def(
      "estimate_l0",
      [](const fb::GaussianMixture& g) { return fb::estimate_l0(g); },
      "target"_a);
  m.def(
      "estimate_l1",
      [](const fb::GaussianMixture& g, const fb::Schedule& s, double T, double h) {
        return fb::estimate_l1(g, s, T, h);
      },
      "target"_a, "schedule"_a, "T"_a, "h"_a);
  m.def(
      "verify_weak_concavity",
      [](const fb::GaussianMixture& g, double alpha0, double m0) {
        const fb::WeakConcavityCheck check = fb::verify_weak_concavity(g, alpha0, m0);
        py::dict d;
        d["ok"] = check.ok;
        d["x"] = check.x;
        d["y"] = check.y;
        d["lhs"] = check.lhs;
        d["rhs"] = check.rhs;
        return d;
      },
      "target"_a, "alpha0"_a, "m0"_a);

  m.def(
      "run_sampler",
      [](const fb::Schedule& schedule, double T, long K,
         const fb::GaussianMixture& target, long n, uint64_t seed,
         double score_eps, const std::string& init) {
        fb::InitMode mode = fb::InitMode::HatPT;
        if (init == "stationary")
          mode = fb::InitMode::Stationary;
        else if (init != "hatpt")
          throw std::invalid_argument("init must be 'hatpt' or 'stationary'");
        const fb::SamplerConfig config{schedule, T, K, mode, seed};
        const auto oracle = make_oracle(target, schedule, score_eps, seed);
        return from_matrix(fb::run(config, *oracle, n));
      },
      "schedule"_a, "T"_a, "K"_a, "target"_a, "n"_a, "seed"_a = 0,
      "score_eps"_a = 0.0, "init"_a = "hatpt");

  m.def(
      "reference_flow",
      [](const fb::Schedule& schedule, double T, long K,
         const fb::GaussianMixture& target, const DoubleArray& z0,
         int substeps_per_step) {
        const fb::SamplerConfig config{schedule, T, K, fb::InitMode::HatPT, 0};
        const fb::ExactMixtureScore oracle(target, schedule);
        return from_matrix(
            fb::reference_flow(config, oracle, to_matrix(z0), substeps_per_step));
      },
      "schedule"_a, "T"_a, "K"_a, "target"_a, "z0"_a, "substeps_per_step"_a = 100);

  m.def(
      "total_bound",
      [](const fb::Schedule& schedule, double alpha0, double m0, double l0,
         double l1, double score_err, double x0_norm, double score_at_origin,
         double T, long K, int dim) {
        const fb::BoundInputs inputs = fb::make_bound_inputs(
            schedule,
            make_constants(alpha0, m0, l0, l1, score_err, x0_norm, score_at_origin),
            T, K, dim);
        return report_to_dict(fb::total_bound(inputs));
      },
      "schedule"_a, "alpha0"_a, "m0"_a, "l0"_a, "l1"_a, "score_err"_a,
      "x0_norm"_a, "score_at_origin"_a, "T"_a, "K"_a, "dim"_a);

  m.def(
      "plan",
      [](const fb::Schedule& schedule, double epsilon, int dim, double constant_c,
         double x0_norm) {
        const fb::Plan p = fb::plan(schedule, epsilon, dim, constant_c, x0_norm);
        py::dict d;
        d["family"] = p.family;
        d["params"] = p.schedule_params;
        d["epsilon"] = p.epsilon;
        d["dim"] = p.dim;
        d["constant_c"] = p.constant_c;
        d["scale"] = p.scale;
        d["used_x0_norm"] = p.used_x0_norm;
        d["T"] = p.T;
        d["h_formula"] = p.h_formula;
        d["h"] = p.h;
        d["K"] = p.K;
        d["score_budget"] = p.score_budget;
        return d;
      },
      "schedule"_a, "epsilon"_a, "dim"_a, "constant_c"_a = 1.0, "x0_norm"_a = 0.0);

  m.def(
      "w2_1d_exact",
      [](std::vector<double> a, std::vector<double> b) {
        return estimate_to_dict(fb::w2_1d_exact(a, b));
      },
      "a"_a, "b"_a);
  m.def(
      "w2_gaussian",
      [](std::vector<double> mu1, std::vector<double> var1, std::vector<double> mu2,
         std::vector<double> var2) {
        return estimate_to_dict(fb::w2_gaussian(mu1, var1, mu2, var2));
      },
      "mu1"_a, "var1"_a, "mu2"_a, "var2"_a);
  m.def(
      "sliced_w2",
      [](const DoubleArray& a, const DoubleArray& b, int n_projections,
         uint64_t seed) {
        return estimate_to_dict(
            fb::sliced_w2(to_matrix(a), to_matrix(b), n_projections, seed));
      },
      "a"_a, "b"_a, "n_projections"_a = 256, "seed"_a = 0);
  m.def(
      "w2_product_1d",
      [](const DoubleArray& a, const DoubleArray& b) {
        return estimate_to_dict(fb::w2_product_1d(to_matrix(a), to_matrix(b)));
      },
      "a"_a, "b"_a);
  m.def(
      "lp_oracle",
      [](const DoubleArray& a, const DoubleArray& b) {
        return estimate_to_dict(fb::lp_oracle(to_matrix(a), to_matrix(b)));
      },
      "a"_a, "b"_a);
}
