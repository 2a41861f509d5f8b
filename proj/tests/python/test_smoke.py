"""End-to-end smoke tests for the python bindings."""

import math

import numpy as np
import pytest

import flowbound as fb


def test_schedule_round_trip():
    s = fb.Schedule.vp_linear(0.5, 0.2)
    assert s.family == "vp_linear"
    assert s.params == [0.5, 0.2]
    again = fb.Schedule.from_name(s.family, s.params)
    assert again.c1(1.7) == s.c1(1.7)
    assert s.int_f(0.0, 2.0) == pytest.approx(0.2 * 2.0 / 2 + 0.5 * 4.0 / 4, rel=1e-15)
    # B inverts exactly where it is defined
    y = s.big_b(1.3)
    assert s.big_b_inv(y) == pytest.approx(1.3, abs=1e-12)


def test_schedule_ve_has_no_big_b():
    s = fb.Schedule.ve_exp(1.0, 0.5)
    with pytest.raises(Exception):
        s.big_b(1.0)


def test_mixture_score_matches_log_density_gradient():
    gmm = fb.GaussianMixture([0.4, 0.6], [[-1.0], [2.0]], [[0.5], [1.5]])
    x = [0.3]
    step = 1e-6
    fd = (gmm.log_density([x[0] + step]) - gmm.log_density([x[0] - step])) / (2 * step)
    assert gmm.score(x)[0] == pytest.approx(fd, rel=1e-8)


def test_sampler_shape_and_determinism():
    target = fb.GaussianMixture.standard_normal(2)
    s = fb.Schedule.ou()
    a = fb.run_sampler(s, 4.0, 50, target, n=200, seed=7)
    b = fb.run_sampler(s, 4.0, 50, target, n=200, seed=7)
    c = fb.run_sampler(s, 4.0, 50, target, n=200, seed=8)
    assert a.shape == (200, 2)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    # the run should land near the target: loose sanity window
    assert abs(float(np.mean(a))) < 0.2
    assert 0.5 < float(np.var(a)) < 2.0


def test_reference_flow_close_to_sampler_at_fine_steps():
    target = fb.GaussianMixture.standard_normal(1)
    s = fb.Schedule.ou()
    z0 = np.full((16, 1), 0.9)
    ref = fb.reference_flow(s, 4.0, 400, target, z0, substeps_per_step=20)
    run = fb.run_sampler(s, 4.0, 400, target, n=16, seed=1)
    assert ref.shape == (16, 1)
    assert np.all(np.isfinite(ref))
    assert np.all(np.isfinite(run))


def test_total_bound_parts_sum():
    rep = fb.total_bound(
        fb.Schedule.ou(),
        alpha0=1.0,
        m0=0.0,
        l0=1.0,
        l1=0.0,
        score_err=0.05,
        x0_norm=1.0,
        score_at_origin=0.0,
        T=4.0,
        K=100,
        dim=1,
    )
    for key in ("e0", "e1", "e2", "total", "tau", "big_c", "theta", "omega",
                "h_bar", "regime_split_index", "vacuous", "gamma",
                "log_gamma_tailprod", "nu"):
        assert key in rep
    assert rep["total"] == rep["e0"] + rep["e1"] + rep["e2"]
    assert rep["tau"] == 0.0
    assert rep["big_c"] == 1.0
    assert len(rep["gamma"]) == 100
    assert rep["e2"] > 0.0


def test_concavity_and_tau():
    p = fb.ConcavityProfile(fb.Schedule.ou(), 1.0, 2.25, 1.25)
    t = fb.tau(p)
    assert t == pytest.approx(math.log(1.5), abs=1e-12)
    assert fb.k_t(p, 0.0) == pytest.approx(1.0 - 2.25, rel=1e-12)
    assert fb.k_t(p, 2 * t) > 0.0
    assert fb.big_c(p) > 1.0
    assert fb.xi(fb.Schedule.ou(), 4.0) <= fb.eta(fb.Schedule.ou(), 4.0)


def test_constant_estimators_on_pair():
    pair = fb.GaussianMixture([0.5, 0.5], [[-1.5], [1.5]], [[1.0], [1.0]])
    assert fb.verify_weak_concavity(pair, 1.0, 2.25)["ok"]
    assert fb.estimate_l0(pair) <= 1.25 + 1e-9
    assert fb.estimate_l1(pair, fb.Schedule.ou(), 6.0, 0.01) <= 1.1


def test_plan_dict():
    p = fb.plan(fb.Schedule.ou(), epsilon=0.1, dim=4)
    assert p["family"] == "ou"
    assert p["scale"] == 2.0
    assert p["T"] == pytest.approx(math.log(2.0 / 0.1), rel=1e-15)
    assert p["K"] == math.ceil(p["T"] / p["h_formula"])
    assert p["h"] == p["T"] / p["K"]


def test_w2_estimators():
    exact = fb.w2_1d_exact([0.0, 1.0], [1.1, 0.1])
    assert exact["value"] == pytest.approx(0.1, abs=1e-13)
    assert exact["method"] == "exact_1d"

    g = fb.w2_gaussian([0.0, 0.0], [1.0, 1.0], [3.0, 4.0], [1.0, 1.0])
    assert g["value"] == pytest.approx(5.0, rel=1e-14)

    rng = np.random.default_rng(0)
    a = rng.normal(size=(500, 2))
    b = rng.normal(size=(500, 2)) + 2.0
    sliced = fb.sliced_w2(a, b, n_projections=64, seed=3)
    assert sliced["n_projections"] == 64
    assert sliced["stderr"] > 0.0
    assert 0.0 < sliced["value"] < 4.0

    prod = fb.w2_product_1d(a, b)
    assert prod["method"] == "product_1d"

    small_a = np.array([[0.0], [2.0]])
    small_b = np.array([[2.1], [0.2]])
    lp = fb.lp_oracle(small_a, small_b)
    exact_small = fb.w2_1d_exact([0.0, 2.0], [2.1, 0.2])
    assert lp["value"] == pytest.approx(exact_small["value"], abs=1e-12)


def test_sampler_rejects_bad_init():
    target = fb.GaussianMixture.standard_normal(1)
    with pytest.raises(Exception):
        fb.run_sampler(fb.Schedule.ou(), 4.0, 50, target, n=10, seed=0, init="bogus")
