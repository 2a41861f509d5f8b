"""Probability-flow sampling with a certified 2-Wasserstein error bound.

The heavy lifting lives in the compiled extension; this package re-exports
its public surface.
"""

from flowbound._core import (
    ConcavityProfile,
    GaussianMixture,
    Schedule,
    alpha_t,
    big_c,
    estimate_l0,
    estimate_l1,
    eta,
    k_t,
    lipschitz_t,
    lp_oracle,
    m_t,
    plan,
    reference_flow,
    run_sampler,
    sliced_w2,
    tau,
    total_bound,
    verify_weak_concavity,
    w2_1d_exact,
    w2_gaussian,
    w2_product_1d,
    xi,
)

__all__ = [
    "ConcavityProfile",
    "GaussianMixture",
    "Schedule",
    "alpha_t",
    "big_c",
    "estimate_l0",
    "estimate_l1",
    "eta",
    "k_t",
    "lipschitz_t",
    "lp_oracle",
    "m_t",
    "plan",
    "reference_flow",
    "run_sampler",
    "sliced_w2",
    "tau",
    "total_bound",
    "verify_weak_concavity",
    "w2_1d_exact",
    "w2_gaussian",
    "w2_product_1d",
    "xi",
]
