"""Catastrophic shock model: the unit fails at the first shock from either process.

Failure time is min(X1, Y1), the smaller of the two first interarrival times,
so the survival probability factorizes into the product of the two marginal
survival functions.  Closed-form means exist for Erlang pairs where one shape
is 1 or the shapes match, and for Weibull pairs with a common shape; every
other combination (and the equal-shape Erlang branch as a cross-check) goes
through adaptive quadrature of the survival curve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .distributions import Distribution, Erlang, Exponential, Weibull
from .numerics import QuadraturePolicy, integrate_decaying

__all__ = [
    "CatastrophicModel",
    "survival_probability",
    "fptf_cdf",
    "mean_fptf",
    "mean_fptf_quadrature",
]

# Agreement required between the equal-shape Erlang closed form and the
# quadrature value before the closed form is trusted.
_BRANCH_CHECK_RTOL = 1e-8


@dataclass(frozen=True)
class CatastrophicModel:
    """Two independent shock processes named by their interarrival distributions."""

    proc1: Distribution
    proc2: Distribution

    def __post_init__(self):
        for name in ("proc1", "proc2"):
            if not isinstance(getattr(self, name), Distribution):
                raise ValueError(f"{name} must be a Distribution")


def survival_probability(model: CatastrophicModel, t: float) -> float:
    """P(no failure by t) = P(X1 > t) * P(Y1 > t)."""
    return model.proc1.survival(t) * model.proc2.survival(t)


def fptf_cdf(model: CatastrophicModel, t: float) -> float:
    """CDF of the time to first failure."""
    return 1.0 - survival_probability(model, t)


def mean_fptf_quadrature(model: CatastrophicModel,
                         policy: QuadraturePolicy | None = None) -> float:
    """Mean failure time as the integral of the survival probability."""
    scale = max(model.proc1.mean(), model.proc2.mean())
    return integrate_decaying(lambda t: survival_probability(model, t),
                              policy, initial_scale=scale)


def _as_erlang(dist: Distribution) -> Erlang | None:
    if isinstance(dist, Erlang):
        return dist
    if isinstance(dist, Exponential):
        return Erlang(shape=1, rate=dist.rate)
    return None


def _erlang_single_shape_mean(m1: int, rate1: float, rate2: float) -> float:
    # sum_{l < m1} rate1^l / (rate1+rate2)^(l+1), by term recurrence
    lam = rate1 + rate2
    term = 1.0 / lam
    acc = term
    for _ in range(1, m1):
        term *= rate1 / lam
        acc += term
    return acc


def _erlang_equal_shape_mean(m: int, rate1: float, rate2: float) -> float:
    # Expand the product of the two truncated exponential series: the inner
    # index is confined to max(0, n-m+1) <= l <= min(n, m-1), each term
    # weighted by a single binomial coefficient.
    lam = rate1 + rate2
    acc = 0.0
    for n in range(0, 2 * (m - 1) + 1):
        for l in range(max(0, n - m + 1), min(n, m - 1) + 1):
            acc += math.comb(n, l) * rate1 ** (n - l) * rate2 ** l / lam ** (n + 1)
    return acc


def mean_fptf(model: CatastrophicModel,
              policy: QuadraturePolicy | None = None) -> float:
    """Mean time to first failure.

    Closed forms are used where available: Erlang pairs with one shape equal
    to 1, Erlang pairs with matching shapes (validated against quadrature and
    replaced by it on disagreement), and Weibull pairs with a common shape.
    All remaining combinations integrate the survival curve.
    """
    e1, e2 = _as_erlang(model.proc1), _as_erlang(model.proc2)
    if e1 is not None and e2 is not None:
        if e2.shape == 1:
            return _erlang_single_shape_mean(e1.shape, e1.rate, e2.rate)
        if e1.shape == 1:
            return _erlang_single_shape_mean(e2.shape, e2.rate, e1.rate)
        if e1.shape == e2.shape:
            closed = _erlang_equal_shape_mean(e1.shape, e1.rate, e2.rate)
            reference = mean_fptf_quadrature(model, policy)
            if abs(closed - reference) <= _BRANCH_CHECK_RTOL * abs(reference):
                return closed
            return reference
        return mean_fptf_quadrature(model, policy)

    if isinstance(model.proc1, Weibull) and isinstance(model.proc2, Weibull):
        if model.proc1.shape == model.proc2.shape:
            alpha = model.proc1.shape
            pooled = (model.proc1.scale ** -alpha + model.proc2.scale ** -alpha)
            return pooled ** (-1.0 / alpha) * math.gamma(1.0 + 1.0 / alpha)

    return mean_fptf_quadrature(model, policy)
