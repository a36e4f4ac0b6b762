"""Cumulative damage model: the unit fails when total damage exceeds a threshold.

Two marked shock streams contribute additive damage.  With Poisson arrivals
and Erlang (or exponential) magnitudes, the damage CDF is a double series of
two-Erlang-sum CDFs weighted by Poisson probabilities; with general renewal
arrivals the weights become k-fold-convolution increments of the interarrival
CDF.  Both series are truncated with a rigorous bound: each bracketed CDF
factor lies in [0, 1], so the discarded weight mass bounds the absolute error.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .distributions import Distribution, Erlang, Exponential, erlang_survival
from .errors import NonConvergedError, UnsupportedConvolutionError
from .gamma_convolution import _cdf_value
from .numerics import QuadraturePolicy, integrate_decaying

__all__ = [
    "TruncationPolicy",
    "CumulativeModel",
    "GeneralCumulativeModel",
    "damage_cdf",
    "damage_mean",
    "model2_fptf_cdf",
    "model2_fptf_mean",
    "general_damage_cdf",
    "general_damage_mean",
    "compound_poisson_exponential_cdf",
]


@dataclass(frozen=True)
class TruncationPolicy:
    """Contract for cutting the infinite damage series.

    Truncation indices are chosen per axis so the discarded weight mass is
    below tail_epsilon/2 on each axis, giving an absolute series error below
    tail_epsilon.  Hitting max_terms_per_axis first raises NonConvergedError.
    """

    tail_epsilon: float = 1e-10
    max_terms_per_axis: int = 10_000

    def __post_init__(self):
        if not 0.0 < self.tail_epsilon <= 1e-3:
            raise ValueError(f"tail_epsilon must be in (0, 1e-3], got {self.tail_epsilon}")
        if self.max_terms_per_axis < 1:
            raise ValueError(f"max_terms_per_axis must be positive, got {self.max_terms_per_axis}")


def _mark_params(dist: Distribution) -> tuple[int, float]:
    """(shape, rate) of an Erlang-family magnitude distribution."""
    if isinstance(dist, Erlang):
        return dist.shape, dist.rate
    if isinstance(dist, Exponential):
        return 1, dist.rate
    raise UnsupportedConvolutionError(
        f"magnitudes must be Erlang or Exponential, got {type(dist).__name__}")


@dataclass(frozen=True)
class CumulativeModel:
    """Poisson shock arrivals (rate1, rate2) with additive Erlang-family magnitudes."""

    rate1: float
    rate2: float
    mag1: Distribution
    mag2: Distribution
    threshold: float

    def __post_init__(self):
        if not self.rate1 > 0:
            raise ValueError(f"rate1 must be positive, got {self.rate1}")
        if not self.rate2 > 0:
            raise ValueError(f"rate2 must be positive, got {self.rate2}")
        if not self.threshold > 0:
            raise ValueError(f"threshold must be positive, got {self.threshold}")
        _mark_params(self.mag1)
        _mark_params(self.mag2)


@dataclass(frozen=True)
class GeneralCumulativeModel:
    """Renewal shock arrivals with additive magnitudes.

    The analytic evaluators need closed-form k-fold convolutions throughout
    and reject Weibull members at call time; the simulator has no such
    restriction, so construction accepts any sampleable distributions.
    """

    inter1: Distribution
    inter2: Distribution
    mag1: Distribution
    mag2: Distribution
    threshold: float

    def __post_init__(self):
        for name in ("inter1", "inter2", "mag1", "mag2"):
            if not isinstance(getattr(self, name), Distribution):
                raise ValueError(f"{name} must be a Distribution")
        if not self.threshold > 0:
            raise ValueError(f"threshold must be positive, got {self.threshold}")


def _check_nonneg(value: float, name: str) -> None:
    if not value >= 0.0:
        raise ValueError(f"{name} must be nonnegative, got {value}")


def _poisson_weights(mean: float, tail_half: float, max_terms: int) -> np.ndarray:
    """Poisson pmf through the smallest index with cumulative mass >= 1 - tail_half."""
    p = math.exp(-mean)
    cum = p
    out = [p]
    k = 0
    while cum < 1.0 - tail_half:
        k += 1
        if k >= max_terms:
            raise NonConvergedError(
                f"Poisson tail bound not met within {max_terms} terms (mean {mean})")
        p *= mean / k
        out.append(p)
        cum += p
    return np.asarray(out)


def _renewal_weights(inter: Distribution, t: float, tail_half: float,
                     max_terms: int) -> np.ndarray:
    """Increments F^(k)(t) - F^(k+1)(t); the telescoped remainder F^(K+1)(t) < tail_half."""
    out = []
    f_prev = 1.0
    k = 0
    while True:
        f_next = inter.kfold_cdf(k + 1, t)
        out.append(f_prev - f_next)
        if f_next < tail_half:
            return np.asarray(out)
        k += 1
        if k >= max_terms:
            raise NonConvergedError(
                f"renewal tail bound not met within {max_terms} terms (t={t})")
        f_prev = f_next


class _ConvolutionTable:
    """Lazily grown table of two-Erlang-sum CDF values at a fixed damage level.

    Cell (k1, k2) holds the CDF of Gamma(m1*k1, mu1) + Gamma(m2*k2, mu2) at x.
    Growth is guarded by a lock; readers receive plain ndarray slices.
    """

    def __init__(self, m1: int, mu1: float, m2: int, mu2: float, x: float):
        self._m1, self._mu1, self._m2, self._mu2, self._x = m1, mu1, m2, mu2, x
        self._values = np.empty((0, 0))
        self._lock = threading.Lock()

    def block(self, n1: int, n2: int) -> np.ndarray:
        with self._lock:
            r, c = self._values.shape
            if n1 > r or n2 > c:
                nr, nc = max(n1, r), max(n2, c)
                grown = np.empty((nr, nc))
                grown[:r, :c] = self._values
                for k1 in range(nr):
                    for k2 in range(nc):
                        if k1 < r and k2 < c:
                            continue
                        grown[k1, k2] = _cdf_value(
                            self._m1 * k1, self._mu1, self._m2 * k2, self._mu2, self._x)
                self._values = grown
            return self._values[:n1, :n2]


@lru_cache(maxsize=None)
def _conv_table(m1: int, mu1: float, m2: int, mu2: float, x: float) -> _ConvolutionTable:
    return _ConvolutionTable(m1, mu1, m2, mu2, x)


def damage_cdf(model: CumulativeModel, t: float, x: float,
               policy: TruncationPolicy | None = None) -> float:
    """P(total damage by time t is <= x), within tail_epsilon absolute."""
    policy = policy or TruncationPolicy()
    _check_nonneg(t, "t")
    _check_nonneg(x, "x")
    m1, mu1 = _mark_params(model.mag1)
    m2, mu2 = _mark_params(model.mag2)
    half = policy.tail_epsilon / 2.0
    w1 = _poisson_weights(model.rate1 * t, half, policy.max_terms_per_axis)
    w2 = _poisson_weights(model.rate2 * t, half, policy.max_terms_per_axis)
    table = _conv_table(m1, mu1, m2, mu2, float(x)).block(len(w1), len(w2))
    value = float(w1 @ table @ w2)
    return min(1.0, max(0.0, value))


def damage_mean(model: CumulativeModel, t: float) -> float:
    """E(total damage by time t); exact, linear in t."""
    _check_nonneg(t, "t")
    m1, mu1 = _mark_params(model.mag1)
    m2, mu2 = _mark_params(model.mag2)
    return m1 * model.rate1 * t / mu1 + m2 * model.rate2 * t / mu2


def model2_fptf_cdf(model: CumulativeModel, t: float,
                    policy: TruncationPolicy | None = None) -> float:
    """P(failure by t) = P(total damage by t exceeds the threshold)."""
    return 1.0 - damage_cdf(model, t, model.threshold, policy)


def model2_fptf_mean(model: CumulativeModel,
                     truncation: TruncationPolicy | None = None,
                     quadrature: QuadraturePolicy | None = None) -> float:
    """Mean failure time: the integral over t of P(damage <= threshold)."""
    truncation = truncation or TruncationPolicy()
    damage_rate = damage_mean(model, 1.0)
    scale = max(model.threshold / damage_rate, 1.0 / (model.rate1 + model.rate2))
    return integrate_decaying(
        lambda t: damage_cdf(model, t, model.threshold, truncation),
        quadrature, initial_scale=scale)


def general_damage_cdf(model: GeneralCumulativeModel, t: float, x: float,
                       policy: TruncationPolicy | None = None) -> float:
    """P(total damage by t is <= x) under renewal arrivals, within tail_epsilon."""
    policy = policy or TruncationPolicy()
    _check_nonneg(t, "t")
    _check_nonneg(x, "x")
    m1, mu1 = _mark_params(model.mag1)
    m2, mu2 = _mark_params(model.mag2)
    half = policy.tail_epsilon / 2.0
    w1 = _renewal_weights(model.inter1, t, half, policy.max_terms_per_axis)
    w2 = _renewal_weights(model.inter2, t, half, policy.max_terms_per_axis)
    table = _conv_table(m1, mu1, m2, mu2, float(x)).block(len(w1), len(w2))
    value = float(w1 @ table @ w2)
    return min(1.0, max(0.0, value))


def _renewal_function(inter: Distribution, t: float, eps: float,
                      max_terms: int) -> float:
    """Expected renewals by t: sum_{k>=1} F^(k)(t).

    Terms decay superexponentially for the supported families; summation
    stops once a term is below eps and at most half its predecessor, which
    bounds the remaining tail by the last term (< eps).
    """
    acc = 0.0
    prev = math.inf
    k = 1
    while True:
        term = inter.kfold_cdf(k, t)
        acc += term
        if term < eps and term <= 0.5 * prev:
            return acc
        k += 1
        if k > max_terms:
            raise NonConvergedError(
                f"renewal function series not converged within {max_terms} terms")
        prev = term


def general_damage_mean(model: GeneralCumulativeModel, t: float,
                        policy: TruncationPolicy | None = None) -> float:
    """E(total damage by t) = sum over processes of E(mark) * E(renewals by t)."""
    policy = policy or TruncationPolicy()
    _check_nonneg(t, "t")
    total = 0.0
    for inter, mag in ((model.inter1, model.mag1), (model.inter2, model.mag2)):
        mark_mean = mag.mean()
        eps = policy.tail_epsilon / (4.0 * max(1.0, mark_mean))
        total += mark_mean * _renewal_function(inter, t, eps, policy.max_terms_per_axis)
    return total


def compound_poisson_exponential_cdf(rate: float, mark_rate: float, t: float,
                                     x: float,
                                     policy: TruncationPolicy | None = None) -> float:
    """Damage CDF of a single Poisson stream with exponential magnitudes.

    This is the merged-process reduction: two exponential-mark streams with a
    common magnitude rate collapse into one stream with the summed arrival
    rate, and this evaluation must agree with the two-stream series.
    """
    policy = policy or TruncationPolicy()
    _check_nonneg(t, "t")
    _check_nonneg(x, "x")
    if not rate > 0 or not mark_rate > 0:
        raise ValueError("rate and mark_rate must be positive")
    weights = _poisson_weights(rate * t, policy.tail_epsilon / 2.0,
                               policy.max_terms_per_axis)
    terms = [weights[0]]
    for k in range(1, len(weights)):
        terms.append(weights[k] * (1.0 - erlang_survival(k, mark_rate * x)))
    value = math.fsum(terms)
    return min(1.0, max(0.0, value))
