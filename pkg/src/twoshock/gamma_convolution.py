"""CDF of a sum of two independent Erlang variables with different rates.

The transform of Gamma(a, mu1) + Gamma(b, mu2) is the rational function
(mu1/(s+mu1))^a (mu2/(s+mu2))^b.  For mu1 != mu2 it expands into partial
fractions over the two pole stacks,

    sum_{j=1..a} c_j (mu1/(s+mu1))^j  +  sum_{j=1..b} d_j (mu2/(s+mu2))^j,

so the CDF is the same signed combination of plain Erlang CDFs.  The repeated-
pole derivative formula gives, with delta = mu2 - mu1,

    c_j = C(a+b-j-1, a-j) * mu1^(a-j) * mu2^b * (-1)^(a-j) / delta^(a+b-j)

and symmetrically for d_j.  Coefficients alternate in sign and grow
combinatorially with the shapes, so evaluation tracks their magnitude: the
plain float path is used only while the coefficient mass keeps cancellation
below ~1e-9 absolute, and larger expansions are evaluated in arbitrary
precision (mpmath) with the working precision sized from the coefficient
log-magnitudes.

Equal rates collapse to a single Erlang(a+b) evaluation.  Nearly equal rates
(relative gap below 1e-6) are merged the same way, with the mean-preserving
rate (a+b)/(a/mu1 + b/mu2), after emitting IllConditionedWarning: the pole
collision makes the expansion meaningless while the CDF itself is continuous
in the rates.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import mpmath as mp
from scipy import special

from .distributions import erlang_cdf, erlang_survival
from .errors import EqualRatesError, IllConditionedError, IllConditionedWarning

__all__ = ["ErlangProduct", "PartialFractionExpansion", "expand", "convolution_cdf"]

# Relative rate gap below which the expansion is refused / merged.
_RATE_GAP = 1e-6
# Total |coefficient| mass admissible for float evaluation; keeps the
# cancellation error near 1e6 * eps ~ 2e-10 absolute.
_FLOAT_SAFE_MASS = 1e6
# CDF values provably below this floor are reported as 0 (and symmetrically
# survival below it reports the CDF as 1); keeps far-tail lattice cells cheap.
_VALUE_FLOOR = 1e-18


@dataclass(frozen=True)
class ErlangProduct:
    """Transform product of two Erlang factors: shapes may be 0 (absent factor)."""

    shape_a: int
    rate_a: float
    shape_b: int
    rate_b: float

    def __post_init__(self):
        for name in ("shape_a", "shape_b"):
            v = getattr(self, name)
            if not (isinstance(v, int) and not isinstance(v, bool) and v >= 0):
                raise ValueError(f"{name} must be a nonnegative integer, got {v!r}")
        for name in ("rate_a", "rate_b"):
            v = getattr(self, name)
            if not v > 0:
                raise ValueError(f"{name} must be positive, got {v}")


@dataclass(frozen=True)
class PartialFractionExpansion:
    """Signed Erlang-CDF weights for the two pole stacks; weights sum to 1."""

    coeffs_a: tuple
    coeffs_b: tuple
    rate_a: float
    rate_b: float


def _relative_gap(rate_a: float, rate_b: float) -> float:
    return abs(rate_a - rate_b) / max(rate_a, rate_b)


def _signed_coefficient(j: int, a: int, ra: float, b: int, rb: float) -> float:
    """Float c_j for pole stack a; saturates to +-inf instead of overflowing."""
    delta = rb - ra
    try:
        c = math.comb(a + b - j - 1, a - j) * ra ** (a - j) * rb ** b \
            / delta ** (a + b - j)
    except OverflowError:
        return _exp10_signed(_log10_coefficient(j, a, ra, b, rb),
                             _coefficient_sign(j, a, b, delta))
    return -c if (a - j) % 2 else c


def _log10_coefficient(j: int, a: int, ra: float, b: int, rb: float) -> float:
    delta = abs(rb - ra)
    return (
        (math.lgamma(a + b - j) - math.lgamma(a - j + 1) - math.lgamma(b))
        + (a - j) * math.log(ra) + b * math.log(rb)
        - (a + b - j) * math.log(delta)
    ) / math.log(10.0)


@lru_cache(maxsize=None)
def _expansion_stats(a: int, ra: float, b: int, rb: float):
    """(coeffs_a, coeffs_b, max_log10, float_safe) for an unequal-rate product."""
    log10s = [_log10_coefficient(j, a, ra, b, rb) for j in range(1, a + 1)]
    log10s += [_log10_coefficient(j, b, rb, a, ra) for j in range(1, b + 1)]
    max_log10 = max(log10s)

    coeffs_a = tuple(_signed_coefficient(j, a, ra, b, rb) for j in range(1, a + 1))
    coeffs_b = tuple(_signed_coefficient(j, b, rb, a, ra) for j in range(1, b + 1))
    mass = sum(abs(c) for c in coeffs_a) + sum(abs(d) for d in coeffs_b)
    float_safe = math.isfinite(mass) and mass <= _FLOAT_SAFE_MASS
    return coeffs_a, coeffs_b, max_log10, float_safe


def _coefficient_sign(j: int, a: int, b: int, delta: float) -> float:
    neg = (a - j) % 2
    if delta < 0 and (a + b - j) % 2:
        neg ^= 1
    return -1.0 if neg else 1.0


def _exp10_signed(log10_mag: float, sign: float) -> float:
    try:
        return sign * 10.0 ** log10_mag
    except OverflowError:
        return sign * math.inf


def expand(product: ErlangProduct) -> PartialFractionExpansion:
    """Partial-fraction weights of the product transform over its two pole stacks.

    Requires both shapes >= 1.  Raises EqualRatesError when the rates
    coincide (merge to a single Erlang(a+b) instead) and IllConditionedError
    when their relative gap is below 1e-6.  For very large shapes individual
    weights can exceed the float range and saturate to +-inf; CDF evaluation
    does not go through these floats in that regime (see convolution_cdf).
    """
    a, b = product.shape_a, product.shape_b
    ra, rb = product.rate_a, product.rate_b
    if a < 1 or b < 1:
        raise ValueError("expand requires both shapes >= 1")
    if ra == rb:
        raise EqualRatesError("equal rates: merge to a single Erlang instead")
    if _relative_gap(ra, rb) < _RATE_GAP:
        raise IllConditionedError(
            f"rates {ra} and {rb} are too close for a stable expansion")
    coeffs_a, coeffs_b, _, _ = _expansion_stats(a, ra, b, rb)
    return PartialFractionExpansion(coeffs_a=coeffs_a, coeffs_b=coeffs_b,
                                    rate_a=ra, rate_b=rb)


def _merged_rate(a: int, ra: float, b: int, rb: float) -> float:
    # Mean-preserving single rate: keeps (a+b)/mu equal to a/ra + b/rb.
    return (a + b) / (a / ra + b / rb)


def _float_cdf(a: int, ra: float, b: int, rb: float, x: float) -> float:
    coeffs_a, coeffs_b, _, _ = _expansion_stats(a, ra, b, rb)
    terms = [c * erlang_survival(j, ra * x) for j, c in enumerate(coeffs_a, start=1)]
    terms += [d * erlang_survival(j, rb * x) for j, d in enumerate(coeffs_b, start=1)]
    return 1.0 - math.fsum(terms)


def _mp_erlang_survival(shape: int, z) -> mp.mpf:
    term = mp.mpf(1)
    acc = mp.mpf(1)
    for l in range(1, shape):
        term = term * z / l
        acc += term
    return mp.exp(-z) * acc


def _mp_cdf(a: int, ra: float, b: int, rb: float, x: float, max_log10: float) -> float:
    with mp.workdps(int(max(max_log10, 0.0)) + 30):
        ra_m, rb_m, x_m = mp.mpf(ra), mp.mpf(rb), mp.mpf(x)
        delta = rb_m - ra_m
        total = mp.mpf(0)
        for j in range(1, a + 1):
            c = (mp.mpf(math.comb(a + b - j - 1, a - j))
                 * ra_m ** (a - j) * rb_m ** b / delta ** (a + b - j))
            if (a - j) % 2:
                c = -c
            total += c * _mp_erlang_survival(j, ra_m * x_m)
        for j in range(1, b + 1):
            d = (mp.mpf(math.comb(a + b - j - 1, b - j))
                 * rb_m ** (b - j) * ra_m ** a / (-delta) ** (a + b - j))
            if (b - j) % 2:
                d = -d
            total += d * _mp_erlang_survival(j, rb_m * x_m)
        return float(1 - total)


@lru_cache(maxsize=None)
def _cdf_value(a: int, ra: float, b: int, rb: float, x: float) -> float:
    if a == 0 and b == 0:
        return 1.0
    if a == 0 or b == 0:
        shape, rate = (b, rb) if a == 0 else (a, ra)
        # Complemented survival cannot resolve CDF values below one ulp, so
        # screen the deep lower tail first (the component bound is exact here).
        if special.gammainc(shape, rate * x) < _VALUE_FLOOR:
            return 0.0
        return erlang_cdf(shape, rate * x)

    # Cheap rigorous screens keep far-tail lattice cells exact and fast:
    # P(A+B <= x) <= min of the component CDFs, and
    # P(A+B > x) <= P(A > x/2) + P(B > x/2).
    if min(special.gammainc(a, ra * x), special.gammainc(b, rb * x)) < _VALUE_FLOOR:
        return 0.0
    if special.gammaincc(a, ra * x / 2.0) + special.gammaincc(b, rb * x / 2.0) < _VALUE_FLOOR:
        return 1.0

    gap = _relative_gap(ra, rb)
    if gap == 0.0:
        return erlang_cdf(a + b, ra * x)
    if gap < _RATE_GAP:
        warnings.warn(
            f"rates {ra} and {rb} nearly equal; merged to a single Erlang",
            IllConditionedWarning, stacklevel=3)
        return erlang_cdf(a + b, _merged_rate(a, ra, b, rb) * x)

    _, _, max_log10, float_safe = _expansion_stats(a, ra, b, rb)
    if float_safe:
        value = _float_cdf(a, ra, b, rb, x)
    else:
        value = _mp_cdf(a, ra, b, rb, x, max_log10)
    return min(1.0, max(0.0, value))


def convolution_cdf(product: ErlangProduct, x: float) -> float:
    """CDF of Gamma(shape_a, rate_a) + Gamma(shape_b, rate_b) at x >= 0."""
    if not x >= 0.0:
        raise ValueError(f"x must be nonnegative, got {x}")
    return _cdf_value(product.shape_a, product.rate_a,
                      product.shape_b, product.rate_b, float(x))
