"""Quadrature contract and adaptive integration of decaying integrands."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import NonConvergedError

_MAX_DEPTH = 60
_SCAN_LIMIT = 1e300


@dataclass(frozen=True)
class QuadraturePolicy:
    """Numerical contract for improper integrals over [0, inf).

    rel_tol: relative tolerance on the integral value.
    tail_cut: the integration horizon ends at the first scan point where
        the integrand drops below this level.
    max_evals: integrand-evaluation budget; exceeding it raises
        NonConvergedError.
    """

    rel_tol: float = 1e-10
    tail_cut: float = 1e-16
    max_evals: int = 1_000_000

    def __post_init__(self):
        if not 0.0 < self.rel_tol < 1.0:
            raise ValueError(f"rel_tol must be in (0, 1), got {self.rel_tol}")
        if not 0.0 < self.tail_cut < 1.0:
            raise ValueError(f"tail_cut must be in (0, 1), got {self.tail_cut}")
        if self.max_evals < 10:
            raise ValueError(f"max_evals too small: {self.max_evals}")


class _Budget:
    """Counts integrand evaluations against a hard cap."""

    __slots__ = ("remaining",)

    def __init__(self, limit: int):
        self.remaining = limit

    def __call__(self, f, x: float) -> float:
        if self.remaining <= 0:
            raise NonConvergedError("quadrature evaluation budget exhausted")
        self.remaining -= 1
        return f(x)


def _simpson(fa: float, fm: float, fb: float, width: float) -> float:
    return width * (fa + 4.0 * fm + fb) / 6.0


def integrate_decaying(f, policy: QuadraturePolicy | None = None,
                       initial_scale: float = 1.0) -> float:
    """Integral of a nonnegative, eventually-decreasing f over [0, inf).

    The upper limit is found by a doubling scan starting at initial_scale
    (first point with f below policy.tail_cut); the finite piece is then
    integrated by interval-halving adaptive Simpson with the classic
    embedded (Richardson) error estimate.  The discarded tail is below
    tail_cut and decaying, hence negligible against rel_tol for the
    exponentially-tailed integrands this toolkit produces.
    """
    policy = policy or QuadraturePolicy()
    budget = _Budget(policy.max_evals)

    t_max = max(initial_scale, 1e-12)
    while budget(f, t_max) >= policy.tail_cut:
        t_max *= 2.0
        if t_max > _SCAN_LIMIT:
            raise NonConvergedError("integrand never fell below tail_cut")

    # Coarse composite estimate only sets the absolute tolerance scale.
    n_coarse = 256
    h = t_max / n_coarse
    coarse = 0.5 * (budget(f, 0.0) + budget(f, t_max))
    for i in range(1, n_coarse):
        coarse += budget(f, i * h)
    coarse *= h
    abs_tol = policy.rel_tol * max(abs(coarse), 1e-300)

    return _adaptive_simpson(f, 0.0, t_max, abs_tol, budget)


def _adaptive_simpson(f, a: float, b: float, abs_tol: float,
                      budget: _Budget) -> float:
    fa = budget(f, a)
    mid = 0.5 * (a + b)
    fm = budget(f, mid)
    fb = budget(f, b)
    whole = _simpson(fa, fm, fb, b - a)

    total = 0.0
    stack = [(a, b, fa, fm, fb, whole, abs_tol, 0)]
    while stack:
        a0, b0, fa0, fm0, fb0, s0, tol, depth = stack.pop()
        m = 0.5 * (a0 + b0)
        flm = budget(f, 0.5 * (a0 + m))
        frm = budget(f, 0.5 * (m + b0))
        left = _simpson(fa0, flm, fm0, m - a0)
        right = _simpson(fm0, frm, fb0, b0 - m)
        err = (left + right - s0) / 15.0
        if abs(err) <= tol or depth >= _MAX_DEPTH:
            total += left + right + err
        else:
            half = 0.5 * tol
            stack.append((a0, m, fa0, flm, fm0, left, half, depth + 1))
            stack.append((m, b0, fm0, frm, fb0, right, half, depth + 1))
    return total
