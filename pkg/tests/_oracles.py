"""Independent numerical oracles shared by the test modules.

Everything here deliberately avoids the library's own evaluation paths:
Erlang pieces come straight from scipy.special, convolutions are numerical
quadrature, and integrals use scipy's adaptive QUADPACK wrapper.
"""

import numpy as np
from scipy import integrate, special


def erlang_pdf_grid(shape: int, rate: float, y: np.ndarray) -> np.ndarray:
    out = np.zeros_like(y)
    pos = y > 0
    yp = y[pos]
    out[pos] = np.exp(shape * np.log(rate) + (shape - 1) * np.log(yp)
                      - rate * yp - special.gammaln(shape))
    if shape == 1:
        out[y == 0] = rate
    return out


def erlang_cdf_grid(shape: int, rate: float, y: np.ndarray) -> np.ndarray:
    return special.gammainc(shape, rate * np.maximum(y, 0.0))


def trapezoid_convolution_cdf(shape_a: int, rate_a: float,
                              shape_b: int, rate_b: float,
                              x: float, step: float = 2.5e-4) -> float:
    """P(A + B <= x) by trapezoidal quadrature of f_A(y) * F_B(x - y)."""
    n = max(int(np.ceil(x / step)), 8)
    y = np.linspace(0.0, x, n + 1)
    integrand = erlang_pdf_grid(shape_a, rate_a, y) * erlang_cdf_grid(
        shape_b, rate_b, x - y)
    trapezoid = getattr(np, "trapezoid", np.trapz)
    return float(trapezoid(integrand, y))


def quad_mean_of_min(survival1, survival2, upper: float) -> float:
    """Integral of the product survival curve; reference for mean failure times."""
    value, _ = integrate.quad(lambda t: survival1(t) * survival2(t),
                              0.0, upper, epsabs=1e-13, epsrel=1e-13, limit=500)
    return value


def binomial_band(p_hat: float, n: int) -> float:
    """3.5 binomial standard errors at the observed proportion."""
    return 3.5 * np.sqrt(p_hat * (1.0 - p_hat) / n)
