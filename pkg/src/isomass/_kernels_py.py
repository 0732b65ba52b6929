"""Pure-numpy implementations of the hot kernels.

These are the reference versions; ``_kernels.pyx`` mirrors them loop for
loop and must agree to rounding.
"""
import math

import numpy as np

from .errors import EvaluationError, InvalidPath
from .quadrature import SingularIntegrand, integrate_right_singular, second_coefficient

FOUR_PI = 4.0 * math.pi
THIRTY_SIX_PI = 36.0 * math.pi
SHORT_BRANCH = 1e-3  # sqrt(1 - a/b) below which only the singular terms count
NEGATIVE_RADICAND_TOL = 1e-12


def ric_branch_integral(c, beta, x):
    """Closed form of ``int_0^x (c - beta t^(2/3))^(-1/2) dt``.

    Substituting ``t = s^3`` reduces it to an arcsine; the ``atan2`` form
    stays well conditioned when the radicand at ``x`` is close to zero.
    Vectorised over ``x``.
    """
    s = np.cbrt(np.asarray(x, dtype=float))
    d = c - beta * s * s
    if np.any(d < -NEGATIVE_RADICAND_TOL * max(abs(c), 1.0)):
        raise InvalidPath(f"negative radicand {np.min(d):.3e} on the Ricci-constant branch")
    sd = np.sqrt(np.maximum(d, 0.0))
    rb = math.sqrt(beta)
    out = 3.0 * (c / (2.0 * beta * rb) * np.arctan2(s * rb, sd) - s * sd / (2.0 * beta))
    return out if out.ndim else float(out)


def mr_radicand(c1, p):
    """``g(x) = 36 pi - c1 x^(-1/3) - p x^(2/3)``, the squared slope on a scalar-mass branch."""

    def g(x):
        t = np.cbrt(np.asarray(x, dtype=float))
        if c1 == 0.0:
            return THIRTY_SIX_PI - p * t * t
        return THIRTY_SIX_PI - c1 / t - p * t * t

    return g


def mr_radicand_slope(c1, p, x):
    t = np.cbrt(x)
    return c1 / (3.0 * x * t) - 2.0 * p / (3.0 * t)


def mr_radicand_curvature(c1, p, x):
    t = np.cbrt(x)
    return -4.0 * c1 / (9.0 * x * x * t) + 2.0 * p / (9.0 * x * t)


def mr_branch_integral(c1, p, a, b, n):
    """``int_a^b g(x)^(-1/2) dx`` with ``g`` from :func:`mr_radicand`, ``g(b) = 0``.

    Two singular terms are subtracted, their coefficients taken from the
    analytic ``g'(b)`` and ``g''(b)``.
    """
    if a >= b:
        return 0.0
    if c1 == 0.0:
        # the round-sphere path: the radicand has the Ricci-branch form
        return ric_branch_integral(THIRTY_SIX_PI, p, b) - ric_branch_integral(THIRTY_SIX_PI, p, a)
    g = mr_radicand(c1, p)
    slope = mr_radicand_slope(c1, p, b)
    if not slope < 0:
        raise InvalidPath(f"scalar-mass branch does not end on a simple root (g'={slope})")
    k = (b * -slope) ** -0.5
    k1 = second_coefficient(k, b, slope, mr_radicand_curvature(c1, p, b))
    q = math.sqrt(1.0 - a / b)
    if q < SHORT_BRANCH:
        # the remainder is O(q^5); the radicand is all rounding on a grid this fine
        return 2.0 * k * b * q + 2.0 / 3.0 * k1 * b * q ** 3

    def f(x):
        gx = g(x)
        if np.any(gx <= 0.0):
            i = int(np.argmax(gx <= 0.0))
            raise EvaluationError("non-positive radicand on scalar-mass branch",
                                  abscissa=float(np.atleast_1d(x)[i]))
        return gx ** -0.5

    si = SingularIntegrand(f, "right", k=k, k1=k1)
    return integrate_right_singular(si, a, b, n, check=False, terms=2)


def weps_one(eps, z, n):
    """Normalised volume functional of the scalar comparison problem at one ``z``."""
    z_left = FOUR_PI / (3.0 - 2.0 * eps)
    if z <= z_left:
        return 0.25 * z / (math.pi * math.sqrt(eps))
    one_m = 1.0 - eps
    y = math.sqrt(z) * (FOUR_PI - z) / (2.0 * one_m)
    b = z ** 1.5
    first = 0.0
    if y > 0.0:
        c = THIRTY_SIX_PI - 27.0 * one_m * y ** (2.0 / 3.0)
        first = ric_branch_integral(c, 9.0 * eps, y)
    second = mr_branch_integral(18.0 * one_m * y, 9.0, y, b, n)
    return (first + second) / math.pi ** 2


def weps_values(eps, zs, n):
    zs = np.asarray(zs, dtype=float)
    return np.array([weps_one(eps, float(z), n) for z in zs.ravel()]).reshape(zs.shape)
