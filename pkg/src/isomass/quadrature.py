"""Composite Simpson quadrature with inverse-square-root endpoint subtraction.

Integrands are numpy-vectorised callables. For an integrand that blows up
like ``(b - x)**-0.5`` at the right end, the singular part
``k * (1 - x/b)**-0.5`` is subtracted, the bounded remainder goes through
Simpson's rule, and the subtracted piece is added back in closed form::

    integral = simpson(f - k (1 - x/b)^-1/2) + 2 k b sqrt(1 - a/b)

That remainder still carries a ``sqrt(b - x)`` term, so Simpson converges
only like ``n^-1.5``. With ``terms=2`` the next coefficient ``k1`` of the
expansion is removed too, ``k1 (1 - x/b)^1/2`` with integral
``2/3 k1 b (1 - a/b)^3/2``, and the remainder is ``O((b - x)^3/2)``.
"""
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import (
    ArgumentError,
    DomainError,
    EndpointNotRoot,
    EvaluationError,
    QuadratureWarning,
    SingularityMismatch,
    WrongSignedSlope,
)

DEFAULT_PANELS = 1000
COARSE_RTOL = 1e-6
# one-sided stencil offsets, in units of (b - a)
_STENCIL = 1e-5
_PROBES = (1e-4, 1e-6, 1e-8)
_FIT_BASE = 1e-4  # smallest offset (relative) for the coefficient fit
_ROUNDOFF = 1e3 * np.finfo(float).eps
# weights giving r(b) from r at distances h, 2h, 3h, for r = r_b + c sqrt(d) + e d
_END_WEIGHTS = np.linalg.solve(
    np.array([[1.0, 1.0, 1.0], [1.0, math.sqrt(2.0), 2.0], [1.0, math.sqrt(3.0), 3.0]]).T, [1.0, 0.0, 0.0]
)


def _check_panels(n):
    if int(n) != n or n < 2 or n % 2:
        raise ArgumentError(f"panel count must be an even integer >= 2, got {n!r}")
    return int(n)


def _check_interval(a, b):
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ArgumentError(f"non-finite interval [{a}, {b}]")
    if a > b:
        raise ArgumentError(f"reversed interval: a={a} > b={b}")


def simpson_sum(y, h):
    """Composite Simpson sum of equally spaced samples ``y`` (odd length)."""
    y = np.asarray(y, dtype=float)
    return h / 3.0 * (y[0] + y[-1] + 4.0 * y[1:-1:2].sum() + 2.0 * y[2:-1:2].sum())


def _coarse_check(y, h, fine, label):
    n = len(y) - 1
    if n % 20:
        return
    coarse = simpson_sum(y[::10], 10.0 * h)
    scale = max(abs(fine), 1e-300)
    if abs(fine - coarse) > COARSE_RTOL * scale:
        warnings.warn(
            f"{label}: n={n} and n={n // 10} disagree by "
            f"{abs(fine - coarse) / scale:.2e} (relative)",
            QuadratureWarning,
            stacklevel=3,
        )


def _evaluate(f, x):
    y = np.asarray(f(x), dtype=float)
    if y.shape != x.shape:
        y = np.broadcast_to(y, x.shape).astype(float)
    bad = ~np.isfinite(y)
    if bad.any():
        i = int(np.argmax(bad))
        raise EvaluationError("non-finite integrand value", abscissa=float(x[i]))
    return y


def integrate_smooth(f: Callable, a: float, b: float, n: int = DEFAULT_PANELS, check: bool = True) -> float:
    """Composite Simpson's rule for ``f`` on ``[a, b]`` with ``n`` panels.

    Exact for cubics. When ``check`` is set and ``n`` is a multiple of 20 the
    n/10 estimate (reusing every tenth sample) is compared and a
    ``QuadratureWarning`` is emitted if they differ by more than 1e-6
    relative.
    """
    n = _check_panels(n)
    _check_interval(a, b)
    if a == b:
        return 0.0
    x = np.linspace(a, b, n + 1)
    y = _evaluate(f, x)
    h = (b - a) / n
    result = float(simpson_sum(y, h))
    if check:
        _coarse_check(y, h, result, "integrate_smooth")
    return result


def _one_sided_slope(g, b, h):
    gb = float(g(b))
    d = [(gb - float(g(b - s * h))) / (s * h) for s in (1.0, 2.0, 4.0)]
    # eliminate the O(h) and O(h^2) error terms
    return (8.0 * d[0] - 6.0 * d[1] + d[2]) / 3.0


def singular_coefficient(g: Callable, b: float, a: float = 0.0, dg: Optional[Callable] = None,
                         atol: float = 1e-9) -> float:
    """Subtraction coefficient for the integrand ``g(x)**-0.5`` with ``g(b) = 0``.

    Returns ``k = (b |g'(b)|)**-0.5``, the unique value making
    ``g**-0.5 - k (1 - x/b)**-0.5`` bounded as ``x -> b``. ``g'(b)`` comes
    from ``dg`` when given, otherwise from a Richardson-extrapolated
    one-sided stencil at offsets 1e-5, 2e-5, 4e-5 times ``b - a``.
    """
    if b <= 0:
        raise DomainError(f"singular endpoint must be positive, got b={b}")
    gb = float(g(b))
    scale = max(1.0, abs(float(g(a)))) if a < b else 1.0
    if not math.isfinite(gb) or abs(gb) > atol * scale:
        raise EndpointNotRoot(f"endpoint not a root: g({b}) = {gb}")
    if dg is not None:
        slope = float(dg(b))
    else:
        width = (b - a) if b > a else abs(b)
        slope = _one_sided_slope(g, b, _STENCIL * width)
    if not slope < 0:
        raise WrongSignedSlope(f"wrong-signed slope: g'({b}) = {slope}")
    return (b * -slope) ** -0.5


@dataclass(frozen=True)
class SingularIntegrand:
    """An integrand with an inverse-square-root blow-up at one end.

    ``radicand`` is optional: when the integrand is ``g(x)**-0.5`` passing
    ``g`` lets the coefficient be computed from ``g'(b)``; otherwise it is
    extrapolated from ``f`` itself. ``k1`` and ``radicand_curvature``
    (``g''``) serve the same purpose for the second subtracted term.
    """

    f: Callable
    singular_end: str = "right"
    k: Optional[float] = None
    radicand: Optional[Callable] = None
    radicand_slope: Optional[Callable] = None
    exponent: float = -0.5
    k1: Optional[float] = None
    radicand_curvature: Optional[Callable] = None

    def __post_init__(self):
        if self.singular_end not in ("left", "right", "none"):
            raise ArgumentError(f"singular_end must be left/right/none, got {self.singular_end!r}")
        if self.exponent != -0.5:
            raise ArgumentError("only the -1/2 endpoint exponent is supported")

    def reflected(self, a, b):
        """The same integrand under ``x -> a + b - x`` (singular end swaps)."""
        f, g, dg, d2g = self.f, self.radicand, self.radicand_slope, self.radicand_curvature
        end = {"left": "right", "right": "left", "none": "none"}[self.singular_end]
        return SingularIntegrand(
            f=lambda x: f(a + b - x),
            singular_end=end,
            k=self.k,
            radicand=None if g is None else (lambda x: g(a + b - x)),
            radicand_slope=None if dg is None else (lambda x: -dg(a + b - x)),
            k1=self.k1,
            radicand_curvature=None if d2g is None else (lambda x: d2g(a + b - x)),
        )


def _fitted_coefficients(f, a, b):
    # s f(b - s^2 b) = k + c0 s + k1 s^2 + c2 s^3 + ..., s = sqrt(1 - x/b);
    # an exact cubic through four points at s ratios 1, 2, 4, 8
    s0 = math.sqrt(_FIT_BASE * (b - a) / b) / 8.0
    s = s0 * np.array([1.0, 2.0, 4.0, 8.0])
    phi = s * np.asarray([float(f(b - si * si * b)) for si in s])
    c = np.polynomial.polynomial.polyfit(s, phi, 3)
    return float(c[0]), float(c[2])


def second_coefficient(k, b, slope, curvature):
    """``k1`` from ``g'(b)`` and ``g''(b)``: ``g^-1/2 = k s^-1 + k1 s + ...`` with ``s = (1 - x/b)^1/2``."""
    return -k * b * curvature / (4.0 * -slope)


def _coefficients(si, a, b, terms):
    k = None if si.k is None else float(si.k)
    k1 = None if si.k1 is None else float(si.k1)
    g, dg, d2g = si.radicand, si.radicand_slope, si.radicand_curvature
    if k is None and g is not None:
        k = singular_coefficient(g, b, a=a, dg=dg)
    if terms == 1:
        if k is None:
            k = _fitted_coefficients(si.f, a, b)[0]
        return k, 0.0
    if k1 is None and k is not None and dg is not None and d2g is not None:
        k1 = second_coefficient(k, b, float(dg(b)), float(d2g(b)))
    if k is None or k1 is None:
        fk, fk1 = _fitted_coefficients(si.f, a, b)
        k = fk if k is None else k
        k1 = fk1 if k1 is None else k1
    return k, k1


def integrate_right_singular(si: SingularIntegrand, a: float, b: float, n: int = DEFAULT_PANELS,
                             cap_factor: float = 1e3, check: bool = True, terms: int = 1) -> float:
    """Integrate ``si.f`` over ``[a, b]`` with the blow-up at ``b`` subtracted.

    ``terms=1`` is plain subtraction of ``k (1 - x/b)^-1/2``; ``terms=2``
    also removes the ``k1 (1 - x/b)^1/2`` term. The bounded remainder is
    sampled on the Simpson grid and its value at ``b`` extrapolated from the
    nearest samples. Residual probes at distances 1e-4, 1e-6, 1e-8 times
    ``b - a`` must stay below ``cap_factor`` times the median residual
    magnitude, otherwise the coefficient does not match the singularity.
    """
    n = _check_panels(n)
    _check_interval(a, b)
    if terms not in (1, 2):
        raise ArgumentError(f"terms must be 1 or 2, got {terms!r}")
    if a == b:
        return 0.0
    if b <= 0:
        raise DomainError(f"right-singular endpoint must be positive, got b={b}")
    k, k1 = _coefficients(si, a, b, terms)
    f = si.f

    def residual(x):
        s = np.sqrt(1.0 - x / b)
        return np.asarray(f(x), dtype=float) - k / s - k1 * s

    x = np.linspace(a, b, n + 1)
    r = np.empty_like(x)
    r[:-1] = _evaluate(residual, x[:-1])
    if terms == 1:
        r[-1] = _END_WEIGHTS @ r[-2:-5:-1] if n >= 4 else 2.0 * r[-2] - r[-3]
    else:
        r[-1] = 2.0 * r[-2] - r[-3]

    probes = b - (b - a) * np.asarray(_PROBES)
    # probes within rounding of b say nothing about the coefficient
    probes = probes[b - probes > 10.0 * _ROUNDOFF * b]
    rp = np.abs(np.asarray(residual(probes), dtype=float))
    sp = np.sqrt(1.0 - probes / b)
    # a radicand that cancels to O(b - x) loses relative accuracy like b / (b - x),
    # which shows up in f as roughly k eps / s^3
    cap = (cap_factor * float(np.median(np.abs(r))) + 1e-9 * (abs(k) + 1.0)
           + _ROUNDOFF * abs(k) / sp ** 3)
    bad = ~np.isfinite(rp) | (rp > cap)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise SingularityMismatch(
            f"singularity mismatch: residual {rp[i]:.3e} near b={b} exceeds cap {cap[i]:.3e} (k={k})"
        )

    h = (b - a) / n
    smooth_part = float(simpson_sum(r, h))
    if check:
        _coarse_check(r, h, smooth_part, "integrate_right_singular")
    q = math.sqrt(1.0 - a / b)
    return smooth_part + 2.0 * k * b * q + (2.0 / 3.0) * k1 * b * q ** 3


def integrate_left_singular(si: SingularIntegrand, a: float, b: float, n: int = DEFAULT_PANELS,
                            **kwargs) -> float:
    """Left-end blow-up, handled by reflecting onto ``[a, b]`` with ``x -> a + b - x``."""
    _check_interval(a, b)
    if a == b:
        return 0.0
    return integrate_right_singular(si.reflected(a, b), a, b, n, **kwargs)


def integrate_singular(si: SingularIntegrand, a: float, b: float, n: int = DEFAULT_PANELS, **kwargs) -> float:
    if si.singular_end == "right":
        return integrate_right_singular(si, a, b, n, **kwargs)
    if si.singular_end == "left":
        return integrate_left_singular(si, a, b, n, **kwargs)
    return integrate_smooth(si.f, a, b, n, check=kwargs.get("check", True))
