"""Volume bound under R >= R0 and Ric >= eps Ric0: w_eps(z), alpha(eps), eps_0.

Normalised to the unit 3-sphere (R0 = 6, Ric0 = 2, volume 2 pi^2), the
largest half-volume of an equality path ending at x0 = z^(3/2) is
pi^2 w_eps(z), and alpha(eps) = sup w_eps over [4 pi / (3 - 2 eps), 4 pi].
Because w_eps(4 pi) = 1, alpha >= 1; eps_0 is where alpha stops exceeding 1.
"""
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import minimize_scalar

from . import kernels
from .config import ComparisonConfig
from .errors import DomainError, MonotonicityError

FOUR_PI = 4.0 * math.pi
EPS_LOWER = 1.0 - math.sqrt(3.0) / 2.0  # alpha > 1 here
EPS_UPPER = 0.2
EPS0_REFERENCE = 0.134727
ALPHA_MARGIN = 1e-7


def left_end(eps):
    """``4 pi / (3 - 2 eps)``: where the Ricci branch alone reaches the axis."""
    return FOUR_PI / (3.0 - 2.0 * eps)


def _check_eps(eps):
    if not 0.0 < eps <= 1.0:
        raise DomainError(f"epsilon must lie in (0, 1], got {eps}")


def w_eps(eps: float, z, n: int = 1000):
    """Normalised volume of the equality path ending at ``x0 = z^(3/2)``.

    Linear, ``z / (4 pi sqrt(eps))``, up to ``4 pi / (3 - 2 eps)``; beyond
    it the Ricci-branch integral (closed form) plus the scalar-branch
    integral (singular quadrature), divided by pi^2.
    """
    _check_eps(eps)
    arr = np.asarray(z, dtype=float)
    if np.any(arr < 0) or np.any(arr > FOUR_PI * (1.0 + 1e-14)) or not np.all(np.isfinite(arr)):
        raise DomainError(f"z must lie in [0, 4 pi], got {z!r}")
    arr = np.minimum(arr, FOUR_PI)
    if arr.ndim == 0:
        return kernels.weps_one(eps, float(arr), n)
    return kernels.weps_values(eps, arr, n)


@dataclass(frozen=True, eq=False)
class AlphaResult:
    epsilon: float
    alpha: float
    argmax_z: float
    z: Optional[np.ndarray] = field(default=None, repr=False)
    w: Optional[np.ndarray] = field(default=None, repr=False)


def _refine(f, zs, ws, i):
    # golden section inside the scan cell(s) around sample i
    m = len(zs)
    if 0 < i < m - 1:
        res = minimize_scalar(lambda t: -f(t), bracket=(zs[i - 1], zs[i], zs[i + 1]), method="golden")
        if zs[i - 1] <= res.x <= zs[i + 1]:
            return float(res.x), -float(res.fun)
        return float(zs[i]), float(ws[i])
    j = 1 if i == 0 else m - 2
    a, b = sorted((zs[i], zs[j]))
    res = minimize_scalar(lambda t: -f(t), bounds=(a, b), method="bounded", options={"xatol": 1e-12 * b})
    return float(res.x), -float(res.fun)


def alpha(eps: float, grid: int = 512, n: int = 1000, keep_samples: bool = True) -> AlphaResult:
    """Supremum of ``w_eps`` over ``[4 pi / (3 - 2 eps), 4 pi]``.

    A uniform scan locates the local maxima; the two highest are refined
    by golden-section search.
    """
    _check_eps(eps)
    lo = left_end(eps)
    if lo >= FOUR_PI:
        z = np.array([FOUR_PI])
        w = np.array([w_eps(eps, FOUR_PI, n)])
        return AlphaResult(eps, float(w[0]), FOUR_PI, z if keep_samples else None, w if keep_samples else None)
    z = np.linspace(lo, FOUR_PI, grid)
    z[-1] = FOUR_PI
    w = kernels.weps_values(eps, z, n)
    best = int(np.argmax(w))
    best_z, best_w = float(z[best]), float(w[best])
    peaks = [i for i in range(grid) if (i == 0 or w[i] >= w[i - 1]) and (i == grid - 1 or w[i] >= w[i + 1])]

    def f(t):
        return kernels.weps_one(eps, min(max(t, lo), FOUR_PI), n)

    for i in sorted(peaks, key=lambda j: -w[j])[:2]:
        zi, wi = _refine(f, z, w, i)
        if wi > best_w:
            best_z, best_w = zi, wi
    return AlphaResult(eps, best_w, best_z, z if keep_samples else None, w if keep_samples else None)


@dataclass(frozen=True)
class Epsilon0Result:
    value: float
    lower: float
    upper: float
    reference: float = EPS0_REFERENCE
    alpha_at_lower: float = math.nan

    @property
    def width(self):
        return self.upper - self.lower

    def __float__(self):
        return self.value


def epsilon0(tol: float = 1e-6, margin: float = ALPHA_MARGIN, lo: float = EPS_LOWER, hi: float = EPS_UPPER,
             grid: int = 512, n: int = 1000, probes: int = 9) -> Epsilon0Result:
    """Bisect the predicate ``alpha(eps) > 1 + margin`` on ``[lo, hi]``.

    ``alpha`` is nonincreasing in eps, so the predicate should read
    true...true false...false; a coarse pass over ``probes`` points checks
    that before bisecting and raises ``MonotonicityError`` with the first
    offending pair otherwise.
    """
    if tol < 1e-8:
        raise DomainError(f"tolerance below 1e-8 is not resolvable, got {tol}")
    if not 0 < lo < hi <= 1:
        raise DomainError(f"bad bracket [{lo}, {hi}]")

    cache = {}

    def above(e):
        if e not in cache:
            cache[e] = alpha(e, grid, n, keep_samples=False).alpha
        return cache[e] > 1.0 + margin

    eps_grid = np.linspace(lo, hi, probes)
    flags = [above(float(e)) for e in eps_grid]
    if not flags[0] or flags[-1]:
        raise MonotonicityError(
            f"predicate does not change from true to false on [{lo}, {hi}]: {flags[0]} -> {flags[-1]}",
            pair=(lo, hi),
        )
    for k in range(1, probes):
        if flags[k] and not flags[k - 1]:
            raise MonotonicityError(
                f"alpha(eps) > 1 is not monotone: false at {eps_grid[k - 1]}, true at {eps_grid[k]}",
                pair=(float(eps_grid[k - 1]), float(eps_grid[k])),
            )
    k = flags.index(False)
    a, b = float(eps_grid[k - 1]), float(eps_grid[k])
    while b - a > tol:
        mid = 0.5 * (a + b)
        if above(mid):
            a = mid
        else:
            b = mid
    return Epsilon0Result(0.5 * (a + b), a, b, alpha_at_lower=cache[float(eps_grid[0])])


def volume_bound(eps: float, cfg: ComparisonConfig = ComparisonConfig(), **kwargs) -> float:
    """``alpha(eps) V0``, rescaled by ``(R0 / 6)^(-3/2)`` when R0 is not 6."""
    return alpha(eps, keep_samples=False, **kwargs).alpha * cfg.V0 * (cfg.R0 / 6.0) ** -1.5
