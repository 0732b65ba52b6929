"""The (x, y) = (F, F') phase plane of the volume comparison problem.

Along a symmetric profile dV = dx / y, so the volume swept by a curve that
ends on the x-axis at x0 is W(x0) = int dx / y. The extremal curves
gamma(x0) hold the Ricci-curvature mass constant near the tip and, when
x0 > x_FB, switch to holding the scalar-curvature mass constant:

    m_Ric branch:  y^2 = 36 pi - c2 - (9 eps Ric0 / 2) x^(2/3)
    m_R branch:    y^2 = 36 pi - c1 x^(-1/3) - (3 R0 / 2) x^(2/3)
"""
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize_scalar

from . import kernels
from .config import ComparisonConfig
from .errors import ArgumentError, DomainError, NoAdmissiblePath
from .profile import EndDescriptor, IsoProfile
from .quadrature import SingularIntegrand, integrate_right_singular, second_coefficient

THIRTY_SIX_PI = 36.0 * math.pi
X_TOL = 1e-12  # relative slack when comparing x0 with x_S and x_FB


class SpecialPoints(NamedTuple):
    x_S: float
    x_FB: float


def special_points(cfg: ComparisonConfig = ComparisonConfig()) -> SpecialPoints:
    """Terminal abscissas of the sphere (x_S) and of the first two-branch football (x_FB)."""
    denom = cfg.R0 - 2.0 * cfg.eps * cfg.Ric0
    if not denom > 0:
        raise DomainError(f"need R0 > 2 eps Ric0, got R0={cfg.R0}, eps Ric0={cfg.eps * cfg.Ric0}")
    return SpecialPoints((24.0 * math.pi / cfg.R0) ** 1.5, (8.0 * math.pi / denom) ** 1.5)


@dataclass(frozen=True)
class PhasePath:
    """Mass-constant curve gamma(x0) from the x = 0 tip down to (x0, 0).

    ``case_kind`` is ``one`` (m_Ric branch only), ``two`` (m_Ric on
    [0, x1], m_R on [x1, x0]) or ``three`` (x0 = x_S, m_R branch with
    c1 = x1 = 0).
    """

    case_kind: str
    x0: float
    c1: float
    c2: float
    x1: float
    config: ComparisonConfig = field(repr=False)

    @property
    def beta(self):
        return 4.5 * self.config.eps * self.config.Ric0

    @property
    def p(self):
        return 1.5 * self.config.R0

    def _ric(self, x):
        t = np.cbrt(x)
        if self.case_kind == "one":
            return self.beta * (self.x0 ** (2.0 / 3.0) - t * t)
        return THIRTY_SIX_PI - self.c2 - self.beta * t * t

    def _mr(self, x):
        t = np.cbrt(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            inv = np.where(t > 0, self.c1 / np.where(t > 0, t, 1.0), 0.0)
        return THIRTY_SIX_PI - inv - self.p * t * t

    def g(self, x):
        """Squared slope y^2 along the path."""
        x = np.asarray(x, dtype=float)
        if self.case_kind == "one":
            out = self._ric(x)
        elif self.case_kind == "three":
            out = self._mr(x)
        else:
            out = np.where(x <= self.x1, self._ric(x), self._mr(x))
        return out if out.ndim else float(out)

    def dg(self, x):
        """d(y^2)/dx; F'' = dg / 2 along the profile."""
        x = np.asarray(x, dtype=float)
        t = np.cbrt(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            ric = -(2.0 / 3.0) * self.beta / t
            mr = -(2.0 / 3.0) * self.p / t
            if self.case_kind == "two":
                mr = mr + self.c1 / (3.0 * x * t)
        if self.case_kind == "one":
            out = ric
        elif self.case_kind == "three":
            out = mr
        else:
            out = np.where(x <= self.x1, ric, mr)
        return out if np.ndim(out) else float(out)

    def y(self, x):
        x = np.asarray(x, dtype=float)
        # the terminal root is exact by construction; g(x0) only carries rounding
        g = np.where(x >= self.x0, 0.0, self.g(x))
        out = np.sqrt(np.maximum(g, 0.0))
        return out if out.ndim else float(out)

    def branch(self, x):
        """``ric`` or ``r`` for each abscissa."""
        x = np.asarray(x, dtype=float)
        if self.case_kind == "one":
            return np.full(x.shape, "ric")
        if self.case_kind == "three":
            return np.full(x.shape, "r")
        return np.where(x <= self.x1, "ric", "r")

    def samples(self, n=200):
        """Abscissas clustered toward x0, with x1 included exactly in case two."""
        t = np.linspace(0.0, 1.0, n + 1)
        x = self.x0 * (1.0 - (1.0 - t) ** 2)
        if self.case_kind == "two":
            x = np.unique(np.append(x, self.x1))
        x[-1] = self.x0
        return x, self.y(x)


def gamma(x0: float, cfg: ComparisonConfig = ComparisonConfig()) -> PhasePath:
    x_S, x_FB = special_points(cfg)
    if not x0 > 0:
        raise DomainError(f"terminal abscissa must be positive, got {x0}")
    if x0 > x_S * (1.0 + X_TOL):
        raise NoAdmissiblePath(f"no admissible path ends at x0={x0} > x_S={x_S}")
    x0 = min(float(x0), x_S)
    if x0 <= x_FB:
        return PhasePath("one", x0, math.nan, math.nan, x0, cfg)
    if x0 >= x_S * (1.0 - X_TOL):
        return PhasePath("three", x_S, 0.0, 0.0, 0.0, cfg)
    c1 = x0 ** (1.0 / 3.0) * (THIRTY_SIX_PI - 1.5 * cfg.R0 * x0 ** (2.0 / 3.0))
    k = 3.0 * (cfg.R0 - 3.0 * cfg.eps * cfg.Ric0)
    x1 = c1 / k
    c2 = 1.5 * (k * c1 * c1) ** (1.0 / 3.0)
    return PhasePath("two", x0, c1, c2, x1, cfg)


def path_volume(path: PhasePath, cfg: ComparisonConfig = None, n: int = 1000,
                method: str = "closed") -> float:
    """W(x0) = int dx / y along the path.

    Case one uses the closed form ``beta^(-1/2) x0^(2/3) 3 pi / 4`` unless
    ``method="quadrature"``. The m_R branch always goes through the singular
    quadrature, the m_Ric part of case two through its closed form.
    """
    cfg = cfg or path.config
    if path.case_kind == "one":
        if method == "closed":
            return path.beta ** -0.5 * path.x0 ** (2.0 / 3.0) * 0.75 * math.pi
        if method != "quadrature":
            raise ArgumentError(f"unknown method {method!r}")
        b = path.x0
        slope = -(2.0 / 3.0) * path.beta * b ** (-1.0 / 3.0)
        k = (b * -slope) ** -0.5
        k1 = second_coefficient(k, b, slope, (2.0 / 9.0) * path.beta * b ** (-4.0 / 3.0))
        si = SingularIntegrand(lambda x: path.g(x) ** -0.5, "right", k=k, k1=k1)
        return integrate_right_singular(si, 0.0, b, n, check=False, terms=2)
    p = 1.5 * cfg.R0
    first = 0.0
    if path.case_kind == "two":
        first = kernels.ric_branch_integral(THIRTY_SIX_PI - path.c2, path.beta, path.x1)
    return first + kernels.mr_branch_integral(path.c1, p, path.x1, path.x0, n)


def W(x0: float, cfg: ComparisonConfig = ComparisonConfig(), n: int = 1000) -> float:
    return path_volume(gamma(x0, cfg), cfg, n)


# -- Bishop ---------------------------------------------------------------------

def gamma_half_integer(x: float) -> float:
    """Gamma at a positive integer or half-integer, from factorials."""
    twice = 2.0 * x
    if twice != int(twice) or x <= 0:
        raise ArgumentError(f"need a positive integer or half-integer, got {x}")
    if x == int(x):
        return float(math.factorial(int(x) - 1))
    k = int(x - 0.5)
    return math.factorial(2 * k) / (4 ** k * math.factorial(k)) * math.sqrt(math.pi)


def unit_sphere_area(dim: int) -> float:
    """Volume of the unit ``dim``-sphere S^dim, ``2 pi^((dim+1)/2) / Gamma((dim+1)/2)``."""
    return 2.0 * math.pi ** ((dim + 1) / 2.0) / gamma_half_integer((dim + 1) / 2.0)


def round_sphere_volume(n: int, Ric0: float) -> float:
    """Volume of the round n-sphere with Ricci curvature ``Ric0``."""
    if n < 2 or not Ric0 > 0:
        raise DomainError("need n >= 2 and Ric0 > 0")
    rho = math.sqrt((n - 1) / Ric0)
    return unit_sphere_area(n) * rho ** n


def bishop_halfvolume(n: int, Ric0: float, panels: int = 100000) -> float:
    """Largest half-volume allowed by Ric >= Ric0 in dimension n.

    ``n^(n-1) omega_(n-1) ((n-1) / (n^2 Ric0))^(n/2) int_0^1 (1 - z^(2/n))^(-1/2) dz``,
    the integral by singular subtraction with ``k = sqrt(n/2)``.
    """
    if int(n) != n or n < 2:
        raise DomainError(f"dimension must be an integer >= 2, got {n}")
    if not Ric0 > 0:
        raise DomainError(f"Ric0 must be positive, got {Ric0}")
    n = int(n)
    pref = n ** (n - 1) * unit_sphere_area(n - 1) * ((n - 1) / (n * n * Ric0)) ** (n / 2.0)
    k = math.sqrt(n / 2.0)
    k1 = second_coefficient(k, 1.0, -2.0 / n, (2.0 / n) * (1.0 - 2.0 / n))
    si = SingularIntegrand(lambda z: (1.0 - z ** (2.0 / n)) ** -0.5, "right", k=k, k1=k1)
    return pref * integrate_right_singular(si, 0.0, 1.0, panels, check=False, terms=2)


# -- football -----------------------------------------------------------------

def _scan_maximum(fun, lo, hi, grid):
    # uniform in x^(2/3), where the near-x_FB peak has a fixed width
    zs = np.linspace(lo ** (2.0 / 3.0), hi ** (2.0 / 3.0), grid)
    xs = zs ** 1.5
    xs[0], xs[-1] = lo, hi
    ws = np.array([fun(x) for x in xs])
    best_x, best_w = xs[int(np.argmax(ws))], float(np.max(ws))
    peaks = [i for i in range(grid) if (i == 0 or ws[i] >= ws[i - 1]) and (i == grid - 1 or ws[i] >= ws[i + 1])]
    for i in sorted(peaks, key=lambda j: -ws[j])[:2]:
        if 0 < i < grid - 1:
            res = minimize_scalar(lambda x: -fun(x), bracket=(xs[i - 1], xs[i], xs[i + 1]), method="golden")
            cand = [(float(res.x), -float(res.fun))] if xs[i - 1] <= res.x <= xs[i + 1] else []
        else:
            j = 1 if i == 0 else grid - 2
            a, b = sorted((xs[i], xs[j]))
            res = minimize_scalar(lambda x: -fun(x), bounds=(a, b), method="bounded",
                                  options={"xatol": 1e-10 * b})
            cand = [(float(res.x), -float(res.fun))]
        for x, w in cand:
            if w > best_w:
                best_x, best_w = x, w
    return best_x, best_w


@dataclass(frozen=True, eq=False)
class Football:
    """Equality manifold of the comparison: gamma(x_bar) traversed out and back."""

    profile: IsoProfile
    path: PhasePath
    x_bar: float
    W: float
    boundary: bool
    branch: np.ndarray = field(repr=False)

    @property
    def volume(self):
        return self.profile.total_volume


def _path_volumes(path, x, n):
    """V(x) = int_0^x dx'/y along the path."""
    V = np.empty_like(x)
    if path.case_kind == "one":
        return kernels.ric_branch_integral(path.beta * path.x0 ** (2.0 / 3.0), path.beta, x)
    p = path.p
    total = path_volume(path, n=n)
    left = x <= path.x1 if path.case_kind == "two" else np.zeros(x.shape, bool)
    if left.any():
        V[left] = kernels.ric_branch_integral(THIRTY_SIX_PI - path.c2, path.beta, x[left])
    for i in np.flatnonzero(~left):
        V[i] = total - kernels.mr_branch_integral(path.c1, p, x[i], path.x0, n)
    return V


def football_profile(cfg: ComparisonConfig = ComparisonConfig(), samples: int = 400, grid: int = 256,
                     n: int = 1000) -> Football:
    """Maximise W over [x_FB, x_S] and build the profile of gamma(x_bar).

    The path is sampled from the tip to x_bar, volumes accumulated exactly
    (closed form on the m_Ric branch, singular quadrature to x_bar on the m_R
    branch), and mirrored about V = W to close the manifold. A maximiser at
    either end of the interval is reported in ``boundary``.
    """
    x_S, x_FB = special_points(cfg)
    if cfg.eps >= 1.0 or x_FB >= x_S * (1.0 - X_TOL):
        x_bar, w_bar = x_S, W(x_S, cfg, n)
    else:
        x_bar, w_bar = _scan_maximum(lambda x: W(x, cfg, n), x_FB, x_S, grid)
    boundary = bool(abs(x_bar - x_S) <= 1e-9 * x_S or abs(x_bar - x_FB) <= 1e-9 * x_S)
    path = gamma(x_bar, cfg)
    x, y = path.samples(samples // 2)
    V = _path_volumes(path, x, n)
    V[-1] = w_bar = path_volume(path, n=n)
    dF = y
    d2F = 0.5 * np.asarray(path.dg(x))
    F = x
    with np.errstate(divide="ignore", invalid="ignore"):
        A = F ** (2.0 / 3.0)
        c = F ** (-1.0 / 3.0)
        dA = (2.0 / 3.0) * c * dF
        d2A = (2.0 / 3.0) * c * d2F - (2.0 / 9.0) * c ** 4 * dF * dF
    dA[0], d2A[0] = np.inf, -np.inf
    br = path.branch(x)
    # second half is the mirror image V -> 2W - V
    Vf = np.concatenate([V, 2.0 * w_bar - V[-2::-1]])
    Af = np.concatenate([A, A[-2::-1]])
    dAf = np.concatenate([dA, -dA[-2::-1]])
    d2Af = np.concatenate([d2A, d2A[-2::-1]])
    dFf = np.concatenate([dF, -dF[-2::-1]])
    Af[0] = Af[-1] = 0.0
    prof = IsoProfile.from_arrays(Vf, Af, dAf, d2Af, dF=dFf, end=EndDescriptor.compact())
    return Football(prof, path, x_bar, w_bar, boundary, np.concatenate([br, br[-2::-1]]))
