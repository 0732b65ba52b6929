"""Spherically symmetric 3-manifolds stored as isoperimetric profiles A(V).

A profile is a list of (V, A) samples, V the volume enclosed by a symmetric
sphere and A its area, together with A' = H (the mean curvature) and A''.
Curvature and the mass functions are algebraic in these:

    R          = 8 pi / A - 2 A A'' - (3/2) A'^2
    Ric(nu,nu) = -A A'' - A'^2 / 2
    m          = sqrt(A / 16 pi) (1 - A A'^2 / 16 pi)

With F = A^(3/2) the Hawking mass is F^(1/3) (36 pi - F'^2) / (144 pi^(3/2)),
which stays finite at a cap tip where A' is infinite but F' -> sqrt(36 pi).
"""
import csv
import io
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import BPoly, CubicSpline, PchipInterpolator

from . import geometry
from .config import ComparisonConfig
from .errors import (
    ArgumentError,
    DerivativeError,
    DomainError,
    FlowBreakdown,
    NotAsymptoticallyFlat,
    ProfileFormatError,
)

FOUR_PI = 4.0 * math.pi
SIXTEEN_PI = 16.0 * math.pi
THIRTY_SIX_PI = 36.0 * math.pi
MASS_CONST = 144.0 * math.pi ** 1.5
TIP_SLOPE = math.sqrt(THIRTY_SIX_PI)  # F'(V) at a smooth cap tip


@dataclass(frozen=True)
class EndDescriptor:
    kind: str = "none"
    m: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ("schwarzschild", "compact", "none"):
            raise ArgumentError(f"unknown end kind {self.kind!r}")
        if self.kind == "schwarzschild" and (self.m is None or not math.isfinite(self.m)):
            raise ArgumentError("a Schwarzschild end needs a finite mass")

    @classmethod
    def schwarzschild(cls, m):
        return cls("schwarzschild", float(m))

    @classmethod
    def compact(cls):
        return cls("compact")

    def metadata(self):
        if self.kind == "schwarzschild":
            return f"end=schwarzschild m={_fmt(self.m)}"
        if self.kind == "compact":
            return "end=compact"
        return None


def _end_conditions(V, A, end):
    """Clamp the spline slope where a Schwarzschild end fixes it.

    On a mass-m sphere of area A the Hawking mass is m, which gives A'.
    A first sample at the horizon area is minimal (A' = 0).
    """
    if end is None or end.kind != "schwarzschild":
        return "not-a-knot"
    m, a = end.m, A[-1]
    k = 16.0 * math.pi / a
    s = 1.0 - m * math.sqrt(k)
    # F' = 1.5 sqrt(A) A' with A'^2 = k (1 - m sqrt(k))
    right = (1, 1.5 * math.sqrt(a * k * s)) if s > 0 else "not-a-knot"
    left = (1, 0.0) if m > 0 and abs(A[0] - 16.0 * math.pi * m * m) <= 1e-10 * A[0] else "not-a-knot"
    return (left, right)


@dataclass(frozen=True, eq=False)
class IsoProfile:
    """Samples of A(V) with first and second derivatives.

    ``kind`` records where the derivatives came from: ``analytic`` (closed
    forms, interpolated between samples by quintic Hermite polynomials) or
    ``spline`` (a cubic spline through F = A^(3/2), which is smooth at cap
    tips and horizons alike). ``dF`` is F'(V); at samples with A = 0 and no
    explicit value it follows the smooth-tip convention +-sqrt(36 pi).
    """

    V: np.ndarray
    A: np.ndarray
    dA: np.ndarray
    d2A: np.ndarray
    dF: np.ndarray
    kind: str = "analytic"
    end: EndDescriptor = field(default_factory=EndDescriptor)
    _interp: object = field(default=None, repr=False)

    # -- construction ---------------------------------------------------------

    @classmethod
    def from_arrays(cls, V, A, dA, d2A, dF=None, end=None, kind="analytic"):
        V = np.array(V, dtype=float)
        A = np.array(A, dtype=float)
        dA = np.array(dA, dtype=float)
        d2A = np.array(d2A, dtype=float)
        _validate_samples(V, A)
        if not (len(dA) == len(d2A) == len(V)):
            raise ArgumentError("derivative arrays must match the sample count")
        if dF is None:
            with np.errstate(invalid="ignore"):
                dF = 1.5 * np.sqrt(A) * dA
            dF[A == 0] = np.nan
        dF = np.array(dF, dtype=float)
        tips = ~np.isfinite(dF)
        if tips.any():
            # smooth-tip convention: F grows like sqrt(36 pi) V away from a tip
            idx = np.flatnonzero(tips)
            if np.any(A[idx] != 0):
                raise DerivativeError("non-finite derivative at a sample with positive area")
            dF[idx] = np.where(idx == len(V) - 1, -TIP_SLOPE, TIP_SLOPE)
            if np.any((idx != 0) & (idx != len(V) - 1)):
                raise DerivativeError("zero area is only allowed at the ends of the profile")
        interp = _hermite(V, A, dA, d2A) if kind == "analytic" else None
        return cls(V, A, dA, d2A, dF, kind, end or EndDescriptor(), interp)

    @classmethod
    def from_samples(cls, V, A, end=None, spline="cubic", check_corners=True):
        """Profile from bare (V, A) samples; derivatives from a spline through F."""
        V = np.array(V, dtype=float)
        A = np.array(A, dtype=float)
        _validate_samples(V, A)
        if len(V) < 5:
            raise DerivativeError(f"need at least 5 samples to estimate derivatives, got {len(V)}")
        F = A ** 1.5
        if check_corners:
            _reject_corners(V, F)
        if spline == "cubic":
            sp = CubicSpline(V, F, bc_type=_end_conditions(V, A, end))
        elif spline == "pchip":
            sp = PchipInterpolator(V, F)
        else:
            raise ArgumentError(f"unknown spline {spline!r}")
        dF = sp(V, 1)
        d2F = sp(V, 2)
        dA, d2A = _a_derivs(F, dF, d2F)
        return cls(V, A, dA, d2A, dF, "spline", end or EndDescriptor(), sp)

    # -- evaluation -------------------------------------------------------------

    @property
    def total_volume(self):
        return float(self.V[-1])

    @property
    def horizon_area(self):
        """Area at V = 0 (zero for a capped manifold)."""
        return float(self.A[0])

    @property
    def F(self):
        return self.A ** 1.5

    @property
    def d2F(self):
        with np.errstate(divide="ignore", invalid="ignore"):
            return 0.75 * self.dA ** 2 / np.sqrt(self.A) + 1.5 * np.sqrt(self.A) * self.d2A

    @property
    def interior(self):
        """Mask of samples where A > 0 and all derivatives are finite."""
        return (self.A > 0) & np.isfinite(self.dA) & np.isfinite(self.d2A)

    def derivs(self, V):
        """(A, A', A'') at arbitrary volumes inside the sampled range."""
        V = np.asarray(V, dtype=float)
        if self.kind == "spline":
            lo, hi = self.V[0], self.V[-1]
        else:
            lo, hi = self._interp.x[0], self._interp.x[-1]
        if np.any(V < lo) or np.any(V > hi) or not np.all(np.isfinite(V)):
            raise DomainError(f"volume outside the interpolation range [{lo}, {hi}]")
        if self.kind == "spline":
            F, dF, d2F = (self._interp(V, k) for k in range(3))
            if np.any(F <= 0):
                raise DerivativeError("interpolated F is not positive")
            dA, d2A = _a_derivs(F, dF, d2F)
            return F ** (2.0 / 3.0), dA, d2A
        return self._interp(V), self._interp(V, 1), self._interp(V, 2)

    def area(self, V):
        return self.derivs(V)[0]

    def slope(self, V):
        return self.derivs(V)[1]

    def __len__(self):
        return len(self.V)


def _validate_samples(V, A):
    if V.ndim != 1 or V.shape != A.shape or len(V) < 2:
        raise ArgumentError("V and A must be 1-d arrays of equal length >= 2")
    if not (np.all(np.isfinite(V)) and np.all(np.isfinite(A))):
        raise ArgumentError("non-finite sample")
    if V[0] < 0:
        raise ArgumentError("volumes must be nonnegative")
    if np.any(np.diff(V) <= 0):
        i = int(np.argmax(np.diff(V) <= 0))
        raise ArgumentError(f"volumes must be strictly increasing (sample {i + 1})")
    if np.any(A < 0) or np.any(A[1:-1] == 0):
        raise ArgumentError("areas must be positive away from the ends")


def _a_derivs(F, dF, d2F):
    with np.errstate(divide="ignore", invalid="ignore"):
        c = F ** (-1.0 / 3.0)
        dA = (2.0 / 3.0) * c * dF
        d2A = (2.0 / 3.0) * c * d2F - (2.0 / 9.0) * c ** 4 * dF * dF
    return dA, d2A


def _hermite(V, A, dA, d2A):
    ok = np.isfinite(dA) & np.isfinite(d2A)
    if ok.sum() < 2:
        raise DerivativeError("fewer than two samples with finite derivatives")
    if not ok[1:-1].all():
        raise DerivativeError("non-finite derivatives are only allowed at the ends")
    yi = np.column_stack([A[ok], dA[ok], d2A[ok]])
    return BPoly.from_derivatives(V[ok], yi)


def _reject_corners(V, F, ratio=10.0):
    # slope jumps over local spacing estimate |F''|; at a corner this grows like 1/h
    if len(V) < 7:
        return
    h = np.diff(V)
    d = np.diff(F) / h
    jump = np.abs(np.diff(d))
    curv = jump / (0.5 * (h[:-1] + h[1:]))
    scale = max(np.max(np.abs(d)), 1e-300)
    for i in range(2, len(jump) - 2):
        near = np.concatenate([curv[i - 2:i], curv[i + 1:i + 3]])
        ref = max(np.max(near), 1e-300)
        if curv[i] > ratio * ref and jump[i] > 1e-6 * scale:
            raise DerivativeError(
                f"profile is not C^1: slope of F jumps by {jump[i]:.3e} at V={float(V[i + 1])!r}"
            )


# -- curvature and masses ---------------------------------------------------------

def _at(p, V):
    if V is None:
        return p.A, p.dA, p.d2A
    return p.derivs(V)


def _masked(p, V, values):
    if V is None:
        values = np.where(p.interior, values, np.nan)
    return values if np.ndim(values) else float(values)


def scalar_curvature(p: IsoProfile, V=None):
    """``8 pi / A - 2 A A'' - 1.5 A'^2``; at the samples when ``V`` is None (NaN at tips)."""
    A, dA, d2A = _at(p, V)
    with np.errstate(divide="ignore", invalid="ignore"):
        return _masked(p, V, 8.0 * math.pi / A - 2.0 * A * d2A - 1.5 * dA * dA)


def ricci_normal(p: IsoProfile, V=None):
    """Ricci curvature in the radial direction, ``-A A'' - A'^2 / 2``."""
    A, dA, d2A = _at(p, V)
    with np.errstate(invalid="ignore"):
        return _masked(p, V, -A * d2A - 0.5 * dA * dA)


def ricci_tangential(p: IsoProfile, V=None):
    """Ricci curvature along the spheres, ``(R - Ric(nu, nu)) / 2``."""
    A, dA, d2A = _at(p, V)
    with np.errstate(divide="ignore", invalid="ignore"):
        return _masked(p, V, 4.0 * math.pi / A - 0.5 * A * d2A - 0.5 * dA * dA)


def hawking_mass(p: IsoProfile, V=None, form="A"):
    """Hawking mass of the symmetric spheres.

    ``form="A"`` uses A and A'; ``form="F"`` uses F and F', which also covers
    tips with the smooth-tip slope convention.
    """
    if form == "F":
        if V is None:
            F, dF = p.F, p.dF
        else:
            A, dA, _ = p.derivs(V)
            F, dF = A ** 1.5, 1.5 * np.sqrt(A) * dA
        out = np.cbrt(F) * (THIRTY_SIX_PI - dF * dF) / MASS_CONST
        return out if np.ndim(out) else float(out)
    if form != "A":
        raise ArgumentError(f"form must be 'A' or 'F', got {form!r}")
    A, dA, _ = _at(p, V)
    with np.errstate(invalid="ignore"):
        out = np.sqrt(A / SIXTEEN_PI) * (1.0 - A * dA * dA / SIXTEEN_PI)
    if V is None:
        out = np.where(np.isfinite(dA), out, hawking_mass(p, None, "F"))
    return out if np.ndim(out) else float(out)


def hawking_mass_slope(p: IsoProfile, V=None):
    """``m'(V) = (A'/16pi) sqrt(A/16pi) R``."""
    A, dA, _ = _at(p, V)
    R = np.asarray(scalar_curvature(p, V))
    with np.errstate(invalid="ignore"):
        out = dA / SIXTEEN_PI * np.sqrt(A / SIXTEEN_PI) * R
    return out if np.ndim(out) else float(out)


@dataclass(frozen=True, eq=False)
class MassSeries:
    V: np.ndarray
    m: np.ndarray
    m_ric: np.ndarray
    m_r: np.ndarray
    config: ComparisonConfig

    def rows(self):
        return np.column_stack([self.V, self.m, self.m_ric, self.m_r])

    def column(self, which):
        if which not in ("m", "m_ric", "m_r"):
            raise ArgumentError(f"unknown mass {which!r}")
        return getattr(self, which)

    def window(self, start, stop=None):
        """Rows ``start:stop`` (e.g. to drop samples next to a singular tip)."""
        sl = slice(start, stop)
        return MassSeries(self.V[sl], self.m[sl], self.m_ric[sl], self.m_r[sl], self.config)

    def __len__(self):
        return len(self.V)


def mass_series(p: IsoProfile, cfg: ComparisonConfig = ComparisonConfig()) -> MassSeries:
    """Hawking, Ricci-curvature and scalar-curvature masses at every sample.

    ``m_Ric = (36 pi - F'^2) - (9 eps Ric0 / 2) F^(2/3)`` and
    ``m_R = F^(1/3) (36 pi - F'^2) - (3 R0 / 2) F``.
    """
    F, dF = p.F, p.dF
    core = THIRTY_SIX_PI - dF * dF
    m = hawking_mass(p, None, "F")
    m_ric = core - 4.5 * cfg.eps * cfg.Ric0 * F ** (2.0 / 3.0)
    m_r = np.cbrt(F) * core - 1.5 * cfg.R0 * F
    if not (np.all(np.isfinite(m)) and np.all(np.isfinite(m_ric)) and np.all(np.isfinite(m_r))):
        raise DerivativeError("non-finite mass value")
    return MassSeries(p.V.copy(), m, m_ric, m_r, cfg)


@dataclass(frozen=True)
class MonotoneReport:
    which: str
    violations: tuple
    min: float
    max: float
    max_drop: float
    checked: int

    @property
    def monotone(self):
        return not self.violations


def check_monotone(s: MassSeries, which: str = "m", tol: float = 1e-8, half: bool = False) -> MonotoneReport:
    """List sample indices ``i`` where the mass drops from ``i-1`` to ``i`` by more than ``tol``.

    ``m_ric`` and ``m_r`` are only checked on the first half of the total
    volume, where they are claimed to be nondecreasing; ``half`` applies the
    same restriction to ``m`` (useful for closed manifolds).
    """
    y = s.column(which)
    n = len(y)
    if which != "m" or half:
        n = int(np.searchsorted(s.V, 0.5 * s.V[-1], side="right"))
    y = y[:n]
    drops = y[:-1] - y[1:]
    bad = tuple(int(i) + 1 for i in np.flatnonzero(drops > tol))
    return MonotoneReport(
        which=which,
        violations=bad,
        min=float(np.min(y)) if n else math.nan,
        max=float(np.max(y)) if n else math.nan,
        max_drop=float(max(np.max(drops), 0.0)) if n > 1 else 0.0,
        checked=n,
    )


@dataclass(frozen=True)
class PenroseVerdict:
    total_mass: float
    bound: float
    satisfied: bool
    equality: bool


def penrose_check(p: IsoProfile, area: Optional[float] = None, tol: float = 1e-8) -> PenroseVerdict:
    """Compare the total mass with ``sqrt(A / 16 pi)`` for the horizon area (or ``area``)."""
    if p.end.kind != "schwarzschild":
        raise NotAsymptoticallyFlat("profile has no asymptotically flat (Schwarzschild) end")
    a = p.horizon_area if area is None else float(area)
    if a < 0:
        raise ArgumentError("area must be nonnegative")
    m = p.end.m
    bound = math.sqrt(a / SIXTEEN_PI)
    return PenroseVerdict(m, bound, m >= bound - tol, abs(m - bound) <= tol)


def generalized_penrose_bound(areas) -> float:
    """``(sum_i (A_i / 16 pi)^(3/2))^(1/3)`` for several horizon components."""
    areas = np.asarray(list(areas), dtype=float)
    if areas.size == 0:
        raise ArgumentError("need at least one horizon area")
    if np.any(areas <= 0):
        raise ArgumentError("horizon areas must be positive")
    return float(np.sum((areas / SIXTEEN_PI) ** 1.5) ** (1.0 / 3.0))


def end_mass_mismatch(p: IsoProfile) -> float:
    """|Hawking mass at the last sample - end mass| for a Schwarzschild end."""
    if p.end.kind != "schwarzschild":
        raise NotAsymptoticallyFlat("profile has no Schwarzschild end")
    return abs(float(hawking_mass(p)[-1]) - p.end.m)


def minimal_spheres(p: IsoProfile, tol: float = 1e-12):
    """Volumes and areas of the symmetric spheres with H = 0.

    Exact zeros of the sampled A' are reported directly; sign changes are
    located by root finding on the interpolated slope.
    """
    from scipy.optimize import brentq

    out = []
    ok = np.flatnonzero(p.interior | ((p.A > 0) & np.isfinite(p.dA)))
    dA = p.dA
    for i in ok:
        if abs(dA[i]) <= tol:
            out.append((float(p.V[i]), float(p.A[i])))
    for i, j in zip(ok[:-1], ok[1:]):
        if j == i + 1 and dA[i] * dA[j] < 0 and abs(dA[i]) > tol and abs(dA[j]) > tol:
            v = brentq(lambda x: float(p.slope(x)), p.V[i], p.V[j], xtol=1e-14 * max(p.V[j], 1.0))
            out.append((v, float(p.area(v))))
    return sorted(out)


# -- inverse mean curvature flow ----------------------------------------------

@dataclass(frozen=True, eq=False)
class ImcfRecord:
    t: np.ndarray
    V: np.ndarray
    A: np.ndarray
    m: np.ndarray
    R: np.ndarray
    area_error: float
    mass_drops: tuple
    reached_end: bool


def imcf_evolve(p: IsoProfile, t_max: float, steps: int = 200, V_start: Optional[float] = None,
                rtol: float = 1e-11, tol: float = 1e-8, horizon_tol: float = 1e-6) -> ImcfRecord:
    """Flow the symmetric spheres outward with speed 1/H.

    In volume, ``dV/dt = A / A'``. Starting at a horizon (A' = 0) the flow
    leaves along ``V = sqrt(2 A0 t / A''(0))`` (entered at t = 1e-6, where
    the neglected terms are O(t^2)); |H| below ``horizon_tol`` times the
    round-sphere value counts as a horizon. Reaching H = 0 again raises
    ``FlowBreakdown`` with the volume where it happened; reaching the end of
    the sampled range stops early with ``reached_end`` set.
    """
    if not t_max > 0 or steps < 1:
        raise ArgumentError("need t_max > 0 and steps >= 1")
    lo = p._interp.x[0] if p.kind == "analytic" else p.V[0]
    hi = p._interp.x[-1] if p.kind == "analytic" else p.V[-1]
    v0 = lo if V_start is None else float(V_start)
    if not lo <= v0 < hi:
        raise DomainError(f"start volume {v0} outside [{lo}, {hi})")
    A0, H0, d2A0 = (float(x) for x in p.derivs(v0))
    t0 = 0.0
    # a sampled horizon carries a small interpolation residue in H
    h_floor = horizon_tol * 2.0 * math.sqrt(FOUR_PI / A0)
    if H0 <= h_floor:
        if abs(H0) <= h_floor and d2A0 > 0:
            t0 = 1e-6
            v0 = v0 + math.sqrt(2.0 * A0 * t0 / d2A0)
            H0 = float(p.slope(v0))
        if H0 <= 0 or t0 == 0:
            raise FlowBreakdown("mean curvature is not positive at the start", volume=v0)
    span_hi = hi

    def rhs(t, y):
        a, h, _ = p.derivs(min(max(y[0], lo), span_hi))
        return [a / h] if h > 0 else [0.0]

    h_stop = 1e-9 * abs(H0) if H0 > 0 else 1e-12

    def breakdown(t, y):
        return float(p.slope(min(max(y[0], lo), span_hi))) - h_stop

    breakdown.terminal = True
    breakdown.direction = -1

    def at_end(t, y):
        return span_hi - y[0]

    at_end.terminal = True

    sol = solve_ivp(rhs, (t0, t_max), [v0], method="DOP853", dense_output=True, rtol=rtol,
                    atol=1e-14 * max(abs(hi), 1.0), events=(breakdown, at_end))
    if sol.status == -1:
        # step size collapse: the speed A/H blows up as H -> 0
        raise FlowBreakdown(f"integration failed near H = 0: {sol.message}", volume=float(sol.y[0, -1]))
    if sol.t_events[0].size:
        raise FlowBreakdown("mean curvature reached zero", volume=float(sol.y_events[0][0][0]))
    t = np.linspace(0.0, sol.t[-1], steps + 1)
    t = np.concatenate([[t0], t[t > t0]]) if t0 else t
    V = sol.sol(t)[0]
    A = np.asarray(p.area(np.clip(V, lo, hi)))
    expected = A0 * np.exp(t)
    err = float(np.max(np.abs(A - expected) / expected))
    m = np.asarray(hawking_mass(p, np.clip(V, lo, hi)))
    R = np.asarray(scalar_curvature(p, np.clip(V, lo, hi)))
    drops = tuple(int(i) + 1 for i in np.flatnonzero((m[:-1] - m[1:] > tol) & (R[1:] >= -tol) & (R[:-1] >= -tol)))
    return ImcfRecord(t, V, A, m, R, err, drops, bool(sol.t_events[1].size))


# -- constructors -------------------------------------------------------------

def flat_profile(V_max: float = 100.0, samples: int = 400) -> IsoProfile:
    """Euclidean space: ``A = (36 pi)^(1/3) V^(2/3)``, capped at the origin."""
    if not V_max > 0 or samples < 4:
        raise ArgumentError("need V_max > 0 and samples >= 4")
    k = geometry.SPHERE_CONST
    V = V_max * np.linspace(0.0, 1.0, samples + 1) ** 1.5
    with np.errstate(divide="ignore"):
        A = k * V ** (2.0 / 3.0)
        dA = (2.0 / 3.0) * k * V ** (-1.0 / 3.0)
        d2A = -(2.0 / 9.0) * k * V ** (-4.0 / 3.0)
    dA[0], d2A[0] = np.inf, -np.inf
    return IsoProfile.from_arrays(V, A, dA, d2A, end=EndDescriptor.schwarzschild(0.0))


def _sphere_cap(rho, s):
    sn, cs = np.sin(s), np.cos(s)
    V = 2.0 * math.pi * rho ** 3 * (s - sn * cs)
    A = FOUR_PI * rho * rho * sn * sn
    with np.errstate(divide="ignore"):
        dA = 2.0 * cs / (sn * rho)
        d2A = -1.0 / (2.0 * math.pi * rho ** 4 * sn ** 4)
    return V, A, dA, d2A


def round_sphere_profile(radius: float = 1.0, samples: int = 400) -> IsoProfile:
    """The round 3-sphere of the given radius, tip to tip."""
    if not radius > 0 or samples < 4:
        raise ArgumentError("need radius > 0 and samples >= 4")
    s = np.linspace(0.0, math.pi, samples + 1)
    V, A, dA, d2A = _sphere_cap(radius, s)
    V[-1] = 2.0 * math.pi ** 2 * radius ** 3
    A[0] = A[-1] = 0.0
    dA[0], dA[-1] = np.inf, -np.inf
    d2A[0] = d2A[-1] = -np.inf
    return IsoProfile.from_arrays(V, A, dA, d2A, end=EndDescriptor.compact())


def _schwarzschild_arrays(g, r, v_offset=0.0, r_ref=None):
    r = np.asarray(r, dtype=float)
    A = np.asarray(geometry.sphere_area(g, r))
    dA = np.asarray(geometry.mean_curvature(g, r))
    d2A = np.asarray(geometry.area_second_derivative(g, r))
    prim = _volume_primitive(g, r)
    ref = _volume_primitive(g, r[0] if r_ref is None else r_ref)
    return v_offset + prim - ref, A, dA, d2A


def _volume_primitive(g, r):
    # antiderivative of 4 pi s^2 psi^6, valid on both sheets
    h = 0.5 * g.m
    r = np.asarray(r, dtype=float)
    total = 0.0
    for k in range(7):
        c = math.comb(6, k) * h ** k
        total = total + (c * np.log(r) if k == 3 else c * r ** (3 - k) / (3 - k))
    return FOUR_PI * total


def schwarzschild_profile(m: float = 1.0, r_max: float = 100.0, samples: int = 400) -> IsoProfile:
    """Schwarzschild exterior from the horizon ``r = m/2`` out to ``r_max``.

    Radii are log-spaced; volumes use the closed-form antiderivative of the
    volume element, derivatives the closed forms in ``r``.
    """
    if m == 0:
        return flat_profile(FOUR_PI / 3.0 * r_max ** 3, samples)
    g = geometry.SchwarzschildMetric(m)
    r0 = g.horizon_radius
    if not r_max > r0 or samples < 4:
        raise ArgumentError("need r_max beyond the horizon and samples >= 4")
    r = np.geomspace(r0, r_max, samples + 1)
    r[0] = r0
    V, A, dA, d2A = _schwarzschild_arrays(g, r)
    dA[0] = 0.0
    return IsoProfile.from_arrays(V, A, dA, d2A, end=EndDescriptor.schwarzschild(m))


def counterexample_profile(target_area: float, total_mass: float = 1.0, cap_samples: int = 200,
                           samples: int = 400, r_max: float = 100.0) -> IsoProfile:
    """Complete manifold with a large minimal sphere hidden behind a small horizon.

    A round cap is followed past its equator (a minimal sphere of area at
    least ``target_area``) and glued, in area and mean curvature, to the
    inner sheet of Schwarzschild of mass ``total_mass``. The profile then
    crosses the Schwarzschild neck (area 16 pi m^2) into the exterior. The
    cap has R = 6 / rho^2 > 0, the rest R = 0, and the total mass is
    ``total_mass`` although the inner minimal sphere is much larger than
    16 pi m^2.
    """
    m = float(total_mass)
    if not m > 0:
        raise ArgumentError("total mass must be positive")
    if not target_area > SIXTEEN_PI * m * m:
        raise ArgumentError(f"target area must exceed 16 pi m^2 = {SIXTEEN_PI * m * m}")
    g = geometry.SchwarzschildMetric(m)
    # equal Hawking masses at the junction: m = rho_j sin(s)^2 / 2, and the cap's
    # equator area 4 pi rho_j^3 / (2m) must reach the target
    rho_j = (target_area * 2.0 * m / FOUR_PI) ** (1.0 / 3.0) * (1.0 + 1e-12)
    sin_j = math.sqrt(2.0 * m / rho_j)
    s_j = math.pi - math.asin(sin_j)
    rho_c = rho_j / sin_j
    r_j = geometry.coordinate_radius(g, rho_j, outer=False)

    s = np.linspace(0.0, s_j, cap_samples + 1)
    if not np.any(np.isclose(s, 0.5 * math.pi, rtol=0, atol=1e-14)):
        s = np.sort(np.append(s, 0.5 * math.pi))
    Vc, Ac, dAc, d2Ac = _sphere_cap(rho_c, s)
    Ac[0], dAc[0], d2Ac[0] = 0.0, np.inf, -np.inf
    dAc[np.isclose(s, 0.5 * math.pi, rtol=0, atol=1e-14)] = 0.0

    r0 = g.horizon_radius
    n_in = samples // 3
    r_in = np.geomspace(r_j, r0, n_in + 1)[1:]
    r_out = np.geomspace(r0, r_max, samples - n_in + 1)[1:]
    r = np.concatenate([r_in[:-1], [r0], r_out])
    Vs, As, dAs, d2As = _schwarzschild_arrays(g, r, v_offset=Vc[-1], r_ref=r_j)
    dAs[r == r0] = 0.0
    V = np.concatenate([Vc, Vs])
    A = np.concatenate([Ac, As])
    dA = np.concatenate([dAc, dAs])
    d2A = np.concatenate([d2Ac, d2As])
    return IsoProfile.from_arrays(V, A, dA, d2A, end=EndDescriptor.schwarzschild(m))


def random_nonneg_profile(rng, horizon_area: Optional[float] = None, V_max: Optional[float] = None,
                          samples: int = 300, bumps: int = 3) -> IsoProfile:
    """Random profile from a horizon with R >= 0 by construction.

    Scalar curvature is ``R = kappa (8 pi / A) b(V)`` with ``kappa < 1`` and
    ``b`` a sum of smooth bumps bounded by 1, so A'' > 0 whenever A' = 0 and
    the slope never turns negative. The profile ODE
    ``A'' = (8 pi / A - R - 1.5 A'^2) / (2A)`` is integrated from
    ``A = A_h, A' = 0``. Past the bumps R = 0, so the exterior is exactly
    Schwarzschild with mass equal to the final Hawking mass.
    """
    A_h = float(rng.uniform(1.0, 100.0)) if horizon_area is None else float(horizon_area)
    scale = (A_h / FOUR_PI) ** 1.5
    V_max = float(rng.uniform(20.0, 60.0)) * scale if V_max is None else float(V_max)
    kappa = float(rng.uniform(0.1, 0.95))
    centers = rng.uniform(0.05, 0.6, bumps) * V_max
    widths = rng.uniform(0.02, 0.2, bumps) * V_max
    heights = rng.uniform(0.0, 1.0, bumps)
    heights = heights / max(heights.sum(), 1e-12)

    def bump(V):
        out = 0.0
        for c, w, h in zip(centers, widths, heights):
            u = (V - c) / w
            if abs(u) < 1.0:
                out += h * math.exp(1.0 - 1.0 / (1.0 - u * u))
        return out

    def R_of(V, A):
        return kappa * 8.0 * math.pi / A * bump(V)

    def rhs(V, y):
        A, dA = y
        return [dA, (8.0 * math.pi / A - R_of(V, A) - 1.5 * dA * dA) / (2.0 * A)]

    V = V_max * np.linspace(0.0, 1.0, samples + 1) ** 2
    sol = solve_ivp(rhs, (0.0, V_max), [A_h, 0.0], method="DOP853", t_eval=V, rtol=1e-12,
                    atol=1e-13 * A_h)
    if not sol.success:
        raise DerivativeError(f"profile integration failed: {sol.message}")
    A, dA = sol.y
    d2A = np.array([rhs(v, (a, da))[1] for v, a, da in zip(V, A, dA)])
    m_end = math.sqrt(A[-1] / SIXTEEN_PI) * (1.0 - A[-1] * dA[-1] ** 2 / SIXTEEN_PI)
    return IsoProfile.from_arrays(V, A, dA, d2A, end=EndDescriptor.schwarzschild(m_end))


# -- metric round trip -----------------------------------------------------

@dataclass(frozen=True, eq=False)
class RadialMetric:
    """Conformally flat radial metric ``u(r)^4 (dr^2 + r^2 dsigma^2)`` on samples.

    ``V`` carries the enclosed volume at each radius. In the volume gauge the
    same metric is ``dV^2 / A^2 + (A / 4 pi) dsigma^2``.
    """

    r: np.ndarray
    u: np.ndarray
    V: np.ndarray

    @property
    def area(self):
        return FOUR_PI * self.r ** 2 * self.u ** 4

    def radial_length_element(self):
        """``ds/dV = 1 / A`` at the samples."""
        return 1.0 / self.area


def from_metric(source, r=None, u=None, end=None) -> IsoProfile:
    """Profile of a conformally flat radial metric.

    ``source`` is a :class:`SchwarzschildMetric` (with radii ``r``), a
    :class:`RadialMetric`, or None with ``r``/``u`` sample arrays. Volumes of
    sampled metrics come from the exact antiderivative of a cubic spline
    through ``dV/dlog r = 4 pi r^3 u^6`` (or ``4 pi r^2 u^6`` in r when the
    samples start at r = 0), offset by the first entry of ``RadialMetric.V``.
    """
    if isinstance(source, geometry.SchwarzschildMetric):
        if r is None:
            raise ArgumentError("radii are required for a Schwarzschild source")
        r = np.asarray(r, dtype=float)
        if np.any(np.diff(r) <= 0):
            raise ArgumentError("radii must be strictly increasing")
        if source.m == 0:
            k = geometry.SPHERE_CONST
            V = FOUR_PI / 3.0 * r ** 3
            with np.errstate(divide="ignore"):
                A, dA, d2A = k * V ** (2 / 3), (2 / 3) * k * V ** (-1 / 3), -(2 / 9) * k * V ** (-4 / 3)
            return IsoProfile.from_arrays(V, A, dA, d2A, end=EndDescriptor.schwarzschild(0.0))
        if r[0] < source.horizon_radius:
            raise DomainError("radii must lie outside the horizon")
        A = np.asarray(geometry.sphere_area(source, r))
        V = np.asarray(geometry.enclosed_volume(source, r))
        dA = np.asarray(geometry.mean_curvature(source, r))
        d2A = np.asarray(geometry.area_second_derivative(source, r))
        return IsoProfile.from_arrays(V, A, dA, d2A, end=end or EndDescriptor.schwarzschild(source.m))
    v_offset = 0.0
    if isinstance(source, RadialMetric):
        r, u, v_offset = source.r, source.u, float(source.V[0])
    elif source is not None:
        raise ArgumentError(f"unsupported metric source {type(source).__name__}")
    r = np.asarray(r, dtype=float)
    u = np.broadcast_to(np.asarray(u, dtype=float), r.shape)
    if np.any(u <= 0) or np.any(r < 0):
        raise ArgumentError("need u > 0 and r >= 0")
    if np.any(np.diff(r) <= 0):
        raise ArgumentError("radii must be strictly increasing (volume must increase)")
    if r[0] > 0:
        # log r suits both geometric radii and the blow-up of r at a far tip
        t = np.log(r)
        dV = CubicSpline(t, FOUR_PI * r ** 3 * u ** 6).antiderivative()
    else:
        t = r
        dV = CubicSpline(t, FOUR_PI * r ** 2 * u ** 6).antiderivative()
    V = v_offset + dV(t) - dV(t[0])
    A = FOUR_PI * r ** 2 * u ** 4
    return IsoProfile.from_samples(V, A, end=end)


def build_metric(p: IsoProfile, r_ref: Optional[float] = None) -> RadialMetric:
    """Conformally flat form of a profile.

    With areal radius ``rho = sqrt(A / 4 pi)`` and ``ds = dV / A``, a
    conformally flat radius obeys ``d log r = ds / rho``, so
    ``log r = int sqrt(4 pi) A^(-3/2) dV``; then ``u = sqrt(rho / r)``. The
    constant is fixed by ``r_ref`` at the first sample, by the Schwarzschild
    horizon radius ``m/2`` for a horizon profile with a Schwarzschild end, and
    by ``r = rho`` at the first sample otherwise. A tip (A = 0) maps to r = 0.
    """
    from numpy.polynomial.legendre import leggauss

    V, A = p.V, p.A
    start = 1 if A[0] == 0 else 0
    nodes, weights = leggauss(8)
    logs = np.zeros(len(V))
    for i in range(start, len(V) - 1):
        if A[i + 1] == 0:
            logs[i + 1] = np.inf
            break
        a, b = V[i], V[i + 1]
        x = 0.5 * (b - a) * nodes + 0.5 * (a + b)
        logs[i + 1] = logs[i] + 0.5 * (b - a) * np.sum(weights * math.sqrt(FOUR_PI) * p.area(x) ** -1.5)
    rho = np.sqrt(A / FOUR_PI)
    if r_ref is not None:
        r0 = float(r_ref)
    elif start == 0 and p.end.kind == "schwarzschild" and p.end.m and p.end.m > 0 and p.dA[0] == 0:
        r0 = 0.5 * p.end.m
    else:
        r0 = rho[start]
    r = r0 * np.exp(logs - logs[start])
    r[:start] = 0.0
    keep = np.isfinite(r) & (r > 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        u = np.sqrt(rho / r)
    return RadialMetric(r[keep], u[keep], V[keep])


# -- file format ---------------------------------------------------------------

def _fmt(x):
    return np.format_float_positional(float(x), precision=12, unique=False, fractional=False, trim="-")


def format_profile(p: IsoProfile) -> str:
    buf = io.StringIO()
    buf.write("V,A\n")
    for v, a in zip(p.V, p.A):
        buf.write(f"{_fmt(v)},{_fmt(a)}\n")
    meta = p.end.metadata()
    if meta:
        buf.write(f"# {meta}\n")
    return buf.getvalue()


def write_profile(p: IsoProfile, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(format_profile(p))


def parse_profile(text: str, spline: str = "cubic") -> IsoProfile:
    lines = text.splitlines()
    end = EndDescriptor()
    V, A = [], []
    header_seen = False
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            end = _parse_meta(line[1:].strip(), lineno, end)
            continue
        if not header_seen:
            if [c.strip() for c in line.split(",")] != ["V", "A"]:
                raise ProfileFormatError(f"expected header 'V,A', got {line!r}", lineno)
            header_seen = True
            continue
        row = next(csv.reader([line]))
        if len(row) != 2:
            raise ProfileFormatError(f"expected 2 fields, got {len(row)}", lineno)
        try:
            v, a = float(row[0]), float(row[1])
        except ValueError:
            raise ProfileFormatError(f"non-numeric field in {line!r}", lineno) from None
        if not (math.isfinite(v) and math.isfinite(a)):
            raise ProfileFormatError("non-finite value", lineno)
        if V and v <= V[-1]:
            raise ProfileFormatError(f"volumes must be strictly increasing ({v} after {V[-1]})", lineno)
        if a < 0:
            raise ProfileFormatError(f"negative area {a}", lineno)
        V.append(v)
        A.append(a)
    if not header_seen:
        raise ProfileFormatError("missing header 'V,A'", 1)
    if len(V) < 5:
        raise ProfileFormatError(f"need at least 5 rows, got {len(V)}", len(lines))
    try:
        return IsoProfile.from_samples(V, A, end=end, spline=spline)
    except ArgumentError as exc:
        raise ProfileFormatError(str(exc)) from None


def _parse_meta(text, lineno, end):
    fields = dict(item.split("=", 1) for item in text.split() if "=" in item)
    if "end" not in fields:
        return end
    kind = fields["end"]
    if kind == "schwarzschild":
        try:
            return EndDescriptor.schwarzschild(float(fields["m"]))
        except (KeyError, ValueError):
            raise ProfileFormatError("schwarzschild end needs m=<value>", lineno) from None
    if kind == "compact":
        return EndDescriptor.compact()
    raise ProfileFormatError(f"unknown end kind {kind!r}", lineno)


def read_profile(path, spline: str = "cubic") -> IsoProfile:
    with open(path) as fh:
        return parse_profile(fh.read(), spline=spline)
