"""Finite-difference checks of the first and second variation along a normal flow.

Symmetric spheres are pushed along their unit normal (speed 1) by a
geodesic distance t. Then

    dA/dt = int H dmu = H A
    dH/dt = -|II|^2 - Ric(nu, nu),   |II|^2 = H^2 / 2 for round spheres,

the Laplacian term vanishing for a constant speed. Centered differences
over a ladder of steps are compared against these predictions, and the
observed convergence order is reported.
"""
import math
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from . import geometry
from .errors import ArgumentError, DomainError
from .geometry import SchwarzschildMetric
from .profile import IsoProfile, _sphere_cap, _volume_primitive, ricci_normal, scalar_curvature

DEFAULT_LADDER = (1e-2, 5e-3, 2.5e-3)
EXACT_TOL = 1e-11  # relative error treated as exact (rounding only)


@dataclass(frozen=True)
class RoundSphere:
    """Round 3-sphere of the given radius; probes are placed by geodesic distance from a pole."""

    radius: float = 1.0

    def __post_init__(self):
        if not self.radius > 0:
            raise DomainError("radius must be positive")


@dataclass(frozen=True)
class FlowProbe:
    """A symmetric sphere at ``r`` and the relative step ladder ``dt``.

    ``r`` is the conformal radius for a Schwarzschild (or flat, m = 0)
    metric and the polar distance for a :class:`RoundSphere`. Steps are
    multiplied by the areal radius of the sphere.
    """

    metric: Union[SchwarzschildMetric, RoundSphere]
    r: float
    dt: Tuple[float, ...] = DEFAULT_LADDER
    eta: float = 1.0

    def __post_init__(self):
        if self.eta != 1.0:
            raise ArgumentError("only the unit normal flow (eta = 1) is supported")
        d = np.asarray(self.dt, dtype=float)
        if d.size < 2 or np.any(d <= 0) or np.any(np.diff(d) >= 0):
            raise ArgumentError("dt must hold at least two strictly decreasing positive steps")
        if isinstance(self.metric, RoundSphere):
            if not 0 < self.r < math.pi * self.metric.radius:
                raise DomainError(f"polar distance {self.r} outside (0, pi R)")
        elif isinstance(self.metric, SchwarzschildMetric):
            if not self.r > 0:
                raise DomainError(f"radius must be positive, got {self.r}")
        else:
            raise ArgumentError(f"unsupported metric {type(self.metric).__name__}")

    @property
    def scale(self):
        return areal_radius(self.metric, self.r)

    @property
    def steps(self):
        return tuple(f * self.scale for f in self.dt)


def areal_radius(metric, r):
    if isinstance(metric, RoundSphere):
        return metric.radius * math.sin(r / metric.radius)
    return float(geometry.areal_radius(metric, r))


def _moved(metric, r, t):
    """Base point moved a signed geodesic distance t outward."""
    if isinstance(metric, RoundSphere):
        s = r + t
        if not 0 < s < math.pi * metric.radius:
            raise DomainError(f"normal flow by {t} leaves the sphere from {r}")
        return s
    return geometry.radius_at_distance(metric, r, t)


def sphere_area(metric, r):
    if isinstance(metric, RoundSphere):
        return 4.0 * math.pi * (metric.radius * math.sin(r / metric.radius)) ** 2
    return float(geometry.sphere_area(metric, r))


def mean_curvature(metric, r):
    if isinstance(metric, RoundSphere):
        R = metric.radius
        return 2.0 / (R * math.tan(r / R))
    return float(geometry.mean_curvature(metric, r))


def local_profile(metric, r, rel=1e-3) -> IsoProfile:
    """Three-sample analytic profile centred on the sphere at ``r``."""
    if isinstance(metric, RoundSphere):
        R = metric.radius
        s = np.array([r * (1 - rel), r, r * (1 + rel)]) / R
        V, A, dA, d2A = _sphere_cap(R, s)
        return IsoProfile.from_arrays(V, A, dA, d2A)
    rs = np.array([r * (1 - rel), r, r * (1 + rel)])
    # only the middle sample matters; the volume primitive is increasing on both sheets
    V = _volume_primitive(metric, rs)
    V = V - V[0] + 1.0
    A = np.asarray(geometry.sphere_area(metric, rs))
    dA = np.asarray(geometry.mean_curvature(metric, rs))
    d2A = np.asarray(geometry.area_second_derivative(metric, rs))
    return IsoProfile.from_arrays(V, A, dA, d2A)


@dataclass(frozen=True)
class VariationReport:
    measured: Tuple[float, ...]
    predicted: float
    errors: Tuple[float, ...]
    orders: Tuple[Optional[float], ...]
    exact: bool
    scale: float = 1.0
    ratio: float = 2.0

    @property
    def error(self):
        return self.errors[-1]

    @property
    def relative_error(self):
        """Error at the smallest step in units of the natural scale (A/rho or 1/rho^2)."""
        return self.errors[-1] / self.scale

    @property
    def order(self):
        return self.orders[-1] if self.orders else None

    @property
    def extrapolated(self):
        """Richardson value from the two smallest steps, assuming an h^2 leading error."""
        return self.measured[-1] + (self.measured[-1] - self.measured[-2]) / (self.ratio ** 2 - 1.0)

    @property
    def extrapolated_error(self):
        return abs(self.extrapolated - self.predicted) / self.scale


def _report(measured, predicted, scale, steps):
    errs = tuple(abs(m - predicted) for m in measured)
    tiny = EXACT_TOL * max(abs(predicted), scale, 1e-300)
    exact = all(e <= tiny for e in errs)
    orders = []
    for e1, e2, h1, h2 in zip(errs[:-1], errs[1:], steps[:-1], steps[1:]):
        orders.append(None if (e1 <= tiny or e2 <= tiny) else math.log(e1 / e2) / math.log(h1 / h2))
    return VariationReport(tuple(measured), predicted, errs, tuple(orders), exact, scale, steps[-2] / steps[-1])


def first_variation_check(probe: FlowProbe) -> VariationReport:
    """Centered differences of the area against ``H A``.

    When every error is at rounding level (the flat case, where A is
    quadratic in t) ``exact`` is set and the order is undefined.
    """
    g, r = probe.metric, probe.r
    measured = []
    for h in probe.steps:
        a_plus = sphere_area(g, _moved(g, r, h))
        a_minus = sphere_area(g, _moved(g, r, -h))
        measured.append((a_plus - a_minus) / (2.0 * h))
    A = sphere_area(g, r)
    H = mean_curvature(g, r)
    return _report(measured, H * A, A / probe.scale, probe.steps)


def ricci_normal_at(metric, r) -> float:
    return float(ricci_normal(local_profile(metric, r))[1])


def second_variation_check(probe: FlowProbe) -> VariationReport:
    """Centered differences of H against ``-H^2/2 - Ric(nu, nu)``."""
    g, r = probe.metric, probe.r
    measured = []
    for h in probe.steps:
        h_plus = mean_curvature(g, _moved(g, r, h))
        h_minus = mean_curvature(g, _moved(g, r, -h))
        measured.append((h_plus - h_minus) / (2.0 * h))
    H = mean_curvature(g, r)
    predicted = -0.5 * H * H - ricci_normal_at(g, r)
    return _report(measured, predicted, 1.0 / probe.scale ** 2, probe.steps)


def gauss_ricci_normal(metric, r) -> float:
    """``Ric(nu,nu) = R/2 - K + H^2/2 - |II|^2/2`` with ``K = 4 pi / A`` and ``|II|^2 = H^2/2``."""
    p = local_profile(metric, r)
    R = float(scalar_curvature(p)[1])
    A = float(p.A[1])
    H = float(p.dA[1])
    return 0.5 * R - 4.0 * math.pi / A + 0.25 * H * H


@dataclass(frozen=True)
class CmcReport:
    measured: float
    predicted: float
    H1: float
    H2: float

    @property
    def error(self):
        return abs(self.measured - self.predicted)


def cmc_rate(metric, r1: float, r2: float, dt: float = 1e-4) -> CmcReport:
    """Area rate of the volume-preserving flow moving sphere ``r1`` out at speed 1
    and sphere ``r2`` in at speed ``A1/A2``.

    To first order the enclosed volume is unchanged and the area changes at
    ``A1 (H1 - H2)``, which vanishes exactly when the mean curvatures agree.
    """
    A1, A2 = sphere_area(metric, r1), sphere_area(metric, r2)
    H1, H2 = mean_curvature(metric, r1), mean_curvature(metric, r2)
    rate2 = -A1 / A2
    h = dt * areal_radius(metric, r1)

    def total(t):
        return sphere_area(metric, _moved(metric, r1, t)) + sphere_area(metric, _moved(metric, r2, rate2 * t))

    measured = (total(h) - total(-h)) / (2.0 * h)
    return CmcReport(measured, A1 * (H1 - H2), H1, H2)


def equal_mean_curvature_partner(metric: SchwarzschildMetric, r: float) -> float:
    """Another coordinate sphere with the same H as ``r`` (beyond the maximum of H)."""
    if not metric.m > 0:
        raise DomainError("only Schwarzschild with m > 0 has distinct spheres of equal H")
    res = minimize_scalar(lambda x: -geometry.mean_curvature(metric, x),
                          bounds=(metric.horizon_radius, 100.0 * metric.m), method="bounded",
                          options={"xatol": 1e-12})
    r_peak = float(res.x)
    target = geometry.mean_curvature(metric, r)
    f = lambda x: geometry.mean_curvature(metric, x) - target  # noqa: E731
    if r < r_peak:
        hi = r_peak
        while f(hi) > 0:
            hi *= 2.0
        return brentq(f, r_peak, hi, xtol=1e-14)
    return brentq(f, metric.horizon_radius, r_peak, xtol=1e-14)
