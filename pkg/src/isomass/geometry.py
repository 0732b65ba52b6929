"""Closed forms for the spatial Schwarzschild slice and radial conformal ends.

The metric is ``(1 + m/2r)^4 delta`` on ``R^3 - {0}`` in the conformal
radius ``r``. Every derivative used elsewhere is written out in ``r``;
nothing here is differenced numerically.

Functions accept scalars or numpy arrays and return the same kind.
"""
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import ArgumentError, ConsistencyError, DomainError
from .quadrature import integrate_smooth

FOUR_PI = 4.0 * math.pi
SPHERE_CONST = (36.0 * math.pi) ** (1.0 / 3.0)  # flat A = SPHERE_CONST * V^(2/3)


@dataclass(frozen=True)
class SchwarzschildMetric:
    """Spatial Schwarzschild slice of mass ``m``.

    Negative masses are rejected unless ``allow_negative`` is set; the
    formulas are unchanged but there is no horizon.
    """

    m: float = 1.0
    n: int = 3
    allow_negative: bool = False

    def __post_init__(self):
        if not math.isfinite(self.m):
            raise DomainError(f"mass must be finite, got {self.m}")
        if self.m < 0 and not self.allow_negative:
            raise DomainError(f"negative mass {self.m} requires allow_negative=True")
        if int(self.n) != self.n or self.n < 3:
            raise DomainError(f"dimension must be an integer >= 3, got {self.n}")
        if self.n != 3:
            raise DomainError("only the 3-dimensional slice is implemented")

    @property
    def horizon_radius(self):
        return 0.5 * self.m if self.m > 0 else 0.0

    def psi(self, r):
        return 1.0 + self.m / (2.0 * r)


@dataclass(frozen=True)
class RadialConformalEnd:
    """Harmonic radial conformal factor ``v(r) = A + B / r^(n-2)``."""

    A: float
    B: float
    n: int = 3

    def __post_init__(self):
        if not self.A > 0:
            raise DomainError(f"leading coefficient A must be positive, got {self.A}")
        if int(self.n) != self.n or self.n < 3:
            raise DomainError(f"dimension must be an integer >= 3, got {self.n}")

    def factor(self, r):
        return self.A + self.B / np.asarray(r, dtype=float) ** (self.n - 2)


def _radius(r, lower=0.0, closed=False, what="radius"):
    arr = np.asarray(r, dtype=float)
    bad = (arr < lower) if closed else (arr <= lower)
    if np.any(bad) or not np.all(np.isfinite(arr)):
        cmp = ">=" if closed else ">"
        raise DomainError(f"{what} must be {cmp} {lower}, got {r!r}")
    return arr


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def sphere_area(g: SchwarzschildMetric, r):
    """Area ``4 pi r^2 psi^4`` of the coordinate sphere of radius ``r``."""
    r = _radius(r)
    return _out(FOUR_PI * r * r * g.psi(r) ** 4)


def area_slope(g, r):
    """``dA/dr = 8 pi psi^3 (r - m/2)``."""
    r = _radius(r)
    return _out(8.0 * math.pi * g.psi(r) ** 3 * (r - 0.5 * g.m))


def volume_slope(g, r):
    """``dV/dr = 4 pi r^2 psi^6``."""
    r = _radius(r)
    return _out(FOUR_PI * r * r * g.psi(r) ** 6)


def enclosed_volume(g: SchwarzschildMetric, r, n: int = 2000):
    """Volume between the horizon ``r = m/2`` and ``r``.

    Simpson's rule in ``u = log s``, where the integrand
    ``4 pi s^3 psi(s)^6`` is smooth and slowly varying; for ``m = 0`` the
    flat ball volume is returned directly.
    """
    r0 = g.horizon_radius
    arr = _radius(r, lower=r0, closed=True, what="radius (inside horizon)") if g.m > 0 else _radius(r, closed=True)
    if g.m <= 0:
        if g.m < 0:
            raise DomainError("enclosed volume needs a horizon (m > 0) or flat space")
        return _out(FOUR_PI / 3.0 * arr ** 3)

    def one(rr):
        if rr == r0:
            return 0.0
        return integrate_smooth(
            lambda u: FOUR_PI * np.exp(3.0 * u) * g.psi(np.exp(u)) ** 6,
            math.log(r0), math.log(rr), n, check=False,
        )

    if arr.ndim == 0:
        return one(float(arr))
    return np.array([one(float(x)) for x in arr.ravel()]).reshape(arr.shape)


def enclosed_volume_exact(g: SchwarzschildMetric, r):
    """Antiderivative of ``4 pi s^2 psi(s)^6`` from the horizon, expanded termwise.

    ``s^2 (1 + m/2s)^6 = sum_k C(6,k) (m/2)^k s^(2-k)``; the ``k = 3`` term
    integrates to a logarithm.
    """
    if g.m <= 0:
        return _out(FOUR_PI / 3.0 * _radius(r, closed=True) ** 3)
    r0 = g.horizon_radius
    arr = _radius(r, lower=r0, closed=True, what="radius (inside horizon)")
    h = 0.5 * g.m

    def prim(s):
        total = 0.0
        for k in range(7):
            c = math.comb(6, k) * h ** k
            total = total + (c * np.log(s) if k == 3 else c * s ** (3 - k) / (3 - k))
        return total

    return _out(FOUR_PI * (prim(arr) - prim(r0)))


def mean_curvature(g: SchwarzschildMetric, r):
    """``H = (2r - m) / (r^2 psi^3)``, i.e. ``dA/dV`` along the coordinate spheres."""
    r = _radius(r)
    return _out((2.0 * r - g.m) / (r * r * g.psi(r) ** 3))


def mean_curvature_derivative(g, r):
    """``dH/dr`` in closed form."""
    r = _radius(r)
    p = g.psi(r)
    return _out((2.0 + (2.0 * r - g.m) * (-2.0 / r + 1.5 * g.m / (r * r * p))) / (r * r * p ** 3))


def area_second_derivative(g, r):
    """``d^2A/dV^2 = (dH/dr) / (dV/dr)`` at the sphere of radius ``r``."""
    return _out(np.asarray(mean_curvature_derivative(g, r)) / np.asarray(volume_slope(g, r)))


def hawking_mass_sphere(g: SchwarzschildMetric, r):
    """``sqrt(A/16pi) (1 - A H^2 / 16pi)`` for the coordinate sphere; identically ``m``."""
    a = np.asarray(sphere_area(g, r))
    h = np.asarray(mean_curvature(g, r))
    return _out(np.sqrt(a / (16.0 * math.pi)) * (1.0 - a * h * h / (16.0 * math.pi)))


def adm_mass_radial(end: RadialConformalEnd):
    """ADM mass ``(n-1) A B`` of the metric ``v^(4/(n-2)) delta``."""
    return (end.n - 1) * end.A * end.B


def areal_radius(g, r):
    """``rho = r psi^2``, so that ``A = 4 pi rho^2``."""
    r = _radius(r)
    return _out(r * g.psi(r) ** 2)


def coordinate_radius(g, rho, outer=True):
    """Invert :func:`areal_radius` on the outer (``r >= m/2``) or inner sheet."""
    rho = _radius(rho, lower=2.0 * max(g.m, 0.0), closed=True, what="areal radius")
    q = np.sqrt(np.maximum((rho - g.m) ** 2 - g.m ** 2, 0.0))
    r = 0.5 * ((rho - g.m) + q) if outer else 0.5 * ((rho - g.m) - q)
    return _out(r)


def embedding_height(g: SchwarzschildMetric, rho):
    """Height ``w = sqrt(8m (rho - 2m))`` of the paraboloid embedding in flat R^4.

    ``rho`` is the areal radius, not the conformal coordinate.
    """
    if not g.m > 0:
        raise DomainError("the embedding needs m > 0")
    rho = _radius(rho, lower=2.0 * g.m, closed=True, what="areal radius")
    return _out(np.sqrt(8.0 * g.m * (rho - 2.0 * g.m)))


def normal_distance(g, r):
    """Radial arclength antiderivative ``r + m log r - m^2/(4r)``.

    ``ds = psi^2 dr`` with ``psi^2 = 1 + m/r + m^2/(4 r^2)``; differences of
    this function are geodesic distances between coordinate spheres.
    """
    r = _radius(r)
    if g.m == 0:
        return _out(r)
    return _out(r + g.m * np.log(r) - g.m * g.m / (4.0 * r))


def radius_at_distance(g, r0, s):
    """Coordinate radius reached by moving signed distance ``s`` from ``r0``."""
    r0 = float(_radius(r0))
    if g.m == 0:
        if r0 + s <= 0:
            raise DomainError(f"normal flow by {s} leaves the domain from r={r0}")
        return r0 + s
    target = normal_distance(g, r0) + s
    lo, hi = r0, r0
    step = max(abs(s), 1e-12 * r0)
    f = lambda x: normal_distance(g, x) - target  # noqa: E731
    while f(lo) > 0:
        lo = max(lo - step, 0.5 * lo)
        step *= 2
        if lo < 1e-300:
            raise DomainError(f"normal flow by {s} leaves the domain from r={r0}")
    step = max(abs(s), 1e-12 * r0)
    while f(hi) < 0:
        hi += step
        step *= 2
    if lo == hi:
        return lo
    return brentq(f, lo, hi, xtol=1e-15 * r0, rtol=4 * np.finfo(float).eps, maxiter=200)


# -- cone cap -----------------------------------------------------------------

def _rk4(rhs, y0, t0, t1, steps):
    h = (t1 - t0) / steps
    ts = t0 + h * np.arange(steps + 1)
    ys = np.empty((steps + 1, len(y0)))
    ys[0] = y0
    y = np.asarray(y0, dtype=float)
    for i in range(steps):
        t = ts[i]
        k1 = rhs(t, y)
        k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1)
        k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2)
        k4 = rhs(t + h, y + h * k3)
        y = y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        ys[i + 1] = y
    return ts, ys


def zero_scalar_rhs(V, y):
    """``A'' = (4 pi - (3/4) A'^2 A) / A^2``: the R = 0 ODE of a symmetric profile."""
    a, da = y
    return np.array([da, (FOUR_PI - 0.75 * da * da * a) / (a * a)])


@dataclass(frozen=True)
class ConeCap:
    """Schwarzschild exterior glued to a flat cone across the sphere ``r = c``.

    Volumes are measured from the cone tip. ``V, A, dA`` sample the exterior
    on ``[V0, 100 V0]``; ``ubar = A / (SPHERE_CONST V^(2/3))`` is the
    normalised area, equal to ``a`` throughout the cone.
    """

    metric: SchwarzschildMetric
    c: float
    a: float
    A0: float
    H0: float
    V0: float
    V: np.ndarray = field(repr=False)
    A: np.ndarray = field(repr=False)
    dA: np.ndarray = field(repr=False)
    step_error: float = 0.0

    @property
    def ubar(self):
        return self.A / (SPHERE_CONST * self.V ** (2.0 / 3.0))

    @property
    def dubar(self):
        return (self.dA - 2.0 * self.A / (3.0 * self.V)) * self.V ** (-2.0 / 3.0) / SPHERE_CONST

    @property
    def d2A(self):
        return (FOUR_PI - 0.75 * self.dA ** 2 * self.A) / self.A ** 2

    def cone_area(self, V):
        V = np.asarray(V, dtype=float)
        return _out(self.a * SPHERE_CONST * V ** (2.0 / 3.0))

    def profile(self, inner_samples=200):
        """The whole manifold (cone plus exterior) as an analytic-derivative profile."""
        from .profile import EndDescriptor, IsoProfile

        k = self.a * SPHERE_CONST
        Vi = self.V0 * np.linspace(0.0, 1.0, inner_samples + 1)[1:-1]
        Ai = k * Vi ** (2.0 / 3.0)
        dAi = (2.0 / 3.0) * k * Vi ** (-1.0 / 3.0)
        d2Ai = -(2.0 / 9.0) * k * Vi ** (-4.0 / 3.0)
        V = np.concatenate([[0.0], Vi, self.V])
        A = np.concatenate([[0.0], Ai, self.A])
        dA = np.concatenate([[np.inf], dAi, self.dA])
        d2A = np.concatenate([[-np.inf], d2Ai, self.d2A])
        return IsoProfile.from_arrays(V, A, dA, d2A, end=EndDescriptor.schwarzschild(self.metric.m),
                                      kind="analytic")


def cone_cap_profile(g: SchwarzschildMetric, c: float, steps: int = 2000, span: float = 100.0) -> ConeCap:
    """Replace the Schwarzschild region inside ``r = c`` by a flat cone.

    The cone ``A = a SPHERE_CONST V^(2/3)`` is matched in area and mean
    curvature; equal Hawking masses force
    ``a^3 = 1 - m sqrt(16 pi / A0)``. Outside, the zero-scalar-curvature ODE
    is integrated with classical RK4 over ``[V0, span V0]``; a run at half
    the step size gives ``step_error`` (max relative change in A).
    """
    if not g.m > 0:
        raise DomainError("the cone cap needs m > 0")
    if not c > g.horizon_radius:
        raise DomainError(f"junction radius {c} must exceed the horizon radius {g.horizon_radius}")
    if steps < 2 or span <= 1:
        raise ArgumentError("need steps >= 2 and span > 1")
    A0 = sphere_area(g, c)
    H0 = mean_curvature(g, c)
    a3 = H0 * H0 * A0 / (16.0 * math.pi)
    # same number as 1 - m sqrt(16 pi / A0); the H form keeps the sign test honest
    if not 0.0 < a3 < 1.0:
        raise ConsistencyError(f"H^2 A / 16pi = {a3} at the junction; a cone cap needs it in (0, 1)")
    a = a3 ** (1.0 / 3.0)
    V0 = (A0 / (a * SPHERE_CONST)) ** 1.5
    V, Y = _rk4(zero_scalar_rhs, [A0, H0], V0, span * V0, steps)
    _, Y2 = _rk4(zero_scalar_rhs, [A0, H0], V0, span * V0, 2 * steps)
    err = float(np.max(np.abs(Y2[::2, 0] - Y[:, 0]) / Y[:, 0]))
    return ConeCap(metric=g, c=float(c), a=a, A0=A0, H0=H0, V0=V0, V=V, A=Y[:, 0], dA=Y[:, 1],
                   step_error=err)
