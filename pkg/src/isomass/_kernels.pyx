# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the scalar-mass branch integral and w_eps.

Loop-for-loop mirror of ``_kernels_py``; results agree with it to rounding.
"""
from libc.math cimport atan2, cbrt, pow, sqrt, M_PI

from .errors import EvaluationError, InvalidPath

cdef double FOUR_PI = 4.0 * M_PI
cdef double THIRTY_SIX_PI = 36.0 * M_PI
cdef double SHORT_BRANCH = 1e-3  # sqrt(1 - a/b) below which only the singular terms count


cdef inline double _radicand(double c1, double p, double x) nogil:
    cdef double t = cbrt(x)
    if c1 == 0.0:
        return THIRTY_SIX_PI - p * t * t
    return THIRTY_SIX_PI - c1 / t - p * t * t


cpdef double ric_branch_integral(double c, double beta, double x) except? -1.0:
    cdef double s = cbrt(x)
    cdef double d = c - beta * s * s
    cdef double rb = sqrt(beta)
    if d < -1e-12 * max(abs(c), 1.0):
        raise InvalidPath(f"negative radicand {d:.3e} on the Ricci-constant branch")
    if d < 0.0:
        d = 0.0
    d = sqrt(d)
    return 3.0 * (c / (2.0 * beta * rb) * atan2(s * rb, d) - s * d / (2.0 * beta))


cpdef double mr_branch_integral(double c1, double p, double a, double b, long n) except? -1.0:
    cdef double t, slope, curv, k, k1, h, x, gx, q, r, r_last, r_prev, odd = 0.0, even = 0.0, first
    cdef long i
    if a >= b:
        return 0.0
    if c1 == 0.0:
        # the round-sphere path: the radicand has the Ricci-branch form
        return ric_branch_integral(THIRTY_SIX_PI, p, b) - ric_branch_integral(THIRTY_SIX_PI, p, a)
    t = cbrt(b)
    slope = c1 / (3.0 * b * t) - 2.0 * p / (3.0 * t)
    if not slope < 0:
        raise InvalidPath(f"scalar-mass branch does not end on a simple root (g'={slope})")
    curv = -4.0 * c1 / (9.0 * b * b * t) + 2.0 * p / (9.0 * b * t)
    k = pow(b * -slope, -0.5)
    k1 = -k * b * curv / (4.0 * -slope)
    q = sqrt(1.0 - a / b)
    if q < SHORT_BRANCH:
        # the remainder is O(q^5); the radicand is all rounding on a grid this fine
        return 2.0 * k * b * q + 2.0 / 3.0 * k1 * b * q * q * q
    h = (b - a) / n
    r_prev = 0.0
    r_last = 0.0
    first = 0.0
    for i in range(n):
        x = i * h + a
        gx = _radicand(c1, p, x)
        if gx <= 0.0:
            raise EvaluationError("non-positive radicand on scalar-mass branch", abscissa=x)
        q = sqrt(1.0 - x / b)
        r = 1.0 / sqrt(gx) - k / q - k1 * q
        if i == 0:
            first = r
        elif i % 2:
            odd += r
        else:
            even += r
        r_prev = r_last
        r_last = r
    # residual is linear in (b - x) at leading order
    r = 2.0 * r_last - r_prev
    q = sqrt(1.0 - a / b)
    return h / 3.0 * (first + r + 4.0 * odd + 2.0 * even) + 2.0 * k * b * q + 2.0 / 3.0 * k1 * b * q * q * q


cpdef double weps_one(double eps, double z, long n) except? -1.0:
    cdef double z_left = FOUR_PI / (3.0 - 2.0 * eps)
    cdef double one_m, y, b, c, first = 0.0
    if z <= z_left:
        return 0.25 * z / (M_PI * sqrt(eps))
    one_m = 1.0 - eps
    y = sqrt(z) * (FOUR_PI - z) / (2.0 * one_m)
    b = pow(z, 1.5)
    if y > 0.0:
        c = THIRTY_SIX_PI - 27.0 * one_m * pow(y, 2.0 / 3.0)
        first = ric_branch_integral(c, 9.0 * eps, y)
    return (first + mr_branch_integral(18.0 * one_m * y, 9.0, y, b, n)) / (M_PI * M_PI)


def weps_values(double eps, double[::1] zs, long n, double[::1] out):
    cdef Py_ssize_t i
    for i in range(zs.shape[0]):
        out[i] = weps_one(eps, zs[i], n)
    return out
