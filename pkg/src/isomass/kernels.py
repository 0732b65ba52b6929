"""Backend selection for the hot kernels.

The compiled extension is used when it imports; otherwise, or when the
environment variable ``ISOMASS_PURE_PYTHON`` is set to a non-empty value
other than ``0``, the numpy fallback is used. Both expose the same
functions with the same signatures.
"""
import os

import numpy as np

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("ISOMASS_PURE_PYTHON", "") in ("", "0"):
    try:
        from . import _kernels as _compiled
    except ImportError:
        _compiled = None
    if _compiled is not None:
        _impl = _compiled
        BACKEND = "cython"


def mr_branch_integral(c1, p, a, b, n=1000):
    """``int_a^b (36 pi - c1 x^(-1/3) - p x^(2/3))^(-1/2) dx``, right end a simple root."""
    return float(_impl.mr_branch_integral(float(c1), float(p), float(a), float(b), int(n)))


def ric_branch_integral(c, beta, x):
    """``int_0^x (c - beta t^(2/3))^(-1/2) dt`` in closed form (scalar or array ``x``)."""
    if np.ndim(x):
        return _kernels_py.ric_branch_integral(c, beta, x)
    return float(_impl.ric_branch_integral(float(c), float(beta), float(x)))


def weps_values(eps, zs, n=1000):
    """Vector of ``w_eps(z)`` values; no range checks (see ``volcomp.w_eps``)."""
    zs = np.ascontiguousarray(zs, dtype=float)
    if _impl is _kernels_py:
        return _kernels_py.weps_values(eps, zs, n)
    flat = zs.ravel()
    out = np.empty_like(flat)
    _impl.weps_values(float(eps), flat, int(n), out)
    return out.reshape(zs.shape)


def weps_one(eps, z, n=1000):
    return float(_impl.weps_one(float(eps), float(z), int(n)))
