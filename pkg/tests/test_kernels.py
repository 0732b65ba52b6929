import math
import os
import subprocess
import sys

import numpy as np
import pytest

from isomass import _kernels_py, kernels

compiled = pytest.importorskip("isomass._kernels") if kernels.BACKEND == "cython" else None
needs_compiled = pytest.mark.skipif(compiled is None, reason="compiled kernels not built")


def test_backend_flag():
    assert kernels.BACKEND in ("cython", "python")


@needs_compiled
@pytest.mark.parametrize("c1,p,a", [(10.0, 9.0, 1.0), (50.0, 9.0, 3.0), (0.0, 9.0, 0.0)])
def test_backends_agree_on_branch_integral(c1, p, a):
    from scipy.optimize import brentq

    # b is the outer root of the radicand
    b = brentq(_kernels_py.mr_radicand(c1, p), a + 1e-6, 200.0) if c1 else (4 * math.pi) ** 1.5
    for n in (10, 100, 1000):
        assert compiled.mr_branch_integral(c1, p, a, b, n) == pytest.approx(
            _kernels_py.mr_branch_integral(c1, p, a, b, n), rel=1e-12)


@needs_compiled
def test_backends_agree_on_w():
    z = np.linspace(0.5, 4 * math.pi, 41)
    for eps in (0.05, 0.134727, 0.6):
        out = np.empty_like(z)
        compiled.weps_values(eps, z, 1000, out)
        assert np.allclose(out, _kernels_py.weps_values(eps, z, 1000), rtol=1e-12, atol=0)
    for x in (0.0, 0.3, 2.0):
        assert compiled.ric_branch_integral(30.0, 4.0, x) == pytest.approx(
            _kernels_py.ric_branch_integral(30.0, 4.0, x), rel=1e-13, abs=1e-300)


def test_ric_branch_closed_form():
    from scipy.integrate import quad

    c, beta, x = 30.0, 4.0, 20.0
    ref, _ = quad(lambda t: (c - beta * t ** (2 / 3)) ** -0.5, 0, x, epsabs=1e-13, epsrel=1e-13)
    assert kernels.ric_branch_integral(c, beta, x) == pytest.approx(ref, rel=1e-10)
    xs = np.array([0.0, 5.0, 20.0])
    assert np.allclose(kernels.ric_branch_integral(c, beta, xs),
                       [kernels.ric_branch_integral(c, beta, float(t)) for t in xs], rtol=1e-14)


def test_branch_integral_raises_on_wrong_root():
    from isomass.errors import InvalidPath

    with pytest.raises(InvalidPath):
        kernels.mr_branch_integral(10.0, -9.0, 1.0, 5.0)


def test_pure_python_switch():
    env = dict(os.environ, ISOMASS_PURE_PYTHON="1")
    code = "import isomass.kernels as k, isomass.volcomp as v, math; print(k.BACKEND, repr(v.w_eps(0.1, 9.0)))"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    backend, value = out.stdout.split()
    assert backend == "python"
    assert float(value) == pytest.approx(kernels.weps_one(0.1, 9.0), rel=1e-12)
