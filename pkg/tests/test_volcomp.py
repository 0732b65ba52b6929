import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from isomass import phasespace as ps
from isomass import volcomp as vc
from isomass.config import ComparisonConfig
from isomass.errors import DomainError, MonotonicityError

FOUR_PI = 4 * math.pi
PI2 = math.pi ** 2
EPS_TEN = np.linspace(0.05, 0.95, 10)

# 30-digit oracle values (independent high-precision quadrature)
W_ORACLE = [
    (0.1, 6.5, 0.823010096864920776907),
    (0.1, 9.0, 0.84278363045302689074),
    (0.05, 5.0, 1.1085631639856361629),
    (0.5, 10.0, 0.875699319191371518568),
    (0.2, 6.0, 0.8134183185630603),
]
ALPHA_ORACLE = [(0.05, 1.5425067347, 4.33661), (0.1, 1.1306691707, 4.50422)]


@pytest.mark.parametrize("eps", list(EPS_TEN) + [1.0])
def test_endpoint_identities(eps):
    assert abs(vc.w_eps(eps, FOUR_PI) - 1.0) < 1e-6
    z = vc.left_end(eps)
    assert abs(vc.w_eps(eps, z) - 1 / (math.sqrt(eps) * (3 - 2 * eps))) < 1e-6


def test_linear_branch():
    eps = 0.3
    z = np.linspace(0, vc.left_end(eps), 9)
    assert np.allclose(vc.w_eps(eps, z), z / (FOUR_PI * math.sqrt(eps)), rtol=1e-13, atol=0)


@pytest.mark.parametrize("eps,z,ref", W_ORACLE)
def test_w_against_oracle(eps, z, ref):
    assert abs(vc.w_eps(eps, z) - ref) < 1e-8


@pytest.mark.parametrize("eps", [0.05, 0.1, 0.3, 0.7])
def test_branch_continuity(eps):
    z = vc.left_end(eps)
    lo, hi = vc.w_eps(eps, z * (1 - 1e-10)), vc.w_eps(eps, z * (1 + 1e-10))
    assert abs(lo - hi) < 1e-6


@pytest.mark.parametrize("eps", [0.05, 0.134727, 0.3, 0.8])
@pytest.mark.parametrize("frac", [0.0, 0.2, 0.5, 0.8, 1.0])
def test_consistency_with_phase_space(eps, frac):
    lo = vc.left_end(eps)
    z = lo + frac * (FOUR_PI - lo)
    W = ps.W(z ** 1.5, ComparisonConfig().with_eps(eps))
    assert abs(W / PI2 - vc.w_eps(eps, z)) < 1e-8


def test_vector_matches_scalar():
    z = np.linspace(1.0, FOUR_PI, 13)
    vec = vc.w_eps(0.1, z)
    assert np.allclose(vec, [vc.w_eps(0.1, t) for t in z], rtol=0, atol=1e-14)
    assert vc.w_eps(0.1, z.reshape(13, 1)).shape == (13, 1)


def test_w_domain():
    for z in (-1.0, FOUR_PI * 1.001, math.nan):
        with pytest.raises(DomainError):
            vc.w_eps(0.2, z)
    for eps in (0.0, 1.5):
        with pytest.raises(DomainError):
            vc.w_eps(eps, 1.0)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.02, 0.9), st.floats(0.001, 0.09), st.floats(0.0, 1.0))
def test_w_nonincreasing_in_eps(eps, d, frac):
    # overlap of the two two-branch domains
    lo = vc.left_end(eps + d)
    z = lo + frac * (FOUR_PI - lo)
    assert vc.w_eps(eps + d, z) <= vc.w_eps(eps, z) + 1e-8


@pytest.mark.parametrize("eps,ref,zref", ALPHA_ORACLE)
def test_alpha_oracle(eps, ref, zref):
    r = vc.alpha(eps)
    assert abs(r.alpha - ref) < 1e-8
    assert abs(r.argmax_z - zref) < 1e-4


def test_alpha_trivial_and_plateau():
    assert vc.alpha(1.0).alpha == pytest.approx(1.0, abs=1e-12)
    assert vc.alpha(1.0).argmax_z == FOUR_PI
    assert abs(vc.alpha(0.5).alpha - 1.0) < 1e-6
    assert vc.alpha(0.1).alpha > 1.0
    assert vc.alpha(vc.EPS_LOWER).alpha > 1.0


@pytest.mark.parametrize("eps", [0.05, 0.134727, 0.3])
def test_alpha_result_invariants(eps):
    r = vc.alpha(eps)
    assert r.alpha >= 1 - 1e-9
    assert vc.left_end(eps) <= r.argmax_z <= FOUR_PI
    assert r.alpha >= r.w.max() - 1e-14
    assert r.alpha - r.w.max() < 1e-3
    assert r.z[0] == pytest.approx(vc.left_end(eps)) and r.z[-1] == FOUR_PI


def test_two_competing_maxima_near_threshold():
    r = vc.alpha(0.134727)
    w = r.w
    assert abs(w[-1] - 1) < 1e-6
    interior = [i for i in range(1, len(w) - 1) if w[i] >= w[i - 1] and w[i] >= w[i + 1]]
    assert interior and abs(w[interior[0]] - 1) < 1e-3


def test_alpha_monotone():
    eps = np.linspace(0.02, 1.0, 20)
    a = [vc.alpha(e, keep_samples=False).alpha for e in eps]
    assert all(a[i] >= a[i + 1] - 1e-6 for i in range(19))


def test_epsilon0():
    r = vc.epsilon0(1e-6)
    assert 0.134 < r.value < 0.135
    assert r.value > 1 - math.sqrt(3) / 2
    assert abs(r.value - r.reference) < 5e-4
    assert r.width <= 1e-6
    assert r.alpha_at_lower > 1
    assert float(r) == r.value


def test_epsilon0_arguments():
    with pytest.raises(DomainError):
        vc.epsilon0(1e-9)
    with pytest.raises(DomainError):
        vc.epsilon0(lo=0.3, hi=0.2)
    with pytest.raises(MonotonicityError) as exc:
        vc.epsilon0(lo=0.3, hi=0.5, probes=3)
    assert exc.value.pair == (0.3, 0.5)


def test_epsilon0_nonmonotone_predicate(monkeypatch):
    real = vc.alpha

    def fake(e, *a, **k):
        r = real(e, *a, **k)
        # predicate reads false at 0.05 and true again at 0.075
        value = 1.0 if abs(e - 0.05) < 1e-12 else r.alpha
        return vc.AlphaResult(e, value, r.argmax_z)

    monkeypatch.setattr(vc, "alpha", fake)
    with pytest.raises(MonotonicityError) as exc:
        vc.epsilon0(lo=0.025, hi=0.2, probes=8)
    assert exc.value.pair == pytest.approx((0.05, 0.075))


def test_volume_bound():
    assert vc.volume_bound(1.0) == pytest.approx(2 * PI2, rel=1e-12)
    b = vc.volume_bound(0.05)
    assert b == pytest.approx(vc.alpha(0.05).alpha * 2 * PI2, rel=1e-12)
    assert b > 2 * PI2
    small = ComparisonConfig(R0=24.0, Ric0=8.0)
    assert vc.volume_bound(1.0, small) == pytest.approx(2 * PI2 / 8, rel=1e-12)


@pytest.mark.parametrize("eps", [0.134727, 0.5])
def test_just_right_of_left_end(eps):
    lo = vc.left_end(eps)
    z = lo * (1 + np.array([1e-15, 1e-12, 1e-9, 1e-6, 1e-4, 1e-3]))
    w = vc.w_eps(eps, z)
    start = 1 / (math.sqrt(eps) * (3 - 2 * eps))
    assert np.all(np.isfinite(w))
    # w is C^1 there with slope below that of the linear branch; sqrt rounding in
    # the singular term leaves ~1e-8 at the closest offsets
    assert np.all(np.abs(w - start) <= (z - lo) / (4 * math.pi * math.sqrt(eps)) + 1e-7)
