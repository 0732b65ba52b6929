import math

import pytest
from hypothesis import given, settings, strategies as st

from isomass import geometry
from isomass import variation as var
from isomass.errors import ArgumentError, DomainError
from isomass.geometry import SchwarzschildMetric

FLAT = SchwarzschildMetric(0.0)
S3 = var.RoundSphere(1.0)
SCHW = SchwarzschildMetric(1.0)
PROBES = [(FLAT, 1.0), (FLAT, 3.0), (S3, 1.0), (S3, 2.5), (SCHW, 2.0), (SCHW, 0.9), (SchwarzschildMetric(2.5), 7.0)]


def test_flat_first_variation_exact():
    rep = var.first_variation_check(var.FlowProbe(FLAT, 1.0))
    assert rep.predicted == pytest.approx(8 * math.pi, rel=1e-15)
    assert all(abs(m - 8 * math.pi) < 1e-12 for m in rep.measured)
    assert rep.exact and rep.order is None


def test_schwarzschild_first_variation():
    rep = var.first_variation_check(var.FlowProbe(SCHW, 2.0))
    assert rep.relative_error < 1e-6
    assert abs(rep.extrapolated - rep.predicted) < 1e-6
    assert rep.order == pytest.approx(2.0, abs=0.2)


def test_horizon_is_stationary():
    probe = var.FlowProbe(SCHW, 0.5)
    rep = var.first_variation_check(probe)
    assert abs(rep.predicted) < 1e-12
    assert max(abs(m) for m in rep.measured) < 1e-9 * var.sphere_area(SCHW, 0.5)


def test_flat_second_variation():
    for r in (0.5, 1.0, 4.0):
        rep = var.second_variation_check(var.FlowProbe(FLAT, r))
        assert rep.predicted == pytest.approx(-2 / r ** 2, rel=1e-9)
        assert rep.order == pytest.approx(2.0, abs=0.2)
        # centred difference of 2/r is -2/(r^2 - h^2) exactly
        h = var.FlowProbe(FLAT, r).steps[-1]
        assert rep.measured[-1] == pytest.approx(-2 / (r * r - h * h), rel=1e-9)
    assert var.ricci_normal_at(FLAT, 1.0) == 0.0


def test_round_sphere_second_variation():
    for r in (0.4, 1.0, 2.0):
        rep = var.second_variation_check(var.FlowProbe(S3, r))
        H = var.mean_curvature(S3, r)
        assert rep.predicted == pytest.approx(-H * H / 2 - 2, rel=1e-9)
        assert rep.extrapolated_error < 1e-8
    assert var.ricci_normal_at(S3, 0.7) == pytest.approx(2.0, rel=1e-9)
    assert var.ricci_normal_at(var.RoundSphere(2.0), 0.7) == pytest.approx(0.5, rel=1e-9)


def test_schwarzschild_second_variation():
    rep = var.second_variation_check(var.FlowProbe(SCHW, 2.0))
    assert rep.error < 1e-5
    assert var.ricci_normal_at(SCHW, 2.0) == pytest.approx(-0.065536, rel=1e-8)


@pytest.mark.parametrize("metric,r", PROBES)
def test_convergence_order(metric, r):
    probe = var.FlowProbe(metric, r)
    for rep in (var.first_variation_check(probe), var.second_variation_check(probe)):
        if rep.exact:
            continue
        for order in rep.orders:
            assert order == pytest.approx(2.0, abs=0.2)
        assert rep.relative_error < 2e-5
        assert rep.extrapolated_error < 1e-8


@pytest.mark.parametrize("metric,r", PROBES)
def test_gauss_ricci_normal(metric, r):
    assert abs(var.gauss_ricci_normal(metric, r) - var.ricci_normal_at(metric, r)) < 1e-9


@settings(max_examples=25, deadline=None)
@given(st.floats(0.1, 5.0), st.floats(0.3, 20.0))
def test_gauss_ricci_normal_random(m, r):
    g = SchwarzschildMetric(m)
    expected = var.ricci_normal_at(g, r)
    assert abs(var.gauss_ricci_normal(g, r) - expected) < 1e-9 * max(1.0, abs(expected))


def test_cmc_rate():
    r2 = var.equal_mean_curvature_partner(SCHW, 3.0)
    assert geometry.mean_curvature(SCHW, r2) == pytest.approx(geometry.mean_curvature(SCHW, 3.0), rel=1e-12)
    equal = var.cmc_rate(SCHW, 3.0, r2)
    assert equal.predicted == pytest.approx(0.0, abs=1e-9)
    assert abs(equal.measured) < 1e-5
    other = var.cmc_rate(SCHW, 3.0, 5.0)
    assert other.error < 1e-6 * abs(other.predicted)
    assert other.predicted > 0  # the sphere with larger H moves out


def test_partner_requires_mass():
    with pytest.raises(DomainError):
        var.equal_mean_curvature_partner(FLAT, 1.0)


def test_probe_validation():
    with pytest.raises(ArgumentError):
        var.FlowProbe(FLAT, 1.0, eta=2.0)
    with pytest.raises(ArgumentError):
        var.FlowProbe(FLAT, 1.0, dt=(1e-3,))
    with pytest.raises(ArgumentError):
        var.FlowProbe(FLAT, 1.0, dt=(1e-3, 2e-3))
    with pytest.raises(DomainError):
        var.FlowProbe(S3, 4.0)
    with pytest.raises(DomainError):
        var.FlowProbe(FLAT, -1.0)
    with pytest.raises(ArgumentError):
        var.FlowProbe("flat", 1.0)
    with pytest.raises(DomainError):
        var.RoundSphere(0.0)


def test_flow_leaving_domain():
    probe = var.FlowProbe(S3, 0.01, dt=(2.0, 1.0))
    with pytest.raises(DomainError):
        var.first_variation_check(probe)
