import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from qlmass import (
    AlphaParams,
    FlowObstruction,
    G1Params,
    G2Params,
    InvalidParams,
    alpha_coefficient,
    build_g1,
    build_g2,
    build_schwarzschild,
    geroch_report,
    imcf_trace,
    m_omega,
    m_region,
    radial_hull_check,
)
from qlmass.imcf_hulls import ImcfTrace, _alpha_from, alpha_details, sine_area_integral
from qlmass.radial_metric import area

from conftest import constructed_metrics


def test_flat_trace(flat):
    tr = imcf_trace(flat, 1.0, math.e, 50)
    assert tr.t[0] == 0.0 and tr.t[-1] == pytest.approx(2.0, abs=1e-14)
    assert np.all(tr.m_H == 0.0)
    assert abs(geroch_report(tr)) <= 1e-10


@pytest.mark.parametrize("m", [0.5, 1.0, 2.0])
def test_schwarzschild_trace(m):
    tr = imcf_trace(build_schwarzschild(m), m, 10 * m, 100)
    assert np.max(np.abs(tr.m_H - m)) <= 1e-9
    assert abs(geroch_report(tr)) <= 1e-9


def test_trace_uniform_times(schw1):
    tr = imcf_trace(schw1, 1.0, 10.0, 11)
    assert np.allclose(np.diff(tr.t), tr.t[-1] / 10, rtol=1e-12)


@pytest.mark.parametrize("m", [0.02, 0.05])
def test_flow_obstruction_inside_neck(m):
    g = build_g1(G1Params(m))
    with pytest.raises(FlowObstruction) as info:
        imcf_trace(g, 16 / m, 64 / m)
    assert 16 / m <= info.value.radius < 32 / m


def test_geroch_needs_three_samples():
    tr = ImcfTrace(*(np.zeros(2) for _ in range(5)))
    with pytest.raises(InvalidParams):
        geroch_report(tr)


@pytest.mark.parametrize("metric", constructed_metrics(), ids=lambda g: g.description)
def test_area_law_and_geroch(metric):
    horizons = [0.0]
    from qlmass import find_horizons

    horizons += [rec.r for rec in find_horizons(metric)]
    lo, hi = metric.span()
    start = max(lo, 1.0001 * max(horizons))
    tr = imcf_trace(metric, start, hi, 200)
    growth = np.exp(tr.t)
    assert np.all(np.abs(tr.A / tr.A[0] - growth) <= 1e-10 * growth)
    assert np.allclose(tr.t, 2 * np.log(tr.R / tr.R[0]), rtol=0, atol=1e-15)
    assert geroch_report(tr) >= -1e-7


def test_g2_geroch_full_range():
    g = build_g2(G2Params(1.0, 2.0, 3.0))
    tr = imcf_trace(g, 1.0, 6.0, 300)
    assert geroch_report(tr) >= -1e-7


# hulls


def test_hull_examples(flat, schw1, g1_005):
    assert radial_hull_check(flat, 0.3, 7.0)
    assert radial_hull_check(schw1, 0.51, 100.0)
    # the neck sphere has far less area than the unit sphere region
    assert not radial_hull_check(g1_005, 1.0, 1280.0)
    assert radial_hull_check(g1_005, 1.0, 2.0)


# alpha


def test_alpha_flat_closed_form(flat):
    a = alpha_coefficient(flat, 1.0, 3.0, AlphaParams(iota=1e6))
    assert a == pytest.approx(math.sqrt(1 / (8 * math.pi)), abs=1e-12)
    assert a == pytest.approx(0.19947114020071635, abs=1e-12)


def test_alpha_cap(flat):
    assert alpha_coefficient(flat, 1.0, 3.0, AlphaParams(C=1e6, iota=1e6)) == 1.0


def test_alpha_schwarzschild_quadrature_oracle(schw1):
    det = alpha_details(schw1, 2.0, 6.0, AlphaParams(C=1.0, iota=1.0))
    assert det.r == 1.0
    integral, _ = integrate.quad(lambda t: math.sin(det.K * t) ** 2 / t, 0, det.r, epsabs=1e-15, epsrel=1e-13)
    oracle = math.sqrt(min(integral / det.K**2 / float(area(schw1, 2.0)), 1.0))
    assert det.alpha == pytest.approx(oracle, abs=1e-9)
    assert det.alpha == pytest.approx(0.06251658783299419, abs=1e-9)
    # the sup of |K| over the region is attained on the horizon sphere, 2m/R^3 with R = 2m
    assert det.K == pytest.approx(0.5, rel=1e-7)


@given(K=st.floats(1e-6, 20), r=st.floats(1e-4, 20))
def test_sine_integral_matches_quadrature(K, r):
    # integrate half-period by half-period so each piece is smooth and one-signed
    edges = np.append(np.arange(0.0, r, math.pi / K), r)
    ref = sum(
        integrate.quad(lambda t: math.sin(K * t) ** 2 / t, a, b, epsabs=1e-15, epsrel=1e-12)[0]
        for a, b in zip(edges[:-1], edges[1:])
        if b > a
    )
    ref /= K * K
    assert sine_area_integral(K, r) == pytest.approx(ref, rel=1e-9, abs=1e-300)


def test_sine_integral_limit():
    assert sine_area_integral(0.0, 2.0) == 2.0
    assert sine_area_integral(1e-9, 2.0) == pytest.approx(2.0, rel=1e-12)


@given(C=st.floats(1e-3, 1e3), I=st.floats(1e-6, 1e3), a1=st.floats(1e-3, 1e4), scale=st.floats(1.0, 100.0))
def test_alpha_range_and_monotonicity(C, I, a1, scale):
    a = float(_alpha_from(C, I, a1))
    b = float(_alpha_from(C, I, a1 * scale))
    assert 0 < a <= 1 and 0 < b <= 1
    assert b <= a


@pytest.mark.parametrize("metric", constructed_metrics()[1:], ids=lambda g: g.description)
def test_alpha_in_unit_interval(metric):
    lo, hi = metric.span()
    for r1, r2 in [(lo * 10, lo * 100), (lo * 100, hi / 10), (hi / 100, hi)]:
        assert 0 < alpha_coefficient(metric, r1, r2) <= 1


# m(Omega1; Omega2), m(Omega)


def test_m_region_examples(flat, schw1, g1_005):
    assert m_region(flat, 1.0, 2.0) == 0.0
    assert m_region(schw1, 1.0, 5.0) == pytest.approx(1.0, abs=1e-12)
    # sup is attained at s = r1 = 1 on the round cap; closed form of m_H there
    from qlmass.profiles import g1_b0

    shift = g1_b0(g1_005) - 1.0
    u = shift + 1.25**-0.5
    du = -0.25 * 1.25**-1.5
    delta = m_region(g1_005, 1.0, 2.0)
    assert delta == pytest.approx(-2 * du * (u + du), rel=1e-12)
    assert delta > 0


def test_m_omega_flat(flat):
    assert m_omega(flat, 5.0).value <= 1e-12


def test_m_omega_schwarzschild(schw1):
    res = m_omega(schw1, 10.0)
    assert 0 < res.value <= 1.0
    assert res.provenance["C"] == 1.0 and res.provenance["iota"] == "auto"


@pytest.mark.parametrize(
    "metric,r_out",
    [(build_g2(G2Params(0.5, 1.0, 2.0)), 4.0), (build_g1(G1Params(0.05)), 2560.0), (build_schwarzschild(2.0), 20.0)],
    ids=["g2", "g1", "schwarzschild"],
)
def test_m_omega_dominates_grid_members(metric, r_out):
    grid = (16, 16)
    res = m_omega(metric, r_out, grid=grid, refine=3)
    assert res.value >= 0
    lo = metric.span()[0]
    r1s = np.geomspace(lo * 1.01, r_out, grid[0] + 1)[:-1]
    r2s = np.geomspace(lo * 1.02, r_out, grid[1])
    for r1 in r1s[::3]:
        for r2 in r2s[::3]:
            if r1 < r2:
                member = alpha_coefficient(metric, r1, r2) * m_region(metric, r1, r2)
                assert res.value >= member - 1e-8 * max(1.0, member)
