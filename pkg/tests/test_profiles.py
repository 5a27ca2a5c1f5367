import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from scipy import integrate

from qlmass import (
    G1Params,
    G2Params,
    InvalidParams,
    NonMonotoneBridge,
    build_g1,
    build_g2,
    build_schwarzschild,
    scalar_curvature,
    smooth_monotone_bridge,
)
from qlmass.horizons import expansion
from qlmass.profiles import g1_admissible, g1_b0, g1_bridge_integral
from qlmass.radial_metric import mean_curvature, radial_grid


# bridges


def test_constant_bridge():
    b = smooth_monotone_bridge(1.0, 2.0, 0.3, 0.3)
    t = np.linspace(1, 2, 101)
    assert np.all(b(t) == 0.3)


def test_step_bridge_monotone_and_endpoints():
    b = smooth_monotone_bridge(2.0, 3.0, 0.0, -0.5)
    t = np.linspace(2, 3, 10001)
    assert np.max(b(t, 1)) <= 1e-12
    assert abs(b(2.0) - 0.0) <= 1e-14
    assert abs(b(3.0) + 0.5) <= 1e-14
    assert abs(b(2.0, 1)) <= 1e-14 and abs(b(3.0, 1)) <= 1e-14
    assert abs(b(2.0, 2)) <= 1e-12 and abs(b(3.0, 2)) <= 1e-12


def test_bridge_matches_slopes():
    b = smooth_monotone_bridge(1.0, 2.0, 1.0, -1.0, -0.5, -0.25)
    assert b(1.0, 1) == pytest.approx(-0.5, abs=1e-13)
    assert b(2.0, 1) == pytest.approx(-0.25, abs=1e-13)


def test_bridge_rejects_forced_increase():
    # no drop in value but a steep negative start slope: the bridge must climb back
    with pytest.raises(NonMonotoneBridge):
        smooth_monotone_bridge(0.0, 1.0, 0.0, 0.0, -1.0, 0.0)


@pytest.mark.parametrize(
    "args",
    [(2.0, 2.0, 0.0, -1.0), (3.0, 2.0, 0.0, -1.0), (0.0, 1.0, -1.0, 0.0), (0.0, 1.0, 0.0, -1.0, 0.1, 0.0)],
)
def test_bridge_preconditions(args):
    with pytest.raises(InvalidParams):
        smooth_monotone_bridge(*args)


@given(
    r_a=st.floats(0.01, 100),
    width=st.floats(0.01, 100),
    f_a=st.floats(-10, 10),
    drop=st.floats(0, 10),
)
def test_zero_slope_bridge_always_monotone(r_a, width, f_a, drop):
    b = smooth_monotone_bridge(r_a, r_a + width, f_a, f_a - drop)
    t = np.linspace(r_a, r_a + width, 2001)
    assert np.max(b(t, 1)) <= 1e-12 * (drop / width + 1e-300)


@given(
    drop=st.floats(0, 2),
    sa=st.floats(-5, 0),
    sb=st.floats(-5, 0),
)
def test_bridge_never_returns_nonmonotone(drop, sa, sb):
    try:
        b = smooth_monotone_bridge(1.0, 2.0, 0.0, -drop, sa, sb)
    except NonMonotoneBridge:
        return
    t = np.linspace(1.0, 2.0, 4001)
    assert np.max(b(t, 1)) <= 1e-10 * (drop + abs(sa) + abs(sb) + 1e-300)


# Schwarzschild / flat


def test_schwarzschild_builder():
    assert build_schwarzschild(0.0).tail.kind == "flat"
    assert build_schwarzschild(0.0).eval(3.0) == (1.0, 0.0, 0.0)
    with pytest.raises(InvalidParams):
        build_schwarzschild(-0.1)
    g = build_schwarzschild(1.0)
    assert g.eval(0.5)[0] == 2.0
    assert abs(mean_curvature(g, 0.5)) == 0.0
    assert g.eval(1e12)[0] == pytest.approx(1.0, abs=1e-12)


# g2


def test_g2_examples(g2_123):
    r = np.linspace(3.0, 50.0, 200)
    assert np.array_equal(g2_123.eval(r)[0], 1 + 1.0 / (2 * r))
    h = g2_123.profile.segments[1].flux
    c0 = 1 + 1.0 / 6
    core = c0 - integrate.quad(lambda t: h(t) / t**2, 2.0, 3.0, epsabs=1e-14, epsrel=1e-14)[0]
    assert g2_123.eval(1.0)[0] == pytest.approx(core, abs=1e-13)
    # quadrature oracle over the bridge, frozen
    assert g2_123.eval(2.0)[0] == pytest.approx(1.2011583784087663, abs=1e-9)


@pytest.mark.parametrize("params", [(1.0, 0.5, 3.0), (1.0, 2.0, 2.0), (0.0, 1.0, 2.0), (1.0, 3.0, 2.0)])
def test_g2_invalid(params):
    with pytest.raises(InvalidParams):
        build_g2(G2Params(*params))


@given(m=st.floats(0.01, 5), a=st.floats(1.01, 5), b=st.floats(1.01, 5))
def test_g2_positivity_chain(m, a, b):
    rho0, rho1 = a * m, a * b * m
    g = build_g2(G2Params(m, rho0, rho1))
    lo, hi = g.span()
    r = radial_grid(g, lo, hi, 4096)
    assert np.min(mean_curvature(g, r)) > 0
    assert np.min(scalar_curvature(g, r)) >= -1e-10
    outer = r[r >= rho0]
    assert np.min(expansion(g, outer)) >= 1 - m / (2 * rho0) - 1e-10
    assert np.min(g.eval(r)[0]) > 0


# g1


def test_g1_tail_closed_form(g1_005):
    m = 0.05
    eps = m * m / 64
    rho = np.geomspace(2 / (4 * m), 1e6, 300)
    expected = math.sqrt(eps) * (1 + m / (2 * eps * rho))
    assert np.allclose(g1_005.eval(rho)[0], expected, rtol=1e-12, atol=0)


@pytest.mark.parametrize("m", [0.01, 0.05, 0.1, 0.2])
def test_g1_neck(m):
    g = build_g1(G1Params(m))
    assert abs(expansion(g, 32 / m)) <= 1e-15
    assert G1Params(m).neck == pytest.approx(32 / m, rel=1e-15)


def test_g1_bridge_integral(g1_005):
    m = 0.05
    val = g1_bridge_integral(g1_005)
    assert -16 * m <= val <= 0
    rho0 = 1 / (4 * m)
    ref = integrate.quad(lambda t: g1_005.eval(t)[1], rho0, 2 * rho0, epsabs=1e-14, epsrel=1e-13)[0]
    assert val == pytest.approx(ref, abs=1e-12)


def test_g1_u_is_b0_plus_integral_of_k(g1_005):
    b0 = g1_b0(g1_005)
    for rho in [0.5, 3.0, 5.0, 7.5, 10.0, 40.0]:
        edges = [0.0] + g1_005.breaks(0.0, rho) + [rho]
        integral = sum(
            integrate.quad(lambda t: g1_005.eval(max(t, 1e-300))[1], a, b, epsabs=1e-14, epsrel=1e-13)[0]
            for a, b in zip(edges, edges[1:])
        )
        assert g1_005.eval(rho)[0] == pytest.approx(b0 + integral, abs=1e-11)


def test_g1_k_closed_forms():
    for m in [0.01, 0.05, 0.2]:
        p = G1Params(m)
        k_a, k_b = p.k_endpoints()
        assert k_a == pytest.approx(-32 * m * m / (1 + 64 * m * m) ** 1.5, rel=1e-14)
        assert k_b == pytest.approx(-16 * m * m, rel=1e-14)


@pytest.mark.parametrize("m", [0.002, 0.01, 0.05, 0.1, 0.2, 0.5, 1.0])
def test_g1_admissible_range(m):
    assert g1_admissible(m)
    g = build_g1(G1Params(m))
    lo, hi = g.span()
    r = radial_grid(g, lo, hi, 8192)
    assert np.min(g.eval(r)[0]) > 0
    assert np.min(scalar_curvature(g, r)) >= -1e-10


def test_g1_rejects_nonpositive_mass():
    for m in [0.0, -0.1, math.inf]:
        with pytest.raises(InvalidParams):
            build_g1(G1Params(m))


@pytest.mark.parametrize("m", [0.01, 0.05, 0.1])
def test_g1_mean_curvature_sign_pattern(m):
    # H > 0 on the cap, negative on a band ending at the neck, positive outside
    g = build_g1(G1Params(m))
    lo, hi = g.span()
    r = radial_grid(g, lo, hi, 8192)
    s = np.sign(expansion(g, r))
    changes = np.nonzero(s[1:] != s[:-1])[0]
    assert len(changes) == 2
    assert s[0] > 0 and s[-1] > 0
    assert r[changes[-1]] < 32 / m <= r[changes[-1] + 1]
