"""Explicit example metrics: flat, Schwarzschild, the horizon-free g2 and the
glued sphere/Schwarzschild g1."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParams, NonMonotoneBridge
from .radial_metric import (
    FluxSegment,
    HarmonicSegment,
    PolynomialBridge,
    RadialMetric,
    SphereCapSegment,
    Tail,
    make_metric,
)

MONOTONE_SAMPLES = 1024


def smooth_monotone_bridge(r_a, r_b, f_a, f_b, slope_a=0.0, slope_b=0.0) -> PolynomialBridge:
    """Quintic Hermite bridge on [r_a, r_b], nonincreasing, with zero end curvature.

    Matches values and first derivatives at both ends and has vanishing
    second derivative there.  Raises :class:`NonMonotoneBridge` rather than
    return a bridge whose derivative becomes positive somewhere.
    """
    if not r_a < r_b:
        raise InvalidParams(f"bridge needs r_a < r_b, got {r_a}, {r_b}")
    if f_a < f_b:
        raise InvalidParams("nonincreasing bridge needs f_a >= f_b")
    if slope_a > 0 or slope_b > 0:
        raise InvalidParams("nonincreasing bridge needs end slopes <= 0")
    length = r_b - r_a
    sa, sb = slope_a * length, slope_b * length
    lhs = np.array([[1.0, 1.0, 1.0], [3.0, 4.0, 5.0], [6.0, 12.0, 20.0]])
    rhs = np.array([f_b - f_a - sa, sb - sa, 0.0])
    c3, c4, c5 = np.linalg.solve(lhs, rhs)
    bridge = PolynomialBridge(float(r_a), float(r_b), (float(f_a), float(sa), 0.0, float(c3), float(c4), float(c5)))
    _verify_monotone(bridge, f_a, f_b, slope_a, slope_b)
    return bridge


def _verify_monotone(bridge, f_a, f_b, slope_a, slope_b):
    poly = np.polynomial.Polynomial(bridge.coef)
    dpoly = poly.deriv()
    t = np.linspace(0.0, 1.0, MONOTONE_SAMPLES)
    cand = [t]
    crit = dpoly.deriv().roots()
    crit = crit[np.isreal(crit)].real
    cand.append(crit[(crit >= 0.0) & (crit <= 1.0)])
    # isolate sign changes of the derivative and include them as well
    roots = dpoly.roots()
    roots = roots[np.isreal(roots)].real
    cand.append(roots[(roots > 0.0) & (roots < 1.0)])
    worst = float(np.max(dpoly(np.concatenate(cand)))) / bridge.length
    scale = (abs(f_a - f_b) / bridge.length) + abs(slope_a) + abs(slope_b)
    if worst > 1e-12 * max(scale, 1e-300):
        raise NonMonotoneBridge(
            f"Hermite data on [{bridge.r_a}, {bridge.r_b}] forces a positive slope {worst:.3e}"
        )


# ---------------------------------------------------------------------------
# baselines


def build_flat() -> RadialMetric:
    return make_metric([HarmonicSegment(0.0, math.inf, 1.0, 0.0)], Tail("flat"), "flat")


def build_schwarzschild(m: float) -> RadialMetric:
    if not m >= 0 or not math.isfinite(m):
        raise InvalidParams(f"Schwarzschild mass must be >= 0, got {m}")
    if m == 0:
        return build_flat()
    seg = HarmonicSegment(0.0, math.inf, 1.0, 0.5 * m)
    return make_metric([seg], Tail("schwarzschild", m, 1.0, 0.0), f"schwarzschild(m={m:g})")


# ---------------------------------------------------------------------------
# g2: no compact minimal surfaces, Schwarzschild outside rho1


@dataclass(frozen=True)
class G2Params:
    m: float
    rho0: float
    rho1: float

    def validate(self):
        if not (self.rho1 > self.rho0 > self.m > 0):
            raise InvalidParams(f"g2 needs rho1 > rho0 > m > 0, got {self}")


def build_g2(params: G2Params) -> RadialMetric:
    """u = c0 + int_{rho1}^r h/tau^2 with h stepping smoothly from 0 to -m/2."""
    params.validate()
    m, rho0, rho1 = params.m, params.rho0, params.rho1
    h = smooth_monotone_bridge(rho0, rho1, 0.0, -0.5 * m)
    c0 = 1.0 + m / (2.0 * rho1)
    u_inner = c0 - h.integral_over_square(rho1)
    segments = [
        HarmonicSegment(0.0, rho0, u_inner, 0.0),
        FluxSegment(rho0, rho1, h, c0),
        HarmonicSegment(rho1, math.inf, 1.0, 0.5 * m),
    ]
    return make_metric(segments, Tail("schwarzschild", m, 1.0, rho1), f"g2(m={m:g}, rho0={rho0:g}, rho1={rho1:g})")


# ---------------------------------------------------------------------------
# g1: unit round sphere glued to a rescaled Schwarzschild end


@dataclass(frozen=True)
class G1Params:
    m: float

    @property
    def eps(self) -> float:
        return self.m * self.m / 64.0

    @property
    def rho0(self) -> float:
        return 1.0 / (4.0 * self.m)

    @property
    def neck(self) -> float:
        """Radius of the minimal sphere, m / (2 eps) = 32 / m."""
        return self.m / (2.0 * self.eps)

    def k_inner(self, rho):
        return -0.25 * rho * (1.0 + 0.25 * rho * rho) ** -1.5

    def k_outer(self, rho):
        return -self.m / (2.0 * math.sqrt(self.eps)) / rho**2

    def k_endpoints(self):
        """(k(rho0), k(2 rho0)) from the two closed forms; k(2 rho0) = -16 m^2."""
        return self.k_inner(self.rho0), self.k_outer(2.0 * self.rho0)

    def validate(self):
        # Admissibility is decided by the flux bridge (monotone rho^2 k) and
        # positivity of u in build_g1; k itself need not be monotone.
        if not (self.m > 0 and math.isfinite(self.m)):
            raise InvalidParams(f"g1 needs m > 0, got {self.m}")


def g1_flux_bridge(params: G1Params) -> PolynomialBridge:
    """Bridge for q = rho^2 k on [rho0, 2 rho0].

    q is bridged instead of k itself: Delta u = q'/rho^2, so a nonincreasing q
    is exactly what nonnegative scalar curvature needs, and it stays feasible
    when k has positive slope at rho0 (every m < 1/(4 sqrt 2)).
    """
    rho0 = params.rho0
    w = 1.0 + 0.25 * rho0 * rho0
    q_a = rho0 * rho0 * params.k_inner(rho0)
    dq_a = -0.75 * rho0 * rho0 * w**-2.5
    q_b = -params.m / (2.0 * math.sqrt(params.eps))
    return smooth_monotone_bridge(rho0, 2.0 * rho0, q_a, q_b, dq_a, 0.0)


def build_g1(params: G1Params) -> RadialMetric:
    params.validate()
    m, rho0 = params.m, params.rho0
    s = math.sqrt(params.eps)
    tail = HarmonicSegment(2.0 * rho0, math.inf, s, m / (2.0 * s))
    u_outer = tail.eval(2.0 * rho0)[0]
    q = g1_flux_bridge(params)
    bridge = FluxSegment(rho0, 2.0 * rho0, q, u_outer)
    u_rho0 = bridge.eval(np.float64(rho0))[0]
    shift = u_rho0 - (1.0 + 0.25 * rho0 * rho0) ** -0.5
    cap = SphereCapSegment(0.0, rho0, shift)
    metric = make_metric(
        [cap, bridge, tail],
        Tail("schwarzschild", m, s, 2.0 * rho0),
        f"g1(m={m:g})",
    )
    # k < 0 everywhere, so u decreases to its tail limit s > 0
    if not (u_rho0 > 0 and s > 0):
        raise InvalidParams(f"g1 conformal factor not positive for m={m}")
    return metric


def g1_b0(metric: RadialMetric) -> float:
    """u_m at the origin: the constant b0 of u_m = b0 + int_0^rho k."""
    cap = metric.profile.segments[0]
    return cap.shift + 1.0


def g1_bridge_integral(metric: RadialMetric) -> float:
    """int_{rho0}^{2 rho0} k(tau) dtau = u(2 rho0) - u(rho0)."""
    bridge = metric.profile.segments[1]
    return bridge.flux.integral_over_square(bridge.hi)


def g1_admissible(m: float) -> bool:
    try:
        build_g1(G1Params(m))
    except InvalidParams:
        return False
    return True
