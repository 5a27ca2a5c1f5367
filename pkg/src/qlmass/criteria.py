"""Horizon-existence tests for a centered ball B_{r_out}.

Each verdict compares the m(Omega) estimate with a boundary quantity.  A
positive verdict is a sufficient condition for a horizon inside the ball;
a negative one says nothing.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

from .errors import BoundaryNotMeanConvex, OutOfDomain
from .imcf_hulls import AlphaParams, m_omega
from .quasimass import brown_york_radial, hawking_mass
from .radial_metric import RadialMetric, areal_radius, mean_curvature


@dataclass(frozen=True)
class Verdict:
    satisfied: bool
    margin: float


@dataclass(frozen=True)
class CriteriaReport:
    r_out: float
    m_by_boundary: float
    m_omega_est: float
    areal_radius: float
    two_R: float
    diameter: float  # intrinsic diameter of the round boundary, pi R
    two_diam: float
    verdicts: dict
    argmax: tuple
    provenance: dict = field(default_factory=dict)

    @property
    def horizon_predicted(self) -> bool:
        return any(v.satisfied for v in self.verdicts.values())

    def to_dict(self) -> dict:
        out = asdict(self)
        out["argmax"] = list(self.argmax)
        out["horizon_predicted"] = self.horizon_predicted
        return out


def _require_mean_convex(metric: RadialMetric, r_out: float, strict: bool = True):
    metric.profile.check(r_out)
    H = float(mean_curvature(metric, r_out))
    if not (H > 0 if strict else H >= 0):
        raise BoundaryNotMeanConvex(f"H(S_{r_out:g}) = {H:.6g} is not {'positive' if strict else 'nonnegative'}")
    return H


def evaluate_criteria(
    metric: RadialMetric,
    r_out: float,
    params: AlphaParams = AlphaParams(),
    grid: tuple = (64, 64),
    refine: int = 6,
) -> CriteriaReport:
    """Verdicts (a) m > m_BY, (b) m >= 2R and (c) m >= 2 diam for Omega = B_{r_out}."""
    _require_mean_convex(metric, r_out)
    m_by = float(brown_york_radial(metric, float(r_out)))
    R = float(areal_radius(metric, float(r_out)))
    est = m_omega(metric, r_out, params, grid, refine)
    m = est.value
    two_R = 2.0 * R
    diam = math.pi * R
    verdicts = {
        "a": Verdict(m > m_by, m - m_by),
        "b": Verdict(m >= two_R, m - two_R),
        "c": Verdict(m >= 2.0 * diam, m - 2.0 * diam),
    }
    return CriteriaReport(
        r_out=float(r_out),
        m_by_boundary=m_by,
        m_omega_est=m,
        areal_radius=R,
        two_R=two_R,
        diameter=diam,
        two_diam=2.0 * diam,
        verdicts=verdicts,
        argmax=(est.r1, est.r2, est.alpha, est.m_region),
        provenance=dict(est.provenance),
    )


def minkowski_bound_check(metric: RadialMetric, r_out: float) -> float:
    """2R - m_BY(S_{r_out}); nonnegative for a mean-convex round boundary.

    A minimal boundary (H = 0) is accepted: there m_BY = R and the margin is R.
    """
    _require_mean_convex(metric, r_out, strict=False)
    R = float(areal_radius(metric, float(r_out)))
    return 2.0 * R - float(brown_york_radial(metric, float(r_out)))


@dataclass(frozen=True)
class RoundSphereResult:
    s: float
    r_out: float
    m_hawking_inner: float
    m_by_boundary: float
    margin: float
    predicts_horizon: bool
    heuristic: str = "centered sphere assumed isoperimetric (not verified)"


def round_sphere_criterion(metric: RadialMetric, s: float, r_out: float) -> RoundSphereResult:
    """m_H(S_s) - m_BY(S_{r_out}); a positive margin predicts a horizon if S_s is isoperimetric."""
    if not s < r_out:
        raise OutOfDomain(f"round-sphere criterion needs s < r_out, got {s}, {r_out}")
    metric.profile.check([s, r_out])
    mh = float(hawking_mass(metric, float(s)))
    mby = float(brown_york_radial(metric, float(r_out)))
    margin = mh - mby
    return RoundSphereResult(float(s), float(r_out), mh, mby, margin, margin > 0)
