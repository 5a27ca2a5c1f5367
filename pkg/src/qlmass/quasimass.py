"""Hawking, Brown-York, ADM and torus Hawking masses (geometric units, G = c = 1)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParams, NotAsymptoticallyFlat
from .radial_metric import RadialMetric

ADM_FIT_SAMPLES = 256
ADM_UNIT_TOL = 1e-8
ADM_AGREEMENT_TOL = 1e-6


@dataclass(frozen=True)
class MassSummary:
    r: float
    hawking: float
    brown_york: float
    areal_radius: float


def hawking_mass(metric: RadialMetric, r):
    """Hawking mass of the centered sphere S_r.

    H is constant on S_r, so sqrt(|S|/16pi)(1 - int H^2 / 16pi) reduces to
    (R/2)(1 - (R H / 2)^2).  With R H / 2 = 1 + 2 r u'/u this equals
    -2 r^2 u' (u + r u'), which is what is evaluated (no cancellation when
    the mass is small compared with R).
    """
    u, du, _ = metric.eval(r)
    return -2.0 * r * r * du * (u + r * du)


def hawking_mass_reduced(metric: RadialMetric, r):
    """(R/2)(1 - (R H/2)^2) evaluated literally."""
    u, du, _ = metric.eval(r)
    R = u * u * r
    H = 2.0 * (u + 2.0 * r * du) / (r * u**3)
    return 0.5 * R * (1.0 - (0.5 * R * H) ** 2)


def brown_york_radial(metric: RadialMetric, r):
    """Brown-York mass of S_r.

    The induced metric is round of radius R, so the Weyl embedding is the
    Euclidean sphere with H0 = 2/R and (1/8pi) int (H0 - H) = R - R^2 H / 2,
    i.e. -2 r^2 u u'.
    """
    u, du, _ = metric.eval(r)
    return -2.0 * r * r * u * du


def brown_york_embedding_form(metric: RadialMetric, r):
    """R - R^2 H / 2 evaluated literally."""
    u, du, _ = metric.eval(r)
    R = u * u * r
    H = 2.0 * (u + 2.0 * r * du) / (r * u**3)
    return R - 0.5 * R * R * H


def mass_summary(metric: RadialMetric, r: float) -> MassSummary:
    u, _, _ = metric.eval(float(r))
    return MassSummary(
        r=float(r),
        hawking=float(hawking_mass(metric, float(r))),
        brown_york=float(brown_york_radial(metric, float(r))),
        areal_radius=u * u * float(r),
    )


def _fit_inverse(x, y):
    """Least squares y ~ a + b/x."""
    basis = np.column_stack([np.ones_like(x), 1.0 / x])
    (a, b), *_ = np.linalg.lstsq(basis, y, rcond=None)
    return float(a), float(b)


def adm_mass(metric: RadialMetric, r_max: float | None = None) -> float:
    """ADM mass.

    Tagged metrics report their exact tail parameter.  Otherwise u ~ a + b/r
    is fitted over the outermost decade [r_max/10, r_max] and 2b returned;
    the fit needs a = 1 and must agree with the large-r limit of the
    Brown-York mass (itself extrapolated as c0 + c1/r).
    """
    if metric.tail.kind == "flat":
        return 0.0
    if metric.tail.kind == "schwarzschild":
        return metric.tail.mass
    top = metric.r_max if math.isfinite(metric.r_max) else r_max
    if top is None or not math.isfinite(top):
        raise NotAsymptoticallyFlat("untagged metric on an unbounded domain needs an explicit r_max")
    top = min(top, metric.r_max)
    lo = max(top / 10.0, metric.r_min)
    x = np.geomspace(lo * (1 + 1e-12), top, ADM_FIT_SAMPLES)
    u, _, _ = metric.eval(x)
    a, b = _fit_inverse(x, u)
    if abs(a - 1.0) > ADM_UNIT_TOL:
        raise NotAsymptoticallyFlat(f"u tends to {a!r}, not 1")
    mass = 2.0 * b
    by_limit, _ = _fit_inverse(x, brown_york_radial(metric, x))
    if abs(by_limit - mass) > ADM_AGREEMENT_TOL * max(1.0, abs(mass)):
        raise NotAsymptoticallyFlat(f"tail fit {mass!r} disagrees with Brown-York limit {by_limit!r}")
    return mass


def torus_hawking_mass(r_cyl: float, l: float) -> float:
    """Hawking mass of the flat torus from a cylinder of radius r_cyl, length l.

    Area 2 pi r l and int H^2 = 2 pi l / r give sqrt(r l / 8) (1 - l / (8 r)).
    """
    if not (r_cyl > 0 and l > 0):
        raise InvalidParams(f"torus needs r > 0 and l > 0, got r={r_cyl}, l={l}")
    # 8r - l keeps the sign exact near the threshold l = 8r
    return math.sqrt(r_cyl * l / 8.0) * ((8.0 * r_cyl - l) / (8.0 * r_cyl))
