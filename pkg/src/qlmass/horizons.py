"""Centered minimal spheres: location, classification and the Penrose deficit.

Only centered coordinate spheres are candidates.  S_r is minimal exactly when
u + 2 r u' vanishes, which is the quantity bracketed here (it has the sign of
H and is free of the 1/(r u^3) prefactor).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .errors import NoHorizon
from .quasimass import adm_mass
from .radial_metric import RadialMetric, area, radial_grid

HORIZON_GRID = 8192
AREA_TOL = 1e-10
GRAZING_TOL = 1e-10


@dataclass(frozen=True)
class HorizonRecord:
    r: float
    areal_radius: float
    area: float
    outermost: bool
    outer_minimizing: bool
    stable: bool  # area has a strict local minimum at r (H changes from - to +)


def expansion(metric: RadialMetric, r):
    """u + 2 r u' (same sign as the mean curvature of S_r)."""
    u, du, _ = metric.eval(r)
    return u + 2.0 * r * du


def _window(metric, r_lo, r_hi):
    lo, hi = metric.span()
    return (lo if r_lo is None else r_lo), (hi if r_hi is None else r_hi)


def _crossings(metric, r_lo, r_hi, n):
    grid = radial_grid(metric, r_lo, r_hi, n)
    f = expansion(metric, grid)
    roots = [float(x) for x in grid[f == 0.0]]
    brackets = np.nonzero(np.sign(f[:-1]) * np.sign(f[1:]) < 0)[0]
    fun = lambda x: expansion(metric, x)
    for i in brackets:
        a, b = grid[i], grid[i + 1]
        roots.append(optimize.brentq(fun, a, b, xtol=1e-14 * a, rtol=4 * np.finfo(float).eps, maxiter=500))
    return sorted(roots), grid, f


def find_grazing(metric: RadialMetric, r_lo=None, r_hi=None, grid=HORIZON_GRID) -> list:
    """Grid radii where |H| < 1e-10 but the expansion does not change sign."""
    r_lo, r_hi = _window(metric, r_lo, r_hi)
    pts = radial_grid(metric, r_lo, r_hi, grid)
    u, du, _ = metric.eval(pts)
    H = 2.0 * (u + 2.0 * pts * du) / (pts * u**3)
    s = np.sign(H)
    out = []
    for i in np.nonzero(np.abs(H) < GRAZING_TOL)[0]:
        left = s[i - 1] if i > 0 else s[i + 1]
        right = s[i + 1] if i + 1 < len(s) else s[i - 1]
        if left == right and left != 0:
            out.append(float(pts[i]))
    return out


def _area_min_on(metric, a, b, n=4096):
    """min of area(S_s) over s in [a, b], grid plus bounded refinement of local minima."""
    if b <= a:
        return float(area(metric, a))
    grid = radial_grid(metric, a, b, n)
    A = area(metric, grid)
    best = float(A.min())
    interior = np.nonzero((A[1:-1] < A[:-2]) & (A[1:-1] <= A[2:]))[0] + 1
    for i in interior:
        res = optimize.minimize_scalar(
            lambda x: float(area(metric, x)),
            bounds=(grid[i - 1], grid[i + 1]),
            method="bounded",
            options={"xatol": 1e-12 * grid[i]},
        )
        best = min(best, float(res.fun))
    return best


def outer_minimizing_check(metric: RadialMetric, record: HorizonRecord, r_max: float) -> bool:
    """Radial surrogate: no centered sphere outside the record (up to r_max) has less area."""
    a0 = float(area(metric, record.r))
    if r_max <= record.r:
        return True
    return _area_min_on(metric, record.r, r_max) >= a0 - AREA_TOL * max(1.0, a0)


def find_horizons(metric: RadialMetric, r_lo=None, r_hi=None, grid=HORIZON_GRID) -> list:
    """All sign changes of H on [r_lo, r_hi], sorted by radius.

    Defaults to the metric's full structural window.  ``outermost`` is decided
    against roots anywhere out to the end of that window.
    """
    r_lo, r_hi = _window(metric, r_lo, r_hi)
    metric.profile.check([r_lo, r_hi])
    roots, _, _ = _crossings(metric, r_lo, r_hi, grid)
    full_hi = max(r_hi, metric.span()[1])
    beyond = []
    if full_hi > r_hi:
        beyond, _, _ = _crossings(metric, r_hi, full_hi, grid)
        beyond = [x for x in beyond if x > r_hi]
    outer_r = max(roots + beyond) if roots or beyond else None
    records = []
    for x in roots:
        u, du, d2u = metric.eval(x)
        # d/dr (u + 2 r u') = 3u' + 2 r u''
        slope = 3.0 * du + 2.0 * x * d2u
        rec = HorizonRecord(
            r=x,
            areal_radius=u * u * x,
            area=4.0 * math.pi * x * x * u**4,
            outermost=x == outer_r,
            outer_minimizing=False,
            stable=slope > 0,
        )
        om = outer_minimizing_check(metric, rec, full_hi)
        records.append(HorizonRecord(**{**rec.__dict__, "outer_minimizing": om}))
    return records


def outermost_horizon(metric: RadialMetric) -> HorizonRecord:
    records = find_horizons(metric)
    if not records:
        raise NoHorizon(f"no centered minimal sphere in {metric.description or 'metric'}")
    return max(records, key=lambda rec: rec.r)


def penrose_check(metric: RadialMetric) -> float:
    """m_ADM - sqrt(|outermost horizon| / 16 pi)."""
    rec = outermost_horizon(metric)
    return adm_mass(metric) - math.sqrt(rec.area / (16.0 * math.pi))
