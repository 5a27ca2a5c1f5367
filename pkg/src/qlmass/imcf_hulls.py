"""Radial inverse mean curvature flow, minimizing-hull checks and m(Omega).

In spherical symmetry the centered spheres *are* the IMCF surfaces: the flow
time is t = 2 ln(R/R_0) and areas grow like e^t, so no PDE is solved.  Hull
checks compare only against centered competitors (a radial surrogate).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, special

from .errors import FlowObstruction, InvalidParams, OutOfDomain
from .horizons import AREA_TOL, _area_min_on, expansion
from .quasimass import hawking_mass
from .radial_metric import (
    RadialMetric,
    _abs_curvature,
    _refine_maxima,
    area,
    areal_radius,
    curvature_sup,
    mean_curvature,
    radial_distance,
    radial_grid,
)

FLOW_CHECK_POINTS = 4096
REGION_POINTS = 2048
TABLE_POINTS = 8192
_RTOL = 4 * np.finfo(float).eps
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


# ---------------------------------------------------------------------------
# IMCF


@dataclass(frozen=True)
class ImcfTrace:
    t: np.ndarray
    r: np.ndarray
    R: np.ndarray
    A: np.ndarray
    m_H: np.ndarray

    def __len__(self):
        return len(self.t)

    def rows(self):
        return list(zip(self.t, self.r, self.R, self.A, self.m_H))


def imcf_trace(metric: RadialMetric, r_start: float, r_end: float, n: int = 200) -> ImcfTrace:
    """Sample the flow from S_{r_start} to S_{r_end} at ``n`` equally spaced times."""
    metric.profile.check([r_start, r_end])
    if not r_start < r_end or n < 2:
        raise InvalidParams("imcf_trace needs r_start < r_end and n >= 2")
    grid = radial_grid(metric, r_start, r_end, FLOW_CHECK_POINTS)
    H = mean_curvature(metric, grid)
    bad = np.nonzero(H <= 0)[0]
    if len(bad):
        r_bad = float(grid[bad[0]])
        raise FlowObstruction(f"H <= 0 at r={r_bad!r}; centered spheres do not flow outward", r_bad)
    R_grid = areal_radius(metric, grid)
    dec = np.nonzero(np.diff(R_grid) <= 0)[0]
    if len(dec):
        r_bad = float(grid[dec[0]])
        raise FlowObstruction(f"areal radius not increasing near r={r_bad!r}", r_bad)

    R0, R1 = R_grid[0], R_grid[-1]
    targets = R0 * np.exp(0.5 * np.linspace(0.0, 2.0 * math.log(R1 / R0), n))
    r = np.empty(n)
    r[0], r[-1] = r_start, r_end
    idx = np.clip(np.searchsorted(R_grid, targets[1:-1]), 1, len(grid) - 1)
    for k, (target, j) in enumerate(zip(targets[1:-1], idx), start=1):
        r[k] = optimize.brentq(
            lambda x: areal_radius(metric, x) - target, grid[j - 1], grid[j], xtol=1e-15 * grid[j], rtol=_RTOL
        )
    R = areal_radius(metric, r)
    t = 2.0 * np.log(R / R[0])
    return ImcfTrace(t=t, r=r, R=R, A=4.0 * math.pi * R * R, m_H=hawking_mass(metric, r))


def geroch_report(trace: ImcfTrace) -> float:
    """Smallest forward-difference slope dm_H/dt along the trace."""
    if len(trace) < 3:
        raise InvalidParams("geroch_report needs at least 3 samples")
    return float(np.min(np.diff(trace.m_H) / np.diff(trace.t)))


# ---------------------------------------------------------------------------
# hulls


def radial_hull_check(metric: RadialMetric, s: float, r2: float) -> bool:
    """B_s is a minimizing hull in B_r2 against centered competitors."""
    metric.profile.check([s, r2])
    if not s < r2:
        raise OutOfDomain("radial_hull_check needs s < r2")
    if mean_curvature(metric, s) < 0:
        return False
    a0 = float(area(metric, s))
    return _area_min_on(metric, s, r2) >= a0 - AREA_TOL * max(1.0, a0)


def _hull_mask(metric, grid, A):
    """For every grid node s: area(S_sigma) >= area(S_s) for all sigma >= s on the grid."""
    suffix = np.minimum.accumulate(A[::-1])[::-1]
    # refine interior local minima so the suffix minimum is not overestimated
    interior = np.nonzero((A[1:-1] < A[:-2]) & (A[1:-1] <= A[2:]))[0] + 1
    for i in interior:
        res = optimize.minimize_scalar(
            lambda x: float(area(metric, x)),
            bounds=(grid[i - 1], grid[i + 1]),
            method="bounded",
            options={"xatol": 1e-12 * grid[i]},
        )
        if res.fun < suffix[i]:
            upto = np.searchsorted(grid, res.x, side="right")
            suffix[:upto] = np.minimum(suffix[:upto], res.fun)
    return A <= suffix + AREA_TOL * np.maximum(1.0, A), suffix


def _hull_cuts(metric, grid, A, ok, suffix):
    """Exact ends of the admissible runs of ``ok``.

    Where node j-1 is admissible and node j is not, the last hull radius in
    between solves area = (min area beyond) or H = 0.  Returns (j, s, m_H(s)).
    """
    out = []
    for j in np.nonzero(ok[:-1] & ~ok[1:])[0] + 1:
        a, b = float(grid[j - 1]), float(grid[j])
        ends = []
        thr = suffix[j]
        if A[j] > thr and A[j - 1] < thr:
            ends.append(optimize.brentq(lambda x: float(area(metric, x)) - thr, a, b, xtol=1e-14 * b, rtol=_RTOL))
        if mean_curvature(metric, b) < 0 <= mean_curvature(metric, a):
            ends.append(optimize.brentq(lambda x: float(expansion(metric, x)), a, b, xtol=1e-14 * b, rtol=_RTOL))
        if ends:
            s = min(ends)
            out.append((int(j), s, float(hawking_mass(metric, s))))
    return out


# ---------------------------------------------------------------------------
# alpha


@dataclass(frozen=True)
class AlphaParams:
    C: float = 1.0
    iota: float | None = None  # None: heuristic
    curvature_root: bool = True

    def validate(self):
        if not self.C > 0:
            raise InvalidParams(f"Meeks-Yau constant must be positive, got {self.C}")
        if self.iota is not None and not self.iota > 0:
            raise InvalidParams(f"injectivity radius must be positive, got {self.iota}")


@dataclass(frozen=True)
class AlphaDetails:
    alpha: float
    d: float
    r: float
    K: float
    iota: float
    iota_auto: bool
    sigma_K: float
    area_r1: float


def _cin_over_sq(x):
    """Cin(x) / x^2 where Cin(x) = int_0^x (1 - cos s)/s ds."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = x < 1.0
    xs = x[small]
    term = np.full_like(xs, 0.25)
    total = term.copy()
    for k in range(2, 12):
        # ratio of successive terms of sum (-1)^(k+1) x^(2k-2) / (2k (2k)!)
        term = -term * xs * xs * (2 * k - 2) / (2 * k * (2 * k) * (2 * k - 1))
        total += term
    out[small] = total
    xl = x[~small]
    _, ci = special.sici(xl)
    out[~small] = (np.euler_gamma + np.log(xl) - ci) / (xl * xl)
    return out


def sine_area_integral(K, r):
    """K^-2 int_0^r sin^2(K tau)/tau dtau (= r^2/2 in the K -> 0 limit)."""
    K = np.asarray(K, dtype=float)
    r = np.asarray(r, dtype=float)
    val = 2.0 * r * r * _cin_over_sq(2.0 * K * r)
    return float(val) if val.ndim == 0 else val


def _alpha_from(C, integral, area_r1):
    ratio = C * integral / area_r1
    return np.sqrt(np.minimum(ratio, 1.0))


def alpha_details(metric: RadialMetric, r1: float, r2: float, params: AlphaParams = AlphaParams()) -> AlphaDetails:
    params.validate()
    metric.profile.check([r1, r2])
    if not r1 < r2:
        raise OutOfDomain("alpha needs r1 < r2")
    d = radial_distance(metric, r1, r2)
    sigma_k = optimize.brentq(lambda x: radial_distance(metric, x, r2) - 0.25 * d, r1, r2, xtol=1e-13 * r2)
    lo = metric.span()[0]
    lo = min(lo, 0.5 * r1)
    bound = curvature_sup(metric, lo, sigma_k)
    K = math.sqrt(bound) if params.curvature_root else bound
    if params.iota is None:
        grid = radial_grid(metric, lo, sigma_k, REGION_POINTS)
        iota = float(np.max(areal_radius(metric, grid)))
        if K > 0:
            iota = min(iota, math.pi / K)
    else:
        iota = params.iota
    r = min(0.5 * d, iota)
    a1 = float(area(metric, r1))
    alpha = float(_alpha_from(params.C, sine_area_integral(K, r), a1))
    return AlphaDetails(alpha, d, r, K, iota, params.iota is None, sigma_k, a1)


def alpha_coefficient(metric: RadialMetric, r1: float, r2: float, params: AlphaParams = AlphaParams()) -> float:
    return alpha_details(metric, r1, r2, params).alpha


# ---------------------------------------------------------------------------
# m(Omega1; Omega2)


def m_region_details(metric: RadialMetric, r1: float, r2: float, n: int = REGION_POINTS):
    """(value, maximizing s) of the sup of m_H(S_s) over centered hulls B_s, s <= r1, in B_r2."""
    metric.profile.check([r1, r2])
    if not r1 < r2:
        raise OutOfDomain("m_region needs r1 < r2")
    lo = min(metric.span()[0], 0.5 * r1)
    grid = np.unique(np.concatenate([radial_grid(metric, lo, r2, n), [r1]]))
    A = area(metric, grid)
    hull, suffix = _hull_mask(metric, grid, A)
    ok = hull & (mean_curvature(metric, grid) >= 0)
    inside = grid <= r1
    if not np.any(ok & inside):
        return 0.0, None
    mH = np.where(ok & inside, hawking_mass(metric, grid), -np.inf)
    i = int(np.argmax(mH))
    best, s_best = float(mH[i]), float(grid[i])
    cut_best = None
    for j, s_cut, val in _hull_cuts(metric, grid, A, ok, suffix):
        if s_cut <= r1 and val > best:
            best, s_best, cut_best = val, s_cut, True
    if cut_best:
        return (best, s_best) if best > 0 else (0.0, None)
    a, b = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    if b > a:
        res = optimize.minimize_scalar(
            lambda x: -float(hawking_mass(metric, x)), bounds=(a, min(b, r1)), method="bounded",
            options={"xatol": 1e-12 * b},
        )
        if -res.fun > best and res.x <= r1 and radial_hull_check(metric, float(res.x), r2):
            best, s_best = float(-res.fun), float(res.x)
    # small centered balls are hulls with m_H -> 0, so the sup is never negative
    if best < 0:
        return 0.0, None
    return best, s_best


def m_region(metric: RadialMetric, r1: float, r2: float) -> float:
    return m_region_details(metric, r1, r2)[0]


# ---------------------------------------------------------------------------
# m(Omega)


@dataclass(frozen=True)
class MOmegaResult:
    value: float
    r1: float | None
    r2: float | None
    alpha: float
    m_region: float
    provenance: dict = field(default_factory=dict)


class _PairTable:
    """Dense sampling of one metric on [lo, r_out] shared by all (r1, r2) pairs."""

    def __init__(self, metric, lo, r_out, radii, params):
        self.metric = metric
        self.params = params
        x = np.unique(np.concatenate([radial_grid(metric, lo, r_out, TABLE_POINTS), radii]))
        self.x = x
        self.A = area(metric, x)
        self.R = areal_radius(metric, x)
        self.mH = hawking_mass(metric, x)
        self.H_ok = mean_curvature(metric, x) >= 0
        # cumulative radial distance, Gauss-Legendre per interval (junctions are nodes)
        a, b = x[:-1], x[1:]
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        pts = mid[:, None] + half[:, None] * _GL_NODES[None, :]
        u = metric.eval(pts)[0]
        self.D = np.concatenate([[0.0], np.cumsum(half * ((u * u) @ _GL_WEIGHTS))])
        kabs = _abs_curvature(metric, x)
        self.K_prefix = np.maximum.accumulate(kabs)
        self.R_prefix = np.maximum.accumulate(self.R)
        self.peaks = self._refined_peaks(kabs)

    def _refined_peaks(self, kabs):
        x = self.x
        interior = np.nonzero((kabs[1:-1] > kabs[:-2]) & (kabs[1:-1] >= kabs[2:]))[0] + 1
        fun = lambda p: _abs_curvature(self.metric, p)
        peaks = []
        for i in interior:
            val = _refine_maxima(fun, x[i - 1 : i + 2], kabs[i - 1 : i + 2], 3)
            peaks.append((x[i + 1], val))  # conservative: counts once sigma passes x[i+1]
        return peaks

    def index(self, r):
        return np.searchsorted(self.x, r)

    def distance_to(self, sigma, k):
        """D at sigma in [x[k], x[k+1]] by Gauss-Legendre from node k."""
        a = self.x[k]
        half = 0.5 * (sigma - a)
        pts = (a + half)[:, None] + half[:, None] * _GL_NODES[None, :]
        u = self.metric.eval(pts)[0]
        return self.D[k] + half * ((u * u) @ _GL_WEIGHTS)

    def alpha(self, i1, i2):
        """alpha for node pairs (i1, i2), vectorized."""
        p = self.params
        d = self.D[i2] - self.D[i1]
        target = self.D[i2] - 0.25 * d
        k = np.clip(np.searchsorted(self.D, target, side="right") - 1, 0, len(self.x) - 2)
        frac = (target - self.D[k]) / (self.D[k + 1] - self.D[k])
        sigma = self.x[k] + frac * (self.x[k + 1] - self.x[k])
        for _ in range(2):
            u = self.metric.eval(sigma)[0]
            sigma = np.clip(sigma - (self.distance_to(sigma, k) - target) / (u * u), self.x[k], self.x[k + 1])
        bound = np.maximum(self.K_prefix[k], _abs_curvature(self.metric, sigma))
        for pos, val in self.peaks:
            bound = np.where(pos <= sigma, np.maximum(bound, val), bound)
        K = np.sqrt(bound) if p.curvature_root else bound
        if p.iota is None:
            iota = np.maximum(self.R_prefix[k], areal_radius(self.metric, sigma))
            iota = np.where(K > 0, np.minimum(iota, np.pi / np.where(K > 0, K, 1.0)), iota)
        else:
            iota = np.full_like(d, p.iota)
        r = np.minimum(0.5 * d, iota)
        return _alpha_from(p.C, sine_area_integral(K, r), self.A[i1])

    def m_region(self, i1_all, i2):
        """sup of hull Hawking masses for fixed outer node i2 and every inner node in i1_all."""
        sl = slice(0, i2 + 1)
        hull, suffix = _hull_mask(self.metric, self.x[sl], self.A[sl])
        ok = hull & self.H_ok[sl]
        vals = np.where(ok, self.mH[sl], -np.inf)
        for j, _, val in _hull_cuts(self.metric, self.x[sl], self.A[sl], ok, suffix):
            vals[j] = max(vals[j], val)
        running = np.maximum.accumulate(vals)
        return np.maximum(running[i1_all], 0.0)


def m_omega(
    metric: RadialMetric,
    r_out: float,
    params: AlphaParams = AlphaParams(),
    grid: tuple = (64, 64),
    refine: int = 6,
) -> MOmegaResult:
    """sup over centered pairs B_r1 within B_r2 within B_r_out of alpha * m(B_r1; B_r2).

    A dense shared table evaluates the coarse log-spaced grid; the best pair
    is then re-evaluated, with a ``refine x refine`` sub-grid around it,
    through :func:`alpha_coefficient` and :func:`m_region` directly.
    """
    params.validate()
    metric.profile.check(r_out)
    lo = metric.span()[0]
    if lo >= r_out:
        lo = 1e-3 * r_out
    n1, n2 = grid
    r1s = np.geomspace(lo * 1.01, r_out, n1 + 1)[:-1]
    r2s = np.geomspace(lo * 1.02, r_out, n2)
    table = _PairTable(metric, lo, r_out, np.concatenate([r1s, r2s]), params)
    i1 = table.index(r1s)
    best = (0.0, None, None, 0.0, 0.0)
    for j, r2 in enumerate(r2s):
        i2 = table.index(r2)
        sel = r1s < r2
        if not np.any(sel):
            continue
        mreg = table.m_region(i1[sel], i2)
        alpha = table.alpha(i1[sel], np.full(int(sel.sum()), i2))
        vals = alpha * mreg
        k = int(np.argmax(vals))
        if vals[k] > best[0]:
            best = (float(vals[k]), float(r1s[sel][k]), float(r2), float(alpha[k]), float(mreg[k]))

    iota_used = params.iota
    if best[1] is not None and refine:
        a = int(np.searchsorted(r1s, best[1]))
        b = int(np.searchsorted(r2s, best[2]))
        r1_lo, r1_hi = r1s[max(a - 1, 0)], r1s[min(a + 1, n1 - 1)]
        r2_lo, r2_hi = r2s[max(b - 1, 0)], r2s[min(b + 1, n2 - 1)]
        cands = [(best[1], best[2])]
        cands += [(x, y) for x in np.geomspace(r1_lo, r1_hi, refine) for y in np.geomspace(r2_lo, r2_hi, refine) if x < y]
        for n, (x, y) in enumerate(cands):
            det = alpha_details(metric, float(x), float(y), params)
            mreg = m_region(metric, float(x), float(y))
            val = det.alpha * mreg
            if n == 0:
                iota_used = det.iota
            if val >= best[0]:
                best = (float(val), float(x), float(y), det.alpha, mreg)
                iota_used = det.iota
    provenance = {
        "C": params.C,
        "iota": "auto" if params.iota is None else params.iota,
        "iota_at_argmax": iota_used,
        "curvature_root": params.curvature_root,
        "grid": [n1, n2],
        "refine": refine,
        "hull_check": "radial surrogate",
    }
    value = max(best[0], 0.0)
    return MOmegaResult(value, best[1], best[2], best[3], best[4], provenance)
