"""Conformally flat radial metrics g = u(r)^4 (dr^2 + r^2 dsigma^2).

A metric is a piecewise closed-form conformal factor (a :class:`RadialProfile`)
plus a tag describing its asymptotic end.  Every function here accepts a scalar
radius or a numpy array of radii; derivatives of ``u`` are analytic on each
segment.

Geometry of the centered coordinate sphere ``S_r``::

    area   = 4 pi r^2 u^4
    R      = u^2 r                       (areal radius)
    H      = 2 (u + 2 r u') / (r u^3)    (outward mean curvature)
    R_scal = -8 u^-5 (u'' + 2 u'/r)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np
from scipy import integrate

from .errors import InvalidParams, OutOfDomain

_GL32 = np.polynomial.legendre.leggauss(32)



def _as_array(r):
    arr = np.asarray(r, dtype=float)
    return arr, arr.ndim == 0


# ---------------------------------------------------------------------------
# segments


@dataclass(frozen=True)
class PolynomialBridge:
    """Polynomial ``f(r) = sum_j coef[j] t^j`` with ``t = (r - r_a)/(r_b - r_a)``."""

    r_a: float
    r_b: float
    coef: tuple

    @property
    def length(self) -> float:
        return self.r_b - self.r_a

    @cached_property
    def _derivs(self):
        # Horner coefficient arrays for f, f', f''
        p = np.polynomial.Polynomial(self.coef)
        return [np.asarray(p.deriv(nu).coef[::-1]) for nu in range(3)]

    @cached_property
    def _laurent(self):
        c = self.r_a / self.length
        return np.polynomial.Polynomial(self.coef)(np.polynomial.Polynomial([-c, c])).coef

    def __call__(self, r, nu=0):
        r, scalar = _as_array(r)
        t = (r - self.r_a) / self.length
        out = np.polyval(self._derivs[nu], t) / self.length**nu
        return float(out) if scalar else out

    def integral_over_square(self, r):
        """``int_{r_a}^{r} f(tau) / tau^2 dtau``.

        For bridges that start far from the origin compared with their length
        (r_a > r_b - r_a) the integrand is smooth on a wide neighbourhood and a
        32-point Gauss-Legendre rule is exact to rounding.  Otherwise, with
        ``y = tau / r_a``, the integrand is a Laurent polynomial in ``y`` and
        the antiderivative is a polynomial plus a ``log y`` term; that form
        loses accuracy when r_a / length is large, hence the split.
        """
        r, scalar = _as_array(r)
        if self.r_a > self.length:
            out = self._integral_gauss(r)
        else:
            out = self._integral_laurent(r)
        return float(out) if scalar else out

    def _integral_gauss(self, r):
        nodes, weights = _GL32
        half = 0.5 * (r - self.r_a)
        tau = self.r_a + half[..., None] * (nodes + 1.0)
        f = np.polyval(self._derivs[0], (tau - self.r_a) / self.length)
        return half * ((f / (tau * tau)) @ weights)

    def _integral_laurent(self, r):
        d = self._laurent
        x = (r - self.r_a) / self.r_a  # y - 1, computed without cancellation
        y = 1.0 + x
        total = d[0] * x / y
        if len(d) > 1:
            total = total + d[1] * np.log1p(x)
        for j in range(2, len(d)):
            # (y^(j-1) - 1)/(j-1) = x * (1 + y + ... + y^(j-2)) / (j-1)
            geo = sum(y**i for i in range(j - 1))
            total = total + d[j] * x * geo / (j - 1)
        return total / self.r_a


@dataclass(frozen=True)
class HarmonicSegment:
    """u = a + b/r (flat, rescaled flat, or Schwarzschild)."""

    lo: float
    hi: float
    a: float
    b: float = 0.0
    kind: str = "harmonic"

    def eval(self, r):
        return self.a + self.b / r, -self.b / r**2, 2.0 * self.b / r**3

    def laplacian(self, r):
        return np.zeros_like(r)

    def scales(self):
        # u + 2ru' = a - b/r vanishes at r = b/a
        return [abs(self.b / self.a)] if self.b else []


@dataclass(frozen=True)
class SphereCapSegment:
    """u = shift + (1 + r^2/4)^(-1/2): the unit round sphere in stereographic form, shifted."""

    lo: float
    hi: float
    shift: float
    kind: str = "sphere_cap"

    def eval(self, r):
        w = 1.0 + 0.25 * r * r
        u = self.shift + w**-0.5
        du = -0.25 * r * w**-1.5
        d2u = -0.25 * (1.0 - 0.5 * r * r) * w**-2.5
        return u, du, d2u

    def laplacian(self, r):
        return -0.75 * (1.0 + 0.25 * r * r) ** -2.5

    def scales(self):
        return [2.0]


@dataclass(frozen=True)
class FluxSegment:
    """Segment given by its flux q = r^2 u' (a polynomial bridge), anchored at ``hi``.

    ``u(r) = u(hi) - int_r^hi q(tau)/tau^2 dtau`` and ``Delta u = q'/r^2``,
    so a nonincreasing flux gives nonnegative scalar curvature.
    """

    lo: float
    hi: float
    flux: PolynomialBridge
    anchor_u: float
    kind: str = "flux_bridge"

    def eval(self, r):
        q = self.flux(r)
        dq = self.flux(r, 1)
        total = self.flux.integral_over_square(self.hi)
        u = self.anchor_u - (total - self.flux.integral_over_square(r))
        return u, q / r**2, dq / r**2 - 2.0 * q / r**3

    def laplacian(self, r):
        return self.flux(r, 1) / r**2

    def scales(self):
        return [self.lo, self.hi]


# ---------------------------------------------------------------------------
# profile / metric


@dataclass(frozen=True)
class RadialProfile:
    segments: tuple

    def __post_init__(self):
        if not self.segments:
            raise InvalidParams("profile needs at least one segment")
        for left, right in zip(self.segments, self.segments[1:]):
            if left.hi != right.lo:
                raise InvalidParams(f"segments not contiguous at r={left.hi}")
        if self.segments[0].lo < 0 or self.r_min >= self.r_max:
            raise InvalidParams("profile domain must satisfy 0 <= r_min < r_max")

    @property
    def r_min(self) -> float:
        return self.segments[0].lo

    @property
    def r_max(self) -> float:
        return self.segments[-1].hi

    @property
    def junctions(self) -> list:
        return [s.hi for s in self.segments[:-1]]

    def contains(self, r) -> bool:
        r = np.asarray(r, dtype=float)
        return bool(np.all((r > self.r_min) & (r <= self.r_max) & np.isfinite(r)))

    def check(self, r):
        if not self.contains(r):
            raise OutOfDomain(f"radius {r!r} outside ({self.r_min}, {self.r_max}]")

    def eval(self, r):
        r, scalar = _as_array(r)
        self.check(r)
        flat = np.atleast_1d(r)
        idx = np.searchsorted(np.array(self.junctions), flat, side="left")
        u = np.empty_like(flat)
        du = np.empty_like(flat)
        d2u = np.empty_like(flat)
        for i, seg in enumerate(self.segments):
            sel = idx == i
            if np.any(sel):
                u[sel], du[sel], d2u[sel] = seg.eval(flat[sel])
        if scalar:
            return float(u[0]), float(du[0]), float(d2u[0])
        return u.reshape(r.shape), du.reshape(r.shape), d2u.reshape(r.shape)

    def laplacian(self, r):
        """Flat Laplacian u'' + 2u'/r, exact per segment (no cancellation)."""
        r, scalar = _as_array(r)
        self.check(r)
        flat = np.atleast_1d(r)
        idx = np.searchsorted(np.array(self.junctions), flat, side="left")
        out = np.empty_like(flat)
        for i, seg in enumerate(self.segments):
            sel = idx == i
            if np.any(sel):
                out[sel] = seg.laplacian(flat[sel])
        return float(out[0]) if scalar else out.reshape(r.shape)

    def junction_jumps(self):
        """Relative jumps of (u, u', u'') across each junction."""
        out = []
        for left, right in zip(self.segments, self.segments[1:]):
            r = left.hi
            a = np.array(left.eval(np.float64(r)), dtype=float)
            b = np.array(right.eval(np.float64(r)), dtype=float)
            scale = np.maximum(np.maximum(abs(a), abs(b)), 1e-14)
            out.append((r, *(abs(a - b) / scale)))
        return out


@dataclass(frozen=True)
class Tail:
    """Asymptotic tag: on ``r >= start``, ``u = scale (1 + mass / (2 scale^2 r))``."""

    kind: str = "none"  # flat | schwarzschild | none
    mass: float = 0.0
    scale: float = 1.0
    start: float = 0.0

    def u(self, r):
        return self.scale * (1.0 + self.mass / (2.0 * self.scale**2 * r))


@dataclass(frozen=True)
class RadialMetric:
    profile: RadialProfile
    tail: Tail = field(default_factory=Tail)
    description: str = ""

    def eval(self, r):
        return self.profile.eval(r)

    @property
    def r_min(self):
        return self.profile.r_min

    @property
    def r_max(self):
        return self.profile.r_max

    def span(self):
        """A finite radial window containing all of the metric's structure."""
        scales = [s for seg in self.profile.segments for s in seg.scales()]
        scales += [j for j in self.profile.junctions if math.isfinite(j)]
        scales = [s for s in scales if s > 0] or [1.0]
        lo = 1e-3 * min(scales)
        hi = 1e2 * max(scales)
        if lo <= self.r_min:
            lo = self.r_min + 1e-9 * max(1.0, abs(self.r_min))
        hi = min(hi, self.r_max)
        return lo, hi

    def breaks(self, lo, hi):
        return [j for j in self.profile.junctions if lo < j < hi]


def radial_grid(metric: RadialMetric, lo, hi, n) -> np.ndarray:
    """Sorted grid on [lo, hi] containing both ends and every junction inside."""
    if hi / lo > 10.0:
        base = np.geomspace(lo, hi, n)
    else:
        base = np.linspace(lo, hi, n)
    pts = np.concatenate([base, metric.breaks(lo, hi), [lo, hi]])
    return np.unique(pts)


# ---------------------------------------------------------------------------
# pointwise geometry


@dataclass(frozen=True)
class SphereReport:
    r: float
    area: float
    areal_radius: float
    mean_curvature: float
    scalar_curvature: float


def eval_profile(profile: RadialProfile, r):
    """Return ``(u, u', u'')`` at ``r``."""
    return profile.eval(r)


def mean_curvature(metric: RadialMetric, r):
    u, du, _ = metric.eval(r)
    return 2.0 * (u + 2.0 * r * du) / (r * u**3)


def areal_radius(metric: RadialMetric, r):
    u, _, _ = metric.eval(r)
    return u * u * r


def area(metric: RadialMetric, r):
    u, _, _ = metric.eval(r)
    return 4.0 * math.pi * r * r * u**4


def scalar_curvature(metric: RadialMetric, r):
    u, _, _ = metric.eval(r)
    return -8.0 * metric.profile.laplacian(r) / u**5


def sphere_geometry(metric: RadialMetric, r: float) -> SphereReport:
    r = float(r)
    u, du, _ = metric.eval(r)
    return SphereReport(
        r=r,
        area=4.0 * math.pi * r * r * u**4,
        areal_radius=u * u * r,
        mean_curvature=2.0 * (u + 2.0 * r * du) / (r * u**3),
        scalar_curvature=scalar_curvature(metric, r),
    )


def sectional_curvatures(metric: RadialMetric, r):
    """Sectional curvatures ``(K_tan, K_rad)`` of the warped product.

    Writing g = dl^2 + R(l)^2 dsigma^2 with dl = u^2 dr and R = u^2 r,
    K_tan = (1 - R_l^2)/R^2 (plane tangent to S_r) and K_rad = -R_ll/R
    (plane containing the radial direction).
    """
    u, du, d2u = metric.eval(r)
    k_tan = -4.0 * du * (u + r * du) / (u**6 * r)
    k_rad = -2.0 * (du + r * d2u - r * du * du / u) / (u**5 * r)
    return k_tan, k_rad


def _abs_curvature(metric, r):
    k_tan, k_rad = sectional_curvatures(metric, r)
    return np.maximum(np.abs(k_tan), np.abs(k_rad))


def _refine_maxima(fun, grid, values, levels, max_peaks=16):
    """Bisection refinement around the largest local maxima of sampled ``values``."""
    n = len(grid)
    if n < 3:
        return float(values.max())
    interior = (values[1:-1] > values[:-2]) & (values[1:-1] >= values[2:])
    peaks = list(np.nonzero(interior)[0] + 1)
    peaks += [i for i in (0, n - 1)]
    peaks = sorted(set(peaks), key=lambda i: -values[i])[:max_peaks]
    best = float(values.max())
    for i in peaks:
        left = grid[max(i - 1, 0)]
        right = grid[min(i + 1, n - 1)]
        centre, fc = grid[i], values[i]
        for _ in range(levels):
            mids = np.array([0.5 * (left + centre), 0.5 * (centre + right)])
            fm = fun(mids)
            j = int(np.argmax(fm))
            if fm[j] > fc:
                if j == 0:
                    right, centre, fc = centre, mids[0], fm[0]
                else:
                    left, centre, fc = centre, mids[1], fm[1]
            else:
                left, right = mids[0], mids[1]
        best = max(best, float(fc))
    return best


def curvature_sup(metric: RadialMetric, r1, r2, base_points=4096, levels=3) -> float:
    """max over [r1, r2] of max(|K_tan|, |K_rad|) (sampled, locally refined)."""
    metric.profile.check([r1, r2])
    if not r1 < r2:
        raise OutOfDomain("sectional bounds need r1 < r2")
    edges = [r1] + metric.breaks(r1, r2) + [r2]
    best = 0.0
    for a, b in zip(edges, edges[1:]):
        grid = np.geomspace(a, b, base_points) if b / a > 10.0 else np.linspace(a, b, base_points)
        vals = _abs_curvature(metric, grid)
        best = max(best, _refine_maxima(lambda x: _abs_curvature(metric, x), grid, vals, levels))
    return best


def sectional_bounds(metric: RadialMetric, r1, r2, *, take_root=True, base_points=4096, levels=3) -> float:
    """Curvature scale K on [r1, r2].

    With ``take_root`` (default) K = sqrt(sup |sectional|), so that ``sin(K tau)``
    is dimensionless; otherwise K is the sectional bound itself.
    """
    bound = curvature_sup(metric, r1, r2, base_points, levels)
    return math.sqrt(bound) if take_root else bound


def radial_distance(metric: RadialMetric, r1, r2, tol=1e-10) -> float:
    """g-length of the radial segment from S_r1 to S_r2."""
    metric.profile.check([r1, r2])
    if r1 > r2:
        raise OutOfDomain("radial_distance needs r1 <= r2")
    if r1 == r2:
        return 0.0
    edges = [r1] + metric.breaks(r1, r2) + [r2]
    total = 0.0
    for a, b in zip(edges, edges[1:]):
        val, _ = integrate.quad(lambda s: metric.eval(s)[0] ** 2, a, b, epsabs=tol, epsrel=1e-13, limit=200)
        total += val
    return total


def make_metric(segments: Sequence, tail: Tail | None = None, description: str = "") -> RadialMetric:
    return RadialMetric(RadialProfile(tuple(segments)), tail or Tail(), description)
