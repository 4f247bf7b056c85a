"""Detection functions lambda_j(h) for the four orbit families.

For a region D bounded by a closed level curve, the detection function is

    lambda(h) = int_D f dx dy / (2 int_D dx dy),
    f = (n+2)(u x^n + v y^n) - 3(u x^2 + v y^2),

which is linear in (u, v). It is stored as a pair of coefficients
(cu, cv). In polar form the radial integrals are exact, leaving 1-D
integrals in theta over powers of the squared radii r_+^2, r_-^2.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import numpy.polynomial.polynomial as npoly
from scipy.interpolate import PchipInterpolator

from .exceptions import DomainError
from .hamiltonian import (
    CLAMP_TOL,
    OrbitFamily,
    SystemParams,
    p_theta,
    theta_bounds,
)
from .quadrature import integrate_sqrt_endpoints

GUARD_BAND = 1e-6
DEFAULT_TOL = 1e-9
RHO_SCALE = 1e4  # rho = 1e4 u, omega = 1e4 v


@dataclass(frozen=True)
class DetectionSample:
    """Coefficients of lambda(h) = cu*u + cv*v at one energy, plus the area
    of one region of the family."""

    h: float
    cu: float
    cv: float
    area: float

    def value(self, u: float, v: float) -> float:
        return self.cu * u + self.cv * v


def divergence(x, y, params: SystemParams):
    """Closed-form divergence of the perturbation (coefficient of epsilon)."""
    n, u, v = params.n, params.u, params.v
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return (n + 2) * (u * x**n + v * y**n) - 3 * (u * x * x + v * y * y) - 2 * params.lambda0


def _perturbation_polys(params: SystemParams):
    """2-D coefficient arrays (index [i, j] <-> x^i y^j) of the perturbation
    components P and Q, lambda included."""
    n, u, v, b, lam = params.n, params.u, params.v, params.b, params.lambda0
    mu, beta = params.mu, params.beta
    P = np.zeros((n + 2, n + 2))
    Q = np.zeros((n + 2, n + 2))
    # P = x (u x^n + v y^n - b (beta+1)/(mu+1) x^mu y^beta - u x^2 - lambda)
    P[n + 1, 0] += u
    P[1, n] += v
    P[mu + 1, beta] -= b * (beta + 1) / (mu + 1)
    P[3, 0] -= u
    P[1, 0] -= lam
    # Q = y (u x^n + v y^n + b x^mu y^beta - v y^2 - lambda)
    Q[n, 1] += u
    Q[0, n + 1] += v
    Q[mu, beta + 1] += b
    Q[0, 3] -= v
    Q[0, 1] -= lam
    return P, Q


def divergence_direct(x, y, params: SystemParams):
    """Divergence obtained by differentiating the perturbation polynomials.

    The x^mu y^beta terms are carried through and cancel numerically; this
    is the independent route checked against :func:`divergence`.
    """
    P, Q = _perturbation_polys(params)
    dP = npoly.polyder(P, axis=0)
    dQ = npoly.polyder(Q, axis=1)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return npoly.polyval2d(x, y, dP) + npoly.polyval2d(x, y, dQ)


def g_theta(theta, n: int, u: float, v: float):
    return u * np.cos(theta) ** n + v * np.sin(theta) ** n


def g1_theta(theta, u: float, v: float):
    return u * np.cos(theta) ** 2 + v * np.sin(theta) ** 2


def _integrand(h: float, params: SystemParams, kind: str, weights=None):
    """Vector integrand rows [N_u, N_v, D] (plus u*N_u + v*N_v if weights).

    ``kind`` picks the region between the curves along each ray: "outer"
    (0 to r_+), "inner" (0 to r_-) or "annulus" (r_- to r_+).
    """
    n = params.n
    k = (n + 2) // 2

    def f(theta):
        p = p_theta(theta, params)
        root = np.sqrt(np.maximum(1.0 - h * p, 0.0))
        r1 = (1.0 + root) / p
        r2 = (1.0 - root) / p
        if kind == "annulus":
            den = 2.0 * root / p
            # r1^k - r2^k = (r1 - r2) * sum r1^(k-1-i) r2^i, no cancellation
            geo = np.zeros_like(theta)
            for i in range(k):
                geo = geo + r1 ** (k - 1 - i) * r2**i
            diff_k = den * geo
            diff_2 = den * (2.0 / p)
        else:
            r = r1 if kind == "outer" else r2
            den = r
            diff_k = r**k
            diff_2 = r * r
        c = np.cos(theta)
        s = np.sin(theta)
        c2 = c * c
        s2 = s * s
        nu = diff_k * c**n - 0.75 * diff_2 * c2
        nv = diff_k * s**n - 0.75 * diff_2 * s2
        rows = [nu, nv, den]
        if weights is not None:
            rows.insert(0, weights[0] * nu + weights[1] * nv)
        return np.vstack(rows)

    return f


def _family_plan(family: OrbitFamily, h: float, params: SystemParams):
    """(kind, lo, hi, sqrt_left, sqrt_right, symmetry factor) for a family.

    Gamma1/Gamma2 integrate a quarter turn (the integrand is even and
    symmetric about pi/2); Gamma3 integrates [0, theta2] and doubles.
    """
    G = OrbitFamily
    half_pi = 0.5 * math.pi
    if family is G.GAMMA1:
        return "outer", 0.0, half_pi, False, h > 0, 4.0
    if family is G.GAMMA2:
        return "inner", 0.0, half_pi, False, True, 4.0
    bounds = theta_bounds(h, params)
    if family is G.GAMMA3:
        return "annulus", 0.0, bounds.theta2, False, True, 2.0
    return "annulus", bounds.theta1, bounds.theta2, True, True, 1.0


def _integrate_region(family, h, params, tol, weights=None):
    kind, lo, hi, left, right, factor = _family_plan(family, h, params)
    f = _integrand(h, params, kind, weights)
    res = integrate_sqrt_endpoints(f, lo, hi, tol=tol / factor, left=left, right=right)
    return factor * np.asarray(res.value)


def _check_range(family: OrbitFamily, h: float, params: SystemParams):
    lo, hi = family.h_range(params)
    if not (lo < h < hi):
        raise DomainError(f"h={h} outside the {family.label} range ({lo}, {hi})")
    for edge in (lo, hi):
        if math.isfinite(edge) and abs(h - edge) < GUARD_BAND:
            raise DomainError(
                f"h={h} within {GUARD_BAND:g} of the critical level {edge} bounding {family.label}"
            )


def lambda_j(family, h: float, params: SystemParams, tol: float = DEFAULT_TOL) -> DetectionSample:
    """Detection coefficients (cu, cv) and region area for one family at energy h."""
    family = OrbitFamily.coerce(family)
    h = float(h)
    _check_range(family, h, params)
    nu, nv, den = _integrate_region(family, h, params, tol)
    return DetectionSample(h, nu / den, nv / den, 0.5 * den)


def detection_value(family, h: float, params: SystemParams, tol: float = DEFAULT_TOL):
    """lambda(h) for ``params.u, params.v``, integrated as a single function.

    Returns ``(value, sample)``; the sample's coefficients come from the same
    quadrature mesh, so ``sample.value(u, v)`` agrees with ``value`` to
    rounding.
    """
    family = OrbitFamily.coerce(family)
    h = float(h)
    _check_range(family, h, params)
    whole, nu, nv, den = _integrate_region(family, h, params, tol, weights=(params.u, params.v))
    return whole / den, DetectionSample(h, nu / den, nv / den, 0.5 * den)


def lambda_on_interval(family, h, params, lo, hi, tol=DEFAULT_TOL) -> DetectionSample:
    """Detection coefficients over an explicit theta interval of an annulus
    family (used to check the y -> -y mirror of Gamma4)."""
    family = OrbitFamily.coerce(family)
    _check_range(family, h, params)
    f = _integrand(h, params, "annulus")
    res = integrate_sqrt_endpoints(f, lo, hi, tol=tol, left=True, right=True)
    nu, nv, den = res.value
    return DetectionSample(h, nu / den, nv / den, 0.5 * den)


def closed_levels(family: OrbitFamily, params: SystemParams) -> tuple[float, ...]:
    """Critical levels at which :func:`boundary_value` has a finite limit."""
    G = OrbitFamily
    hb, hc, ha = params.h_saddle_b, params.h_saddle_c, params.h_center_a
    return {
        G.GAMMA1: (hb,),
        G.GAMMA2: (0.0, hb),
        G.GAMMA3: (hb, hc),
        G.GAMMA4: (hc, ha),
    }[family]


def boundary_value(family, h: float, params: SystemParams, tol: float = DEFAULT_TOL) -> DetectionSample:
    """One-sided limit of the detection coefficients at a critical level.

    At the heteroclinic and homoclinic levels the polar integrals are still
    proper, so they are evaluated directly; Gamma3 and Gamma4 share the
    same integral at 1/a and so return identical values. Where the region
    collapses to a center (Gamma2 at 0, Gamma4 at H(A)) the limit is f/2 at
    that center and the area is 0.
    """
    family = OrbitFamily.coerce(family)
    h = float(h)
    levels = closed_levels(family, params)
    match = [lv for lv in levels if math.isclose(h, lv, rel_tol=CLAMP_TOL, abs_tol=CLAMP_TOL)]
    if not match:
        raise DomainError(f"h={h} is not a closed critical level of {family.label} {levels}")
    level = match[0]
    G = OrbitFamily
    n = params.n
    if family is G.GAMMA2 and level == 0.0:
        return DetectionSample(level, 0.0, 0.0, 0.0)
    if family is G.GAMMA4 and level == params.h_center_a:
        a, b = params.a, params.b
        x2 = (1 + a) / (a * (1 - a * b))
        y2 = (1 + b) / (b * (1 - a * b))
        cu = 0.5 * ((n + 2) * x2 ** (n // 2) - 3 * x2)
        cv = 0.5 * ((n + 2) * y2 ** (n // 2) - 3 * y2)
        return DetectionSample(level, cu, cv, 0.0)
    if family is G.GAMMA4:
        # theta1 = 0 at h = 1/a: reuse Gamma3's integral so both sides agree
        # exactly. One homoclinic loop holds half of Gamma3's region.
        nu, nv, den = _integrate_region(G.GAMMA3, level, params, tol)
        return DetectionSample(level, nu / den, nv / den, 0.25 * den)
    nu, nv, den = _integrate_region(family, level, params, tol)
    return DetectionSample(level, nu / den, nv / den, 0.5 * den)


def _at_closed_level(family, h, params):
    return any(
        math.isclose(h, lv, rel_tol=CLAMP_TOL, abs_tol=CLAMP_TOL) for lv in closed_levels(family, params)
    )


@dataclass(frozen=True)
class DetectionCurve:
    """Detection coefficients sampled on an increasing h grid."""

    family: OrbitFamily
    params: SystemParams
    samples: tuple
    tol: float = DEFAULT_TOL
    boundary: frozenset = field(default_factory=frozenset)

    @property
    def h(self) -> np.ndarray:
        return np.array([s.h for s in self.samples])

    @property
    def cu(self) -> np.ndarray:
        return np.array([s.cu for s in self.samples])

    @property
    def cv(self) -> np.ndarray:
        return np.array([s.cv for s in self.samples])

    @property
    def area(self) -> np.ndarray:
        return np.array([s.area for s in self.samples])

    def values(self, u: float, v: float) -> np.ndarray:
        return self.cu * u + self.cv * v

    def interpolant(self, u: float, v: float) -> PchipInterpolator:
        """Shape-preserving piecewise cubic through the sampled values."""
        return PchipInterpolator(self.h, self.values(u, v), extrapolate=False)

    def evaluate(self, h: float) -> DetectionSample:
        """Direct (non-interpolated) sample at h, honouring closed levels."""
        if _at_closed_level(self.family, h, self.params):
            return boundary_value(self.family, h, self.params, self.tol)
        return lambda_j(self.family, h, self.params, self.tol)

    def with_samples(self, extra) -> "DetectionCurve":
        merged = {s.h: s for s in self.samples}
        for s in extra:
            merged.setdefault(s.h, s)
        ordered = tuple(merged[k] for k in sorted(merged))
        return DetectionCurve(self.family, self.params, ordered, self.tol, self.boundary)

    def to_rows(self, scaled: bool = False):
        scale = RHO_SCALE if scaled and self.family is not OrbitFamily.GAMMA2 else 1.0
        for s in self.samples:
            yield s.h, s.cu / scale, s.cv / scale, s.area


def detection_curve(family, h_grid, params: SystemParams, tol: float = DEFAULT_TOL,
                    workers: int | None = None) -> DetectionCurve:
    """Sample a family's detection function on ``h_grid``.

    Grid points exactly at a closed critical level are evaluated as one-sided
    limits; all others must be inside the range and outside the guard band.
    Output order follows ``h_grid`` whatever the evaluation order.
    """
    family = OrbitFamily.coerce(family)
    grid = np.asarray(h_grid, dtype=float).ravel()
    if grid.size == 0:
        raise DomainError("empty h grid")
    if np.any(np.diff(grid) <= 0):
        raise DomainError("h grid must be strictly increasing")

    def one(h):
        try:
            if _at_closed_level(family, h, params):
                return boundary_value(family, h, params, tol)
            return lambda_j(family, h, params, tol)
        except DomainError as exc:
            raise DomainError(f"{family.label} at h={h!r}: {exc}") from exc

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            samples = tuple(pool.map(one, grid.tolist()))
    else:
        samples = tuple(one(h) for h in grid.tolist())
    boundary = frozenset(s.h for s in samples if _at_closed_level(family, s.h, params))
    return DetectionCurve(family, params, samples, tol, boundary)


def abelian_integral(family, h: float, params: SystemParams, tol: float = DEFAULT_TOL) -> float:
    """A(h) = 2 * area * (lambda(h) - lambda0) for one region of the family."""
    s = lambda_j(family, h, params, tol)
    return 2.0 * s.area * (s.value(params.u, params.v) - params.lambda0)


def _steps(start, stop, step):
    count = int(round((stop - start) / step))
    return [round(start + i * step, 12) for i in range(count + 1)]


def default_grid(family, params: SystemParams) -> np.ndarray:
    """Sampling grid for a family.

    For a=1/3, b=1/2 these are the grids of the reference tables (Gamma2 also
    gets its two closed ends). Other parameters get the same spacing laid
    over their own critical levels.
    """
    family = OrbitFamily.coerce(family)
    hb, hc, ha = params.h_saddle_b, params.h_saddle_c, params.h_center_a
    G = OrbitFamily
    if family is G.GAMMA1:
        pts = _steps(hb - 4.0, hb - 0.1, 0.1) + [hb]
    elif family is G.GAMMA2:
        pts = [0.0] + [h for h in _steps(0.01, hb, 0.1) if h < hb - GUARD_BAND] + [hb]
    elif family is G.GAMMA3:
        count = max(int(round((hc - hb) / 0.02)), 4)
        pts = list(np.linspace(hb, hc, count + 1))
    else:
        fine_end = min(hc + 1.0, 0.5 * (hc + ha))
        count = max(int(round((fine_end - hc) / 0.04)), 4)
        pts = list(np.linspace(hc, fine_end, count + 1))
        h = fine_end + 0.2
        while h < ha - 0.1:
            pts.append(round(h, 12))
            h += 0.2
    pts = [float(p) for p in pts]
    return np.array(sorted(set(pts)))
