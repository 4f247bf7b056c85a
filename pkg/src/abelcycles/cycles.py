"""Limit-cycle predictions from detection curves.

A simple crossing of the line lambda = lambda0 with a detection curve marks
one limit cycle near each orbit of that family at the crossing energy. The
sign of the curve's slope there, together with whether the family's
region grows or shrinks with h, fixes the cycle's stability.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq, minimize_scalar

from .detection import GUARD_BAND, DetectionCurve, DetectionSample
from .exceptions import DegenerateError, DomainError
from .hamiltonian import OrbitFamily, SystemParams

ROOT_XTOL = 1e-12
EXTREMUM_XTOL = 1e-8


class TangencyWarning(UserWarning):
    """The line lambda = lambda0 touches a curve without crossing it."""


@dataclass(frozen=True)
class Root:
    h: float
    slope: float
    polished: bool = True
    near_critical: bool = False


@dataclass(frozen=True)
class Tangency:
    family: OrbitFamily
    h: float


@dataclass(frozen=True)
class CycleFinding:
    family: OrbitFamily
    h_root: float
    lambda0: float
    slope: float
    stability: str
    count: int
    near_critical: bool = False


@dataclass(frozen=True)
class Band:
    """Open interval of lambda0 with a constant crossing pattern."""

    lo: float
    hi: float
    pattern: dict
    total: int

    def contains(self, lam: float) -> bool:
        return self.lo < lam < self.hi

    def pattern_key(self) -> tuple:
        return tuple(sorted((f.value, k) for f, k in self.pattern.items() if k))


@dataclass
class DistributionReport:
    lambda0: float
    findings: list
    total: int
    band: Band | None
    tangencies: list = field(default_factory=list)

    def counts(self) -> dict:
        out = {f: 0 for f in OrbitFamily}
        for c in self.findings:
            out[c.family] += 1
        return out


def stability(family, slope: float) -> str:
    """Stability of the cycle born where the curve crosses with ``slope``.

    For the growing family (Gamma2) a crossing with negative slope gives a
    stable cycle; for the shrinking families the rule is reversed. The
    convention was fixed against the return-map oracle (see ode_oracle).
    """
    family = OrbitFamily.coerce(family)
    if slope == 0 or not math.isfinite(slope):
        raise DegenerateError(f"stability undefined for slope {slope}")
    if family.orientation == "extends":
        return "stable" if slope < 0 else "unstable"
    return "stable" if slope > 0 else "unstable"


def _safe_interval(curve: DetectionCurve, lo: float, hi: float) -> tuple[float, float]:
    """Shrink [lo, hi] off closed critical levels so direct evaluation is legal."""
    if lo in curve.boundary:
        lo = lo + 2 * GUARD_BAND
    if hi in curve.boundary:
        hi = hi - 2 * GUARD_BAND
    return lo, hi


def _near_critical(curve: DetectionCurve, h: float) -> bool:
    lo, hi = curve.family.h_range(curve.params)
    return any(math.isfinite(e) and abs(h - e) <= 2 * GUARD_BAND + 1e-6 for e in (lo, hi))


def _interp_roots(curve: DetectionCurve, lambda0: float, u: float, v: float):
    """Crossing and touching points of the interpolant with lambda0."""
    h = curve.h
    vals = curve.values(u, v) - lambda0
    if h.size < 2:
        return [], [], h, vals
    shifted = PchipInterpolator(h, vals, extrapolate=False)
    raw = shifted.solve(0.0, discontinuity=False, extrapolate=False)
    raw = np.unique(raw[np.isfinite(raw)])
    deriv = shifted.derivative()
    crossings, touches = [], []
    span = h[-1] - h[0]
    last = None
    for r in raw:
        if last is not None and r - last <= 1e-13 * max(1.0, span):
            continue
        last = r
        i = int(np.clip(np.searchsorted(h, r, side="right") - 1, 0, h.size - 2))
        delta = 1e-6 * (h[min(i + 1, h.size - 1)] - h[i])
        left = shifted(max(r - delta, h[0]))
        right = shifted(min(r + delta, h[-1]))
        if r - delta < h[0] or r + delta > h[-1]:
            # root at the curve's end: a crossing only if the curve leaves zero
            crossings.append((r, float(deriv(r))))
            continue
        if np.sign(left) * np.sign(right) < 0:
            crossings.append((r, float(deriv(r))))
        else:
            touches.append(r)
    return crossings, touches, h, vals


def _find_roots(curve, lambda0, u, v):
    crossings, touches, h, vals = _interp_roots(curve, lambda0, u, v)
    roots = []
    per_interval = {}
    for r, _ in crossings:
        i = int(np.clip(np.searchsorted(h, r, side="right") - 1, 0, h.size - 2))
        per_interval[i] = per_interval.get(i, 0) + 1

    def direct(x):
        return curve.evaluate(x).value(u, v) - lambda0

    for r, slope in crossings:
        i = int(np.clip(np.searchsorted(h, r, side="right") - 1, 0, h.size - 2))
        h_root, polished = r, False
        if per_interval[i] == 1 and vals[i] * vals[i + 1] < 0:
            lo, hi = _safe_interval(curve, h[i], h[i + 1])
            try:
                flo = vals[i] if lo == h[i] else direct(lo)
                fhi = vals[i + 1] if hi == h[i + 1] else direct(hi)
                if flo * fhi < 0:
                    h_root = brentq(direct, lo, hi, xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps)
                    polished = True
            except DomainError:
                pass
        if vals[i] == 0 or vals[i + 1] == 0:
            polished = True
        if slope == 0:
            touches.append(r)
            continue
        roots.append(Root(float(h_root), slope, polished, _near_critical(curve, h_root)))
    tangencies = [Tangency(curve.family, float(t)) for t in touches]
    return roots, tangencies


def find_roots(curve: DetectionCurve, lambda0: float, u: float, v: float) -> list[Root]:
    """Simple crossings of the curve lambda(h) = cu*u + cv*v with lambda0.

    Crossings are located on the piecewise-cubic interpolant and polished by
    Brent's method on direct evaluations whenever the bracketing samples
    straddle lambda0. Touch points are reported as TangencyWarning, not as
    roots.
    """
    roots, tangencies = _find_roots(curve, lambda0, u, v)
    for t in tangencies:
        warnings.warn(f"{t.family.label}: tangency near h={t.h:.10g}", TangencyWarning, stacklevel=2)
    return roots


def refine_extrema(curve: DetectionCurve, u: float, v: float):
    """Locate interior extrema of lambda(h) and add them as samples.

    A discrete extremum at sample i is refined by bounded Brent search on
    direct evaluations over its two neighbouring intervals. Returns the
    augmented curve and a list of ``(h, value, "max"|"min")``.
    """
    h = curve.h
    vals = curve.values(u, v)
    found = []
    extra = []
    for i in range(1, h.size - 1):
        d0 = vals[i] - vals[i - 1]
        d1 = vals[i + 1] - vals[i]
        if d0 * d1 >= 0:
            continue
        kind = "max" if d0 > 0 else "min"
        sign = -1.0 if kind == "max" else 1.0
        lo, hi = _safe_interval(curve, h[i - 1], h[i + 1])

        def objective(x):
            return sign * curve.evaluate(x).value(u, v)

        res = minimize_scalar(objective, bounds=(lo, hi), method="bounded",
                              options={"xatol": EXTREMUM_XTOL})
        x = float(res.x)
        sample = curve.evaluate(x)
        if sign * sample.value(u, v) > sign * vals[i]:
            x, sample = float(h[i]), curve.samples[i]
        extra.append(sample)
        found.append((x, sample.value(u, v), kind))
    return curve.with_samples(extra), found


def _check_nondegenerate(curves, u, v):
    for c in curves.values():
        vals = c.values(u, v)
        if np.any(vals != 0):
            return
    raise DegenerateError("all detection curves vanish identically (u = v = 0)")


def _as_curve_map(curves) -> dict:
    if isinstance(curves, dict):
        return {OrbitFamily.coerce(k): c for k, c in curves.items()}
    return {c.family: c for c in curves}


def lambda_bands(params: SystemParams, curves, u: float | None = None, v: float | None = None) -> list[Band]:
    """Partition the lambda0 axis into bands of constant cycle pattern.

    Breakpoints are every curve's end values and refined interior extrema.
    Adjacent bands with identical patterns are merged. The outermost bands
    extend to +/- infinity.
    """
    u = params.u if u is None else u
    v = params.v if v is None else v
    curves = _as_curve_map(curves)
    _check_nondegenerate(curves, u, v)
    refined = {}
    breaks = []
    for fam, c in curves.items():
        rc, extrema = refine_extrema(c, u, v)
        refined[fam] = rc
        vals = rc.values(u, v)
        breaks.extend([vals[0], vals[-1]])
        breaks.extend(val for _, val, _ in extrema)
    breaks = np.unique(np.asarray(breaks, dtype=float))
    scale = max(1.0, float(np.max(np.abs(breaks))))
    merged = [breaks[0]]
    for b in breaks[1:]:
        if b - merged[-1] > 1e-13 * scale:
            merged.append(b)
    edges = [-math.inf] + merged + [math.inf]

    bands: list[Band] = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        if math.isinf(lo):
            probe = hi - scale
        elif math.isinf(hi):
            probe = lo + scale
        else:
            probe = 0.5 * (lo + hi)
        pattern = {}
        for fam, rc in refined.items():
            crossings, _, _, _ = _interp_roots(rc, probe, u, v)
            pattern[fam] = len(crossings)
        total = sum(k * fam.multiplicity for fam, k in pattern.items())
        band = Band(float(lo), float(hi), pattern, total)
        if bands and bands[-1].pattern_key() == band.pattern_key():
            prev = bands[-1]
            bands[-1] = Band(prev.lo, band.hi, prev.pattern, prev.total)
        else:
            bands.append(band)
    return bands


def distribution(lambda0: float, params: SystemParams, curves,
                 u: float | None = None, v: float | None = None,
                 bands: list[Band] | None = None) -> DistributionReport:
    """Cycle findings for every family at ``lambda0``.

    Each simple crossing counts ``multiplicity`` cycles (1, 1, 2, 4 for
    Gamma1..Gamma4). Counts are lower bounds at the grid's resolution.
    """
    u = params.u if u is None else u
    v = params.v if v is None else v
    curves = _as_curve_map(curves)
    _check_nondegenerate(curves, u, v)
    findings = []
    tangencies = []
    for fam in sorted(curves, key=lambda f: f.value):
        rc, _ = refine_extrema(curves[fam], u, v)
        roots, tang = _find_roots(rc, lambda0, u, v)
        tangencies.extend(tang)
        for r in roots:
            findings.append(
                CycleFinding(fam, r.h, lambda0, r.slope, stability(fam, r.slope),
                             fam.multiplicity, r.near_critical)
            )
    total = sum(f.count for f in findings)
    if bands is None:
        bands = lambda_bands(params, curves, u, v)
    band = next((b for b in bands if b.contains(lambda0)), None)
    return DistributionReport(lambda0, findings, total, band, tangencies)


__all__ = [
    "Band",
    "CycleFinding",
    "DetectionSample",
    "DistributionReport",
    "Root",
    "Tangency",
    "TangencyWarning",
    "distribution",
    "find_roots",
    "lambda_bands",
    "refine_extrema",
    "stability",
]
