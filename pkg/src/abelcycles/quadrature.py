"""Adaptive Gauss-Kronrod (7/15) quadrature.

Integrands are called with a 1-D array of abscissae and may return either
an array of the same length or a 2-D array ``(m, len(x))`` for ``m``
components integrated on a shared mesh. Sharing the mesh keeps linear
combinations of components exactly consistent, which the detection
functions rely on.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import QuadratureError

MAX_INTERVALS = 2**15

# QUADPACK qk15 abscissae (positive half, descending) and weights.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])  # 15 nodes, ascending
_KRONROD = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GAUSS = np.zeros(15)
_GAUSS[1:14:2] = np.concatenate([_WG[:-1], _WG[::-1]])

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class QuadratureResult:
    value: float | np.ndarray
    error_estimate: float
    evaluations: int


def _gk15(f, lo: np.ndarray, hi: np.ndarray, ncomp):
    """Apply the rule on many intervals at once.

    Returns (kronrod, error) with shapes (m, k) and (k,).
    """
    center = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    x = (center[:, None] + half[:, None] * _NODES[None, :]).ravel()
    fx = np.asarray(f(x), dtype=float)
    fx = fx.reshape(ncomp if ncomp else 1, lo.size, 15)
    res_k = fx @ _KRONROD * half
    res_g = fx @ _GAUSS * half
    mean = res_k / (2 * half)[None, :]
    resasc = np.abs(fx - mean[..., None]) @ _KRONROD * np.abs(half)
    resabs = np.abs(fx) @ _KRONROD * np.abs(half)
    diff = np.abs(res_k - res_g)
    # QUADPACK's error heuristic, sharper than |K - G| on smooth integrands.
    with np.errstate(divide="ignore", invalid="ignore"):
        err = np.where(resasc > 0, resasc * np.minimum(1.0, (200 * diff / resasc) ** 1.5), diff)
    floor = 50 * _EPS * resabs
    err = np.where(resabs > np.finfo(float).tiny / (50 * _EPS), np.maximum(err, floor), err)
    return res_k, err.max(axis=0)


def _probe_components(f, lo, hi):
    sample = np.asarray(f(np.array([0.5 * (lo + hi)])), dtype=float)
    return sample.shape[0] if sample.ndim == 2 else 0


def integrate(f, lo: float, hi: float, tol: float = 1e-9, rtol: float = 1e-12,
              max_intervals: int = MAX_INTERVALS) -> QuadratureResult:
    """Integrate ``f`` over ``[lo, hi]``.

    Stops when the summed error estimate is below ``max(tol, rtol*|I|)``;
    for vector integrands the worst component decides. All intervals whose
    error exceeds their length-proportional share are bisected in one
    sweep.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if hi < lo:
        raise ValueError(f"need lo <= hi, got [{lo}, {hi}]")
    ncomp = _probe_components(f, lo, hi)
    shape = (ncomp,) if ncomp else ()
    if hi == lo:
        return QuadratureResult(np.zeros(shape) if ncomp else 0.0, 0.0, 1)

    done_val = np.zeros(max(ncomp, 1))
    done_err = 0.0
    lo_a = np.array([lo], dtype=float)
    hi_a = np.array([hi], dtype=float)
    evaluations = 0
    total_intervals = 1
    width = hi - lo
    while True:
        vals, errs = _gk15(f, lo_a, hi_a, ncomp)
        evaluations += 15 * lo_a.size
        total_val = done_val + vals.sum(axis=1)
        total_err = done_err + errs.sum()
        target = max(tol, rtol * float(np.max(np.abs(total_val))))
        if total_err <= target:
            value = total_val if ncomp else float(total_val[0])
            return QuadratureResult(value, float(total_err), evaluations)
        share = target * (hi_a - lo_a) / width
        split = errs > share
        if not split.any():
            split = errs >= errs.max()
        # Intervals at roundoff resolution cannot be bisected further.
        split &= (hi_a - lo_a) > 64 * _EPS * np.maximum(np.abs(lo_a), np.abs(hi_a))
        if not split.any() or total_intervals + split.sum() > max_intervals:
            value = total_val if ncomp else float(total_val[0])
            raise QuadratureError(
                f"no convergence on [{lo}, {hi}] after {total_intervals} intervals "
                f"(error {total_err:.3g} > {target:.3g})",
                value=value, error_estimate=float(total_err), evaluations=evaluations,
            )
        keep = ~split
        done_val = done_val + vals[:, keep].sum(axis=1)
        done_err += errs[keep].sum()
        mid = 0.5 * (lo_a[split] + hi_a[split])
        lo_a = np.concatenate([lo_a[split], mid])
        hi_a = np.concatenate([mid, hi_a[split]])
        total_intervals += int(split.sum())


def integrate_sqrt_endpoints(f, lo: float, hi: float, tol: float = 1e-9, rtol: float = 1e-12,
                             left: bool = True, right: bool = True,
                             max_intervals: int = MAX_INTERVALS) -> QuadratureResult:
    """Integrate ``f`` that behaves like sqrt(distance) at flagged endpoints.

    A flagged endpoint ``e`` is removed by substituting ``x = e +/- t^2``,
    after which the integrand is smooth in ``t``. With both ends flagged
    the interval is split at its midpoint.
    """
    if hi < lo:
        raise ValueError(f"need lo <= hi, got [{lo}, {hi}]")
    if not (left or right) or hi == lo:
        return integrate(f, lo, hi, tol, rtol, max_intervals)

    def from_left(origin):
        def g(t):
            out = np.asarray(f(origin + t * t), dtype=float)
            return out * (2 * t)
        return g

    def from_right(origin):
        def g(t):
            out = np.asarray(f(origin - t * t), dtype=float)
            return out * (2 * t)
        return g

    pieces = []
    if left and right:
        mid = 0.5 * (lo + hi)
        span = np.sqrt(mid - lo)
        pieces.append(integrate(from_left(lo), 0.0, span, 0.5 * tol, rtol, max_intervals))
        pieces.append(integrate(from_right(hi), 0.0, np.sqrt(hi - mid), 0.5 * tol, rtol, max_intervals))
    elif left:
        pieces.append(integrate(from_left(lo), 0.0, np.sqrt(hi - lo), tol, rtol, max_intervals))
    else:
        pieces.append(integrate(from_right(hi), 0.0, np.sqrt(hi - lo), tol, rtol, max_intervals))
    value = sum(p.value for p in pieces)
    return QuadratureResult(
        value,
        sum(p.error_estimate for p in pieces),
        sum(p.evaluations for p in pieces),
    )
