"""Monte Carlo estimates of the detection integrals.

Independent of the polar quadrature: points are drawn uniformly in a
bounding box and kept by sign tests on H(x, y) - h. Used as a geometric
cross-check of both numerator and denominator of lambda_j.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .detection import lambda_j
from .exceptions import DomainError
from .hamiltonian import OrbitFamily, SystemParams, hamiltonian, r_squared_branches

DEFAULT_SAMPLES = 1_000_000
CHUNK = 250_000


@dataclass(frozen=True)
class MonteCarloEstimate:
    """Sample means of the three integrals with their standard errors.

    ``num_u`` and ``num_v`` are the integrals of the u- and v-parts of the
    divergence over the region, ``den`` is twice its area.
    """

    family: OrbitFamily
    h: float
    samples: int
    num_u: float
    num_v: float
    den: float
    sigma_u: float
    sigma_v: float
    sigma_den: float


@dataclass(frozen=True)
class Comparison:
    estimate: MonteCarloEstimate
    quad_num_u: float
    quad_num_v: float
    quad_den: float

    def rel_errors(self) -> tuple[float, float, float]:
        e = self.estimate
        return (
            abs(e.num_u - self.quad_num_u) / abs(self.quad_num_u),
            abs(e.num_v - self.quad_num_v) / abs(self.quad_num_v),
            abs(e.den - self.quad_den) / abs(self.quad_den),
        )

    def sigmas(self) -> tuple[float, float, float]:
        """Deviation of each estimate from quadrature in units of its sigma."""
        e = self.estimate
        return (
            abs(e.num_u - self.quad_num_u) / e.sigma_u,
            abs(e.num_v - self.quad_num_v) / e.sigma_v,
            abs(e.den - self.quad_den) / e.sigma_den,
        )


def membership(family, x, y, h: float, params: SystemParams) -> np.ndarray:
    """Boolean mask of points inside the region bounded by the family's orbit."""
    family = OrbitFamily.coerce(family)
    H = hamiltonian(x, y, params)
    above = H >= h
    if family is OrbitFamily.GAMMA1:
        # H >= h, or the inner disk where r^2 p < 1 and H < h
        a, b = params.a, params.b
        x2, y2 = x * x, y * y
        quartic = a * x2 * x2 + b * y2 * y2 - 2 * a * b * x2 * y2
        return above | (quartic <= x2 + y2)
    if family is OrbitFamily.GAMMA2:
        a, b = params.a, params.b
        x2, y2 = x * x, y * y
        quartic = a * x2 * x2 + b * y2 * y2 - 2 * a * b * x2 * y2
        return (~above) & (quartic <= x2 + y2)
    if family is OrbitFamily.GAMMA3:
        return above & (x > 0)
    return above & (x > 0) & (y > 0)


def bounding_box(family, h: float, params: SystemParams) -> tuple[float, float, float, float]:
    """Axis-aligned box containing the region, padded by 1%."""
    family = OrbitFamily.coerce(family)
    theta = np.linspace(0.0, 0.5 * math.pi, 4001)
    p = params.a * np.cos(theta) ** 4 + params.b * np.sin(theta) ** 4 \
        - 2 * params.a * params.b * (np.cos(theta) * np.sin(theta)) ** 2
    ok = 1.0 - h * p >= 0
    outer, inner = r_squared_branches(theta[ok], h, params) if ok.any() else (None, None)
    if outer is None:
        raise DomainError(f"level H={h} is empty")
    r = np.sqrt(outer if family is not OrbitFamily.GAMMA2 else inner)
    xs, ys = r * np.cos(theta[ok]), r * np.sin(theta[ok])
    xm, ym = 1.01 * xs.max(), 1.01 * ys.max()
    if family is OrbitFamily.GAMMA4:
        return 0.0, xm, 0.0, ym
    if family is OrbitFamily.GAMMA3:
        return 0.0, xm, -ym, ym
    return -xm, xm, -ym, ym


def estimate(family, h: float, params: SystemParams, samples: int = DEFAULT_SAMPLES,
             seed: int | None = 0) -> MonteCarloEstimate:
    """Rejection-sampling estimate of the detection integrals for one orbit."""
    family = OrbitFamily.coerce(family)
    lo_h, hi_h = family.h_range(params)
    if not lo_h < h < hi_h:
        raise DomainError(f"h={h} outside {family.label} range ({lo_h}, {hi_h})")
    x0, x1, y0, y1 = bounding_box(family, h, params)
    box = (x1 - x0) * (y1 - y0)
    rng = np.random.default_rng(seed)
    n = params.n
    sums = np.zeros(3)
    squares = np.zeros(3)
    left = samples
    while left > 0:
        m = min(CHUNK, left)
        left -= m
        x = rng.uniform(x0, x1, m)
        y = rng.uniform(y0, y1, m)
        inside = membership(family, x, y, h, params)
        fu = np.where(inside, (n + 2) * x**n - 3 * x * x, 0.0)
        fv = np.where(inside, (n + 2) * y**n - 3 * y * y, 0.0)
        fd = np.where(inside, 2.0, 0.0)
        stack = np.vstack([fu, fv, fd])
        sums += stack.sum(axis=1)
        squares += (stack * stack).sum(axis=1)
    mean = sums / samples
    var = np.maximum(squares / samples - mean * mean, 0.0)
    sigma = box * np.sqrt(var / samples)
    val = box * mean
    return MonteCarloEstimate(family, float(h), samples, *map(float, val), *map(float, sigma))


def compare(family, h: float, params: SystemParams, samples: int = DEFAULT_SAMPLES,
            seed: int | None = 0) -> Comparison:
    est = estimate(family, h, params, samples, seed)
    s = lambda_j(family, h, params)
    den = 2.0 * s.area
    return Comparison(est, s.cu * den, s.cv * den, den)
