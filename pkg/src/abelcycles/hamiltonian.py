"""Unperturbed quartic Hamiltonian: singular points, energy levels, polar form.

The Hamiltonian is

    H(x, y) = -(a x^4 + b y^4) + 2ab x^2 y^2 + 2(x^2 + y^2)

and in polar coordinates H = -r^4 p(theta) + 2 r^2 with

    p(theta) = a cos^4 + b sin^4 - 2ab cos^2 sin^2.

Everything here is closed form and vectorises over numpy arrays.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError

# Floating-point spill tolerated at exact critical levels before clamping.
CLAMP_TOL = 1e-12


@dataclass(frozen=True)
class SystemParams:
    """Model constants for the perturbed system.

    ``epsilon = 0`` gives the unperturbed Hamiltonian flow. ``mu`` and
    ``beta`` split the degree ``n`` of the mixed ``x^mu y^beta`` term.
    """

    a: float = 1.0 / 3.0
    b: float = 0.5
    u: float = 0.007
    v: float = -0.028
    lambda0: float = 0.0
    epsilon: float = 1e-3
    n: int = 12
    mu: int = 6
    beta: int = 6

    def __post_init__(self):
        if not (0.0 < self.a < self.b < 1.0):
            raise DomainError(f"need 0 < a < b < 1, got a={self.a}, b={self.b}")
        if int(self.n) != self.n or self.n < 4 or self.n % 2:
            raise DomainError(f"n must be an even integer >= 4, got {self.n}")
        if self.mu < 0 or self.beta < 0 or int(self.mu) != self.mu or int(self.beta) != self.beta:
            raise DomainError("mu and beta must be nonnegative integers")
        if self.mu + self.beta != self.n:
            raise DomainError(f"mu + beta must equal n ({self.mu} + {self.beta} != {self.n})")
        if self.epsilon < 0:
            raise DomainError(f"epsilon must be >= 0, got {self.epsilon}")
        for name in ("a", "b", "u", "v", "lambda0", "epsilon"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")

    def replace(self, **changes) -> "SystemParams":
        fields = {k: getattr(self, k) for k in self.__dataclass_fields__}
        fields.update(changes)
        return SystemParams(**fields)

    # critical energies
    @property
    def h_saddle_b(self) -> float:
        """Heteroclinic level H(B_k) = 1/b."""
        return 1.0 / self.b

    @property
    def h_saddle_c(self) -> float:
        """Homoclinic level H(C_k) = 1/a."""
        return 1.0 / self.a

    @property
    def h_center_a(self) -> float:
        """Maximum energy H(A_i), reached at the four outer centers."""
        a, b = self.a, self.b
        return (2 * a * b + a + b) / (a * b * (1 - a * b))


class OrbitFamily(enum.Enum):
    """The four families of closed level curves."""

    GAMMA1 = 1
    GAMMA2 = 2
    GAMMA3 = 3
    GAMMA4 = 4

    @property
    def multiplicity(self) -> int:
        """Number of disjoint orbits of the family at a fixed energy."""
        return {1: 1, 2: 1, 3: 2, 4: 4}[self.value]

    @property
    def orientation(self) -> str:
        """``"extends"`` if the enclosed region grows with h, else ``"shrinks"``."""
        return "extends" if self is OrbitFamily.GAMMA2 else "shrinks"

    @property
    def label(self) -> str:
        return f"Gamma{self.value}"

    def h_range(self, params: SystemParams) -> tuple[float, float]:
        """Open energy interval on which the family exists."""
        return {
            1: (-math.inf, params.h_saddle_b),
            2: (0.0, params.h_saddle_b),
            3: (params.h_saddle_b, params.h_saddle_c),
            4: (params.h_saddle_c, params.h_center_a),
        }[self.value]

    @classmethod
    def coerce(cls, value) -> "OrbitFamily":
        if isinstance(value, cls):
            return value
        if isinstance(value, str):
            key = value.strip().lower().replace("gamma", "")
            return cls(int(key))
        return cls(int(value))


@dataclass(frozen=True)
class SingularPoint:
    label: str
    x: float
    y: float
    kind: str
    energy: float


@dataclass(frozen=True)
class AngularBounds:
    """Angles where the level curve H = h is tangent to a ray from O.

    ``theta1_defined`` is False on 1/b <= h < 1/a, where theta1 is reported
    as 0 because the inner bound does not exist there.
    """

    theta1: float
    theta2: float
    theta1_defined: bool = True


@dataclass(frozen=True)
class LevelClass:
    families: frozenset
    boundary: str | None = None


def p_theta(theta, params: SystemParams):
    c2 = np.cos(theta) ** 2
    s2 = np.sin(theta) ** 2
    return params.a * c2 * c2 + params.b * s2 * s2 - 2 * params.a * params.b * c2 * s2


def hamiltonian(x, y, params: SystemParams):
    a, b = params.a, params.b
    x2 = np.multiply(x, x)
    y2 = np.multiply(y, y)
    return -(a * x2 * x2 + b * y2 * y2) + 2 * a * b * x2 * y2 + 2 * (x2 + y2)


def hamiltonian_field(x, y, params: SystemParams):
    """Unperturbed vector field (dx/dt, dy/dt)."""
    a, b = params.a, params.b
    dx = 4 * y * (a * b * x * x - b * y * y + 1)
    dy = 4 * x * (a * x * x - a * b * y * y - 1)
    return dx, dy


def field_jacobian(x: float, y: float, params: SystemParams) -> np.ndarray:
    a, b = params.a, params.b
    return np.array(
        [
            [8 * a * b * x * y, 4 * (a * b * x * x - 3 * b * y * y + 1)],
            [4 * (3 * a * x * x - a * b * y * y - 1), -8 * a * b * x * y],
        ]
    )


def _classify_equilibrium(jac: np.ndarray) -> str:
    eig = np.linalg.eigvals(jac)
    scale = max(1.0, float(np.max(np.abs(eig))))
    if np.all(np.abs(eig.real) <= 1e-9 * scale) and np.all(np.abs(eig.imag) > 0):
        return "center"
    if np.all(np.abs(eig.imag) <= 1e-9 * scale) and eig.real.min() < 0 < eig.real.max():
        return "saddle"
    raise DomainError(f"equilibrium is neither center nor saddle (eigenvalues {eig})")


def singular_points(params: SystemParams) -> list[SingularPoint]:
    """The nine finite equilibria of the unperturbed flow.

    Kinds come from the eigenvalues of the linearisation, not from a fixed
    table, so they double as a consistency check on the coordinates.
    """
    a, b = params.a, params.b
    xa = math.sqrt((1 + a) / (a * (1 - a * b)))
    ya = math.sqrt(b * (1 - a * b) * (1 + b)) / (b - b * b * a)
    yb = math.sqrt(1 / b)
    xc = math.sqrt(1 / a)
    coords = [
        ("O", 0.0, 0.0),
        ("A1", xa, ya),
        ("A2", xa, -ya),
        ("A3", -xa, ya),
        ("A4", -xa, -ya),
        ("B1", 0.0, yb),
        ("B2", 0.0, -yb),
        ("C1", xc, 0.0),
        ("C2", -xc, 0.0),
    ]
    energies = {"O": 0.0, "A": params.h_center_a, "B": params.h_saddle_b, "C": params.h_saddle_c}
    points = []
    for label, x, y in coords:
        kind = _classify_equilibrium(field_jacobian(x, y, params))
        points.append(SingularPoint(label, x, y, kind, energies[label[0]]))
    return points


def _at(h: float, level: float) -> bool:
    return math.isclose(h, level, rel_tol=CLAMP_TOL, abs_tol=CLAMP_TOL)


def classify_level(h: float, params: SystemParams) -> LevelClass:
    """Which orbit families make up the level set H = h.

    Exactly at a critical level the families valid just below it are
    returned together with a boundary flag. Point orbits (O at h=0, the
    A_i at H(A)) are not families.
    """
    G = OrbitFamily
    hb, hc, ha = params.h_saddle_b, params.h_saddle_c, params.h_center_a
    if _at(h, 0.0):
        return LevelClass(frozenset({G.GAMMA1}), "center")
    if _at(h, hb):
        return LevelClass(frozenset({G.GAMMA1, G.GAMMA2}), "heteroclinic")
    if _at(h, hc):
        return LevelClass(frozenset({G.GAMMA3}), "homoclinic")
    if _at(h, ha):
        return LevelClass(frozenset(), "center")
    if h < 0:
        return LevelClass(frozenset({G.GAMMA1}))
    if h < hb:
        return LevelClass(frozenset({G.GAMMA1, G.GAMMA2}))
    if h < hc:
        return LevelClass(frozenset({G.GAMMA3}))
    if h < ha:
        return LevelClass(frozenset({G.GAMMA4}))
    return LevelClass(frozenset())


def r_squared_branches(theta, h: float, params: SystemParams):
    """Squared radii (outer, inner) of the level curve H = h along a ray.

    Returns ``(r1, r2)`` with ``r1 = (1 + sqrt(1 - h p)) / p`` and
    ``r2 = (1 - sqrt(1 - h p)) / p``. For h < 0 the inner value is negative
    (no inner curve). Raises DomainError where ``1 - h p < 0``.
    """
    p = p_theta(theta, params)
    disc = 1.0 - h * p
    if np.any(disc < -CLAMP_TOL):
        raise DomainError(f"level H={h} does not meet the ray (1 - h p(theta) < 0)")
    root = np.sqrt(np.maximum(disc, 0.0))
    return (1.0 + root) / p, (1.0 - root) / p


def _clamped_arccos(arg: float) -> float:
    if -1.0 - CLAMP_TOL <= arg < -1.0:
        arg = -1.0
    elif 1.0 < arg <= 1.0 + CLAMP_TOL:
        arg = 1.0
    if not -1.0 <= arg <= 1.0:
        raise DomainError(f"arccos argument {arg} outside [-1, 1]")
    return math.acos(arg)


def theta_bounds(h: float, params: SystemParams) -> AngularBounds:
    """Tangency angles theta1 <= theta2 of the level H = h in the first quadrant."""
    if h <= 0:
        raise DomainError(f"angular bounds need h > 0, got {h}")
    a, b = params.a, params.b
    s = a + b + 2 * a * b
    disc = a * a * b * b - a * b + s / h
    if disc < 0:
        if disc < -CLAMP_TOL:
            raise DomainError(f"h={h} exceeds the maximum energy {params.h_center_a}")
        disc = 0.0
    root = 2.0 * math.sqrt(disc)
    theta2 = 0.5 * _clamped_arccos(((b - a) - root) / s)
    arg1 = ((b - a) + root) / s
    if arg1 > 1.0 + CLAMP_TOL:
        return AngularBounds(0.0, theta2, theta1_defined=False)
    return AngularBounds(0.5 * _clamped_arccos(arg1), theta2)


def center_angle(params: SystemParams) -> float:
    """Polar angle of A1, where p(theta) attains its minimum."""
    a, b = params.a, params.b
    return 0.5 * math.acos((b - a) / (a + b + 2 * a * b))


def p_min(params: SystemParams) -> float:
    return float(p_theta(center_angle(params), params))
