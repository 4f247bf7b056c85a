"""Direct simulation of the perturbed system and its Poincare return map.

This is the independent check on the detection-function predictions: it
never touches the quadrature code, only the vector field.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .cycles import CycleFinding, stability
from .detection import GUARD_BAND
from .exceptions import DegenerateError, DomainError, IntegrationError
from .hamiltonian import (
    OrbitFamily,
    SystemParams,
    center_angle,
    hamiltonian,
    p_theta,
    r_squared_branches,
    theta_bounds,
)
from .quadrature import integrate, integrate_sqrt_endpoints

DEFAULT_ODE_TOL = 1e-10
DEFAULT_EPSILON = 1e-3
FD_STEP = 1e-5
TIME_CAP_FACTOR = 100.0


@dataclass(frozen=True)
class TrajectoryPoint:
    t: float
    x: float
    y: float
    h: float


@dataclass(frozen=True)
class Section:
    """Ray from ``anchor`` at polar ``angle``; crossings are counted in one
    direction only, so an orbit winding once meets it once per turn."""

    anchor: tuple = (0.0, 0.0)
    angle: float = 0.0

    @property
    def direction(self) -> np.ndarray:
        return np.array([math.cos(self.angle), math.sin(self.angle)])

    def point(self, r: float) -> np.ndarray:
        return np.asarray(self.anchor, dtype=float) + r * self.direction

    def normal_offset(self, x, y):
        ax, ay = self.anchor
        return -math.sin(self.angle) * (x - ax) + math.cos(self.angle) * (y - ay)

    def along(self, x, y):
        ax, ay = self.anchor
        return math.cos(self.angle) * (x - ax) + math.sin(self.angle) * (y - ay)


@dataclass(frozen=True)
class ReturnMapResult:
    section: Section
    r_in: float
    r_out: float
    period_estimate: float
    derivative_estimate: float


@dataclass(frozen=True)
class VerificationRecord:
    finding: CycleFinding
    epsilon: float
    ok: bool
    h_star: float | None = None
    h_error: float | None = None
    r_star: float | None = None
    residual: float | None = None
    derivative: float | None = None
    predicted_stability: str | None = None
    observed_stability: str | None = None
    message: str = ""

    @property
    def stability_agrees(self) -> bool:
        return self.ok and self.predicted_stability == self.observed_stability


def vector_field(x, y, params: SystemParams):
    """Right-hand side of the perturbed system."""
    a, b, u, v, n = params.a, params.b, params.u, params.v, params.n
    mu, beta, eps, lam = params.mu, params.beta, params.epsilon, params.lambda0
    xn = x**n
    yn = y**n
    mixed = x**mu * y**beta
    dx = 4 * y * (a * b * x * x - b * y * y + 1) + eps * x * (
        u * xn + v * yn - b * (beta + 1) / (mu + 1) * mixed - u * x * x - lam
    )
    dy = 4 * x * (a * x * x - a * b * y * y - 1) + eps * y * (
        u * xn + v * yn + b * mixed - v * y * y - lam
    )
    return dx, dy


def _rhs(params):
    def f(t, z):
        dx, dy = vector_field(z[0], z[1], params)
        return [dx, dy]
    return f


def _points(sol_t, sol_y, params):
    h = hamiltonian(sol_y[0], sol_y[1], params)
    return [TrajectoryPoint(float(t), float(x), float(y), float(e))
            for t, x, y, e in zip(sol_t, sol_y[0], sol_y[1], h)]


def integrate_orbit(start, t_span: float, params: SystemParams, tol: float = DEFAULT_ODE_TOL):
    """Integrate from ``start`` for ``t_span`` time units with DOP853.

    Returns the accepted steps as TrajectoryPoints. Integrator failure
    raises IntegrationError carrying the partial trajectory.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    sol = solve_ivp(_rhs(params), (0.0, float(t_span)), list(map(float, start)),
                    method="DOP853", rtol=tol, atol=tol)
    points = _points(sol.t, sol.y, params)
    if sol.status < 0:
        raise IntegrationError(f"integration aborted: {sol.message}", partial=points)
    return points


def unperturbed_period(family, h: float, params: SystemParams, tol: float = 1e-10) -> float:
    """Period of the unperturbed orbit of ``family`` at energy h.

    Uses d(theta)/dt = +/-4 sqrt(1 - h p(theta)) on either branch.
    """
    family = OrbitFamily.coerce(family)

    def inv_speed(theta):
        return 1.0 / (4.0 * np.sqrt(np.maximum(1.0 - h * p_theta(theta, params), 1e-300)))

    if family in (OrbitFamily.GAMMA1, OrbitFamily.GAMMA2):
        return 4.0 * integrate(inv_speed, 0.0, 0.5 * math.pi, tol).value
    bounds = theta_bounds(h, params)
    if family is OrbitFamily.GAMMA3:
        return 4.0 * integrate_sqrt_endpoints(inv_speed, 0.0, bounds.theta2, tol, left=False).value
    return 2.0 * integrate_sqrt_endpoints(inv_speed, bounds.theta1, bounds.theta2, tol).value


def _section(family, params):
    family = OrbitFamily.coerce(family)
    if family is OrbitFamily.GAMMA4:
        return Section((0.0, 0.0), center_angle(params))
    return Section((0.0, 0.0), 0.0)


def _branch(family) -> int:
    return 1 if OrbitFamily.coerce(family) is OrbitFamily.GAMMA2 else 0


def radius_at(family, h: float, params: SystemParams) -> float:
    """Distance from O along the family's section to its orbit at energy h."""
    sec = _section(family, params)
    branches = r_squared_branches(sec.angle, h, params)
    return math.sqrt(branches[_branch(family)])


def poincare_return(section: Section, r_in: float, params: SystemParams,
                    tol: float = DEFAULT_ODE_TOL, period: float | None = None,
                    fd_step: float = FD_STEP) -> ReturnMapResult:
    """First return to ``section`` crossing in the starting direction."""
    r_out, t_ret = _return(section, r_in, params, tol, period)
    r2 = r_in * (1.0 + fd_step)
    r_out2, _ = _return(section, r2, params, tol, period)
    return ReturnMapResult(section, r_in, r_out, t_ret, (r_out2 - r_out) / (r2 - r_in))


def _return(section: Section, r_in: float, params: SystemParams, tol: float,
            period: float | None = None):
    if r_in <= 0:
        raise DomainError("r_in must be positive")
    start = section.point(r_in)
    rhs = _rhs(params)
    dx, dy = vector_field(start[0], start[1], params)
    sense = section.normal_offset(start[0] + dx, start[1] + dy)
    if sense == 0:
        raise IntegrationError("flow is tangent to the section at the start point")
    sense = math.copysign(1.0, sense)
    speed = math.hypot(dx, dy)
    if period is None:
        period = 2 * math.pi * r_in / max(speed, 1e-12)
    cap = TIME_CAP_FACTOR * period

    def event(t, z):
        return section.normal_offset(z[0], z[1])

    event.direction = sense
    event.terminal = True

    # Leave the section before arming the event.
    nudge = min(1e-3 * period, 0.1 * r_in / max(speed, 1e-12))
    first = solve_ivp(rhs, (0.0, nudge), list(start), method="DOP853", rtol=tol, atol=tol)
    t0, z0 = nudge, first.y[:, -1]
    while True:
        sol = solve_ivp(rhs, (t0, cap), list(z0), method="DOP853", rtol=tol, atol=tol,
                        events=event)
        if sol.status < 0:
            raise IntegrationError(f"integration aborted: {sol.message}",
                                   partial=_points(sol.t, sol.y, params))
        if sol.status == 0 or not len(sol.t_events[0]):
            raise IntegrationError(f"no return to the section within t={cap:.4g}")
        t_hit = float(sol.t_events[0][0])
        z_hit = sol.y_events[0][0]
        if section.along(z_hit[0], z_hit[1]) > 0:
            return float(section.along(z_hit[0], z_hit[1])), t_hit
        t0, z0 = t_hit + nudge, solve_ivp(rhs, (t_hit, t_hit + nudge), list(z_hit),
                                          method="DOP853", rtol=tol, atol=tol).y[:, -1]


def verify_prediction(finding: CycleFinding, params: SystemParams,
                      epsilon: float = DEFAULT_EPSILON, tol: float = DEFAULT_ODE_TOL) -> VerificationRecord:
    """Locate the perturbed cycle near a predicted root and compare.

    The return-map fixed point is bracketed by stepping outwards in h from
    the predicted energy, then solved by Brent's method. Failure to bracket
    gives a record with ``ok=False`` rather than an exception.
    """
    if epsilon == 0:
        raise DegenerateError("degenerate: epsilon=0, every orbit is closed")
    if epsilon < 0:
        raise DomainError("epsilon must be positive")
    fam = finding.family
    p = params.replace(epsilon=epsilon, lambda0=finding.lambda0)
    sec = _section(fam, p)
    lo_h, hi_h = fam.h_range(p)
    lo_h = max(lo_h, finding.h_root - 10.0) + 2 * GUARD_BAND
    hi_h = hi_h - 2 * GUARD_BAND
    predicted = stability(fam, finding.slope)
    base = max(0.05 * abs(finding.h_root), 0.05)
    period = unperturbed_period(fam, finding.h_root, params)

    def displacement(r):
        r_out, _ = _return(sec, r, p, tol, period)
        return r_out - r

    r_lo = r_hi = radius_at(fam, finding.h_root, p)
    try:
        d_lo = d_hi = displacement(r_lo)
    except IntegrationError as exc:
        return VerificationRecord(finding, epsilon, False, predicted_stability=predicted,
                                  message=f"orbit through the predicted cycle escaped: {exc}")
    bracket = None
    if d_lo == 0:
        bracket = (r_lo, r_lo)
    for frac in (0.002, 0.01, 0.04, 0.15, 0.5, 1.0):
        if bracket:
            break
        dh = frac * base
        ha, hb = max(finding.h_root - dh, lo_h), min(finding.h_root + dh, hi_h)
        try:
            ra, rb = radius_at(fam, ha, p), radius_at(fam, hb, p)
            da, db = displacement(ra), displacement(rb)
        except (IntegrationError, DomainError):
            continue
        if da * d_lo <= 0:
            bracket = (ra, r_lo)
        elif db * d_hi <= 0:
            bracket = (r_lo, rb)
        elif da * db <= 0:
            bracket = (ra, rb)
    if bracket is None:
        return VerificationRecord(finding, epsilon, False, predicted_stability=predicted,
                                  message="no return-map fixed point in the bracketing annulus")
    a_, b_ = sorted(bracket)
    r_star = a_ if a_ == b_ else brentq(displacement, a_, b_, xtol=1e-13, rtol=1e-14)
    res = poincare_return(sec, r_star, p, tol, period)
    x, y = sec.point(r_star)
    h_star = float(hamiltonian(x, y, params))
    observed = "stable" if abs(res.derivative_estimate) < 1 else "unstable"
    return VerificationRecord(
        finding, epsilon, True,
        h_star=h_star,
        h_error=abs(h_star - finding.h_root),
        r_star=float(r_star),
        residual=abs(res.r_out - r_star),
        derivative=res.derivative_estimate,
        predicted_stability=predicted,
        observed_stability=observed,
        message="verified" if observed == predicted else "stability mismatch",
    )
