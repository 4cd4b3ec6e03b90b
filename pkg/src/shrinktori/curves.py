"""Abresch-Langer and Anciaux profile curves.

Both families are planar curves parametrized by arclength whose curvature is
a function of position and unit tangent:

* Abresch-Langer: ``kappa = <G', iG>``
* Anciaux:        ``kappa = <g', ig> (|g|^2 - 1) / |g|^2``

The state integrated is ``(x, y, tau, theta)`` with ``G' = exp(i tau)`` and
``theta`` the unwrapped polar angle, so unit speed holds by construction.
"""

import csv
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .errors import (CircleDegenerateError, InadmissibleParameterError,
                     InconsistentInitialDataError, IntegratorError, ShootingError)

logger = logging.getLogger(__name__)

ABRESCH_LANGER = "abresch-langer"
ANCIAUX = "anciaux"

RTOL = 1e-13
ATOL = 1e-13
DRIFT_LIMIT = 1e-8

CIRCLE_CONSTANT = {ABRESCH_LANGER: math.exp(-0.5), ANCIAUX: 2.0 / math.e}
CIRCLE_RADIUS = {ABRESCH_LANGER: 1.0, ANCIAUX: math.sqrt(2.0)}
# open rotation-number intervals as (lo, hi) floats, checked exactly in _admissible_rotation
ROTATION_RANGE = {ABRESCH_LANGER: (0.5, 1 / math.sqrt(2.0)), ANCIAUX: (0.25, 0.5)}


@dataclass(frozen=True)
class CurveFamily:
    kind: str
    constant: float

    def __post_init__(self):
        if self.kind not in CIRCLE_CONSTANT:
            raise InadmissibleParameterError(f"unknown curve family {self.kind!r}")
        c = self.constant
        if not (0.0 < c <= CIRCLE_CONSTANT[self.kind] * (1 + 1e-15)):
            raise InadmissibleParameterError(
                f"{self.kind} constant {c!r} outside (0, {CIRCLE_CONSTANT[self.kind]!r}]")

    @property
    def is_circle(self):
        return abs(self.constant - CIRCLE_CONSTANT[self.kind]) <= 1e-14

    def potential(self, r):
        """Left side of the first integral at r' = 0: r^2 e^{-r^2} or r^4 e^{-r^2}."""
        p = 2 if self.kind == ABRESCH_LANGER else 4
        return r ** p * np.exp(-r * r)

    def first_integral(self, r, rdot):
        return self.potential(r) * (1.0 - rdot * rdot)

    def closed_form_curvature(self, r):
        r = np.asarray(r, dtype=float)
        if self.kind == ABRESCH_LANGER:
            return self.constant * np.exp(r * r / 2)
        return self.constant * np.exp(r * r / 2) * (r * r - 1) / r ** 3

    def turning_radii(self):
        """(r_min, r_max): roots of potential(r) = constant^2 around the circle radius."""
        rc = CIRCLE_RADIUS[self.kind]
        if self.is_circle:
            return rc, rc
        c2 = self.constant ** 2
        f = lambda r: float(self.potential(r)) - c2
        r_min = brentq(f, 1e-12, rc, xtol=1e-16, rtol=1e-15)
        hi = rc * 2
        while f(hi) > 0:
            hi *= 2
        r_max = brentq(f, rc, hi, xtol=1e-15, rtol=1e-15)
        return r_min, r_max


def curvature_law(kind, x, y, tau):
    """Curvature from position and tangent angle, as dictated by the family's ODE."""
    w = x * np.sin(tau) - y * np.cos(tau)   # <G', iG>
    if kind == ABRESCH_LANGER:
        return w
    r2 = x * x + y * y
    return w * (r2 - 1.0) / r2


def _rhs(kind):
    anc = kind == ANCIAUX

    def rhs(t, s):
        x, y, tau = s[0], s[1], s[2]
        c, sn = math.cos(tau), math.sin(tau)
        w = x * sn - y * c
        r2 = x * x + y * y
        kappa = w * (r2 - 1.0) / r2 if anc else w
        return [c, sn, kappa, w / r2]
    return rhs


@dataclass
class ProfileCurve:
    """Arclength samples of a solution curve plus its summary data."""

    family: CurveFamily
    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    tau: np.ndarray
    theta: np.ndarray
    period: float
    rotation_number: Optional[float]
    r_min: float
    r_max: float
    closure_error: float
    drift: float
    initial_state: tuple = field(repr=False, default=())
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def r(self):
        return np.hypot(self.x, self.y)

    @property
    def kappa(self):
        return curvature_law(self.family.kind, self.x, self.y, self.tau)

    @property
    def rdot(self):
        return (self.x * np.cos(self.tau) + self.y * np.sin(self.tau)) / self.r

    def resample(self, n):
        """Re-integrate and return the curve at ``n`` uniform arclength nodes on [0, period)."""
        if n not in self._cache:
            t_eval = np.arange(n) * (self.period / n)
            self._cache[n] = _integrate(self.family, self.initial_state, self.period, t_eval)
        return self._cache[n]

    def write_csv(self, fh):
        """Write columns t, x, y, r, kappa with a header row."""
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "x", "y", "r", "kappa"])
        for row in zip(self.t, self.x, self.y, self.r, self.kappa):
            w.writerow([format(float(v), ".17g") for v in row])


def _integrate(family, state0, length, t_eval=None, events=None):
    sol = solve_ivp(_rhs(family.kind), (0.0, length), list(state0), method="DOP853",
                    rtol=RTOL, atol=ATOL, t_eval=t_eval, events=events)
    if sol.status < 0:
        raise IntegratorError(sol.message)
    return sol


def _drift(family, x, y, tau):
    r = np.hypot(x, y)
    rdot = (x * np.cos(tau) + y * np.sin(tau)) / r
    c2 = family.constant ** 2
    return float(np.max(np.abs(family.first_integral(r, rdot) - c2)) / c2)


def _initial_state(family, point, tangent):
    if point is None:
        point = complex(family.turning_radii()[1], 0.0)
    point = complex(point)
    if tangent is None:
        tangent = 1j * point / abs(point)
    tangent = complex(tangent)
    if abs(abs(tangent) - 1.0) > 1e-12:
        raise InconsistentInitialDataError("initial tangent is not a unit vector")
    r = abs(point)
    rdot = (point.real * tangent.real + point.imag * tangent.imag) / r
    F = float(family.first_integral(r, rdot))
    if abs(F - family.constant ** 2) > 1e-9 * family.constant ** 2:
        raise InconsistentInitialDataError(
            f"first integral {F!r} at the initial point, expected {family.constant ** 2!r}")
    return (point.real, point.imag, math.atan2(tangent.imag, tangent.real),
            math.atan2(point.imag, point.real))


def integrate_curve(family, length, point=None, tangent=None, n_samples=2049):
    """Integrate the family's curvature ODE over ``[0, length]``.

    By default the curve starts at the outer turning point ``r_max`` on the
    positive real axis with tangent ``i``, so the radius decreases first.

    Raises:
        InconsistentInitialDataError: if the initial data does not match the constant.
        IntegratorError: if the first integral drifts by more than ``DRIFT_LIMIT``.
    """
    state0 = _initial_state(family, point, tangent)
    t_eval = np.linspace(0.0, length, n_samples)
    sol = _integrate(family, state0, length, t_eval)
    x, y, tau, theta = sol.y
    drift = _drift(family, x, y, tau)
    if drift > DRIFT_LIMIT:
        raise IntegratorError(f"first integral drift {drift:.3e}")
    r = np.hypot(x, y)
    closure = float(abs(complex(x[-1] - x[0], y[-1] - y[0]))
                    + abs(np.exp(1j * tau[-1]) - np.exp(1j * tau[0])))
    return ProfileCurve(family=family, t=sol.t, x=x, y=y, tau=tau, theta=theta,
                        period=float(length), rotation_number=None,
                        r_min=float(r.min()), r_max=float(r.max()),
                        closure_error=closure, drift=drift, initial_state=state0)


def radial_cycle(family, max_length=400.0):
    """Length of one radial oscillation and the polar angle swept over it.

    The cycle is measured between two successive inner turning points
    (events r' = 0 with r' changing from negative to positive).
    """
    if family.is_circle:
        raise CircleDegenerateError(f"{family.kind} constant {family.constant!r} is the circle")
    state0 = _initial_state(family, None, None)

    def inner_turn(t, s):
        return s[0] * math.cos(s[2]) + s[1] * math.sin(s[2])
    inner_turn.direction = 1.0

    sol = _integrate(family, state0, max_length, events=[inner_turn])
    te, ye = sol.t_events[0], sol.y_events[0]
    if len(te) < 2:
        raise CircleDegenerateError("no radial oscillation detected")
    return float(te[1] - te[0]), float(ye[1][3] - ye[0][3])


def rotation_number(family):
    """Polar-angle advance per radial period, divided by 2 pi."""
    return radial_cycle(family)[1] / (2 * math.pi)


def _admissible_rotation(kind, frac):
    p, q = frac.numerator, frac.denominator
    if kind == ABRESCH_LANGER:
        return Fraction(1, 2) < frac and 2 * p * p < q * q
    return Fraction(1, 4) < frac < Fraction(1, 2)


def check_rotation_target(kind, p, q):
    if q <= 0 or p <= 0 or math.gcd(p, q) != 1:
        raise InadmissibleParameterError(f"(p, q) = ({p}, {q}) must be coprime positive integers")
    if kind not in CIRCLE_CONSTANT:
        raise InadmissibleParameterError(f"unknown curve family {kind!r}")
    if not _admissible_rotation(kind, Fraction(p, q)):
        lo, hi = ROTATION_RANGE[kind]
        raise InadmissibleParameterError(
            f"rotation {p}/{q} outside the open interval ({lo:.6g}, {hi:.6g}) for {kind}")


def bracket_samples(kind, n=12):
    """Conserved constants spanning the admissible range, ordered from near-circle outward."""
    cc = CIRCLE_CONSTANT[kind]
    gaps = np.geomspace(1e-4, 0.97, n)
    return cc * (1.0 - gaps)


def shoot_closed(kind, p, q):
    """Find the conserved constant whose curve has rotation number p/q and close it.

    Returns:
        ``(CurveFamily, ProfileCurve)``; the curve covers q radial periods.

    Raises:
        InadmissibleParameterError: if p/q is not inside the family's rotation interval.
        ShootingError: if no bracket is found or the curve fails to close.
    """
    check_rotation_target(kind, p, q)
    target = p / q
    consts = bracket_samples(kind)
    rots = np.array([rotation_number(CurveFamily(kind, c)) for c in consts])
    if np.any(np.diff(rots) >= 0):
        logger.warning("rotation number not monotone in the %s constant on the sample grid", kind)
    idx = np.nonzero((rots[:-1] - target) * (rots[1:] - target) <= 0)[0]
    if len(idx) == 0:
        raise ShootingError(f"target {p}/{q} not bracketed by rotation samples "
                            f"[{rots.min():.6g}, {rots.max():.6g}]")
    a, b = consts[idx[0] + 1], consts[idx[0]]
    f = lambda c: rotation_number(CurveFamily(kind, c)) - target
    c_star = brentq(f, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
    family = CurveFamily(kind, c_star)
    period, sweep = radial_cycle(family)
    rot = sweep / (2 * math.pi)
    if abs(rot - target) > 1e-10:
        raise ShootingError(f"rotation number {rot!r} misses target {target!r}")
    curve = integrate_curve(family, q * period)
    curve.rotation_number = rot
    if curve.closure_error > 1e-6:
        raise ShootingError(f"curve fails to close: error {curve.closure_error:.3e}")
    return family, curve


def circle(kind):
    """The circular member of a family, traversed once."""
    family = CurveFamily(kind, CIRCLE_CONSTANT[kind])
    curve = integrate_curve(family, 2 * math.pi * CIRCLE_RADIUS[kind])
    curve.rotation_number = 1.0
    return family, curve
