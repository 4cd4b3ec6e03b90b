"""The four self-shrinking torus families in C^2, plus a sphere reference band.

Lee-Wang, Lawson, Clifford and the sphere all have the form

    (A cos u e^{i a v}, B sin u e^{i b v})

and are evaluated with exact derivatives. Abresch-Langer and Anciaux tori are
built from numerically shot profile curves.
"""

import functools
import math
from fractions import Fraction

import numpy as np

from . import curves
from .errors import InadmissibleParameterError
from .geom import SurfaceJet, from_complex
from .grid import PeriodicGrid, spectral_derivative

SQRT2 = math.sqrt(2.0)
SPHERE_BAND = math.pi / 3


def _stack(z1, z2):
    return from_complex(np.stack(np.broadcast_arrays(z1, z2), -1))


class CosSinTorus:
    """Immersion (A cos u e^{iav}, B sin u e^{ibv}) with symbolic derivatives."""

    analytic = True
    lagrangian = True
    is_clifford = False

    def __init__(self, name, params, A, B, a, b, periods):
        self.name = name
        self.params = params
        self.A, self.B, self.a, self.b = A, B, a, b
        self.periods = periods

    def default_grid(self, n=128):
        return PeriodicGrid(self.periods, (n, n))

    def _factors(self, u, v):
        e1 = np.exp(1j * self.a * v)
        e2 = np.exp(1j * self.b * v)
        return np.cos(u), np.sin(u), self.A * e1, self.B * e2

    def position(self, u, v):
        c, s, E1, E2 = self._factors(u, v)
        return _stack(c * E1, s * E2)

    def evaluate(self, u, v):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        c, s, E1, E2 = self._factors(u, v)
        a, b = self.a, self.b
        return SurfaceJet(
            phi=_stack(c * E1, s * E2),
            phi_u=_stack(-s * E1, c * E2),
            phi_v=_stack(1j * a * c * E1, 1j * b * s * E2),
            phi_uu=_stack(-c * E1, -s * E2),
            phi_uv=_stack(-1j * a * s * E1, 1j * b * c * E2),
            phi_vv=_stack(-a * a * c * E1, -b * b * s * E2),
            u=u, v=v)

    def jet(self, grid):
        U, V = grid.mesh()
        return self.evaluate(U, V)

    def closure_error(self, grid):
        U, V = grid.mesh()
        P = self.position(U, V)
        return float(max(np.max(np.abs(self.position(U + grid.periods[0], V) - P)),
                         np.max(np.abs(self.position(U, V + grid.periods[1]) - P))))

    def closed_forms(self, grid):
        return {}

    def bounds(self):
        return {}


class CliffordTorus(CosSinTorus):
    """R e^{it}(cos s, sin s); a self-shrinker only for R = sqrt(2)."""

    def __init__(self, radius=SQRT2):
        name = "clifford" if radius == SQRT2 else "scaled-clifford"
        super().__init__(name, {} if radius == SQRT2 else {"radius": radius},
                         radius, radius, 1.0, 1.0, (2 * math.pi, 2 * math.pi))
        self.radius = radius
        self.is_clifford = radius == SQRT2

    def closed_forms(self, grid):
        R2 = self.radius ** 2
        c = {"H2": 4.0 / R2, "sigma2": 4.0 / R2, "K": 0.0, "phi2": R2}
        return {k: np.full(grid.shape, v) for k, v in c.items()}


class LeeWangTorus(CosSinTorus):

    def __init__(self, m, n):
        if not (isinstance(m, int) and isinstance(n, int)) or m < 1 or n < 1:
            raise InadmissibleParameterError(f"Lee-Wang needs positive integers, got ({m}, {n})")
        if math.gcd(m, n) != 1 or m > n:
            raise InadmissibleParameterError(f"Lee-Wang needs gcd(m, n) = 1 and m <= n, got ({m}, {n})")
        s = math.sqrt(m + n)
        super().__init__("lee-wang", {"m": m, "n": n}, s / math.sqrt(n), s / math.sqrt(m),
                         math.sqrt(n / m), math.sqrt(m / n),
                         (2 * math.pi, 2 * math.pi * math.sqrt(m * n)))
        self.m, self.n = m, n
        self.is_clifford = m == n == 1

    def closed_forms(self, grid):
        m, n = self.m, self.n
        U, _ = grid.mesh()
        c2, s2 = np.cos(U) ** 2, np.sin(U) ** 2
        return {"phi2": (m + n) / (m * n) * (m * c2 + n * s2),
                "H2": (m + n) / (n * c2 + m * s2)}

    def bounds(self):
        m, n = self.m, self.n
        return {"phi2": ((m + n) / n, (m + n) / m),
                "H2": ((m + n) / n, (m + n) / m),
                "sigma2": ((3 * m * m + n * n) / (n * (m + n)), (m * m + 3 * n * n) / (m * (m + n))),
                "K": (-n * (n - m) / (m * (m + n)), m * (n - m) / (n * (m + n)))}


def parse_fraction(text):
    """Parse an 'a/b' (or integer) string into a Fraction without going through floats."""
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InadmissibleParameterError(f"cannot parse rational {text!r}") from exc


class LawsonTorus(CosSinTorus):

    def __init__(self, alpha):
        alpha = parse_fraction(alpha) if not isinstance(alpha, Fraction) else alpha
        if alpha < 1:
            raise InadmissibleParameterError(f"Lawson needs alpha >= 1, got {alpha}")
        a, b = alpha.numerator, alpha.denominator
        super().__init__("lawson", {"alpha": f"{a}/{b}"}, SQRT2, SQRT2, float(alpha), 1.0,
                         (2 * math.pi, 2 * math.pi * b))
        self.alpha = alpha
        self.is_clifford = alpha == 1
        self.lagrangian = alpha == 1

    def closed_forms(self, grid):
        al = float(self.alpha)
        U, _ = grid.mesh()
        d = al * al * np.cos(U) ** 2 + np.sin(U) ** 2
        return {"sigma2": 1.0 + al * al / d ** 2,
                "phi2": np.full(grid.shape, 2.0), "H2": np.full(grid.shape, 2.0)}

    def bounds(self):
        al2 = float(self.alpha) ** 2
        return {"sigma2": (1 + 1 / al2, 1 + al2), "K": (1 - al2, 1 - 1 / al2)}


class SphereBand(CosSinTorus):
    """S^2(sqrt 2) in R^3 x {0}, latitude u restricted to [-pi/3, pi/3]."""

    lagrangian = False

    def __init__(self):
        super().__init__("sphere", {}, SQRT2, SQRT2, 1.0, 0.0, (2 * SPHERE_BAND, 2 * math.pi))

    def default_grid(self, n=128):
        return PeriodicGrid(self.periods, (n, n), origin=(-SPHERE_BAND, 0.0), closed=False)

    def evaluate(self, u, v):
        if np.any(np.abs(np.asarray(u)) > SPHERE_BAND + 1e-12):
            raise InadmissibleParameterError("sphere evaluated outside the band |u| <= pi/3")
        return super().evaluate(u, v)

    def closed_forms(self, grid):
        c = {"H2": 2.0, "sigma2": 1.0, "K": 0.5, "phi2": 2.0}
        return {k: np.full(grid.shape, v) for k, v in c.items()}


# -- curve-built families ----------------------------------------------------

_shoot = functools.lru_cache(maxsize=None)(curves.shoot_closed)
_circle = functools.lru_cache(maxsize=None)(curves.circle)


def _curve_samples(curve, n, second):
    """Position, unit tangent and second derivative of a closed curve at n nodes."""
    sol = curve.resample(n)
    x, y, tau = sol.y[0], sol.y[1], sol.y[2]
    gamma = x + 1j * y
    tangent = np.exp(1j * tau)
    if second == "spectral":
        dd = spectral_derivative(tangent, curve.period, 0)
    else:
        dd = 1j * curves.curvature_law(curve.family.kind, x, y, tau) * tangent
    return gamma, tangent, dd


class _CurveTorus:
    """Common plumbing for tori built from shot profile curves.

    Positions and unit tangents come straight from the ODE state. The second
    derivative of a profile curve is ``i kappa gamma'`` with kappa from the
    family's curvature law (``second="law"``), or the spectral derivative of
    the sampled tangent (``second="spectral"``), which needs about twice as
    many nodes for the same accuracy.
    """

    analytic = False
    lagrangian = True
    curve_nodes = 1024

    def __init__(self, second="law"):
        if second not in ("spectral", "law"):
            raise ValueError(f"unknown second-derivative mode {second!r}")
        self.second = second

    def _nodes(self, curve, n):
        return n if curve.family.is_circle else max(n, self.curve_nodes)

    def closure_error(self, grid):
        return max(c.closure_error for c in self.curves)

    def bounds(self):
        return {}


class AnciauxTorus(_CurveTorus):
    """gamma(t) (cos s, sin s) for a closed Anciaux profile curve gamma."""

    name = "anciaux"

    def __init__(self, p=None, q=None, second="law"):
        super().__init__(second)
        if p is None and q is None:
            self.family, self.curve = _circle(curves.ANCIAUX)
            self.params = {}
        else:
            self.family, self.curve = _shoot(curves.ANCIAUX, p, q)
            self.params = {"p": p, "q": q}
        self.curves = (self.curve,)
        self.is_clifford = self.family.is_circle
        self.periods = (self.curve.period, 2 * math.pi)

    def default_grid(self, n=128):
        return PeriodicGrid(self.periods, (self._nodes(self.curve, n), n))

    def jet(self, grid):
        U, V = grid.mesh()
        g, g1, g2 = (z[:, None] for z in _curve_samples(self.curve, grid.shape[0], self.second))
        c, s = np.cos(V), np.sin(V)
        return SurfaceJet(phi=_stack(g * c, g * s), phi_u=_stack(g1 * c, g1 * s),
                          phi_v=_stack(-g * s, g * c), phi_uu=_stack(g2 * c, g2 * s),
                          phi_uv=_stack(-g1 * s, g1 * c), phi_vv=_stack(-g * c, -g * s),
                          u=U, v=V)

    def closed_forms(self, grid):
        sol = self.curve.resample(grid.shape[0])
        r2 = (sol.y[0] ** 2 + sol.y[1] ** 2)[:, None] * np.ones(grid.shape)
        E2 = self.family.constant ** 2
        return {"H2": E2 * np.exp(r2) / r2,
                "sigma2": E2 * np.exp(r2) * (r2 * r2 - 2 * r2 + 4) / r2 ** 3,
                "phi2": r2}


class AbreschLangerTorus(_CurveTorus):
    """Product (Gamma_1(t), Gamma_2(s)) of two closed Abresch-Langer curves."""

    name = "abresch-langer"

    def __init__(self, curve1, curve2, params=None, second="law"):
        super().__init__(second)
        for c in (curve1, curve2):
            if c.family.kind != curves.ABRESCH_LANGER:
                raise InadmissibleParameterError("Abresch-Langer torus needs Abresch-Langer curves")
            if c.closure_error > 1e-6:
                raise InadmissibleParameterError(f"profile curve not closed: {c.closure_error:.3e}")
        self.curves = (curve1, curve2)
        self.params = params or {}
        self.is_clifford = curve1.family.is_circle and curve2.family.is_circle
        self.periods = (curve1.period, curve2.period)

    def default_grid(self, n=128):
        return PeriodicGrid(self.periods, tuple(self._nodes(c, n) for c in self.curves))

    def jet(self, grid):
        U, V = grid.mesh()
        a = [z[:, None] for z in _curve_samples(self.curves[0], grid.shape[0], self.second)]
        b = [z[None, :] for z in _curve_samples(self.curves[1], grid.shape[1], self.second)]
        zero = np.zeros(grid.shape)
        return SurfaceJet(phi=_stack(a[0], b[0]), phi_u=_stack(a[1], zero),
                          phi_v=_stack(zero, b[1]), phi_uu=_stack(a[2], zero),
                          phi_uv=np.zeros(grid.shape + (4,)), phi_vv=_stack(zero, b[2]),
                          u=U, v=V)

    def closed_forms(self, grid):
        r1 = self.curves[0].resample(grid.shape[0])
        r2 = self.curves[1].resample(grid.shape[1])
        k1 = self.curves[0].family.constant ** 2 * np.exp(r1.y[0] ** 2 + r1.y[1] ** 2)
        k2 = self.curves[1].family.constant ** 2 * np.exp(r2.y[0] ** 2 + r2.y[1] ** 2)
        H2 = k1[:, None] + k2[None, :]
        return {"H2": H2, "sigma2": H2, "K": np.zeros(grid.shape)}


# -- builders and registry ---------------------------------------------------

def build_abresch_langer(curve1, curve2, params=None):
    return AbreschLangerTorus(curve1, curve2, params)


def _al_curve(p, q):
    if p is None and q is None:
        return _circle(curves.ABRESCH_LANGER)[1]
    if p is None or q is None:
        raise InadmissibleParameterError("give both p and q")
    return _shoot(curves.ABRESCH_LANGER, p, q)[1]


def build_abresch_langer_pq(p=None, q=None, p2=None, q2=None):
    """AL(p, q) x AL(p2, q2); a missing pair means the unit circle."""
    params = {k: v for k, v in (("p", p), ("q", q), ("p2", p2), ("q2", q2)) if v is not None}
    return AbreschLangerTorus(_al_curve(p, q), _al_curve(p2, q2), params)


def build_anciaux(p=None, q=None):
    if (p is None) != (q is None):
        raise InadmissibleParameterError("give both p and q")
    return AnciauxTorus(p, q)


def build_lee_wang(m=1, n=1):
    return LeeWangTorus(m, n)


def build_lawson(alpha="1/1"):
    return LawsonTorus(alpha)


def build_sphere():
    return SphereBand()


def build_clifford(radius=SQRT2):
    return CliffordTorus(radius)


REGISTRY = {
    "clifford": build_clifford,
    "abresch-langer": build_abresch_langer_pq,
    "anciaux": build_anciaux,
    "lee-wang": build_lee_wang,
    "lawson": build_lawson,
    "sphere": build_sphere,
}


def build(name, **params):
    """Build a family member by registry name; unknown names raise KeyError."""
    try:
        builder = REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown family {name!r}; choose from {sorted(REGISTRY)}") from None
    return builder(**params)
