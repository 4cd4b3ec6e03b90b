"""Periodic parameter grids, spectral differentiation and surface quadrature.

Fields live on an ``(Nu, Nv)`` node array; ambient vector fields carry an
extra trailing axis of length 4. Derivatives are taken with the FFT along
one parameter axis and quadrature is the periodic trapezoid rule, which is
spectrally accurate for smooth periodic integrands.
"""

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from . import geom
from .errors import (AperiodicInputError, GridMismatchError, InconsistentSamplingError,
                     NotLagrangianError)
from .geom import SurfaceJet

GENUS_TOLERANCE = 0.01


@dataclass(frozen=True)
class PeriodicGrid:
    periods: Tuple[float, float]
    shape: Tuple[int, int] = (128, 128)
    origin: Tuple[float, float] = (0.0, 0.0)
    closed: bool = True   # False for band samples that are not periodic in u

    def __post_init__(self):
        for n in self.shape:
            if int(n) != n or n <= 0 or n % 2:
                raise ValueError(f"grid resolution must be positive and even, got {self.shape}")
        if min(self.periods) <= 0:
            raise ValueError(f"periods must be positive, got {self.periods}")

    @property
    def spacing(self):
        return (self.periods[0] / self.shape[0], self.periods[1] / self.shape[1])

    def nodes(self, axis):
        return self.origin[axis] + np.arange(self.shape[axis]) * self.spacing[axis]

    def mesh(self):
        return np.meshgrid(self.nodes(0), self.nodes(1), indexing="ij")


def wavenumbers(n, period):
    return 2 * np.pi * np.fft.fftfreq(n, d=period / n)


def spectral_derivative(f, period, axis, order=1):
    """Derivative of a periodic sampled field along ``axis``.

    Real input gives real output. For odd orders the Nyquist mode is zeroed,
    which makes the result exact for trigonometric polynomials of degree < N/2.
    """
    f = np.asarray(f)
    n = f.shape[axis]
    k = wavenumbers(n, period)
    mult = (1j * k) ** order
    if order % 2:
        mult[n // 2] = 0.0
    shape = [1] * f.ndim
    shape[axis] = n
    out = np.fft.ifft(np.fft.fft(f, axis=axis) * mult.reshape(shape), axis=axis)
    return out.real if np.isrealobj(f) else out


def _require_closed(grid):
    if not grid.closed:
        raise GridMismatchError("operation needs a grid periodic in both directions")


def spectral_jet(positions, grid):
    """Jet from tabulated positions, every derivative by spectral differentiation."""
    _require_closed(grid)
    P = np.asarray(positions, dtype=float)
    if P.shape != tuple(grid.shape) + (4,):
        raise GridMismatchError(f"positions of shape {P.shape} on a {grid.shape} grid")
    Tu, Tv = grid.periods
    pu = spectral_derivative(P, Tu, 0)
    pv = spectral_derivative(P, Tv, 1)
    U, V = grid.mesh()
    return SurfaceJet(phi=P, phi_u=pu, phi_v=pv,
                      phi_uu=spectral_derivative(P, Tu, 0, 2),
                      phi_uv=spectral_derivative(pu, Tv, 1),
                      phi_vv=spectral_derivative(P, Tv, 1, 2), u=U, v=V)


@dataclass(frozen=True)
class SampledSurface:
    grid: PeriodicGrid
    jet: SurfaceJet
    fd: geom.FundamentalData
    immersion: object = None

    def d(self, field, axis, order=1):
        _require_closed(self.grid)
        if np.shape(field)[:2] != tuple(self.grid.shape):
            raise GridMismatchError("field not sampled on this grid")
        return spectral_derivative(field, self.grid.periods[axis], axis, order)

    @property
    def analytic(self):
        return getattr(self.immersion, "analytic", True)


class TabulatedImmersion:
    """Positions given only as samples on a grid; derivatives are spectral."""

    analytic = False
    name = "tabulated"

    def __init__(self, positions, periods):
        self.positions = np.asarray(positions, dtype=float)
        self.periods = tuple(periods)

    def default_grid(self, n=None):
        return PeriodicGrid(self.periods, self.positions.shape[:2])

    def jet(self, grid):
        return spectral_jet(self.positions, grid)

    def closure_error(self, grid):
        return 0.0


def sample(immersion, grid=None, closure_tol=1e-8):
    """Sample an immersion on a grid and compute its fundamental data at every node.

    Raises:
        AperiodicInputError: if the immersion does not close over the grid periods.
        DegenerateJetError: if any node is not an immersion point.
    """
    if grid is None:
        grid = immersion.default_grid()
    if grid.closed:
        err = immersion.closure_error(grid)
        if err > closure_tol:
            raise AperiodicInputError(f"closure mismatch {err:.3e} over periods {grid.periods}")
    jet = immersion.jet(grid)
    return SampledSurface(grid=grid, jet=jet, fd=geom.fundamental_data(jet), immersion=immersion)


# -- quadrature --------------------------------------------------------------

def integrate(field, surface):
    """Periodic trapezoid rule for the integral of ``field`` against the area element."""
    _require_closed(surface.grid)
    field = np.broadcast_to(np.asarray(field, dtype=float), np.shape(surface.fd.sqrt_det_g)) \
        if np.ndim(field) == 0 else np.asarray(field, dtype=float)
    if field.shape != tuple(surface.grid.shape):
        raise GridMismatchError(f"field of shape {field.shape} on a {surface.grid.shape} grid")
    du, dv = surface.grid.spacing
    return float(np.sum(field * surface.fd.sqrt_det_g) * du * dv)


def area(surface):
    return integrate(1.0, surface)


# -- intrinsic calculus ------------------------------------------------------

def coordinate_gradient(f, surface):
    """Raised-index gradient components ``g^{ij} d_j f`` as an (..., 2) array."""
    df = np.stack([surface.d(f, 0), surface.d(f, 1)], -1)
    return np.einsum("...ij,...j->...i", surface.fd.g_inv, df)


def gradient(f, surface):
    up = coordinate_gradient(f, surface)
    return up[..., 0:1] * surface.jet.phi_u + up[..., 1:2] * surface.jet.phi_v


def divergence_components(X, surface):
    """div of a tangent field given by coordinate components X^i, shape (..., 2)."""
    s = surface.fd.sqrt_det_g
    return (surface.d(s * X[..., 0], 0) + surface.d(s * X[..., 1], 1)) / s


def divergence(X, surface):
    """Intrinsic divergence of an ambient vector field tangent to the surface."""
    c1, c2 = geom.tangent_coordinates(X, surface.jet, surface.fd.g)
    return divergence_components(np.stack([c1, c2], -1), surface)


def laplace_beltrami(f, surface):
    """(1/sqrt g) d_i (sqrt g g^{ij} d_j f)."""
    return divergence_components(coordinate_gradient(f, surface), surface)


def intrinsic_gauss_curvature(surface):
    """Gauss curvature from the metric alone (Brioschi formula)."""
    g = surface.fd.g
    E, F, G = g[..., 0, 0], g[..., 0, 1], g[..., 1, 1]
    d = surface.d
    E_u, E_v, F_u, F_v, G_u, G_v = d(E, 0), d(E, 1), d(F, 0), d(F, 1), d(G, 0), d(G, 1)
    E_vv, G_uu, F_uv = d(E, 1, 2), d(G, 0, 2), d(F_u, 1)
    one = np.stack([
        np.stack([-E_vv / 2 + F_uv - G_uu / 2, E_u / 2, F_u - E_v / 2], -1),
        np.stack([F_v - G_u / 2, E, F], -1),
        np.stack([G_v / 2, F, G], -1)], -2)
    zero = np.zeros_like(E)
    two = np.stack([
        np.stack([zero, E_v / 2, G_u / 2], -1),
        np.stack([E_v / 2, E, F], -1),
        np.stack([G_u / 2, F, G], -1)], -2)
    return (np.linalg.det(one) - np.linalg.det(two)) / (E * G - F * F) ** 2


# -- global identities -------------------------------------------------------

def squared_norm_laplacian(surface):
    """Return ``(lap |phi|^2, 2 (2 - |H|^2))``, the two sides of the Laplacian identity."""
    phi2 = geom.inner(surface.jet.phi, surface.jet.phi)
    return laplace_beltrami(phi2, surface), 2.0 * (2.0 - surface.fd.H2)


def willmore_check(surface):
    """(integral of |H|^2, area, ratio); the ratio is 2 on compact self-shrinking surfaces."""
    w = integrate(surface.fd.H2, surface)
    a = area(surface)
    return w, a, w / a


def gauss_bonnet(surface):
    """Total curvature, genus estimate and residual of 8 pi (1 - g) = int (2 - |sigma|^2).

    Raises:
        InconsistentSamplingError: if the total curvature is not within
            ``GENUS_TOLERANCE`` of an integer genus.
    """
    total = integrate(surface.fd.K, surface)
    raw = 1.0 - total / (4 * math.pi)
    genus = int(round(raw))
    if abs(raw - genus) > GENUS_TOLERANCE:
        raise InconsistentSamplingError(f"genus estimate {raw:.6f} is not an integer")
    residual = abs(8 * math.pi * (1 - genus) - integrate(2.0 - surface.fd.sigma2, surface))
    return total, genus, residual


def maslov_form(surface):
    """Components of alpha_H = <JH, .> along the two coordinate directions."""
    if not geom.is_lagrangian(surface.jet):
        raise NotLagrangianError("Maslov form requested on a non-Lagrangian surface")
    JH = geom.J(surface.fd.H)
    return geom.inner(JH, surface.jet.phi_u), geom.inner(JH, surface.jet.phi_v)


def maslov_periods(surface, base=(0, 0)):
    """Integrals of alpha_H around the u-loop through v-node ``base[1]`` and the v-loop
    through u-node ``base[0]``."""
    _require_closed(surface.grid)
    a_u, a_v = maslov_form(surface)
    du, dv = surface.grid.spacing
    return float(np.sum(a_u[:, base[1]]) * du), float(np.sum(a_v[base[0], :]) * dv)


def maslov_period_spread(surface):
    """Largest deviation of the periods across all base lines (closedness of alpha_H)."""
    a_u, a_v = maslov_form(surface)
    du, dv = surface.grid.spacing
    pu = np.sum(a_u, axis=0) * du
    pv = np.sum(a_v, axis=1) * dv
    return float(max(np.ptp(pu), np.ptp(pv)))


def unwrapped_angle(surface):
    """Lagrangian angle unwrapped continuously along grid lines from node (0, 0)."""
    beta = np.angle(geom.complex_det(surface.jet.phi_u, surface.jet.phi_v))
    col = np.unwrap(beta[:, 0])
    return np.unwrap(beta, axis=1) + (col - beta[:, 0])[:, None]


# -- structure identities on the grid ----------------------------------------

def tangent_position(surface):
    top, _ = geom.split_tangent_normal(surface.jet.phi, surface.jet, surface.fd.g)
    return top


def structure_residuals(surface):
    """Pointwise residual fields of the tangent and normal structure equations."""
    H = surface.fd.H
    T = tangent_position(surface)
    dH = (surface.d(H, 0), surface.d(H, 1))
    dT = (surface.d(T, 0), surface.d(T, 1))
    return geom.structure_residuals(surface.jet, surface.fd, dH, dT)


def div_jh(surface):
    """Return ``(div JH, <JH, phi_top>, |difference|)`` as fields."""
    if not geom.is_lagrangian(surface.jet):
        raise NotLagrangianError("div JH needs a Lagrangian surface")
    JH = geom.J(surface.fd.H)
    lhs = divergence(JH, surface)
    rhs = geom.inner(JH, tangent_position(surface))
    return lhs, rhs, np.abs(lhs - rhs)
