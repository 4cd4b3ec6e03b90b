"""Pointwise extrinsic geometry of surfaces in C^2 = R^4.

Ambient vectors are numpy arrays whose last axis has length 4, ordered
``(x1, y1, x2, y2)`` so that ``z1 = x1 + i y1`` and ``z2 = x2 + i y2``.
Every function here broadcasts over leading axes, so a single point and a
whole parameter grid go through the same code path.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DegenerateJetError, NotLagrangianError, NotSphericalError

# Gram determinant below this times scale**4 counts as degenerate.
DEGENERACY_THRESHOLD = 1e-12


# -- ambient algebra ---------------------------------------------------------

def inner(v, w):
    return np.sum(np.asarray(v) * np.asarray(w), axis=-1)


def norm(v):
    return np.sqrt(inner(v, v))


def J(v):
    """Complex structure: multiplication by i on both complex coordinates."""
    v = np.asarray(v)
    out = np.empty_like(v)
    out[..., 0] = -v[..., 1]
    out[..., 1] = v[..., 0]
    out[..., 2] = -v[..., 3]
    out[..., 3] = v[..., 2]
    return out


def omega(v, w):
    """Kaehler form omega(v, w) = <Jv, w>."""
    return inner(J(v), w)


def to_complex(v):
    v = np.asarray(v)
    return v[..., 0::2] + 1j * v[..., 1::2]


def from_complex(z):
    z = np.asarray(z)
    out = np.empty(z.shape[:-1] + (4,))
    out[..., 0::2] = z.real
    out[..., 1::2] = z.imag
    return out


def complex_det(a, b):
    """dz1 ^ dz2 (a, b) for two ambient vectors."""
    za, zb = to_complex(a), to_complex(b)
    return za[..., 0] * zb[..., 1] - za[..., 1] * zb[..., 0]


# -- jets and fundamental forms ----------------------------------------------

@dataclass(frozen=True)
class SurfaceJet:
    """Position and first/second parametric derivatives at one or many points."""

    phi: np.ndarray
    phi_u: np.ndarray
    phi_v: np.ndarray
    phi_uu: np.ndarray
    phi_uv: np.ndarray
    phi_vv: np.ndarray
    u: Optional[np.ndarray] = None
    v: Optional[np.ndarray] = None

    @property
    def tangents(self):
        return (self.phi_u, self.phi_v)

    @property
    def second(self):
        """Second derivatives as a nested pair, ``second[i][j] = phi_ij``."""
        return ((self.phi_uu, self.phi_uv), (self.phi_uv, self.phi_vv))

    def map(self, fn):
        """Apply ``fn`` to every array field (used for slicing grids)."""
        kw = {k: fn(getattr(self, k)) for k in
              ("phi", "phi_u", "phi_v", "phi_uu", "phi_uv", "phi_vv")}
        kw["u"] = None if self.u is None else fn(self.u)
        kw["v"] = None if self.v is None else fn(self.v)
        return SurfaceJet(**kw)


@dataclass(frozen=True)
class FundamentalData:
    g: np.ndarray            # (..., 2, 2)
    g_inv: np.ndarray        # (..., 2, 2)
    sqrt_det_g: np.ndarray
    sigma: np.ndarray        # (..., 2, 2, 4), normal parts of phi_ij
    H: np.ndarray            # (..., 4)
    sigma2: np.ndarray
    H2: np.ndarray
    K: np.ndarray


def metric(jet):
    pu, pv = jet.phi_u, jet.phi_v
    E, F, G = inner(pu, pu), inner(pu, pv), inner(pv, pv)
    g = np.stack([np.stack([E, F], -1), np.stack([F, G], -1)], -2)
    return g


def _check_regular(jet, g):
    det = g[..., 0, 0] * g[..., 1, 1] - g[..., 0, 1] ** 2
    scale = np.maximum.reduce([norm(jet.phi), norm(jet.phi_u), norm(jet.phi_v)])
    bad = det <= DEGENERACY_THRESHOLD * scale ** 4
    if np.any(bad):
        raise DegenerateJetError(
            f"degenerate metric at {int(np.count_nonzero(bad))} point(s)")
    return det


def _tangent_coefficients(v, jet, g, det):
    """Solve the 2x2 normal equations of v against (phi_u, phi_v)."""
    a = inner(v, jet.phi_u)
    b = inner(v, jet.phi_v)
    E, F, G = g[..., 0, 0], g[..., 0, 1], g[..., 1, 1]
    c1 = (G * a - F * b) / det
    c2 = (E * b - F * a) / det
    return c1, c2


def split_tangent_normal(v, jet, g=None):
    """Return ``(v_top, v_perp)`` with ``v_top`` in the tangent plane."""
    if g is None:
        g = metric(jet)
    det = _check_regular(jet, g)
    v = np.asarray(v, dtype=float)
    c1, c2 = _tangent_coefficients(v, jet, g, det)
    top = c1[..., None] * jet.phi_u + c2[..., None] * jet.phi_v
    return top, v - top


def tangent_coordinates(v, jet, g=None):
    """Coordinates ``(c1, c2)`` of the tangent part of ``v`` in the basis (phi_u, phi_v)."""
    if g is None:
        g = metric(jet)
    det = _check_regular(jet, g)
    return _tangent_coefficients(np.asarray(v, dtype=float), jet, g, det)


def fundamental_data(jet):
    """Metric, second fundamental form, mean curvature and the scalars |sigma|^2, |H|^2, K.

    Raises:
        DegenerateJetError: if phi_u, phi_v are (numerically) dependent.
    """
    g = metric(jet)
    det = _check_regular(jet, g)
    E, F, G = g[..., 0, 0], g[..., 0, 1], g[..., 1, 1]
    g_inv = np.stack([np.stack([G, -F], -1), np.stack([-F, E], -1)], -2) / det[..., None, None]

    def normal(w):
        c1, c2 = _tangent_coefficients(w, jet, g, det)
        return w - c1[..., None] * jet.phi_u - c2[..., None] * jet.phi_v

    s_uu, s_uv, s_vv = normal(jet.phi_uu), normal(jet.phi_uv), normal(jet.phi_vv)
    sigma = np.stack([np.stack([s_uu, s_uv], -2), np.stack([s_uv, s_vv], -2)], -3)

    H = np.einsum("...ij,...ijk->...k", g_inv, sigma)
    gram = np.einsum("...ijk,...lmk->...ijlm", sigma, sigma)
    sigma2 = np.einsum("...il,...jm,...ijlm->...", g_inv, g_inv, gram)
    H2 = inner(H, H)
    return FundamentalData(g=g, g_inv=g_inv, sqrt_det_g=np.sqrt(det), sigma=sigma,
                           H=H, sigma2=sigma2, H2=H2, K=0.5 * (H2 - sigma2))


def normal_defect(jet, fd):
    """Largest |<sigma_ij, phi_k>| / (|sigma| |phi_k|), |sigma| the largest component norm.

    Components that vanish identically (sigma_uv on a sphere, say) would make a
    per-component ratio meaningless, hence the common unit.
    """
    unit = np.max(norm(fd.sigma), axis=(-2, -1))
    unit = np.where(unit > 0, unit, 1.0)
    worst = np.zeros(np.shape(fd.H2))
    for i in range(2):
        for j in range(2):
            s = fd.sigma[..., i, j, :]
            for t in jet.tangents:
                worst = np.maximum(worst, np.abs(inner(s, t)) / (unit * norm(t)))
    return worst


# -- residuals ---------------------------------------------------------------

def shrinker_residual(jet, fd=None):
    """|H + phi_perp|, zero exactly where H = -phi_perp holds."""
    if fd is None:
        fd = fundamental_data(jet)
    _, perp = split_tangent_normal(jet.phi, jet, fd.g)
    return norm(fd.H + perp)


def symplectic_residual(jet):
    """|omega(phi_u, phi_v)|, zero exactly on Lagrangian tangent planes."""
    return np.abs(omega(jet.phi_u, jet.phi_v))


def is_lagrangian(jet, tol=1e-8):
    scale = norm(jet.phi_u) * norm(jet.phi_v)
    return bool(np.all(symplectic_residual(jet) <= tol * np.maximum(scale, 1.0)))


@dataclass(frozen=True)
class LagrangianData:
    beta: np.ndarray        # Lagrangian angle, principal value in (-pi, pi]
    dbeta: np.ndarray       # (..., 2) parameter derivatives of beta
    cubic: np.ndarray       # (..., 2, 2, 2) C_ijk = <sigma_ij, J phi_k>
    angle_residual: np.ndarray  # |H - J grad beta|
    div_jh: Optional[np.ndarray] = None

    def cubic_symmetry_defect(self):
        C = self.cubic
        perms = [(0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)]
        ax = C.ndim - 3
        worst = np.zeros(C.shape[:-3])
        for p in perms[1:]:
            Cp = np.transpose(C, tuple(range(ax)) + tuple(ax + q for q in p))
            worst = np.maximum(worst, np.max(np.abs(C - Cp), axis=(-3, -2, -1)))
        return worst


def lagrangian_data(jet, fd=None, tol=1e-8):
    """Lagrangian angle, its differential and the cubic form at each point.

    The angle is ``beta = arg dz1^dz2(phi_u, phi_v)``. With this choice
    ``H = J grad beta`` holds (checked on the Clifford torus, where
    ``beta = 2t - pi/2``), so ``alpha_H = <JH, .> = -d beta``.

    Raises:
        NotLagrangianError: if omega(phi_u, phi_v) exceeds ``tol``.
    """
    if fd is None:
        fd = fundamental_data(jet)
    if not is_lagrangian(jet, tol):
        raise NotLagrangianError(
            f"max |omega(phi_u, phi_v)| = {float(np.max(symplectic_residual(jet))):.3e}")
    D = complex_det(jet.phi_u, jet.phi_v)
    dD_u = complex_det(jet.phi_uu, jet.phi_v) + complex_det(jet.phi_u, jet.phi_uv)
    dD_v = complex_det(jet.phi_uv, jet.phi_v) + complex_det(jet.phi_u, jet.phi_vv)
    dbeta = np.stack([np.imag(dD_u / D), np.imag(dD_v / D)], -1)

    up = np.einsum("...ij,...j->...i", fd.g_inv, dbeta)
    grad_beta = up[..., 0:1] * jet.phi_u + up[..., 1:2] * jet.phi_v
    angle_residual = norm(fd.H - J(grad_beta))

    Jt = np.stack([J(jet.phi_u), J(jet.phi_v)], -2)
    cubic = np.einsum("...ijx,...kx->...ijk", fd.sigma, Jt)
    return LagrangianData(beta=np.angle(D), dbeta=dbeta, cubic=cubic,
                          angle_residual=angle_residual)


def _frame_norm(jet, g, images):
    """Operator norm of a linear map T -> R^4 given its values on phi_u, phi_v."""
    E, F, G = g[..., 0, 0], g[..., 0, 1], g[..., 1, 1]
    # orthonormal frame e1 = phi_u/|phi_u|, e2 = (phi_v - proj)/|...|
    sE = np.sqrt(E)
    a = 1.0 / sE
    b = -F / E
    h = np.sqrt(G - F * F / E)
    L1 = a[..., None] * images[0]
    L2 = (images[1] + b[..., None] * images[0]) / h[..., None]
    M = np.stack([L1, L2], -1)
    return np.linalg.norm(M, ord=2, axis=(-2, -1))


def structure_residuals(jet, fd, dH, dphi_top):
    """Residuals of the tangent and normal structure equations of a self-shrinker.

    Args:
        jet, fd: pointwise data.
        dH: pair of ambient derivatives (dH/du, dH/dv).
        dphi_top: pair of ambient derivatives of the tangent part of phi.

    Returns:
        ``(tangent, normal)``: operator norms over unit tangent directions of
        ``v -> A_H v - v + nabla_v phi_top`` and ``v -> nabla_perp_v H - sigma(v, phi_top)``.
    """
    g = fd.g
    c1, c2 = tangent_coordinates(jet.phi, jet, g)
    tang_images, norm_images = [], []
    for i, phi_i in enumerate(jet.tangents):
        dH_top, dH_perp = split_tangent_normal(dH[i], jet, g)
        dT_top, _ = split_tangent_normal(dphi_top[i], jet, g)
        A_H = -dH_top
        tang_images.append(A_H - phi_i + dT_top)
        sig = c1[..., None] * fd.sigma[..., i, 0, :] + c2[..., None] * fd.sigma[..., i, 1, :]
        norm_images.append(dH_perp - sig)
    return _frame_norm(jet, g, tang_images), _frame_norm(jet, g, norm_images)


def spherical_decomposition(jet, fd=None, tol=1e-8):
    """Split sigma into the part tangent to S^3(sqrt 2) and the umbilic sphere part.

    Returns ``(sigma_hat2, defect)`` where ``defect = | |sigma|^2 - 1 - |sigma_hat|^2 |``.

    Raises:
        NotSphericalError: if | |phi|^2 - 2 | > tol at some point.
    """
    if fd is None:
        fd = fundamental_data(jet)
    phi2 = inner(jet.phi, jet.phi)
    if np.any(np.abs(phi2 - 2.0) > tol):
        raise NotSphericalError(f"max | |phi|^2 - 2 | = {float(np.max(np.abs(phi2 - 2.0))):.3e}")
    hat = fd.sigma + 0.5 * fd.g[..., None] * jet.phi[..., None, None, :]
    gram = np.einsum("...ijk,...lmk->...ijlm", hat, hat)
    hat2 = np.einsum("...il,...jm,...ijlm->...", fd.g_inv, fd.g_inv, gram)
    return hat2, np.abs(fd.sigma2 - 1.0 - hat2)
