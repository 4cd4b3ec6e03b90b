import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shrinktori import geom, tori
from shrinktori import grid as G
from shrinktori.errors import (AperiodicInputError, DegenerateJetError, GridMismatchError,
                               NotLagrangianError)


def _trig_poly(seed, n, period, degree):
    rng = np.random.default_rng(seed)
    k = np.arange(1, degree + 1)
    a, b = rng.normal(size=(2, degree))
    x = np.arange(n) * period / n
    w = 2 * np.pi * k[:, None] / period
    f = a @ np.cos(w * x) + b @ np.sin(w * x)
    df = a @ (-w * np.sin(w * x)) + b @ (w * np.cos(w * x))
    d2f = -(a @ (w ** 2 * np.cos(w * x)) + b @ (w ** 2 * np.sin(w * x)))
    return f, df, d2f


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 31), st.sampled_from([16, 32, 64]), st.floats(0.5, 20.0))
def test_spectral_derivative_exact_on_band_limited(seed, n, period):
    f, df, d2f = _trig_poly(seed, n, period, n // 2 - 1)
    scale = 1 + np.max(np.abs(d2f))
    assert np.max(np.abs(G.spectral_derivative(f, period, 0) - df)) < 1e-10 * scale
    assert np.max(np.abs(G.spectral_derivative(f, period, 0, 2) - d2f)) < 1e-10 * scale


def test_spectral_derivative_along_second_axis():
    f, df, _ = _trig_poly(3, 32, 2 * np.pi, 10)
    field = np.tile(f, (6, 1))
    assert np.allclose(G.spectral_derivative(field, 2 * np.pi, 1), np.tile(df, (6, 1)), atol=1e-11)


def test_grid_validation():
    with pytest.raises(ValueError):
        G.PeriodicGrid((1.0, 1.0), (7, 8))
    with pytest.raises(ValueError):
        G.PeriodicGrid((0.0, 1.0), (8, 8))
    grid = G.PeriodicGrid((2.0, 4.0), (8, 16))
    assert grid.spacing == (0.25, 0.25)
    U, V = grid.mesh()
    assert U.shape == (8, 16) and U[1, 0] == 0.25 and V[0, 1] == 0.25


def test_clifford_spectral_jet_matches_symbolic(clifford64):
    imm = tori.build("clifford")
    grid = clifford64.grid
    exact = imm.jet(grid)
    spectral = G.spectral_jet(exact.phi, grid)
    for name in ("phi_u", "phi_v", "phi_uu", "phi_uv", "phi_vv"):
        assert np.max(np.abs(getattr(spectral, name) - getattr(exact, name))) < 1e-10, name


def test_tabulated_immersion_roundtrip(clifford64):
    tab = G.TabulatedImmersion(clifford64.jet.phi, clifford64.grid.periods)
    surface = G.sample(tab)
    assert not surface.analytic
    assert np.max(np.abs(surface.fd.H2 - 2)) < 1e-10


def test_constant_map_is_degenerate():
    tab = G.TabulatedImmersion(np.ones((16, 16, 4)), (2 * np.pi, 2 * np.pi))
    with pytest.raises(DegenerateJetError):
        G.sample(tab)


def test_aperiodic_input_rejected():
    lw = tori.build("lee-wang", m=1, n=2)
    with pytest.raises(AperiodicInputError):
        G.sample(lw, G.PeriodicGrid((2 * np.pi, 2 * np.pi), (32, 32)))


def test_grid_mismatch(clifford64):
    with pytest.raises(GridMismatchError):
        G.integrate(np.ones((8, 8)), clifford64)
    with pytest.raises(GridMismatchError):
        G.spectral_jet(np.ones((8, 8, 4)), clifford64.grid)
    band = G.sample(tori.build("sphere"))
    with pytest.raises(GridMismatchError):
        G.area(band)


def test_clifford_integrals(clifford):
    assert G.area(clifford) == pytest.approx(8 * math.pi ** 2, rel=1e-12)
    w, a, ratio = G.willmore_check(clifford)
    assert w == pytest.approx(16 * math.pi ** 2, rel=1e-12)
    assert ratio == pytest.approx(2.0, abs=1e-12)
    total, genus, residual = G.gauss_bonnet(clifford)
    assert abs(total) < 1e-12 and genus == 1 and residual < 1e-10


def test_clifford_laplacian_identity_both_sides_vanish(clifford64):
    lhs, rhs = G.squared_norm_laplacian(clifford64)
    assert np.max(np.abs(lhs)) < 1e-10 and np.max(np.abs(rhs)) < 1e-12


def test_divergence_theorem(lee_wang12):
    rng = np.random.default_rng(1)
    U, V = lee_wang12.grid.mesh()
    a, b, c = rng.normal(size=3)
    f = a * np.cos(U) * np.sin(V / math.sqrt(2)) + b * np.sin(2 * U) + c * np.cos(2 * V / math.sqrt(2))
    div = G.divergence(G.gradient(f, lee_wang12), lee_wang12)
    assert np.allclose(div, G.laplace_beltrami(f, lee_wang12), atol=1e-9)
    assert abs(G.integrate(div, lee_wang12)) < 1e-9


def test_brioschi_converges_under_refinement():
    lawson = tori.build("lawson", alpha="2/1")
    errors = []
    for n in (16, 32, 64):
        surface = G.sample(lawson, lawson.default_grid(n))
        errors.append(np.max(np.abs(G.intrinsic_gauss_curvature(surface) - surface.fd.K)))
    assert errors[0] > errors[1] > errors[2] or errors[2] < 1e-12
    assert errors[2] < 1e-8


def test_willmore_ratio_converges_under_refinement():
    imm = tori.build("lee-wang", m=2, n=3)
    ratios = [G.willmore_check(G.sample(imm, imm.default_grid(n)))[2] for n in (8, 16, 32)]
    assert abs(ratios[2] - 2) <= abs(ratios[0] - 2) + 1e-14
    assert abs(ratios[2] - 2) < 1e-12


def test_lee_wang_structure_and_div_jh(lee_wang12):
    tangent, normal = G.structure_residuals(lee_wang12)
    assert np.max(tangent) < 1e-8 and np.max(normal) < 1e-8
    lhs, rhs, diff = G.div_jh(lee_wang12)
    assert np.max(np.abs(lhs)) < 1e-8 and np.max(diff) < 1e-8


def test_clifford_maslov_periods(clifford):
    pu, pv = G.maslov_periods(clifford)
    assert pu == pytest.approx(0.0, abs=1e-8)
    assert pv == pytest.approx(-4 * math.pi, abs=1e-8)


@pytest.mark.parametrize("base", [(0, 0), (5, 17), (40, 101)])
def test_maslov_periods_independent_of_base_line(lee_wang12, base):
    ref = G.maslov_periods(lee_wang12)
    assert G.maslov_periods(lee_wang12, base) == pytest.approx(ref, abs=1e-10)
    assert G.maslov_period_spread(lee_wang12) < 1e-10


def test_maslov_requires_lagrangian(lawson2):
    with pytest.raises(NotLagrangianError):
        G.maslov_periods(lawson2)
    with pytest.raises(NotLagrangianError):
        G.div_jh(lawson2)


def test_unwrapped_angle_winds_with_the_maslov_period(clifford):
    beta = G.unwrapped_angle(clifford)
    _, dv = clifford.grid.spacing
    # beta = 2v - pi/2 continues past the last node to 4 pi above the start
    assert beta[0, -1] + 2 * dv - beta[0, 0] == pytest.approx(4 * math.pi, abs=1e-10)
    assert np.allclose(np.diff(beta, axis=1), 2 * dv, atol=1e-12)
    assert np.allclose(beta - beta[0], 0.0, atol=1e-12)


@pytest.mark.parametrize("name,params", [("lee-wang", {"m": 1, "n": 2}), ("lawson", {"alpha": "3/2"})])
def test_default_resolution_agrees_with_256(name, params):
    imm = tori.build(name, **params)
    coarse, fine = (G.sample(imm, imm.default_grid(n)) for n in (128, 256))
    for a, b in ((G.area(coarse), G.area(fine)), (G.willmore_check(coarse)[0], G.willmore_check(fine)[0]),
                 (G.gauss_bonnet(coarse)[0], G.gauss_bonnet(fine)[0])):
        assert a == pytest.approx(b, rel=1e-10, abs=1e-10)
    # every other fine node is a coarse node
    assert np.allclose(fine.fd.sigma2[::2, ::2], coarse.fd.sigma2, atol=1e-12)
