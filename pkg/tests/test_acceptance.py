"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

The lines are also collected into an "acceptance criteria" section of the
pytest terminal summary.
"""

import json
import math
import subprocess
import sys
from fractions import Fraction

import numpy as np
import pytest

from shrinktori import curves as C
from shrinktori import geom
from shrinktori import grid as G
from shrinktori import verify as V
from shrinktori.errors import InadmissibleParameterError

from conftest import record


@pytest.fixture(scope="module")
def samples(clifford, lee_wang12, lawson2, anciaux13, al35):
    return {"Clifford": clifford, "Lee-Wang(1,2)": lee_wang12, "Lawson(2)": lawson2,
            "Anciaux(1,3)": anciaux13, "AL(3,5)xcircle": al35}


ANALYTIC = ("Clifford", "Lee-Wang(1,2)", "Lawson(2)")
ODE = ("Anciaux(1,3)", "AL(3,5)xcircle")


def _fmt(values):
    return ", ".join(f"{k} {v:.1e}" for k, v in values.items())


def test_criterion_01_shrinker_residual(samples):
    res = {k: float(np.max(geom.shrinker_residual(s.jet, s.fd))) for k, s in samples.items()}
    ok = all(res[k] < 1e-8 for k in ANALYTIC) and all(res[k] < 1e-6 for k in ODE)
    assert record(1, ok, f"max|H + phi_perp|: {_fmt(res)}")


def test_criterion_02_willmore(samples, clifford):
    dev = {k: abs(G.willmore_check(s)[2] - 2.0) for k, s in samples.items()}
    w, a, _ = G.willmore_check(clifford)
    exact = max(abs(w / (16 * math.pi ** 2) - 1), abs(a / (8 * math.pi ** 2) - 1))
    ok = (all(dev[k] < 1e-6 for k in ANALYTIC) and all(dev[k] < 1e-5 for k in ODE)
          and exact < 1e-8)
    assert record(2, ok, f"|W/A - 2|: {_fmt(dev)}; Clifford 16pi^2, 8pi^2 rel {exact:.1e}")


def test_criterion_03_gauss_bonnet(samples):
    out = {k: G.gauss_bonnet(s) for k, s in samples.items()}
    ok = all(g == 1 and r < 1e-4 for _, g, r in out.values())
    detail = ", ".join(f"{k} g={g} res {r:.1e}" for k, (_, g, r) in out.items())
    assert record(3, ok, detail)


def test_criterion_04_closed_forms(samples):
    errs = {}
    # Abresch-Langer product: |H|^2 = |sigma|^2 = rho1^2 e^{r1^2} + rho2^2 e^{r2^2}
    s = samples["AL(3,5)xcircle"]
    rho1, rho2 = (c.family.constant for c in s.immersion.curves)
    z = geom.to_complex(s.jet.phi)
    al = rho1 ** 2 * np.exp(np.abs(z[..., 0]) ** 2) + rho2 ** 2 * np.exp(np.abs(z[..., 1]) ** 2)
    errs["AL H2"] = np.max(np.abs(s.fd.H2 - al))
    errs["AL sigma2"] = np.max(np.abs(s.fd.sigma2 - al))
    # Anciaux: |H|^2 = E^2 e^{r^2} / r^2, |sigma|^2 = E^2 e^{r^2} (r^4 - 2r^2 + 4) / r^6, r = |phi|
    s = samples["Anciaux(1,3)"]
    E2 = s.immersion.family.constant ** 2
    r2 = geom.inner(s.jet.phi, s.jet.phi)
    errs["Anciaux H2"] = np.max(np.abs(s.fd.H2 - E2 * np.exp(r2) / r2))
    errs["Anciaux sigma2"] = np.max(np.abs(s.fd.sigma2 - E2 * np.exp(r2) * (r2 ** 2 - 2 * r2 + 4) / r2 ** 3))
    # Lee-Wang (1,2): |H|^2 = (m + n) / (n cos^2 u + m sin^2 u)
    s = samples["Lee-Wang(1,2)"]
    U, _ = s.grid.mesh()
    errs["Lee-Wang H2"] = np.max(np.abs(s.fd.H2 - 3 / (2 * np.cos(U) ** 2 + np.sin(U) ** 2)))
    # Lawson alpha = 2: |sigma|^2 = 1 + alpha^2 / (alpha^2 cos^2 u + sin^2 u)^2
    s = samples["Lawson(2)"]
    U, _ = s.grid.mesh()
    errs["Lawson sigma2"] = np.max(np.abs(s.fd.sigma2 - 1 - 4 / (4 * np.cos(U) ** 2 + np.sin(U) ** 2) ** 2))
    ok = all(e < 1e-6 for e in errs.values())
    assert record(4, ok, f"max |numeric - formula|: {_fmt(errs)}")


def test_criterion_05_bounds_attained(lee_wang12, lawson2):
    targets = {
        ("Lee-Wang", "H2"): (lee_wang12.fd.H2, Fraction(3, 2), Fraction(3)),
        ("Lee-Wang", "sigma2"): (lee_wang12.fd.sigma2, Fraction(7, 6), Fraction(13, 3)),
        ("Lee-Wang", "K"): (lee_wang12.fd.K, Fraction(-2, 3), Fraction(1, 6)),
        ("Lawson", "sigma2"): (lawson2.fd.sigma2, Fraction(5, 4), Fraction(5)),
    }
    reach = violate = 0.0
    for field, lo, hi in targets.values():
        reach = max(reach, abs(field.min() - lo), abs(field.max() - hi))
        violate = max(violate, float(lo) - field.min(), field.max() - float(hi))
    ok = reach < 1e-4 and violate <= 1e-9
    assert record(5, ok, f"endpoint gap {reach:.1e} (< 1e-4), worst violation {max(violate, 0):.1e}")


def test_criterion_06_lagrangian_detection(zoo):
    keys = {"AL(3,5)xcircle": "abresch-langer(p=3,q=5)", "AL circle": "abresch-langer()",
            "Anciaux(1,3)": "anciaux(p=1,q=3)", "Anciaux circle": "anciaux()",
            "Lee-Wang(1,2)": "lee-wang(m=1,n=2)", "Lee-Wang(2,3)": "lee-wang(m=2,n=3)",
            "Lawson(1)": "lawson(alpha=1/1)"}
    res = {k: zoo[v].residuals["symplectic"] for k, v in keys.items()}
    lawson2 = zoo["lawson(alpha=2/1)"].residuals["symplectic"]
    ok = all(r < 1e-10 for r in res.values()) and abs(lawson2 - 1) < 1e-8
    assert record(6, ok, f"max|omega|: {_fmt(res)}; Lawson(2) {lawson2:.12f}")


def test_criterion_07_shooting(anciaux13, al35):
    al_curve = al35.immersion.curves[0]
    anc_curve = anciaux13.immersion.curve
    checks = {}
    for name, curve, target in (("AL 3/5", al_curve, Fraction(3, 5)), ("Anciaux 1/3", anc_curve, Fraction(1, 3))):
        checks[name] = (abs(curve.rotation_number - float(target)), curve.closure_error, curve.drift)
    try:
        C.shoot_closed(C.ABRESCH_LANGER, 1, 1)
        rejected = False
    except InadmissibleParameterError:
        rejected = True
    ok = rejected and all(r < 1e-10 and c < 1e-6 and d < 1e-9 for r, c, d in checks.values())
    detail = "; ".join(f"{k}: rot err {r:.1e}, closure {c:.1e}, drift {d:.1e}" for k, (r, c, d) in checks.items())
    assert record(7, ok, f"{detail}; AL 1/1 rejected: {rejected}")


def test_criterion_08_gap_bound_table():
    table = [V.theorem_a_bound(p) for p in (1, 2, 3)]
    ok = table == [1, 2, Fraction(5, 3)] and all(isinstance(x, Fraction) for x in table)
    assert record(8, ok, f"bounds for p = 1, 2, 3: {', '.join(str(x) for x in table)}")


def test_criterion_09_mean_curvature_straddles_two(samples):
    ranges = {k: (float(s.fd.H2.min()), float(s.fd.H2.max())) for k, s in samples.items() if k != "Clifford"}
    straddle = {k: lo < 2 - 1e-3 and hi > 2 + 1e-3 for k, (lo, hi) in ranges.items()}
    detail = ", ".join(f"{k} [{lo:.4f}, {hi:.4f}]" for k, (lo, hi) in ranges.items())
    record(9, all(straddle.values()),
           f"|H|^2 ranges {detail}; Lawson(2) has |H|^2 = 2 identically (minimal in S^3), "
           "so its part cannot hold" if not straddle["Lawson(2)"] else f"|H|^2 ranges {detail}")
    # the Lagrangian members, to which the rigidity statement applies, all straddle 2
    assert all(v for k, v in straddle.items() if k != "Lawson(2)")


@pytest.mark.xfail(strict=True, reason="Lawson tori have |H|^2 = 2 everywhere; unattainable")
def test_criterion_09_lawson_part(lawson2):
    lo, hi = float(lawson2.fd.H2.min()), float(lawson2.fd.H2.max())
    assert lo < 2 - 1e-3 and hi > 2 + 1e-3


def test_criterion_10_structure_identities(samples):
    lagrangian = [k for k in samples if k != "Lawson(2)"]
    worst = {}
    for k in lagrangian:
        s = samples[k]
        t, n = G.structure_residuals(s)
        worst[k] = max(float(np.max(t)), float(np.max(n)), float(np.max(G.div_jh(s)[2])))
    lap = {k: float(np.max(np.abs(np.subtract(*G.squared_norm_laplacian(s))))) for k, s in samples.items()}
    lw_div = float(np.max(np.abs(G.div_jh(samples["Lee-Wang(1,2)"])[0])))
    ok = all(w < 1e-6 for w in worst.values()) and all(v < 1e-5 for v in lap.values()) and lw_div < 1e-8
    assert record(10, ok, f"structure/div residuals: {_fmt(worst)}; Laplacian worst "
                          f"{max(lap.values()):.1e}; Lee-Wang max|div JH| {lw_div:.1e}")


def test_criterion_11_maslov(samples, clifford):
    periods = {k: G.maslov_periods(s) for k, s in samples.items() if k != "Lawson(2)"}
    nontrivial = {k: max(abs(p) for p in ps) > 1e-3 for k, ps in periods.items()}
    pu, pv = periods["Clifford"]
    clifford_ok = abs(pu) < 1e-8 and abs(abs(pv) - 4 * math.pi) < 1e-8
    ok = all(nontrivial.values()) and clifford_ok
    detail = ", ".join(f"{k} ({a / math.pi:+.4f}pi, {b / math.pi:+.4f}pi)" for k, (a, b) in periods.items())
    assert record(11, ok, f"periods {detail}")


def test_criterion_12_classifier(zoo):
    contradictions = [k for k, r in zoo.items() if not r.consistent]
    concluded = sorted(k for k, r in zoo.items() if r.conclusion == V.CLIFFORD)
    expected = sorted(["clifford()", "lee-wang(m=1,n=1)", "lawson(alpha=1/1)", "anciaux()", "abresch-langer()"])
    ok = not contradictions and concluded == expected
    assert record(12, ok, f"{len(zoo)} samples, {len(contradictions)} contradictions, "
                          f"Clifford concluded for {', '.join(concluded)}")


def test_criterion_13_determinism():
    cmd = [sys.executable, "-m", "shrinktori", "verify", "--family", "clifford", "-q"]
    runs = [subprocess.run(cmd, capture_output=True, check=False) for _ in range(2)]
    same = runs[0].stdout == runs[1].stdout and runs[0].returncode == runs[1].returncode == 0
    ok = same and json.loads(runs[0].stdout)["conclusion"] == V.CLIFFORD
    assert record(13, ok, f"two process runs, {len(runs[0].stdout)} bytes each, identical: {same}")
