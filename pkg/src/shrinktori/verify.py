"""Run the identity suite on a sampled surface and evaluate the rigidity hypotheses."""

import json
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional

import numpy as np

from . import geom
from . import grid as G
from .errors import NotLagrangianError, ShrinkToriError

logger = logging.getLogger(__name__)

CLIFFORD = "Clifford torus"
TORUS_SIGMA2 = "torus with |sigma|^2 = 2"
SPHERE = "round sphere S^2(sqrt 2)"
NO_RIGIDITY = "no rigidity applies"
NOT_SHRINKER = "not a self-shrinker"
WITHHELD = "withheld (band sample)"

# rigidity rules of the decision ladder
RULE_MEAN_CURVATURE = "Lagrangian with |H|^2 one-sided or constant"
RULE_SECOND_FORM = "Lagrangian with |sigma|^2 <= 2"
RULE_GAP = "|sigma|^2 below the codimension gap"

MASLOV_THRESHOLD = 1e-3

RESIDUAL_KEYS = ("shrinker", "symplectic", "laplacian", "structure_tangent",
                 "structure_normal", "div_jh", "cubic_symmetry")
RANGE_KEYS = ("H2", "sigma2", "K", "phi2")
INTEGRAL_KEYS = ("area", "willmore", "total_curvature", "gb_residual")


def theorem_a_bound(p):
    """Gap (3p - 4)/(2p - 3) on |sigma|^2 for a compact self-shrinker of codimension p."""
    if int(p) != p or p < 1:
        raise ValueError(f"codimension must be a positive integer, got {p!r}")
    return Fraction(3 * p - 4, 2 * p - 3)


@dataclass(frozen=True)
class Tolerances:
    zero: float = 1e-8            # pointwise identities (shrinker, cubic symmetry, angle)
    lagrangian: float = 1e-8      # omega(phi_u, phi_v), relative to |phi_u||phi_v|
    derivative: float = 1e-6      # structure equations and div JH identity
    laplacian: float = 1e-5
    willmore: float = 1e-6
    gauss_bonnet: float = 1e-4
    closed_form: float = 1e-6
    bound_slack: float = 1e-9
    constant: float = 1e-6        # relative spread that still counts as constant
    stationary: float = 1e-8      # max |div JH| for Hamiltonian stationarity

    @classmethod
    def for_surface(cls, surface, zero=None):
        if surface.analytic:
            t = cls()
        else:
            t = cls(zero=1e-6, willmore=1e-5, stationary=1e-6)
        if zero is not None:
            t = Tolerances(**{**t.__dict__, "zero": zero})
        return t


@dataclass
class HypothesisFlags:
    values: Dict[str, bool]
    margins: Dict[str, Optional[float]]

    def __getitem__(self, key):
        return self.values[key]

    def to_dict(self):
        return {k: {"holds": self.values[k], "margin": self.margins.get(k)} for k in self.values}


@dataclass
class VerificationReport:
    family: str
    params: dict
    grid: dict
    residuals: Dict[str, Optional[float]]
    ranges: Dict[str, List[float]]
    integrals: Dict[str, Optional[float]]
    genus: Optional[int]
    maslov: Optional[List[float]]
    flags: Optional[HypothesisFlags] = None
    conclusion: Optional[str] = None
    consistent: Optional[bool] = None
    failures: List[str] = field(default_factory=list)
    # not serialized: ground truth and auxiliary diagnostics
    closed: bool = True
    truth: dict = field(default_factory=dict)
    diagnostics: Dict[str, float] = field(default_factory=dict)
    rule: Optional[str] = None       # which rigidity rule produced the conclusion

    def to_dict(self):
        na = lambda x: "n/a" if x is None else x
        return {
            "family": self.family,
            "params": dict(self.params),
            "grid": dict(self.grid),
            "residuals": {k: na(self.residuals.get(k)) for k in RESIDUAL_KEYS},
            "ranges": {k: self.ranges[k] for k in RANGE_KEYS},
            "integrals": {k: na(self.integrals.get(k)) for k in INTEGRAL_KEYS},
            "genus": na(self.genus),
            "maslov": na(self.maslov),
            "flags": self.flags.to_dict() if self.flags else {},
            "conclusion": self.conclusion,
            "consistent": self.consistent,
            "failures": list(self.failures),
        }


def _fmt(x):
    if isinstance(x, bool):
        return "true" if x else "false"
    if x is None:
        return "null"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return format(x, ".17g") if math.isfinite(x) else "null"
    return json.dumps(x)


def to_json(obj, indent=2, _level=0):
    """Deterministic JSON: insertion key order, floats with 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, VerificationReport):
        obj = obj.to_dict()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {to_json(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        return "[" + ", ".join(to_json(v, indent, _level + 1) for v in obj) + "]"
    return _fmt(obj)


# -- suite -------------------------------------------------------------------

def _max(a):
    return float(np.max(a))


def _check(report, name, value, tol):
    if value is not None and not value <= tol:
        report.failures.append(f"{name}: {value:.3e} exceeds {tol:.1e}")


def run_suite(surface, tol=None, zero_tol=None):
    """Evaluate every residual, range and integral on ``surface``.

    Checks that need a closed grid or a Lagrangian surface are reported as not
    applicable when their precondition fails. An exception inside one check is
    recorded in ``failures`` and does not stop the others.
    """
    imm = surface.immersion
    tol = tol or Tolerances.for_surface(surface, zero_tol)
    jet, fd, grid = surface.jet, surface.fd, surface.grid
    closed = grid.closed
    report = VerificationReport(
        family=getattr(imm, "name", "unknown"), params=dict(getattr(imm, "params", {})),
        grid={"nu": grid.shape[0], "nv": grid.shape[1],
              "Tu": float(grid.periods[0]), "Tv": float(grid.periods[1])},
        residuals=dict.fromkeys(RESIDUAL_KEYS), ranges={}, integrals=dict.fromkeys(INTEGRAL_KEYS),
        genus=None, maslov=None, closed=closed,
        truth={"clifford": bool(getattr(imm, "is_clifford", False)),
               "sphere": getattr(imm, "name", "") == "sphere",
               "shrinker": getattr(imm, "name", "") != "scaled-clifford"})
    res, diag = report.residuals, report.diagnostics

    def attempt(name, fn):
        try:
            fn()
        except ShrinkToriError as exc:
            report.failures.append(f"{name}: {type(exc).__name__}: {exc}")

    phi2 = geom.inner(jet.phi, jet.phi)
    for key, arr in (("H2", fd.H2), ("sigma2", fd.sigma2), ("K", fd.K), ("phi2", phi2)):
        report.ranges[key] = [float(np.min(arr)), float(np.max(arr))]

    res["shrinker"] = _max(geom.shrinker_residual(jet, fd))
    res["symplectic"] = _max(geom.symplectic_residual(jet))
    lagrangian = geom.is_lagrangian(jet, tol.lagrangian)
    scale = np.maximum(geom.norm(jet.phi_u) * geom.norm(jet.phi_v), 1.0)
    diag["symplectic_relative"] = _max(geom.symplectic_residual(jet) / scale)
    diag["normal_defect"] = _max(geom.normal_defect(jet, fd))
    _check(report, "shrinker", res["shrinker"], tol.zero)

    div_max = None
    if lagrangian:
        def lag():
            ld = geom.lagrangian_data(jet, fd, tol.lagrangian)
            res["cubic_symmetry"] = _max(ld.cubic_symmetry_defect())
            diag["angle"] = _max(ld.angle_residual)
            _check(report, "cubic_symmetry", res["cubic_symmetry"], tol.zero)
            _check(report, "angle", diag["angle"], tol.zero)
        attempt("lagrangian_data", lag)

    if closed:
        def lap():
            lhs, rhs = G.squared_norm_laplacian(surface)
            res["laplacian"] = _max(np.abs(lhs - rhs))
            _check(report, "laplacian", res["laplacian"], tol.laplacian)
        attempt("laplacian", lap)

        def intrinsic():
            diag["intrinsic_K"] = _max(np.abs(G.intrinsic_gauss_curvature(surface) - fd.K))
        attempt("intrinsic_K", intrinsic)

        if lagrangian:
            def structure():
                t, n = G.structure_residuals(surface)
                res["structure_tangent"], res["structure_normal"] = _max(t), _max(n)
                _check(report, "structure_tangent", res["structure_tangent"], tol.derivative)
                _check(report, "structure_normal", res["structure_normal"], tol.derivative)
            attempt("structure", structure)

            def divjh():
                nonlocal div_max
                lhs, _, diff = G.div_jh(surface)
                res["div_jh"] = _max(diff)
                div_max = _max(np.abs(lhs))
                diag["div_jh_max"] = div_max
                _check(report, "div_jh", res["div_jh"], tol.derivative)
            attempt("div_jh", divjh)

            def maslov():
                report.maslov = list(G.maslov_periods(surface))
                diag["maslov_spread"] = G.maslov_period_spread(surface)
            attempt("maslov", maslov)

        def integrals():
            w, a, ratio = G.willmore_check(surface)
            report.integrals["area"], report.integrals["willmore"] = a, w
            diag["willmore_ratio"] = ratio
            _check(report, "willmore_ratio", abs(ratio - 2.0), tol.willmore)
            total, genus, gb = G.gauss_bonnet(surface)
            report.integrals["total_curvature"] = total
            report.integrals["gb_residual"] = gb
            report.genus = genus
            _check(report, "gb_residual", gb, tol.gauss_bonnet)
        attempt("integrals", integrals)

    def closed_forms():
        worst = 0.0
        values = {"H2": fd.H2, "sigma2": fd.sigma2, "K": fd.K, "phi2": phi2}
        for key, ref in imm.closed_forms(grid).items():
            worst = max(worst, _max(np.abs(values[key] - ref)))
        diag["closed_form"] = worst
        _check(report, "closed_form", worst, tol.closed_form)
        violation = 0.0
        for key, (lo, hi) in imm.bounds().items():
            below, above = lo - float(np.min(values[key])), _max(values[key]) - hi
            _check(report, f"bound {key} >= {lo:.17g}", below, tol.bound_slack)
            _check(report, f"bound {key} <= {hi:.17g}", above, tol.bound_slack)
            violation = max(violation, below, above)
        diag["bound_violation"] = max(violation, 0.0)
    if imm is not None and hasattr(imm, "closed_forms"):
        attempt("closed_forms", closed_forms)

    report.flags = hypothesis_flags(report, tol, lagrangian, div_max)
    classify(report, tol)
    return report


def hypothesis_flags(report, tol, lagrangian, div_max=None):
    """Threshold booleans for the rigidity hypotheses, each with its signed margin."""
    (h_lo, h_hi), (s_lo, s_hi) = report.ranges["H2"], report.ranges["sigma2"]
    (k_lo, k_hi), (p_lo, p_hi) = report.ranges["K"], report.ranges["phi2"]
    t = tol.zero
    gap = float(theorem_a_bound(2))
    margins = {
        "lagrangian": tol.lagrangian - report.diagnostics["symplectic_relative"],
        "orientable": None,
        "spherical": t - max(abs(p_lo - 2.0), abs(p_hi - 2.0)),
        "h2_constant": tol.constant * max(1.0, h_hi) - (h_hi - h_lo),
        "h2_le_2": 2.0 + t - h_hi,
        "h2_ge_2": h_lo - (2.0 - t),
        "sigma2_le_2": 2.0 + t - s_hi,
        "sigma2_le_gap": gap + t - s_hi,
        "K_nonneg": k_lo + t,
        "K_nonpos": t - k_hi,
        "hamiltonian_stationary": None if div_max is None else tol.stationary - div_max,
    }
    values = {k: m is not None and m >= 0 for k, m in margins.items()}
    values["lagrangian"] = bool(lagrangian)
    values["orientable"] = True   # every family here is a parametrized torus or a band
    flags = HypothesisFlags(values=values, margins=margins)
    if flags["h2_constant"] and not (flags["h2_le_2"] or flags["h2_ge_2"]):
        logger.warning("h2_constant holds but neither h2_le_2 nor h2_ge_2 does")
    return flags


def classify(report, tol=None):
    """Apply the decision ladder and set ``conclusion``, ``rule`` and ``consistent``.

    The ladder only checks hypotheses; it never proves anything. Consistency
    compares the conclusion with what is known about the sampled family.
    """
    if report.flags is None:
        raise ValueError("report has no hypothesis flags; run run_suite first")
    tol = tol or Tolerances()
    f = report.flags
    truth = report.truth
    h_hyp = f["h2_constant"] or f["h2_le_2"] or f["h2_ge_2"]

    if report.residuals["shrinker"] > max(tol.zero, 1e-6):
        conclusion, rule = NOT_SHRINKER, None
    elif not report.closed:
        conclusion, rule = WITHHELD, None
    elif f["lagrangian"] and h_hyp:
        conclusion, rule = CLIFFORD, RULE_MEAN_CURVATURE
    elif f["lagrangian"] and f["sigma2_le_2"]:
        rule = RULE_SECOND_FORM
        conclusion = CLIFFORD if (f["K_nonneg"] or f["K_nonpos"]) else TORUS_SIGMA2
    elif h_hyp and f["sigma2_le_gap"]:
        rule = RULE_GAP
        conclusion = SPHERE if report.ranges["sigma2"][1] <= 1.0 + tol.zero else CLIFFORD
    else:
        conclusion, rule = NO_RIGIDITY, None

    if conclusion == NOT_SHRINKER:
        consistent = not truth.get("shrinker", True)
    elif conclusion == WITHHELD:
        consistent = not truth.get("clifford", False)
    elif conclusion == SPHERE:
        consistent = truth.get("sphere", False)
    elif conclusion == TORUS_SIGMA2:
        s_lo, s_hi = report.ranges["sigma2"]
        consistent = not truth.get("clifford") and s_hi - s_lo <= tol.constant * s_hi
    else:
        consistent = (conclusion == CLIFFORD) == truth.get("clifford", False)

    report.conclusion, report.rule, report.consistent = conclusion, rule, bool(consistent)
    if not consistent:
        report.failures.append(f"classification: {conclusion!r} contradicts the sampled family")
    return conclusion, report.consistent


def maslov_nontriviality(report, threshold=MASLOV_THRESHOLD):
    """True iff some Maslov period has magnitude above ``threshold``.

    Raises:
        NotLagrangianError: if the report is for a non-Lagrangian surface.
    """
    if not report.flags["lagrangian"] or report.maslov is None:
        raise NotLagrangianError(f"{report.family} sample is not Lagrangian")
    return max(abs(p) for p in report.maslov) > threshold


def verify(immersion, grid=None, zero_tol=None):
    """Sample ``immersion`` and run the full suite."""
    surface = G.sample(immersion, grid)
    return run_suite(surface, zero_tol=zero_tol)
