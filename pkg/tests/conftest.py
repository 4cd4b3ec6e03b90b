"""Shared samples. Shooting the two profile curves dominates the run time, so
every module reuses the session-scoped members built here (the builders also
cache shot curves per process)."""

import math

import numpy as np
import pytest
import sympy as sp

from shrinktori import grid as G
from shrinktori import tori, verify


def symbolic_invariants(expr, u, v):
    """Oracle: metric, |H|^2, |sigma|^2 and K of a symbolic immersion R^2 -> R^4.

    Everything is derived with sympy from the position vector alone and
    returned as a numeric function of (u, v).
    """
    phi = sp.Matrix(expr)
    pu, pv = phi.diff(u), phi.diff(v)
    second = [[phi.diff(u, 2), phi.diff(u, v)], [phi.diff(u, v), phi.diff(v, 2)]]
    g = sp.Matrix([[pu.dot(pu), pu.dot(pv)], [pv.dot(pu), pv.dot(pv)]])
    gi = g.inv()
    T = sp.Matrix.hstack(pu, pv)

    def perp(w):
        return w - T * (gi * (T.T * w))

    sig = [[perp(second[i][j]) for j in range(2)] for i in range(2)]
    H = sum((gi[i, j] * sig[i][j] for i in range(2) for j in range(2)), sp.zeros(4, 1))
    s2 = sum(gi[i, k] * gi[j, l] * sig[i][j].dot(sig[k][l])
             for i in range(2) for j in range(2) for k in range(2) for l in range(2))
    H2 = H.dot(H)
    shrink = H + perp(phi)
    fns = sp.lambdify((u, v), [g, H2, s2, (H2 - s2) / 2, shrink.dot(shrink)], "numpy")

    def evaluate(a, b):
        gv, h2, s2v, k, res = fns(a, b)
        return {"g": np.array(gv, dtype=float), "H2": float(h2), "sigma2": float(s2v),
                "K": float(k), "shrinker2": float(res)}

    return evaluate


def cos_sin_expr(A, B, a, b):
    u, v = sp.symbols("u v", real=True)
    expr = [A * sp.cos(u) * sp.cos(a * v), A * sp.cos(u) * sp.sin(a * v),
            B * sp.sin(u) * sp.cos(b * v), B * sp.sin(u) * sp.sin(b * v)]
    return expr, u, v


@pytest.fixture(scope="session")
def clifford():
    return G.sample(tori.build("clifford"))


@pytest.fixture(scope="session")
def clifford64():
    imm = tori.build("clifford")
    return G.sample(imm, imm.default_grid(64))


@pytest.fixture(scope="session")
def lee_wang12():
    return G.sample(tori.build("lee-wang", m=1, n=2))


@pytest.fixture(scope="session")
def lawson2():
    return G.sample(tori.build("lawson", alpha="2/1"))


@pytest.fixture(scope="session")
def anciaux13():
    return G.sample(tori.build("anciaux", p=1, q=3))


@pytest.fixture(scope="session")
def al35():
    return G.sample(tori.build("abresch-langer", p=3, q=5))


ZOO = [
    ("clifford", {}),
    ("lee-wang", {"m": 1, "n": 1}),
    ("lee-wang", {"m": 1, "n": 2}),
    ("lee-wang", {"m": 1, "n": 3}),
    ("lee-wang", {"m": 2, "n": 3}),
    ("lawson", {"alpha": "1/1"}),
    ("lawson", {"alpha": "3/2"}),
    ("lawson", {"alpha": "2/1"}),
    ("anciaux", {}),
    ("anciaux", {"p": 1, "q": 3}),
    ("abresch-langer", {}),
    ("abresch-langer", {"p": 3, "q": 5}),
    ("sphere", {}),
]


def zoo_key(name, params):
    return name + "(" + ",".join(f"{k}={v}" for k, v in params.items()) + ")"


@pytest.fixture(scope="session")
def zoo():
    """Verification reports for every sampled family member, keyed by name(params)."""
    return {zoo_key(n, p): verify.verify(tori.build(n, **p)) for n, p in ZOO}


def close(a, b, tol):
    return math.isclose(a, b, rel_tol=0.0, abs_tol=tol)


# -- acceptance report -------------------------------------------------------

ACCEPTANCE_LINES = {}


def record(number, ok, detail):
    """Store and print one pass/fail line for an acceptance criterion."""
    line = f"{'PASS' if ok else 'FAIL'}  criterion {number:2d}: {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])
