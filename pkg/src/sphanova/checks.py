"""Invariant suites behind ``sphanova verify``.

Each check returns a :class:`CheckResult`; suites are grouped by name so the
CLI can run a subset with ``--only``.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import roots_jacobi

from . import basis, testfns
from .basis import KeepRule, build_catalog, count_terms, count_terms_closed_form, table_keep_rule
from .exact import sphere_moment
from .fit import assemble
from .orthopoly import gauss_legendre_nodes, gegenbauer, gegenbauer_explicit, jacobi
from .parity import QuadSpec, project
from .sphere import sample_uniform


@dataclass
class CheckResult:
    suite: str
    name: str
    passed: bool
    detail: str


def term_counts() -> list[CheckResult]:
    out = []
    n2 = count_terms(2, omit=False)
    out.append(CheckResult("term-counts", "d=2 total", n2 == 15, f"{n2} (expected 15)"))
    n3, n3o = count_terms(3, omit=False), count_terms(3, omit=True)
    out.append(CheckResult("term-counts", "d=3 before omission", n3 == 49, f"{n3} (expected 49)"))
    out.append(CheckResult("term-counts", "d=3 after omission", n3o == 34, f"{n3o} (expected 34)"))
    for d in range(2, 9):
        for omit in (False, True):
            b, c = count_terms(d, omit), count_terms_closed_form(d, omit)
            out.append(CheckResult("term-counts", f"d={d} omit={omit} closed form", b == c, f"{b} vs {c}"))
    return out


def orthogonality() -> list[CheckResult]:
    out = []
    worst = 0.0
    for d in range(2, 13):
        a = 0.5 * (d - 1)
        x, w = roots_jacobi(32, a - 0.5, a - 0.5)
        C = [gegenbauer(k, a, x) for k in range(11)]
        for k in range(11):
            for l in range(k + 1, 11):
                worst = max(worst, abs(float(np.sum(w * C[k] * C[l]))))
    out.append(CheckResult("orthogonality", "Gegenbauer d=2..12, k<l<=10", worst < 1e-9, f"max |<C_k,C_l>| = {worst:.2e}"))

    x, _ = gauss_legendre_nodes(128)
    worst = 0.0
    for k in range(9):
        for alpha in (0.5, 1.5, 4.5):
            ref = gegenbauer_explicit(k, alpha, x)
            rel = np.max(np.abs(gegenbauer(k, alpha, x) - ref)) / max(1.0, np.max(np.abs(ref)))
            worst = max(worst, float(rel))
    out.append(CheckResult("orthogonality", "Gegenbauer recurrence vs explicit sum", worst < 1e-10, f"max rel err {worst:.2e}"))

    worst = 0.0
    for d in (4, 10):
        al = 0.5 * (d - 3)
        for m in range(0, 6):
            # t = 2 r^2 - 1 turns (1 - r^2)^al r^(2m+1) dr into a Jacobi weight in t
            t, w = roots_jacobi(16, al, m)
            P = [jacobi(j, al, m, t) for j in range(5)]
            for j in range(5):
                for l in range(j + 1, 5):
                    worst = max(worst, abs(float(np.sum(w * P[j] * P[l]))))
    out.append(CheckResult("orthogonality", "Jacobi radial family, beta = m", worst < 1e-9, f"max {worst:.2e}"))

    worst = 0.0
    try:
        cat = build_catalog(6, 2, 8)
        for t, cols in cat.term_blocks().items():
            if t.order != 2:
                continue
            fs = [cat.functions[c] for c in cols]
            polys = [{(p, q): v for (p, q), v in np.ndenumerate(f.coeffs) if v != 0} for f in fs]
            G = np.array([[_float_inner(p1, p2, 6) for p2 in polys] for p1 in polys])
            worst = max(worst, float(np.max(np.abs(G - np.eye(len(G))))))
        ok, detail = worst < 1e-9, f"max |G - I| = {worst:.2e}"
    except basis.RedundantBasisError as exc:
        ok, detail = False, str(exc)
    out.append(CheckResult("orthogonality", "within-term exact Gram (d=6, N=8)", ok, detail))
    return out


def _float_inner(p1: dict, p2: dict, d: int) -> float:
    return float(sum(v1 * v2 * float(sphere_moment(d + 1, (a1 + a2, b1 + b2)))
                     for (a1, b1), v1 in p1.items() for (a2, b2), v2 in p2.items()))


def parity(d: int = 10, N_max: int = 10) -> list[CheckResult]:
    try:
        cat = build_catalog(d, 2, N_max)
    except basis.RedundantBasisError as exc:
        return [CheckResult("parity", "catalog build", False, str(exc))]
    bad = [str(f.term) for f in cat if not basis.verify_parity(f, samples=32)]
    return [CheckResult("parity", f"sign-flip identity, all {len(cat)} columns (d={d})", not bad,
                        "ok" if not bad else f"failed: {bad[:5]}")]


def gram_rank(d: int = 10, N_max: int = 10, M: int = 10_000, seed: int = 0,
              keep_rule: KeepRule = table_keep_rule, threshold: float = 1e-6) -> list[CheckResult]:
    name = f"gram-rank: smallest singular value (d={d}, M={M})"
    try:
        cat = build_catalog(d, 2, N_max, keep_rule=keep_rule)
    except basis.RedundantBasisError as exc:
        return [CheckResult("gram-rank", name, False, str(exc))]
    A = assemble(sample_uniform(d, M, seed), cat).matrix
    A /= np.linalg.norm(A, axis=0)
    s = np.linalg.svd(A, compute_uv=False)
    return [CheckResult("gram-rank", name, bool(s[-1] > threshold), f"sigma_min = {s[-1]:.3e} over {len(cat)} columns")]


def oracles(quad: QuadSpec = QuadSpec()) -> list[CheckResult]:
    out = []
    for d in (4, 10):
        for label, f, exact_val in (
            ("x1^4", lambda x: x[:, 0] ** 4, 3.0 / ((d + 3) * (d + 1))),
            ("x2^2", lambda x: x[:, 1] ** 2, 1.0 / (d + 1)),
        ):
            val, se = project(f, (), [], d, quad)
            ok = abs(val - exact_val) <= 3 * se
            out.append(CheckResult("oracles", f"P_empty {label}, d={d}", ok,
                                   f"{val:.6f} vs {exact_val:.6f} (SE {se:.1e})"))
    pts = sample_uniform(10, 1000, 11)
    for name in "ABC":
        tf = testfns.test_function(name)
        total = sum(t.on_sphere(pts) for t in testfns.analytic_terms(name, 10))
        err = float(np.max(np.abs(total - tf(pts))))
        out.append(CheckResult("oracles", f"f_{name}: closed-form terms sum to f", err < 1e-12, f"max err {err:.1e}"))
    b2 = testfns.analytic_terms("B", 10)[0]
    var = testfns.oracle_term_variance(b2, 10)
    n = 11
    ref = float((sphere_moment(n, (2,)) - 2 * sphere_moment(n, (4,)) + sphere_moment(n, (6,))) / 100)
    out.append(CheckResult("oracles", "oracle variance of f_B {2} term", abs(var - ref) < 1e-12 * max(1, ref) + 1e-15,
                           f"{var:.6e} vs exact {ref:.6e}"))
    return out


SUITES: dict[str, Callable[..., list[CheckResult]]] = {
    "term-counts": term_counts,
    "orthogonality": orthogonality,
    "parity": parity,
    "gram-rank": gram_rank,
    "oracles": oracles,
}


def run(only: list[str] | None = None, keep_rule: KeepRule = table_keep_rule) -> tuple[list[CheckResult], float]:
    names = only or list(SUITES)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise KeyError(f"unknown suites {unknown}; choose from {list(SUITES)}")
    t0 = time.perf_counter()
    results: list[CheckResult] = []
    for n in names:
        fn = SUITES[n]
        # the selection rule only matters where redundancy is tested
        if n == "gram-rank":
            results.extend(fn(keep_rule=keep_rule))
        else:
            results.extend(fn())
    return results, time.perf_counter() - t0
