"""Active ANOVA terms and reduced orthogonal bases for orders 0, 1 and 2.

Order-1 terms use Gegenbauer polynomials ``C_k^{(d-1)/2}``: odd ``k`` for
``xi = e_i`` and even ``k >= 2`` for ``xi = 0``.  Order-2 terms start from the
disk functions ``P_j^{((d-3)/2, m)}(2r^2 - 1) T_m(a, b)`` with ``m = N - 2j``
and ``T_m`` the real or imaginary part of ``(a + ib)^m``.  A keep rule selects
which ``(N, j, angular)`` enter each parity class.

Two construction modes are offered:

``"anova"`` (default)
    Each kept disk function ``eta`` is replaced by its exact two-dimensional
    ANOVA part ``eta - P_a eta - P_b eta + P_empty eta`` and then
    orthonormalized within its term by exact rational Gram-Schmidt.  The
    fitted term then satisfies the projection conditions, so it reproduces the
    closed-form decompositions and not merely their sum.
``"table"``
    The raw kept disk functions, unit-normalized.  Same span as ``"anova"``
    jointly with the 0/1-D columns, but the split between terms differs.

All normalizations are exact: every column has unit second moment under the
uniform measure on S^d.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import sqrt
from typing import Callable, Sequence

import numpy as np

from . import exact
from .indexing import IndexSet, ParityVector, TermIndex
from .orthopoly import gegenbauer_all, jacobi

KeepRule = Callable[[int, int, str, tuple[int, int]], bool]


class RedundantBasisError(RuntimeError):
    """A kept basis function lies in the span of others in its term."""


def table_keep_rule(N: int, j: int, angular: str, parity: tuple[int, int]) -> bool:
    """Selection rule for disk functions in a two-dimensional term.

    Drop ``N <= 1``, drop ``m = 1`` (redundant with 1-D terms), drop the
    even cosine family with ``m <= 2``; keep the rest.
    """
    m = N - 2 * j
    if N < 2 or m < 1:
        return False
    if angular == "sin":
        return m >= 2
    return m >= 3


def angular_parity(m: int, angular: str) -> tuple[int, int]:
    """Parity ``(xi_a, xi_b)`` of ``Re/Im (a + ib)^m``."""
    return (m % 2, 0) if angular == "cos" else ((m + 1) % 2, 1)


def disk_function(N: int, j: int, angular: str, d: int, a, b, beta_shift: float = 0.0) -> np.ndarray:
    """Direct evaluation of ``P_j^{((d-3)/2, m)}(2r^2 - 1) T_m(a, b)``.

    ``T_m`` is expanded binomially in Cartesian coordinates so ``r = 0``
    needs no angle.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    m = N - 2 * j
    if m < 0:
        raise ValueError("need N - 2j >= 0")
    r2 = a * a + b * b
    radial = jacobi(j, 0.5 * (d - 3), m + beta_shift, np.clip(2.0 * r2 - 1.0, -1.0, 1.0))
    ang = np.zeros_like(r2)
    for (p, q), c in exact.circular(m, angular).items():
        ang = ang + float(c) * a**p * b**q
    return radial * ang


def enumerate_terms(d: int, q: int) -> list[TermIndex]:
    """Active terms with ``|u| <= q``, constant included, deterministic order."""
    if d < 1:
        raise ValueError("d must be >= 1")
    if not 0 <= q <= d - 1:
        raise ValueError(f"max order q must satisfy 0 <= q <= d-1 = {d - 1}, got {q}")
    terms = [t for t in _all_terms(d, q, omit=True)]
    return sorted(terms, key=TermIndex.sort_key)


def _all_terms(d: int, qmax: int, omit: bool):
    for r in range(qmax + 1):
        if r == d:
            continue
        for u in itertools.combinations(range(1, d + 2), r):
            for bits in itertools.product((0, 1), repeat=r):
                xi = ParityVector.from_support(d, [i for i, bit in zip(u, bits) if bit])
                t = TermIndex(IndexSet(u), xi)
                if omit and t.omitted():
                    continue
                yield t


def count_terms(d: int, omit: bool) -> int:
    """Brute-force count over all admissible ``u`` including the full set."""
    return sum(1 for _ in _all_terms(d, d + 1, omit))


def count_terms_closed_form(d: int, omit: bool) -> int:
    if omit:
        return 2 * 3**d - 2 ** (d - 1) * (d + 2)
    return 3 ** (d + 1) - 2**d * (d + 1)


@dataclass(eq=False)
class BasisFunction:
    """One column of the design: a term label plus an evaluation rule.

    For ``disk_2d`` the function is the bivariate polynomial
    ``sum coeffs[p, q] a^p b^q`` in ``(a, b) = (x_{i1}, x_{i2})``.  For
    ``gegenbauer_1d`` it is ``scale * C_k^{(d-1)/2}(x_i)``.
    """

    term: TermIndex
    kind: str
    degree_k: int = 0
    total_degree_N: int = 0
    radial_j: int = 0
    angular: str | None = None
    local_axes: tuple[int, ...] = ()
    scale: float = 1.0
    coeffs: np.ndarray | None = field(default=None, repr=False)

    @property
    def d(self) -> int:
        return self.term.d

    def sort_key(self) -> tuple:
        return self.term.sort_key() + (self.total_degree_N, self.radial_j, self.angular or "")

    def describe(self) -> dict:
        out = {
            "u": list(self.term.u.members),
            "xi": list(self.term.xi_u),
            "kind": self.kind,
            "N": self.total_degree_N,
            "scale": self.scale,
        }
        if self.kind == "gegenbauer_1d":
            out["k"] = self.degree_k
        if self.kind == "disk_2d":
            out.update(j=self.radial_j, angular=self.angular)
        return out


def evaluate_basis(bf: BasisFunction, x) -> np.ndarray:
    """Evaluate one basis function at a point or rows of points on S^d."""
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    x = np.atleast_2d(x)
    if x.shape[1] != bf.d + 1:
        raise ValueError(f"points have {x.shape[1]} coordinates, expected {bf.d + 1}")
    if bf.kind == "constant":
        out = np.ones(x.shape[0])
    elif bf.kind == "gegenbauer_1d":
        (i,) = bf.local_axes
        out = bf.scale * gegenbauer_all(bf.degree_k, 0.5 * (bf.d - 1), x[:, i - 1])[bf.degree_k]
    elif bf.kind == "disk_2d":
        i1, i2 = bf.local_axes
        out = poly2_eval(bf.coeffs[None], x[:, i1 - 1], x[:, i2 - 1])[:, 0]
    else:
        raise ValueError(f"unknown basis kind {bf.kind!r}")
    return out[0] if single else out


def poly2_eval(C: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Evaluate a stack of coefficient matrices ``C[f, p, q]`` at ``(a, b)``.

    Returns an ``(len(a), n_functions)`` array.
    """
    nf, n = C.shape[0], C.shape[1]
    pa = np.vander(a, n, increasing=True)
    pb = np.vander(b, n, increasing=True)
    t = (pa @ C.transpose(1, 0, 2).reshape(n, nf * n)).reshape(-1, nf, n)
    return np.einsum("mfq,mq->mf", t, pb)


def verify_parity(bf: BasisFunction, samples: int = 64, seed: int = 0, tol: float = 1e-10) -> bool:
    """Check ``f(k * x) = prod k_i^xi_i f(x)`` for sign flips on the term axes."""
    from .sphere import sample_uniform

    x = sample_uniform(bf.d, samples, seed)
    f0 = evaluate_basis(bf, x)
    axes = bf.term.u.members
    scale = max(1.0, float(np.max(np.abs(f0))))
    for signs in itertools.product((1.0, -1.0), repeat=len(axes)):
        k = np.ones(bf.d + 1)
        for i, s in zip(axes, signs):
            k[i - 1] = s
        if np.max(np.abs(evaluate_basis(bf, x * k) - bf.term.xi.sign(k) * f0)) > tol * scale:
            return False
    return True


# ---------------------------------------------------------------------------
# exact construction of the per-class 2-D families


def _gegenbauer_norm2(k: int, d: int) -> Fraction:
    c = exact.gegenbauer_coeffs(k, Fraction(d - 1, 2))
    poly = {(p, 0): v for p, v in enumerate(c) if v}
    return exact.inner(poly, poly, d)


@lru_cache(maxsize=None)
def _gegenbauer_scale(k: int, d: int) -> float:
    return 1.0 / sqrt(_gegenbauer_norm2(k, d))


def _kept(N_max: int, parity: tuple[int, int], keep_rule: KeepRule) -> list[tuple[int, int, str]]:
    out = []
    for N in range(N_max + 1):
        for angular in ("cos", "sin"):
            for j in range(N // 2 + 1):
                m = N - 2 * j
                if angular == "sin" and m == 0:
                    continue
                if angular_parity(m, angular) != parity:
                    continue
                if keep_rule(N, j, angular, parity):
                    out.append((N, j, angular))
    return out


def _gram_schmidt(polys, d: int):
    """Exact Gram-Schmidt; returns orthogonal polys with squared norms (zeros as None)."""
    basis: list[tuple[dict, Fraction]] = []
    out = []
    for p in polys:
        v = dict(p)
        for w, nw in basis:
            c = exact.inner(v, w, d) / nw
            if c:
                v = exact.poly_add(v, w, coefs=[1, -c])
        n2 = exact.inner(v, v, d)
        if n2 == 0:
            out.append(None)
            continue
        basis.append((v, n2))
        out.append((v, n2))
    return out


@lru_cache(maxsize=None)
def _class_family(d: int, N_max: int, parity: tuple[int, int], mode: str, keep_rule: KeepRule,
                  pinned_last: bool, beta_shift: Fraction = Fraction(0)):
    """Coefficient matrices and labels for one parity class of a 2-D term.

    ``pinned_last`` marks the pair ``(d, d+1)`` in the ``(0, 1)`` class,
    where the identity ``sum_i x_i^2 = 1 - x_{d+1}^2`` ties the blocks of all
    pairs ``(i, d+1)`` to the 1-D column of ``x_{d+1}``.  There the directions
    ``A(a^2 b^l)`` are projected out first.
    """
    labels = _kept(N_max, parity, keep_rule)
    raw = [exact.disk_poly(N, j, ang, d, beta_shift) for N, j, ang in labels]
    size = N_max + 1
    fam = []
    if mode == "table":
        for lab, p in zip(labels, raw):
            n2 = exact.inner(p, p, d)
            fam.append((lab, exact.to_matrix(p, size, 1.0 / sqrt(n2))))
        return tuple(fam)
    if mode != "anova":
        raise ValueError(f"unknown basis mode {mode!r}")
    proj = [exact.anova_2d(p, d) for p in raw]
    prefix = []
    if pinned_last:
        prefix = [exact.anova_2d({(2, l): Fraction(1)}, d) for l in range(1, N_max - 1, 2)]
    ortho = _gram_schmidt(prefix + proj, d)
    allowed_drops = sum(1 for v in ortho[: len(prefix)] if v is not None)
    dropped = []
    for lab, v in zip(labels, ortho[len(prefix):]):
        if v is None:
            dropped.append(lab)
            continue
        poly, n2 = v
        fam.append((lab, exact.to_matrix(poly, size, 1.0 / sqrt(n2))))
    if len(dropped) > allowed_drops:
        raise RedundantBasisError(
            f"parity class {parity}: kept functions {dropped} are dependent within the term"
        )
    return tuple(fam)


@dataclass
class BasisCatalog:
    """Ordered list of basis functions for given ``(d, q, N_max)``."""

    dim: int
    max_order_q: int
    max_degree_N: int
    mode: str
    functions: list[BasisFunction]

    def __len__(self) -> int:
        return len(self.functions)

    def __iter__(self):
        return iter(self.functions)

    @property
    def terms(self) -> list[TermIndex]:
        seen: dict[TermIndex, None] = {}
        for f in self.functions:
            seen.setdefault(f.term, None)
        return list(seen)

    def columns_of(self, term: TermIndex) -> np.ndarray:
        idx = [i for i, f in enumerate(self.functions) if f.term == term]
        if not idx:
            raise KeyError(f"term {term} not in catalog")
        return np.array(idx)

    def term_blocks(self) -> dict[TermIndex, np.ndarray]:
        out: dict[TermIndex, list[int]] = {}
        for i, f in enumerate(self.functions):
            out.setdefault(f.term, []).append(i)
        return {t: np.array(v) for t, v in out.items()}

    def order_mask(self, orders: Sequence[int]) -> np.ndarray:
        return np.array([f.term.order in orders for f in self.functions])

    def describe(self) -> dict:
        return {
            "d": self.dim,
            "q": self.max_order_q,
            "N_max": self.max_degree_N,
            "mode": self.mode,
            "n_columns": len(self),
            "functions": [f.describe() for f in self.functions],
        }

    def to_json(self) -> str:
        return json.dumps(self.describe(), sort_keys=True)


def build_catalog(d: int, q: int, N_max: int, mode: str = "anova",
                  keep_rule: KeepRule = table_keep_rule, beta_shift: float = 0.0) -> BasisCatalog:
    """Build the basis for all active terms of order ``<= q``.

    Parameters
    ----------
    d : int
        Sphere dimension.
    q : int
        Maximal term order, 0, 1 or 2.
    N_max : int
        Maximal polynomial degree per term.
    mode : {"anova", "table"}
        Construction of the 2-D families, see the module docstring.
    keep_rule : callable
        ``(N, j, angular, parity) -> bool`` selecting disk functions.
    beta_shift : float
        Offset added to the Jacobi ``beta = m``; nonzero only for experiments.
    """
    if q > 2:
        raise NotImplementedError("bases are available for term orders up to 2")
    if q < 0 or N_max < 2:
        raise ValueError("need q >= 0 and N_max >= 2")
    terms = enumerate_terms(d, q)
    shift = Fraction(beta_shift).limit_denominator(1000)
    funcs: list[BasisFunction] = []
    for t in terms:
        if t.order == 0:
            funcs.append(BasisFunction(t, "constant"))
        elif t.order == 1:
            (i,) = t.u.members
            start = 1 if t.xi_u[0] else 2
            for k in range(start, N_max + 1, 2):
                funcs.append(BasisFunction(t, "gegenbauer_1d", degree_k=k, total_degree_N=k,
                                           local_axes=(i,), scale=_gegenbauer_scale(k, d)))
        else:
            i1, i2 = t.u.members
            pinned = mode == "anova" and t.xi_u == (0, 1) and (i1, i2) == (d, d + 1)
            fam = _class_family(d, N_max, t.xi_u, mode, keep_rule, pinned, shift)
            for (N, j, ang), C in fam:
                funcs.append(BasisFunction(t, "disk_2d", total_degree_N=N, radial_j=j, angular=ang,
                                           local_axes=(i1, i2), coeffs=C))
    funcs.sort(key=BasisFunction.sort_key)
    return BasisCatalog(d, q, N_max, mode, funcs)
