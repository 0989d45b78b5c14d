"""Exact rational moments and bivariate polynomial algebra on the sphere.

Polynomials in two coordinates ``(a, b)`` are dicts ``{(p, q): Fraction}``.
All inner products are taken under the uniform measure on S^d and are exact,
which is what makes the basis construction free of quadrature error.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np

Poly2 = dict  # {(p, q): Fraction}


def double_factorial_odd(p: int) -> int:
    """``(p - 1)!!`` for even ``p >= 0`` (1 for ``p = 0``)."""
    out = 1
    for k in range(p - 1, 0, -2):
        out *= k
    return out


@lru_cache(maxsize=None)
def sphere_moment(n: int, exps: tuple[int, ...]) -> Fraction:
    """``E[prod x_i^p_i]`` for ``x`` uniform on the unit sphere in R^n.

    Zero unless every exponent is even; otherwise
    ``prod (p_i - 1)!! / prod_{i < P/2} (n + 2i)`` with ``P = sum p_i``.
    """
    if any(p % 2 for p in exps):
        return Fraction(0)
    num = 1
    for p in exps:
        num *= double_factorial_odd(p)
    den = 1
    for i in range(sum(exps) // 2):
        den *= n + 2 * i
    return Fraction(num, den)


def poly_add(*polys: Poly2, coefs=None) -> Poly2:
    coefs = coefs or [1] * len(polys)
    out: Poly2 = {}
    for c, p in zip(coefs, polys):
        for k, v in p.items():
            out[k] = out.get(k, Fraction(0)) + c * v
    return {k: v for k, v in out.items() if v != 0}


def poly_mul(p1: Poly2, p2: Poly2) -> Poly2:
    out: Poly2 = {}
    for (a1, b1), v1 in p1.items():
        for (a2, b2), v2 in p2.items():
            k = (a1 + a2, b1 + b2)
            out[k] = out.get(k, Fraction(0)) + v1 * v2
    return {k: v for k, v in out.items() if v != 0}


def poly_scale(p: Poly2, c) -> Poly2:
    return {k: c * v for k, v in p.items() if c * v != 0}


def poly_degree(p: Poly2) -> int:
    return max((a + b for a, b in p), default=0)


def poly_pow(p: Poly2, k: int) -> Poly2:
    out: Poly2 = {(0, 0): Fraction(1)}
    for _ in range(k):
        out = poly_mul(out, p)
    return out


def inner(p1: Poly2, p2: Poly2, d: int) -> Fraction:
    """``E[p1(x_i, x_j) p2(x_i, x_j)]`` for distinct coordinates of S^d."""
    out = Fraction(0)
    for (a1, b1), v1 in p1.items():
        for (a2, b2), v2 in p2.items():
            out += v1 * v2 * sphere_moment(d + 1, (a1 + a2, b1 + b2))
    return out


def mean(p: Poly2, d: int) -> Fraction:
    """``P_empty p``: the mean over S^d."""
    return sum((v * sphere_moment(d + 1, k) for k, v in p.items()), Fraction(0))


def project_first(p: Poly2, d: int) -> Poly2:
    """``P_{i1} p``: average over the fiber with the first coordinate fixed.

    ``a^p b^q`` maps to ``a^p (1 - a^2)^(q/2) E[z^q]`` with ``z`` a coordinate
    of S^{d-1}.
    """
    out: Poly2 = {}
    for (pa, qb), v in p.items():
        mu = sphere_moment(d, (qb,))
        if mu == 0:
            continue
        h = qb // 2
        for k in range(h + 1):
            key = (pa + 2 * k, 0)
            out[key] = out.get(key, Fraction(0)) + v * mu * comb(h, k) * (-1) ** k
    return {k: v for k, v in out.items() if v != 0}


def swap(p: Poly2) -> Poly2:
    return {(b, a): v for (a, b), v in p.items()}


def project_second(p: Poly2, d: int) -> Poly2:
    """``P_{i2} p``: average with the second coordinate fixed."""
    return swap(project_first(swap(p), d))


def anova_2d(p: Poly2, d: int) -> Poly2:
    """``A_{i1,i2} p = p - P_{i1} p - P_{i2} p + P_empty p`` computed exactly."""
    m = mean(p, d)
    out = poly_add(p, project_first(p, d), project_second(p, d), coefs=[1, -1, -1])
    if m:
        out = poly_add(out, {(0, 0): m})
    return out


def gegenbauer_coeffs(k: int, alpha: Fraction) -> list[Fraction]:
    """Monomial coefficients of ``C_k^alpha`` (index = power)."""
    prev = [Fraction(1)]
    if k == 0:
        return prev
    cur = [Fraction(0), 2 * alpha]
    for n in range(2, k + 1):
        nxt = [Fraction(0)] * (n + 1)
        for i, c in enumerate(cur):
            nxt[i + 1] += 2 * (n + alpha - 1) * c / n
        for i, c in enumerate(prev):
            nxt[i] -= (n + 2 * alpha - 2) * c / n
        prev, cur = cur, nxt
    return cur


def jacobi_coeffs(j: int, a: Fraction, b: Fraction) -> list[Fraction]:
    """Monomial coefficients of ``P_j^{a,b}(t)`` in ``t`` (index = power)."""
    prev = [Fraction(1)]
    if j == 0:
        return prev
    cur = [(a + 1) - (a + b + 2) / 2, (a + b + 2) / 2]
    for n in range(2, j + 1):
        s = 2 * n + a + b
        c1 = 2 * n * (n + a + b) * (s - 2)
        c2t = (s - 1) * s * (s - 2)
        c20 = (s - 1) * (a * a - b * b)
        c3 = 2 * (n + a - 1) * (n + b - 1) * s
        nxt = [Fraction(0)] * (n + 1)
        for i, c in enumerate(cur):
            nxt[i + 1] += c2t * c / c1
            nxt[i] += c20 * c / c1
        for i, c in enumerate(prev):
            nxt[i] -= c3 * c / c1
        prev, cur = cur, nxt
    return cur


def circular(m: int, kind: str) -> Poly2:
    """``Re (a + i b)^m`` for ``kind='cos'``, ``Im (a + i b)^m`` for ``'sin'``."""
    out: Poly2 = {}
    for k in range(m + 1):
        # i^k is real for even k, imaginary for odd k
        if (kind == "cos") != (k % 2 == 0):
            continue
        sign = (-1) ** (k // 2)
        out[(m - k, k)] = Fraction(sign * comb(m, k))
    return out


def disk_poly(N: int, j: int, kind: str, d: int, beta_shift: Fraction = Fraction(0)) -> Poly2:
    """``P_j^{(d-3)/2, m + shift}(2 r^2 - 1) * T_m(a, b)`` with ``m = N - 2j``."""
    m = N - 2 * j
    coeffs = jacobi_coeffs(j, Fraction(d - 3, 2), Fraction(m) + beta_shift)
    t = {(0, 0): Fraction(-1), (2, 0): Fraction(2), (0, 2): Fraction(2)}
    radial: Poly2 = {}
    tk: Poly2 = {(0, 0): Fraction(1)}
    for c in coeffs:
        radial = poly_add(radial, tk, coefs=[1, c])
        tk = poly_mul(tk, t)
    return poly_mul(radial, circular(m, kind))


def parity_of(p: Poly2) -> tuple[int, int] | None:
    """Common parity of all monomials, or ``None`` if mixed."""
    pars = {(a % 2, b % 2) for a, b in p}
    return pars.pop() if len(pars) == 1 else None


def to_matrix(p: Poly2, size: int, scale: float = 1.0) -> np.ndarray:
    """Dense float coefficient matrix ``C[p, q]``."""
    out = np.zeros((size, size))
    for (a, b), v in p.items():
        out[a, b] = float(v) * scale
    return out
