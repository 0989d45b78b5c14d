"""Gegenbauer and Jacobi polynomials by forward three-term recurrence.

Classical normalizations are used throughout: ``C_k^a`` with
``C_k^a(1) = binom(k + 2a - 1, k)`` and ``P_j^{a,b}(1) = binom(j + a, j)``.
Unit-variance scaling happens in :mod:`sphanova.basis`.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.special import gammaln

_EDGE_TOL = 1e-12


def _check_domain(x: np.ndarray) -> None:
    if x.size and np.max(np.abs(x)) > 1.0 + _EDGE_TOL:
        raise ValueError("argument outside [-1, 1]")


def gegenbauer_all(kmax: int, alpha: float, x) -> np.ndarray:
    """Values ``C_0^a(x), ..., C_kmax^a(x)`` stacked along a new leading axis.

    Uses ``k C_k = 2x (k + a - 1) C_{k-1} - (k + 2a - 2) C_{k-2}``.
    """
    if kmax < 0:
        raise ValueError("degree must be non-negative")
    if alpha <= -0.5:
        raise ValueError(f"Gegenbauer parameter must exceed -1/2, got {alpha}")
    x = np.asarray(x, dtype=np.float64)
    _check_domain(x)
    out = np.empty((kmax + 1,) + x.shape)
    out[0] = 1.0
    if kmax >= 1:
        out[1] = 2.0 * alpha * x
    for k in range(2, kmax + 1):
        out[k] = (2.0 * x * (k + alpha - 1.0) * out[k - 1] - (k + 2.0 * alpha - 2.0) * out[k - 2]) / k
    return out


def gegenbauer(k: int, alpha: float, x) -> np.ndarray:
    """Gegenbauer polynomial ``C_k^alpha(x)``."""
    return gegenbauer_all(k, alpha, x)[k]


def gegenbauer_explicit(k: int, alpha: float, x) -> np.ndarray:
    """Closed-form sum ``sum_i (-1)^i G(a+k-i) / (G(a) i! (k-2i)!) (2x)^(k-2i)``.

    Reference route for checking the recurrence; valid for ``alpha > 0``.
    """
    if alpha <= 0:
        raise ValueError("explicit sum requires alpha > 0")
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros_like(x)
    for i in range(k // 2 + 1):
        logc = gammaln(alpha + k - i) - gammaln(alpha) - gammaln(i + 1) - gammaln(k - 2 * i + 1)
        out = out + (-1) ** i * np.exp(logc) * (2.0 * x) ** (k - 2 * i)
    return out


def jacobi_all(jmax: int, a: float, b: float, t) -> np.ndarray:
    """Values ``P_0^{a,b}(t), ..., P_jmax^{a,b}(t)`` along a new leading axis."""
    if jmax < 0:
        raise ValueError("degree must be non-negative")
    if a <= -1.0 or b <= -1.0:
        raise ValueError(f"Jacobi parameters must exceed -1, got ({a}, {b})")
    t = np.asarray(t, dtype=np.float64)
    _check_domain(t)
    out = np.empty((jmax + 1,) + t.shape)
    out[0] = 1.0
    if jmax >= 1:
        out[1] = (a + 1.0) + 0.5 * (a + b + 2.0) * (t - 1.0)
    for n in range(2, jmax + 1):
        s = 2.0 * n + a + b
        c1 = 2.0 * n * (n + a + b) * (s - 2.0)
        c2 = (s - 1.0) * (s * (s - 2.0) * t + a * a - b * b)
        c3 = 2.0 * (n + a - 1.0) * (n + b - 1.0) * s
        out[n] = (c2 * out[n - 1] - c3 * out[n - 2]) / c1
    return out


def jacobi(j: int, a: float, b: float, t) -> np.ndarray:
    """Jacobi polynomial ``P_j^{a,b}(t)``."""
    return jacobi_all(j, a, b, t)[j]


@lru_cache(maxsize=None)
def _leggauss(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre_nodes(n: int) -> tuple[np.ndarray, np.ndarray]:
    """``n``-point Gauss-Legendre rule on [-1, 1] for ``1 <= n <= 256``."""
    if int(n) != n or not 1 <= n <= 256:
        raise ValueError(f"node count must be an integer in [1, 256], got {n}")
    return _leggauss(int(n))


def weighted_inner(f, g, weight, n: int = 128) -> float:
    """``int_{-1}^{1} f g weight dx`` by ``n``-point Gauss-Legendre."""
    x, w = gauss_legendre_nodes(n)
    return float(np.sum(w * f(x) * g(x) * weight(x)))
