"""LSQR for ``min ||A x - b||^2 + damp^2 ||x||^2`` (Paige and Saunders, 1982).

Written out here rather than calling :func:`scipy.sparse.linalg.lsqr` so the
per-iteration residual estimates and a named stop reason are available.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

STOP_REASONS = {
    0: "x = 0 is the exact solution",
    1: "residual small: consistent system (btol/atol)",
    2: "normal-equations residual small: least-squares solution (atol)",
    3: "condition estimate exceeded conlim",
    4: "residual at machine precision",
    5: "normal-equations residual at machine precision",
    6: "condition estimate at machine precision",
    7: "iteration limit reached",
}


@dataclass(frozen=True)
class LsqrOptions:
    """Stopping controls; ``max_iters=None`` means ``4 * n_columns``."""

    atol: float = 1e-8
    btol: float = 1e-8
    conlim: float = 1e8
    max_iters: int | None = None
    damp: float = 0.0

    def __post_init__(self) -> None:
        if min(self.atol, self.btol, self.conlim) <= 0:
            raise ValueError("LSQR tolerances must be positive")
        if self.max_iters is not None and self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.damp < 0:
            raise ValueError("damp must be non-negative")


@dataclass
class LsqrResult:
    x: np.ndarray
    istop: int
    iterations: int
    residual_norm: float
    normal_residual_norm: float
    anorm: float
    acond: float
    history: list[float] = field(default_factory=list)

    @property
    def stop_reason(self) -> str:
        return STOP_REASONS[self.istop]


def lsqr(A: np.ndarray, b: np.ndarray, opts: LsqrOptions = LsqrOptions()) -> LsqrResult:
    """Solve a dense least-squares problem by Golub-Kahan bidiagonalization.

    ``history[k]`` is the LSQR estimate of ``||b - A x_k||`` (including the
    damping term), which is non-increasing by construction.
    """
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64).reshape(-1)
    m, n = A.shape
    if b.shape[0] != m:
        raise ValueError(f"right-hand side has length {b.shape[0]}, expected {m}")
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
        raise ValueError("non-finite entries in system")
    max_iters = opts.max_iters if opts.max_iters is not None else 4 * n
    eps = np.finfo(np.float64).eps
    ctol = 1.0 / opts.conlim
    damp = opts.damp

    x = np.zeros(n)
    u = b.copy()
    beta = np.linalg.norm(u)
    bnorm = beta
    if beta == 0.0:
        return LsqrResult(x, 0, 0, 0.0, 0.0, 0.0, 0.0, [0.0])
    u /= beta
    v = A.T @ u
    alpha = np.linalg.norm(v)
    if alpha == 0.0:
        return LsqrResult(x, 0, 0, beta, 0.0, 0.0, 0.0, [beta])
    v /= alpha
    w = v.copy()

    rhobar, phibar = alpha, beta
    anorm = acond = ddnorm = xxnorm = z = res2 = 0.0
    cs2, sn2 = -1.0, 0.0
    rnorm, arnorm = beta, alpha * beta
    history = [rnorm]
    istop, itn = 7, 0

    while itn < max_iters:
        itn += 1
        u = A @ v - alpha * u
        beta = np.linalg.norm(u)
        if beta > 0.0:
            u /= beta
            anorm = np.sqrt(anorm**2 + alpha**2 + beta**2 + damp**2)
            v = A.T @ u - beta * v
            alpha = np.linalg.norm(v)
            if alpha > 0.0:
                v /= alpha

        # eliminate the damping parameter
        if damp > 0.0:
            rhobar1 = np.hypot(rhobar, damp)
            cs1, sn1 = rhobar / rhobar1, damp / rhobar1
            psi = sn1 * phibar
            phibar = cs1 * phibar
        else:
            rhobar1, psi = rhobar, 0.0

        # plane rotation on the lower bidiagonal
        rho = np.hypot(rhobar1, beta)
        cs, sn = rhobar1 / rho, beta / rho
        theta = sn * alpha
        rhobar = -cs * alpha
        phi = cs * phibar
        phibar = sn * phibar
        tau = sn * phi

        t1, t2 = phi / rho, -theta / rho
        dk = w / rho
        x = x + t1 * w
        w = v + t2 * w
        ddnorm += float(dk @ dk)

        # norm and condition estimates
        delta = sn2 * rho
        gambar = -cs2 * rho
        rhs = phi - delta * z
        zbar = rhs / gambar
        xnorm = np.sqrt(xxnorm + zbar**2)
        gamma = np.hypot(gambar, theta)
        cs2, sn2 = gambar / gamma, theta / gamma
        z = rhs / gamma
        xxnorm += z**2

        acond = anorm * np.sqrt(ddnorm)
        res1 = phibar**2
        res2 += psi**2
        rnorm = np.sqrt(res1 + res2)
        arnorm = alpha * abs(tau)
        history.append(rnorm)

        test1 = rnorm / bnorm
        test2 = arnorm / (anorm * rnorm + eps) if rnorm > 0 else 0.0
        test3 = 1.0 / (acond + eps)
        rtol = opts.btol + opts.atol * anorm * xnorm / bnorm

        t1m = test1 / (1.0 + anorm * xnorm / bnorm)
        if test1 <= rtol:
            istop = 1
        elif test2 <= opts.atol:
            istop = 2
        elif test3 <= ctol:
            istop = 3
        elif 1.0 + t1m <= 1.0:
            istop = 4
        elif 1.0 + test2 <= 1.0:
            istop = 5
        elif 1.0 + test3 <= 1.0:
            istop = 6
        else:
            continue
        break

    return LsqrResult(x, istop, itn, float(rnorm), float(arnorm), float(anorm), float(acond), history)
