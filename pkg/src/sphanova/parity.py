"""Reference implementations of the parity, projection and ANOVA operators.

These are Monte Carlo oracles for validation at small ``d``; the fitting
path never calls them.  Functions are vectorized callables taking an
``(n, d+1)`` array of points and returning ``n`` values.

Every projection ``P_v`` draws its fiber samples from a substream keyed by
``(quad.seed, v)``, so different routes to the same ``P_v`` (Moebius sum,
iterative definition) see identical samples.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import betaln

from .indexing import IndexSet, ParityVector
from .sphere import complement, fiber_point, sample_ball, sample_uniform, surface_area

Func = Callable[[np.ndarray], np.ndarray]

MAX_PARITY_DIM = 20
FP_FLOOR = 1e-14


@dataclass(frozen=True)
class QuadSpec:
    """Monte Carlo node count and base seed for fiber averages."""

    nodes: int = 200_000
    seed: int = 0

    def __post_init__(self) -> None:
        if self.nodes < 1:
            raise ValueError("need at least one quadrature node")


def _as_set(u) -> IndexSet:
    return u if isinstance(u, IndexSet) else IndexSet(tuple(u))


def _rng_for(quad: QuadSpec, v: IndexSet, salt: int = 0) -> np.random.Generator:
    key = sum(1 << (i - 1) for i in v.members)
    return np.random.default_rng(np.random.SeedSequence(quad.seed, spawn_key=(salt, key)))


def sign_vectors(n: int) -> np.ndarray:
    """All ``2^n`` vectors in ``{-1, 1}^n`` as rows."""
    return np.array(list(itertools.product((1.0, -1.0), repeat=n)))


def parity_component(f: Func, xi: ParityVector, x) -> np.ndarray:
    """``[Xi_xi f](x) = 2^-(d+1) sum_k prod(k_i^xi_i) f(k * x)``."""
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    x = np.atleast_2d(x)
    n = x.shape[1]
    if n != len(xi.bits):
        raise ValueError("parity vector length does not match the points")
    if n > MAX_PARITY_DIM:
        raise ValueError(f"parity oracle limited to d+1 <= {MAX_PARITY_DIM}")
    out = np.zeros(x.shape[0])
    for k in sign_vectors(n):
        out += xi.sign(k) * f(x * k)
    out /= 2.0**n
    return out[0] if single else out


def _project_batch(f: Func, u: IndexSet, Y: np.ndarray, d: int, nodes: int,
                   rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Fiber means of ``f`` over each row of ``Y`` (coordinates in ``u``)."""
    uc = complement(u.members, d)
    Y = np.atleast_2d(Y)
    n_pts = Y.shape[0]
    r2 = np.sum(Y * Y, axis=1)
    if np.any(r2 > 1.0 + 1e-12):
        raise ValueError("|y_u| exceeds 1")
    rad = np.sqrt(np.clip(1.0 - r2, 0.0, None))
    if len(uc) == 1:
        z = np.array([[1.0], [-1.0]])
    else:
        z = sample_uniform(len(uc) - 1, nodes, rng)
    k = z.shape[0]
    pts = np.empty((n_pts, k, d + 1))
    if len(u):
        pts[:, :, [i - 1 for i in u.members]] = Y[:, None, :]
    pts[:, :, [i - 1 for i in uc]] = rad[:, None, None] * z[None, :, :]
    vals = f(pts.reshape(-1, d + 1)).reshape(n_pts, k)
    means = vals.mean(axis=1)
    if len(uc) == 1:
        ses = np.zeros(n_pts)
    else:
        ses = vals.std(axis=1, ddof=1) / np.sqrt(k)
    return means, ses


def project(f: Func, u, y_u, d: int, quad: QuadSpec = QuadSpec()) -> tuple[float, float]:
    """Fiber mean ``[P_u f](y_u)`` and its Monte Carlo standard error."""
    u = _as_set(u)
    u.check(d)
    if len(u) == d:
        raise ValueError("projection undefined for |u| = d")
    if len(u) == d + 1:
        raise ValueError("projection onto the full set is the function itself")
    y = np.atleast_1d(np.asarray(y_u, dtype=np.float64))
    if y.shape != (len(u),):
        raise ValueError("y_u length does not match u")
    if float(y @ y) > 1.0 + 1e-12:
        raise ValueError("|y_u| exceeds 1")
    m, s = _project_batch(f, u, y[None, :], d, quad.nodes, _rng_for(quad, u))
    return float(m[0]), float(s[0])


def _restrict(u: IndexSet, v: IndexSet, y_u: np.ndarray) -> np.ndarray:
    pos = {i: k for k, i in enumerate(u.members)}
    return y_u[[pos[i] for i in v.members]]


def _projections(f: Func, u: IndexSet, y: np.ndarray, d: int, quad: QuadSpec):
    return {v: project(f, v, _restrict(u, v, y), d, quad) for v in u.subsets()}


def anova_operator(f: Func, u, y_u, d: int, quad: QuadSpec = QuadSpec()) -> tuple[float, float]:
    """Moebius sum ``sum_{v in u} (-1)^{|u|-|v|} [P_v f](y_v)`` and its error."""
    u = _as_set(u)
    if len(u) > d - 1:
        raise ValueError("ANOVA operator needs |u| <= d-1")
    y = np.atleast_1d(np.asarray(y_u, dtype=np.float64))
    P = _projections(f, u, y, d, quad)
    val = sum((-1) ** (len(u) - len(v)) * P[v][0] for v in P)
    se = np.sqrt(sum(P[v][1] ** 2 for v in P))
    return float(val), float(se)


def iterative_vs_moebius(f: Func, u, y_u, d: int, quad: QuadSpec = QuadSpec()) -> tuple[float, float]:
    """``A_u f`` by the recursive definition and by the Moebius sum."""
    u = _as_set(u)
    if len(u) > d - 1:
        raise ValueError("ANOVA operator needs |u| <= d-1")
    y = np.atleast_1d(np.asarray(y_u, dtype=np.float64))
    P = _projections(f, u, y, d, quad)
    memo: dict[IndexSet, float] = {}

    def rec(v: IndexSet) -> float:
        if v not in memo:
            memo[v] = P[v][0] - sum(rec(w) for w in v.subsets(proper=True))
        return memo[v]

    moebius = sum((-1) ** (len(u) - len(v)) * P[v][0] for v in P)
    return float(rec(u)), float(moebius)


def nested_projection(f: Func, v, u, y_v, d: int, quad: QuadSpec = QuadSpec(),
                      outer: int = 400) -> tuple[float, float]:
    """``[P_v (P_u f)](y_v)`` for ``v`` inside ``u`` by nested sampling.

    The outer average runs over ``outer`` fiber points; the reported error is
    the outer sample standard error, which already contains the inner noise.
    """
    v, u = _as_set(v), _as_set(u)
    if not v.issubset(u):
        raise ValueError("nested projection needs v inside u")
    y = np.atleast_1d(np.asarray(y_v, dtype=np.float64))
    rng = _rng_for(quad, v, salt=1)
    vc = complement(v.members, d)
    z = sample_uniform(len(vc) - 1, outer, rng) if len(vc) > 1 else np.array([[1.0], [-1.0]])
    pts = fiber_point(y, z, v.members, d)
    inner, _ = _project_batch(f, u, pts[:, [i - 1 for i in u.members]], d, quad.nodes, _rng_for(quad, u, 2))
    return float(inner.mean()), float(inner.std(ddof=1) / np.sqrt(len(inner)))


# ---------------------------------------------------------------------------
# integral conditions


@dataclass
class ConditionReport:
    """Largest violation over sampled anchors, with per-anchor details."""

    max_violation: float
    se_at_max: float
    max_z: float
    passed: bool
    flagged: list[dict] = field(default_factory=list)
    anchors: list[dict] = field(default_factory=list)


def _ball_integral(g: Func, u_size: int, a_pos: list[int], rest_pos: list[int], y_a: np.ndarray,
                   scale: float, expo: float, n: int, rng: np.random.Generator) -> tuple[float, float]:
    """``int_{B^k} (1 - |x|^2)^expo g(y_a, scale * x) dx`` by importance sampling.

    Radii are drawn with ``rho^2 ~ Beta(k/2, expo + 1)``, which absorbs the
    weight exactly, including the integrable singularity at ``expo = -1/2``.
    Each draw is averaged over all sign flips of ``x``.
    """
    k = len(rest_pos)
    z = sample_uniform(k - 1, n, rng) if k > 1 else rng.choice([-1.0, 1.0], size=(n, 1))
    rho = np.sqrt(rng.beta(0.5 * k, expo + 1.0, size=n))
    x = z * rho[:, None]
    acc = np.zeros(n)
    flips = sign_vectors(k)
    for s in flips:
        arg = np.empty((n, u_size))
        if a_pos:
            arg[:, a_pos] = y_a
        arg[:, rest_pos] = scale * x * s
        acc += g(arg)
    acc /= len(flips)
    log_norm = np.log(surface_area(k - 1)) + np.log(0.5) + betaln(0.5 * k, expo + 1.0)
    Z = float(np.exp(log_norm))
    return Z * float(acc.mean()), Z * float(acc.std(ddof=1) / np.sqrt(n))


def check_integral_conditions(g: Func, u, d: int, trials: int = 20, quad: QuadSpec = QuadSpec(nodes=20_000),
                              se_flag: float = 1e-2) -> ConditionReport:
    """Evaluate both families of integral conditions at random anchors.

    ``g`` maps an ``(n, |u|)`` array of ball points (coordinates ordered as
    ``u``) to values.  Each trial picks a proper subset ``a`` of ``u``, a
    uniform ``y_a`` in the ball, ``r`` uniform in ``[0, sqrt(1 - |y_a|^2)]``
    and an exponent ``m`` in ``{-1, ..., d - |u| - 2}``, and evaluates both
    conditions.  A trial passes if ``|value| <= 3 SE``; estimates with
    ``SE > se_flag`` are listed in ``flagged`` but do not fail the check.
    """
    u = _as_set(u)
    n_u = len(u)
    if not 1 <= n_u <= d - 1:
        raise ValueError("integral conditions need 1 <= |u| <= d-1")
    rng = np.random.default_rng(np.random.SeedSequence(quad.seed, spawn_key=(3,)))
    proper = [list(c) for r in range(n_u) for c in itertools.combinations(range(n_u), r)]
    m_values = list(range(-1, d - n_u - 1))
    anchors = []
    for _ in range(trials):
        a_pos = proper[rng.integers(len(proper))]
        rest = [p for p in range(n_u) if p not in a_pos]
        y_a = sample_ball(len(a_pos), 1, rng)[0]
        s0 = np.sqrt(max(0.0, 1.0 - float(y_a @ y_a)))
        r = rng.uniform(0.0, s0)
        s = np.sqrt(max(0.0, s0 * s0 - r * r))
        v1, e1 = _ball_integral(g, n_u, a_pos, rest, y_a, s0, 0.5 * (d - n_u - 1), quad.nodes, rng)
        anchors.append({"kind": "d1", "a": a_pos, "y_a": y_a.tolist(), "value": v1, "se": e1})
        if m_values:
            m = m_values[rng.integers(len(m_values))]
            v2, e2 = _ball_integral(g, n_u, a_pos, rest, y_a, s, 0.5 * m, quad.nodes, rng)
            anchors.append({"kind": "d2", "a": a_pos, "y_a": y_a.tolist(), "r": r, "m": m,
                            "value": s * v2, "se": s * e2})
    worst = max(anchors, key=lambda t: abs(t["value"]))
    # values within FP_FLOOR of zero count as exact zeros
    excess = [max(abs(t["value"]) - FP_FLOOR, 0.0) for t in anchors]
    zs = [e / t["se"] if t["se"] > 0 else (np.inf if e > 0 else 0.0) for e, t in zip(excess, anchors)]
    passed = all(e <= 3.0 * t["se"] for e, t in zip(excess, anchors))
    flagged = [t for t in anchors if t["se"] > se_flag]
    return ConditionReport(abs(worst["value"]), worst["se"], float(max(zs)), passed, flagged, anchors)
