"""Geometry of the unit sphere S^d embedded in R^(d+1).

Points are stored as rows of float64 arrays with ``d + 1`` columns.  Index
sets use 1-based coordinate labels throughout the package, so ``u = (1, 2)``
refers to columns 0 and 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import gammaln

UNIT_TOL = 1e-12


def surface_area(d: int) -> float:
    """Surface measure of S^d, ``2 pi^((d+1)/2) / Gamma((d+1)/2)``.

    ``d = 0`` gives 2, the counting measure of ``{-1, 1}``.
    """
    if d < 0:
        raise ValueError(f"sphere dimension must be >= 0, got {d}")
    h = 0.5 * (d + 1)
    return float(np.exp(np.log(2.0) + h * np.log(np.pi) - gammaln(h)))


def _check_dim(d: int) -> None:
    if int(d) != d or d < 1:
        raise ValueError(f"sphere dimension d must be a positive integer, got {d}")


def normalize(x: np.ndarray) -> np.ndarray:
    """Scale rows of ``x`` onto the unit sphere."""
    x = np.asarray(x, dtype=np.float64)
    nrm = np.linalg.norm(x, axis=-1, keepdims=True)
    if np.any(nrm == 0.0):
        raise ValueError("cannot normalize the zero vector")
    return x / nrm


def sample_uniform(d: int, m: int, seed: int | np.random.Generator) -> np.ndarray:
    """Draw ``m`` i.i.d. uniform points on S^d as an ``(m, d+1)`` array.

    Gaussian vectors are normalized; a zero draw is replaced by a fresh one.
    ``seed`` may be an int (a new PCG64 stream) or an existing generator.
    """
    _check_dim(d)
    if m < 1:
        raise ValueError(f"need at least one sample, got m={m}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    g = rng.standard_normal((m, d + 1))
    nrm = np.linalg.norm(g, axis=1)
    bad = nrm == 0.0
    while np.any(bad):
        g[bad] = rng.standard_normal((int(bad.sum()), d + 1))
        nrm[bad] = np.linalg.norm(g[bad], axis=1)
        bad = nrm == 0.0
    return g / nrm[:, None]


def sample_ball(n: int, m: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform points in the closed unit ball B^n (``n = 0`` gives empty rows)."""
    if n == 0:
        return np.zeros((m, 0))
    z = sample_uniform(n - 1, m, rng) if n >= 2 else rng.choice([-1.0, 1.0], size=(m, 1))
    rad = rng.random(m) ** (1.0 / n)
    return z * rad[:, None]


def reflect(x: np.ndarray, k: Sequence[int]) -> np.ndarray:
    """Componentwise sign flip ``k * x`` with ``k`` in {-1, 1}^(d+1)."""
    k = np.asarray(k, dtype=np.float64)
    if not np.all(np.abs(k) == 1.0):
        raise ValueError("sign vector entries must be -1 or 1")
    return np.asarray(x, dtype=np.float64) * k


def complement(u: Sequence[int], d: int) -> tuple[int, ...]:
    """Coordinates of ``[d+1]`` not in ``u`` (1-based)."""
    s = set(u)
    return tuple(i for i in range(1, d + 2) if i not in s)


def fiber_point(y_u: np.ndarray, z: np.ndarray, u: Sequence[int], d: int) -> np.ndarray:
    """Assemble points ``(y_u, sqrt(1 - |y_u|^2) z)`` on the fiber over ``y_u``.

    ``z`` holds points of S^{|u^c| - 1}; it may be ``(|u^c|,)`` or a stack
    ``(k, |u^c|)``.  The result has ``d + 1`` columns with ``y_u`` at the
    positions of ``u``.
    """
    y_u = np.atleast_1d(np.asarray(y_u, dtype=np.float64))
    u = tuple(u)
    uc = complement(u, d)
    if y_u.shape[-1] != len(u):
        raise ValueError("y_u length does not match index set")
    r2 = float(y_u @ y_u)
    if r2 > 1.0 + UNIT_TOL:
        raise ValueError(f"|y_u| = {np.sqrt(r2):.6g} exceeds 1")
    z = np.asarray(z, dtype=np.float64)
    single = z.ndim == 1
    z = np.atleast_2d(z)
    if z.shape[1] != len(uc):
        raise ValueError("fiber point has wrong number of coordinates")
    rad = np.sqrt(max(0.0, 1.0 - r2))
    out = np.empty((z.shape[0], d + 1))
    if u:
        out[:, [i - 1 for i in u]] = y_u
    if uc:
        out[:, [i - 1 for i in uc]] = rad * z
    return out[0] if single else out


@dataclass
class SampleSet:
    """Sample points on S^d with function values and the seed that drew them."""

    points: np.ndarray
    values: np.ndarray
    seed: int | None = None
    dim: int = field(init=False)

    def __post_init__(self) -> None:
        self.points = np.atleast_2d(np.asarray(self.points, dtype=np.float64))
        self.values = np.asarray(self.values, dtype=np.float64).reshape(-1)
        if self.points.shape[0] == 0:
            raise ValueError("sample set is empty")
        if self.points.shape[0] != self.values.shape[0]:
            raise ValueError("points and values differ in length")
        self.dim = self.points.shape[1] - 1
        dev = np.abs(np.linalg.norm(self.points, axis=1) - 1.0)
        if np.any(dev > 1e-9):
            raise ValueError(f"points are off the sphere by up to {dev.max():.3g}")

    def __len__(self) -> int:
        return self.points.shape[0]

    @classmethod
    def draw(cls, f, d: int, m: int, seed: int) -> "SampleSet":
        pts = sample_uniform(d, m, seed)
        return cls(pts, f(pts), seed)

    def split(self, holdout: float) -> tuple["SampleSet", "SampleSet"]:
        """Train/validation split with a permutation fixed by ``seed``."""
        if not 0.0 < holdout < 1.0:
            raise ValueError("holdout fraction must lie in (0, 1)")
        rng = np.random.default_rng([0 if self.seed is None else self.seed, 0x5A17])
        perm = rng.permutation(len(self))
        n_val = max(1, int(round(holdout * len(self))))
        val, tr = perm[:n_val], np.sort(perm[n_val:])
        val = np.sort(val)
        return (
            SampleSet(self.points[tr], self.values[tr], self.seed),
            SampleSet(self.points[val], self.values[val], self.seed),
        )
