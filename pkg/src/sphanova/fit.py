"""Design-matrix assembly and least-squares fitting of the truncated ANOVA model."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .basis import BasisCatalog, build_catalog, poly2_eval
from .lsqr import LsqrOptions, lsqr
from .orthopoly import gegenbauer_all
from .sphere import SampleSet


@dataclass
class DesignMatrix:
    """Dense ``M x N`` matrix of basis evaluations, columns in catalog order."""

    matrix: np.ndarray
    catalog: BasisCatalog

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    @property
    def column_map(self) -> list[tuple[str, tuple]]:
        return [(str(f.term), (f.total_degree_N, f.radial_j, f.angular)) for f in self.catalog]


def _points(samples) -> np.ndarray:
    return samples.points if isinstance(samples, SampleSet) else np.atleast_2d(np.asarray(samples, float))


def assemble(samples, catalog: BasisCatalog) -> DesignMatrix:
    """Evaluate every catalog function at every sample point.

    Columns sharing a coordinate (1-D) or a coordinate pair (2-D) are computed
    together from one recurrence or one pair of power tables.
    """
    x = _points(samples)
    d = catalog.dim
    if x.shape[1] != d + 1:
        raise ValueError(f"samples live on S^{x.shape[1] - 1}, catalog on S^{d}")
    M, N = x.shape[0], len(catalog)
    A = np.empty((M, N))
    groups: dict[tuple, list[int]] = {}
    for col, f in enumerate(catalog.functions):
        if f.kind == "constant":
            A[:, col] = 1.0
        else:
            groups.setdefault((f.kind, f.local_axes), []).append(col)
    alpha = 0.5 * (d - 1)
    for (kind, axes), cols in groups.items():
        fs = [catalog.functions[c] for c in cols]
        if kind == "gegenbauer_1d":
            kmax = max(f.degree_k for f in fs)
            G = gegenbauer_all(kmax, alpha, x[:, axes[0] - 1])
            for c, f in zip(cols, fs):
                A[:, c] = f.scale * G[f.degree_k]
        else:
            C = np.stack([f.coeffs for f in fs])
            A[:, cols] = poly2_eval(C, x[:, axes[0] - 1], x[:, axes[1] - 1])
    return DesignMatrix(A, catalog)


@dataclass
class AnovaModel:
    """Fitted coefficients (one per catalog column) and fit diagnostics."""

    catalog: BasisCatalog
    coefficients: np.ndarray
    fit_meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.coefficients = np.asarray(self.coefficients, dtype=np.float64)
        if self.coefficients.shape != (len(self.catalog),):
            raise ValueError("coefficient vector does not match catalog size")

    @property
    def intercept(self) -> float:
        for c, f in zip(self.coefficients, self.catalog):
            if f.kind == "constant":
                return float(c)
        return 0.0

    def __add__(self, other: "AnovaModel") -> "AnovaModel":
        if len(other.catalog) != len(self.catalog):
            raise ValueError("models use different catalogs")
        return AnovaModel(self.catalog, self.coefficients + other.coefficients, {"strategy": "sum"})

    def to_dict(self) -> dict:
        cat = self.catalog
        return {
            "d": cat.dim,
            "q": cat.max_order_q,
            "N_max": cat.max_degree_N,
            "seed": self.fit_meta.get("seed"),
            "strategy": self.fit_meta.get("strategy"),
            "catalog": cat.describe(),
            "coefficients": [float(c) for c in self.coefficients],
            "fit_meta": self.fit_meta,
        }

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n")

    @classmethod
    def from_dict(cls, data: dict) -> "AnovaModel":
        desc = data["catalog"]
        cat = build_catalog(desc["d"], desc["q"], desc["N_max"], mode=desc.get("mode", "anova"))
        if cat.describe()["functions"] != desc["functions"]:
            raise ValueError("stored catalog does not match the rebuilt one")
        return cls(cat, np.array(data["coefficients"]), data.get("fit_meta", {}))

    @classmethod
    def load(cls, path) -> "AnovaModel":
        return cls.from_dict(json.loads(Path(path).read_text()))


def _solve(A: np.ndarray, y: np.ndarray, opts: LsqrOptions) -> tuple[np.ndarray, dict]:
    res = lsqr(A, y, opts)
    meta = {
        "iterations": res.iterations,
        "residual_norm": res.residual_norm,
        "stop_reason": res.stop_reason,
        "istop": res.istop,
        "condition_estimate": res.acond,
    }
    return res.x, meta


def _values(samples: SampleSet, y) -> np.ndarray:
    return samples.values if y is None else np.asarray(y, dtype=np.float64)


def fit_joint(samples: SampleSet, catalog: BasisCatalog, opts: LsqrOptions = LsqrOptions(),
              design: DesignMatrix | None = None, y=None) -> AnovaModel:
    """One LSQR solve over all columns.

    ``design`` may be passed to reuse an assembled matrix; ``y`` overrides
    the sample values.
    """
    A = (design or assemble(samples, catalog)).matrix
    coef, meta = _solve(A, _values(samples, y), opts)
    meta.update(strategy="joint", seed=samples.seed, M=A.shape[0], n_columns=A.shape[1],
                lsqr_options=asdict(opts))
    return AnovaModel(catalog, coef, meta)


def fit_staged(samples: SampleSet, catalog: BasisCatalog, opts: LsqrOptions = LsqrOptions(),
               design: DesignMatrix | None = None, y=None) -> AnovaModel:
    """Orders 0 and 1 against the data, then order 2 against the residual."""
    A = (design or assemble(samples, catalog)).matrix
    yv = _values(samples, y)
    low = catalog.order_mask((0, 1))
    high = ~low
    coef = np.zeros(A.shape[1])
    c1, m1 = _solve(A[:, low], yv, opts)
    coef[low] = c1
    stages = [dict(m1, columns=int(low.sum()))]
    residual = yv - A[:, low] @ c1
    if high.any():
        c2, m2 = _solve(A[:, high], residual, opts)
        coef[high] = c2
        stages.append(dict(m2, columns=int(high.sum())))
        residual = residual - A[:, high] @ c2
    meta = {
        "strategy": "staged",
        "seed": samples.seed,
        "M": A.shape[0],
        "n_columns": A.shape[1],
        "iterations": sum(s["iterations"] for s in stages),
        "residual_norm": float(np.linalg.norm(residual)),
        "stop_reason": stages[-1]["stop_reason"],
        "stages": stages,
        "lsqr_options": asdict(opts),
    }
    return AnovaModel(catalog, coef, meta)


def predict(model: AnovaModel, x) -> np.ndarray:
    """Model value(s) at one point or rows of points."""
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    out = assemble(np.atleast_2d(x), model.catalog).matrix @ model.coefficients
    return out[0] if single else out


def term_function(model: AnovaModel, term, x) -> np.ndarray:
    """Evaluate the fitted term ``f_{u, xi}`` alone."""
    cat = model.catalog
    cols = cat.columns_of(term)
    sub = BasisCatalog(cat.dim, cat.max_order_q, cat.max_degree_N, cat.mode,
                       [cat.functions[c] for c in cols])
    return assemble(np.atleast_2d(x), sub).matrix @ model.coefficients[cols]


def relative_rmse(pred: np.ndarray, truth: np.ndarray) -> float:
    """``||pred - truth|| / ||truth||`` (absolute if ``truth`` vanishes)."""
    den = np.linalg.norm(truth)
    num = np.linalg.norm(np.asarray(pred) - truth)
    return float(num / den) if den > 0 else float(num)
