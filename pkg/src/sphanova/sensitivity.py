"""Term variances and spherical Sobol indices from a fitted model.

A term variance is the mean square of the fitted term over an evaluation set.
Indices divide the per-``u`` sum of term variances by the unbiased variance of
the observed values.  Terms of equal parity but different ``u`` need not be
orthogonal on the sphere, so indices are relative importances and need not
sum to one.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .fit import AnovaModel, DesignMatrix, assemble
from .indexing import IndexSet, TermIndex
from .sphere import SampleSet

CSV_HEADER = ["u", "index", "variance", "xi_breakdown_json"]


@dataclass
class SobolEntry:
    u: IndexSet
    variance: float
    index: float
    per_xi: list[tuple[str, float]]


@dataclass
class SobolReport:
    """Indices per index set, sorted by decreasing index."""

    d: int
    q: int
    N_max: int
    M: int
    seed: int | None
    total_sample_variance: float
    entries: list[SobolEntry]
    constant_function: bool = False
    independent_eval_set: bool = False
    meta: dict = field(default_factory=dict)

    def index_of(self, u) -> float:
        u = u if isinstance(u, IndexSet) else IndexSet(tuple(u))
        for e in self.entries:
            if e.u == u:
                return e.index
        raise KeyError(u.label)

    def as_dict(self) -> dict:
        return {
            "d": self.d,
            "q": self.q,
            "N_max": self.N_max,
            "M": self.M,
            "seed": self.seed,
            "total_sample_variance": self.total_sample_variance,
            "constant_function": self.constant_function,
            "independent_eval_set": self.independent_eval_set,
            "note": "indices are relative importances; they need not sum to one",
            "meta": self.meta,
            "entries": [
                {"u": e.u.label, "index": e.index, "variance": e.variance,
                 "xi_breakdown": [{"xi": x, "variance": v} for x, v in e.per_xi]}
                for e in self.entries
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=1, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for e in self.entries:
            w.writerow([e.u.label, repr(e.index), repr(e.variance),
                        json.dumps({x: v for x, v in e.per_xi}, sort_keys=True)])
        return buf.getvalue()

    def write(self, out_dir, formats=("json", "csv")) -> list[Path]:
        out_dir = Path(out_dir)
        paths = []
        if "json" in formats:
            paths.append(out_dir / "sobol.json")
            paths[-1].write_text(self.to_json(), encoding="utf-8")
        if "csv" in formats:
            paths.append(out_dir / "sobol.csv")
            paths[-1].write_bytes(self.to_csv().encode("utf-8"))
        return paths


def read_csv(text: str) -> list[dict]:
    """Parse a report CSV back into ``{u, index, variance, xi_breakdown}`` rows."""
    rows = list(csv.DictReader(io.StringIO(text)))
    return [{"u": IndexSet.parse(r["u"]), "index": float(r["index"]),
             "variance": float(r["variance"]), "xi_breakdown": json.loads(r["xi_breakdown_json"])}
            for r in rows]


def _design(model: AnovaModel, samples, design: DesignMatrix | None) -> np.ndarray:
    return (design or assemble(samples, model.catalog)).matrix


def term_variance(model: AnovaModel, term: TermIndex, samples, design: DesignMatrix | None = None) -> float:
    """Mean over the samples of the squared fitted term."""
    try:
        cols = model.catalog.columns_of(term)
    except KeyError as exc:
        raise ValueError(f"term {term} not in model catalog") from exc
    A = _design(model, samples, design)
    vals = A[:, cols] @ model.coefficients[cols]
    return float(np.mean(vals**2))


def sobol_indices(model: AnovaModel, samples: SampleSet, design: DesignMatrix | None = None,
                  eval_samples: SampleSet | None = None) -> SobolReport:
    """Spherical Sobol indices for every non-constant ``u`` in the model.

    Term variances are averaged over ``eval_samples`` when given, else over
    ``samples``.  The denominator is always the unbiased variance of
    ``samples.values``.
    """
    cat = model.catalog
    ev = eval_samples if eval_samples is not None else samples
    A = assemble(ev, cat).matrix if eval_samples is not None else _design(model, samples, design)
    y = samples.values
    total = float(np.var(y, ddof=1)) if len(y) > 1 else 0.0
    by_u: dict[IndexSet, list[tuple[str, float]]] = {}
    for term, cols in cat.term_blocks().items():
        if term.order == 0:
            continue
        vals = A[:, cols] @ model.coefficients[cols]
        var = float(np.mean(vals**2))
        by_u.setdefault(term.u, []).append(("".join(map(str, term.xi_u)), var))
    const = not total > 0.0
    entries = []
    for u, parts in by_u.items():
        var = float(sum(v for _, v in parts))
        entries.append(SobolEntry(u, var, 0.0 if const else var / total, parts))
    entries.sort(key=lambda e: (-e.index, len(e.u), e.u.members))
    return SobolReport(cat.dim, cat.max_order_q, cat.max_degree_N, len(y), samples.seed, total,
                       entries, const, eval_samples is not None)


def index_support(report: SobolReport, threshold: float) -> list[IndexSet]:
    """Index sets with index at least ``threshold`` times the largest index."""
    if not 0.0 < threshold < 1.0:
        raise ValueError("threshold must lie in (0, 1)")
    if not report.entries:
        return []
    top = max(e.index for e in report.entries)
    if top <= 0.0:
        return []
    return [e.u for e in report.entries if e.index >= threshold * top]


def plotdata_csv(report: SobolReport) -> str:
    """Label and index per row, with the log10 index for log-scale bar charts."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["u", "order", "index", "log10_index"])
    for e in report.entries:
        lg = repr(float(np.log10(e.index))) if e.index > 0 else "-inf"
        w.writerow([e.u.label, len(e.u), repr(e.index), lg])
    return buf.getvalue()
