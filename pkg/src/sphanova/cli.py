"""Command-line runner: ``sphanova run`` and ``sphanova verify``.

Exit codes: 0 success, 1 verify failure, 2 infeasible configuration or bad
input data, 3 unknown function, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import platform
import sys
import time
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__, checks
from .basis import KeepRule, build_catalog, table_keep_rule
from .fit import assemble, fit_joint, fit_staged, relative_rmse
from .lsqr import LsqrOptions
from .sensitivity import plotdata_csv, sobol_indices
from .sphere import SampleSet, sample_uniform
from .testfns import test_function

log = logging.getLogger("sphanova")

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_UNKNOWN_FN, EXIT_IO = 0, 1, 2, 3, 4


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


@dataclass
class ExperimentConfig:
    function: str
    d: int
    M: int
    q: int
    N_max: int
    seed: int
    strategy: str
    output_dir: str
    formats: tuple[str, ...]
    holdout: float = 0.0
    mode: str = "anova"

    def strategies(self) -> list[str]:
        return ["joint", "staged"] if self.strategy == "both" else [self.strategy]


def read_tabulated(path: str, d: int | None) -> np.ndarray:
    """Rows of ``d+1`` coordinates followed by a value; header optional.

    Rows off the sphere by more than 1e-9 are renormalized with a warning;
    more than 1e-6 is an error.
    """
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = [r for r in csv.reader(fh) if r and not r[0].lstrip().startswith("#")]
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read data file: {exc}") from exc
    try:
        float(rows[0][0])
    except (ValueError, IndexError):
        rows = rows[1:]
    try:
        data = np.array([[float(v) for v in r] for r in rows])
    except ValueError as exc:
        raise CliError(EXIT_CONFIG, f"non-numeric entry in data file: {exc}") from exc
    if data.ndim != 2 or data.shape[0] == 0 or data.shape[1] < 3:
        raise CliError(EXIT_CONFIG, "data file needs rows of at least 2 coordinates and a value")
    if not np.all(np.isfinite(data)):
        raise CliError(EXIT_CONFIG, "data file contains non-finite values")
    if d is not None and data.shape[1] != d + 2:
        raise CliError(EXIT_CONFIG, f"data has {data.shape[1] - 1} coordinates, --d {d} needs {d + 1}")
    dev = np.abs(np.linalg.norm(data[:, :-1], axis=1) - 1.0)
    if np.any(dev > 1e-6):
        raise CliError(EXIT_CONFIG, f"data points off the sphere by up to {dev.max():.2e}")
    if np.any(dev > 1e-9):
        log.warning("renormalizing %d points off the sphere by up to %.2e", int(np.sum(dev > 1e-9)), dev.max())
        data[:, :-1] /= np.linalg.norm(data[:, :-1], axis=1, keepdims=True)
    return data


VALIDATION_STREAM = 0xE7A1


def _samples(cfg: ExperimentConfig, data_path: str | None) -> tuple[SampleSet, SampleSet | None]:
    """Training samples and, if one can be had, a validation set.

    Test functions are fitted on all ``M`` draws and validated on an
    independent draw of ``max(1000, M // 5)`` points unless ``holdout`` asks
    for a split.  Tabulated data is validated only through ``holdout``.
    """
    src = cfg.function
    if data_path or src.startswith("file:"):
        data = read_tabulated(data_path or src[len("file:"):], None)
        cfg.d = data.shape[1] - 2
        cfg.M = data.shape[0]
        samples = SampleSet(data[:, :-1], data[:, -1], cfg.seed)
        return samples.split(cfg.holdout) if cfg.holdout > 0 else (samples, None)
    try:
        tf = test_function(src)
    except KeyError as exc:
        raise CliError(EXIT_UNKNOWN_FN, str(exc.args[0])) from exc
    if cfg.d < tf.min_dim:
        raise CliError(EXIT_CONFIG, f"f_{tf.name} needs d >= {tf.min_dim}")
    pts = sample_uniform(cfg.d, cfg.M, cfg.seed)
    samples = SampleSet(pts, tf(pts), cfg.seed)
    if cfg.holdout > 0:
        return samples.split(cfg.holdout)
    vpts = sample_uniform(cfg.d, max(1000, cfg.M // 5), np.random.default_rng([cfg.seed, VALIDATION_STREAM]))
    return samples, SampleSet(vpts, tf(vpts), cfg.seed)


def _write(path: Path, text: str) -> None:
    try:
        path.write_bytes(text.encode("utf-8"))
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write {path}: {exc}") from exc


def run_experiment(cfg: ExperimentConfig, data_path: str | None = None) -> dict:
    """Fit, compute indices, and write all artifacts; returns the manifest."""
    timings: dict[str, float] = {}
    t0 = time.perf_counter()
    if cfg.q not in (1, 2):
        raise CliError(EXIT_CONFIG, "--q must be 1 or 2")
    if cfg.N_max < 2 or cfg.M < 1 or cfg.d < 2:
        raise CliError(EXIT_CONFIG, "need --Nmax >= 2, --M >= 1 and --d >= 2")
    if cfg.q > cfg.d - 1:
        raise CliError(EXIT_CONFIG, f"--q {cfg.q} exceeds d-1 = {cfg.d - 1}")
    train, val = _samples(cfg, data_path)
    catalog = build_catalog(cfg.d, cfg.q, cfg.N_max, mode=cfg.mode)
    if len(train) < len(catalog):
        raise CliError(EXIT_CONFIG, f"infeasible: {len(train)} training samples < {len(catalog)} basis columns")
    timings["setup_s"] = time.perf_counter() - t0

    out = Path(cfg.output_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot create output directory: {exc}") from exc

    t1 = time.perf_counter()
    design = assemble(train, catalog)
    val_design = assemble(val, catalog) if val is not None else None
    timings["assemble_s"] = time.perf_counter() - t1
    fitters = {"joint": fit_joint, "staged": fit_staged}
    results = {}
    opts = LsqrOptions()
    for strat in cfg.strategies():
        t2 = time.perf_counter()
        model = fitters[strat](train, catalog, opts, design=design)
        report = sobol_indices(model, train, design=design)
        timings[f"{strat}_fit_s"] = time.perf_counter() - t2
        sub = out / strat
        try:
            sub.mkdir(exist_ok=True)
        except OSError as exc:
            raise CliError(EXIT_IO, f"cannot create {sub}: {exc}") from exc
        _write(sub / "model.json", json.dumps(model.to_dict(), indent=1, sort_keys=True) + "\n")
        if "json" in cfg.formats:
            _write(sub / "sobol.json", report.to_json())
        if "csv" in cfg.formats:
            _write(sub / "sobol.csv", report.to_csv())
        _write(sub / "plotdata.csv", plotdata_csv(report))
        val_rmse = None
        if val_design is not None:
            val_rmse = relative_rmse(val_design.matrix @ model.coefficients, val.values)
        results[strat] = {
            "lsqr_stop_reason": model.fit_meta["stop_reason"],
            "iterations": model.fit_meta["iterations"],
            "train_residual_norm": model.fit_meta["residual_norm"],
            "validation_relative_rmse": val_rmse,
            "top_indices": [[e.u.label, e.index] for e in report.entries[:10]],
        }
    manifest = {
        "config": asdict(cfg),
        "seed": cfg.seed,
        "M": cfg.M,
        "M_train": len(train),
        "M_validation": 0 if val is None else len(val),
        "d": cfg.d,
        "q": cfg.q,
        "N_max": cfg.N_max,
        "strategy": cfg.strategy,
        "catalog_columns": len(catalog),
        "lsqr_options": asdict(opts),
        "results": results,
        "versions": {
            "sphanova": __version__,
            "numpy": np.__version__,
            "python": platform.python_version(),
        },
    }
    _write(out / "run-manifest.json", json.dumps(manifest, indent=1, sort_keys=True) + "\n")
    timings["total_s"] = time.perf_counter() - t0
    _write(out / "timings.json", json.dumps(timings, indent=1, sort_keys=True) + "\n")
    return manifest


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sphanova", description="Spherical ANOVA decomposition and Sobol indices.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="fit a test function or tabulated data and write reports")
    r.add_argument("--function", default="A", help="A-F, or file:<path> for tabulated samples")
    r.add_argument("--data", help="CSV of rows x_1..x_{d+1},value (overrides --function)")
    r.add_argument("--d", type=int, default=10)
    r.add_argument("--M", type=int, default=10_000)
    r.add_argument("--q", type=int, default=2)
    r.add_argument("--Nmax", type=int, default=10)
    r.add_argument("--seed", type=int, default=1)
    r.add_argument("--strategy", choices=["joint", "staged", "both"], default="both")
    r.add_argument("--out", default="runs/latest")
    r.add_argument("--format", default="json,csv", help="comma-separated subset of json,csv")
    r.add_argument("--holdout", type=float, default=0.0,
                   help="fraction of samples held out for validation; 0 fits on all of them")
    r.add_argument("--mode", choices=["anova", "table"], default="anova")

    v = sub.add_parser("verify", help="run the invariant suites")
    v.add_argument("--only", action="append", help=f"suite name(s): {', '.join(checks.SUITES)}")
    return p


def _apply_thread_cap() -> None:
    n = os.environ.get("SPHANOVA_THREADS")
    if not n:
        return
    from threadpoolctl import threadpool_limits

    try:
        threadpool_limits(int(n))
    except ValueError:
        log.warning("ignoring non-integer SPHANOVA_THREADS=%r", n)


def _verify(only: list[str] | None, keep_rule: KeepRule) -> int:
    names = None
    if only:
        names = [s.strip() for item in only for s in item.split(",") if s.strip()]
    try:
        results, elapsed = checks.run(names, keep_rule=keep_rule)
    except KeyError as exc:
        print(exc.args[0], file=sys.stderr)
        return EXIT_CONFIG
    width = max(len(r.name) for r in results)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.suite:<14} {r.name:<{width}}  {r.detail}")
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed in {elapsed:.1f} s")
    if failed:
        print(f"first failure: [{failed[0].suite}] {failed[0].name}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def main(argv: list[str] | None = None, keep_rule: KeepRule = table_keep_rule) -> int:
    """Entry point; ``keep_rule`` lets tests inject a faulty selection rule."""
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    _apply_thread_cap()
    if args.command == "verify":
        return _verify(args.only, keep_rule)
    formats = tuple(f.strip() for f in args.format.split(",") if f.strip())
    if not formats or any(f not in ("json", "csv") for f in formats):
        print("--format must be a subset of json,csv", file=sys.stderr)
        return EXIT_CONFIG
    if not 0.0 <= args.holdout < 1.0:
        print("--holdout must lie in [0, 1)", file=sys.stderr)
        return EXIT_CONFIG
    cfg = ExperimentConfig(args.function, args.d, args.M, args.q, args.Nmax, args.seed, args.strategy,
                           args.out, formats, args.holdout, args.mode)
    try:
        manifest = run_experiment(cfg, args.data)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    for strat, res in manifest["results"].items():
        top = ", ".join(f"{u}={v:.3g}" for u, v in res["top_indices"][:5])
        print(f"[{strat}] columns={manifest['catalog_columns']} stop='{res['lsqr_stop_reason']}' top: {top}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
