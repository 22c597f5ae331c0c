"""Parameter-lattice experiments: registration error and timing per (estimator, h, d, G)."""
from __future__ import annotations

import csv
import io
import itertools
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

from ..ensemble import baseline_entropy, ensemble_entropy, make_plan
from ..entropy.estimators import KINDS, EstimatorSpec
from ..errors import ConfigError, DatasetError, RPRegError
from ..features import FeatureSet, joint_features
from ..image_io import ImageGrid, load_image, rotate, sobel_magnitude, valid_region
from ..registration import AngleGrid, EntropyObjective, paper_angle_grid, parse_angle_grid, sweep
from ..seeding import derive_seed
from .stats import box_stats

CSV_HEADER = ("dataset", "estimator", "h", "d", "G", "run", "seed", "theta_star_deg",
              "error_deg", "elapsed_ms", "n_groups", "n_skipped", "flags")

DATASETS = ("lena_style", "mandrill_style", "custom")


@dataclass
class ExperimentConfig:
    dataset: str = "lena_style"
    ref_path: str | None = None
    test_path: str | None = None
    ref_channel: str = "gray"
    test_channel: str = "gray"
    ref_filter: str = "none"
    test_filter: str = "none"
    estimators: list = field(default_factory=lambda: ["knn_k"])
    h_set: list = field(default_factory=lambda: [3])
    d_set: list = field(default_factory=lambda: [5])
    G_set: list = field(default_factory=lambda: [100])
    runs: int = 10
    master_seed: int = 0
    max_samples: int | None = None
    angles: str = "paper"
    alpha: float = 0.95
    k: int = 5
    calibrate: bool = False
    shared_randomness: bool = True
    record_timing: bool = True
    output_path: str | None = None
    emit: str = "csv"
    workers: int = 1

    def validate(self) -> None:
        if self.dataset not in DATASETS:
            raise ConfigError(f"dataset must be one of {DATASETS}, got {self.dataset!r}")
        for name in ("estimators", "h_set", "d_set", "G_set"):
            if not getattr(self, name):
                raise ConfigError(f"{name} must not be empty")
        bad = [e for e in self.estimators if e not in KINDS]
        if bad:
            raise ConfigError(f"unknown estimators {bad}; expected some of {KINDS}")
        if self.runs < 1:
            raise ConfigError("runs must be >= 1")
        if any(h < 0 for h in self.h_set) or any(d < 1 for d in self.d_set) or any(G < 2 for G in self.G_set):
            raise ConfigError("need h >= 0, d >= 1 and G >= 2")
        if self.emit not in ("csv", "json"):
            raise ConfigError(f"emit must be csv or json, got {self.emit!r}")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.ref_filter not in ("none", "sobel") or self.test_filter not in ("none", "sobel"):
            raise ConfigError("filters must be 'none' or 'sobel'")
        try:
            self.angle_grid()
            self.spec("knn_k")
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def angle_grid(self) -> AngleGrid:
        return paper_angle_grid() if self.angles == "paper" else parse_angle_grid(self.angles)

    def spec(self, kind: str) -> EstimatorSpec:
        return EstimatorSpec(kind=kind, k=self.k, alpha=self.alpha, calibrate_constant=self.calibrate)

    def cells(self) -> list:
        """The lattice in canonical order; a cell's position is its index."""
        return list(itertools.product(self.estimators, self.h_set, self.d_set, self.G_set))


def _apply_filter(img: ImageGrid, name: str) -> ImageGrid:
    return sobel_magnitude(img) if name == "sobel" else img


def prepare_dataset(cfg: ExperimentConfig):
    """Load the (reference, test) pair described by ``cfg``.

    ``lena_style`` pairs the red and green channels of ``ref_path``;
    ``mandrill_style`` pairs the gray image with its Sobel magnitude;
    ``custom`` loads ``ref_path`` and ``test_path`` (default: the same file)
    with the configured channels and filters.
    """
    if cfg.ref_path is None:
        raise DatasetError("no reference image path given")
    try:
        if cfg.dataset == "lena_style":
            return load_image(cfg.ref_path, "red"), load_image(cfg.ref_path, "green")
        if cfg.dataset == "mandrill_style":
            gray = load_image(cfg.ref_path, "gray")
            return gray, sobel_magnitude(gray)
        ref = _apply_filter(load_image(cfg.ref_path, cfg.ref_channel), cfg.ref_filter)
        test = _apply_filter(load_image(cfg.test_path or cfg.ref_path, cfg.test_channel), cfg.test_filter)
    except RPRegError:
        raise
    except FileNotFoundError as exc:
        raise DatasetError(f"image not found: {exc}") from exc
    if ref.data.shape != test.data.shape:
        raise DatasetError("reference and test images differ in size")
    return ref, test


def _fmt(x) -> str:
    return repr(float(x))


def _run_one(args):
    cfg, ref, test, cell_index, cell, run = args
    kind, h, d, G = cell
    seed = derive_seed(cfg.master_seed, cell_index, run)
    row = {"dataset": cfg.dataset, "estimator": kind, "h": str(h), "d": str(d), "G": str(G),
           "run": str(run), "seed": str(seed)}
    objective = EntropyObjective(h=h, d=d, G=G, spec=cfg.spec(kind), max_samples=cfg.max_samples)
    try:
        res = sweep(ref, test, cfg.angle_grid(), objective, seed, shared_randomness=cfg.shared_randomness)
    except RPRegError as exc:
        row.update(theta_star_deg="", error_deg="", elapsed_ms="", n_groups="0", n_skipped="0",
                   flags=f"failed:{type(exc).__name__}")
        return row
    valid = [r for r in res.per_angle if r.valid]
    flags = sorted({f for r in res.per_angle for f in r.flags})
    n_invalid = len(res.per_angle) - len(valid)
    if n_invalid:
        flags.append(f"invalid_angles={n_invalid}")
    row.update(
        theta_star_deg=_fmt(res.theta_star),
        error_deg=_fmt(res.error_deg),
        elapsed_ms=f"{res.elapsed_ms:.3f}" if cfg.record_timing else "",
        n_groups=str(valid[0].info.get("n_groups", 0) if valid else 0),
        n_skipped=str(sum(r.info.get("n_skipped", 0) for r in valid)),
        flags=";".join(flags),
    )
    return row


def _row_key(row) -> tuple:
    return (row["estimator"], str(row["h"]), str(row["d"]), str(row["G"]), str(row["run"]))


def read_rows(path, emit: str = "csv") -> list:
    if path is None or not os.path.exists(path):
        return []
    if emit == "json":
        with open(path) as fh:
            return [{k: str(v) for k, v in rec.items()} for rec in json.load(fh)["records"]]
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_HEADER, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: row[k] for k in CSV_HEADER})
    return buf.getvalue()


def cell_summaries(rows) -> list:
    out = {}
    for row in rows:
        key = (row["estimator"], int(row["h"]), int(row["d"]), int(row["G"]))
        out.setdefault(key, {"errors": [], "times": []})
        if row["error_deg"] != "":
            out[key]["errors"].append(float(row["error_deg"]))
        if row["elapsed_ms"] != "":
            out[key]["times"].append(float(row["elapsed_ms"]))
    summaries = []
    for (kind, h, d, G), v in out.items():
        summaries.append({
            "estimator": kind, "h": h, "d": d, "G": G, "runs": len(v["errors"]),
            "error_deg": box_stats(v["errors"]).to_dict() if v["errors"] else None,
            "elapsed_ms": box_stats(v["times"]).to_dict() if v["times"] else None,
        })
    return summaries


def rows_to_json(rows, cfg: ExperimentConfig) -> str:
    config = {k: v for k, v in asdict(cfg).items() if k not in ("output_path", "workers")}
    doc = {"config": config, "records": rows, "cells": cell_summaries(rows)}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def run_experiment(cfg: ExperimentConfig, resume: bool = False) -> list:
    """Run ``cfg.runs`` seeded sweeps for every lattice cell and return the rows.

    Every random stream is derived from ``(master_seed, cell index, run)``,
    so the table does not depend on ``workers``.  With ``resume`` the rows
    already present in ``cfg.output_path`` are kept and only missing
    (cell, run) pairs are computed.  The output file, if configured, is
    rewritten in canonical lattice order.
    """
    cfg.validate()
    ref, test = prepare_dataset(cfg)
    cells = cfg.cells()
    done = {}
    if resume:
        for row in read_rows(cfg.output_path, cfg.emit):
            done[_row_key(row)] = row
    tasks = []
    for ci, cell in enumerate(cells):
        for run in range(cfg.runs):
            key = (cell[0], str(cell[1]), str(cell[2]), str(cell[3]), str(run))
            if key not in done:
                tasks.append((cfg, ref, test, ci, cell, run))
    if cfg.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            new_rows = list(pool.map(_run_one, tasks))
    else:
        new_rows = [_run_one(t) for t in tasks]
    for row in new_rows:
        done[_row_key(row)] = row
    rows = []
    for cell in cells:
        for run in range(cfg.runs):
            rows.append(done[(cell[0], str(cell[1]), str(cell[2]), str(cell[3]), str(run))])
    if cfg.output_path:
        text = rows_to_json(rows, cfg) if cfg.emit == "json" else rows_to_csv(rows)
        tmp = f"{cfg.output_path}.tmp"
        with open(tmp, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, cfg.output_path)
    return rows


def _best_time(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def time_ensemble(X, G: int, d, spec: EstimatorSpec, seed: int = 0, repeats: int = 1) -> float:
    """Wall-clock seconds for one grouped estimate (best of ``repeats``)."""
    plan = make_plan(X.T, G, seed)
    return _best_time(lambda: ensemble_entropy(X, plan, d, spec), repeats)


def speedup_table(cfg: ExperimentConfig, d_baseline: int = 2, theta: float = 0.0, repeats: int = 1) -> dict:
    """Raw-data estimation time divided by RP-ensemble time, per estimator and G.

    The features are the joint patches at ``theta`` for the first ``h`` of
    the lattice (subsampled to ``cfg.max_samples``).  The raw baseline runs
    each estimator once on all samples without projection or grouping; the
    ensemble projects to ``d_baseline`` dimensions.

    Returns ``{"G": [...], "rows": {estimator: [ratio per G]}, "baseline_s":
    {...}, "ensemble_s": {...}}``.
    """
    cfg.validate()
    ref, test = prepare_dataset(cfg)
    h = cfg.h_set[0]
    region = valid_region(ref.width, ref.height, abs(theta), h)
    X = joint_features(ref, rotate(test, theta).image, h, region, cfg.max_samples,
                       derive_seed(cfg.master_seed, 0x5A))
    # materialised once so neither timing includes patch gathering
    X = FeatureSet(X.samples)
    out = {"G": list(cfg.G_set), "rows": {}, "baseline_s": {}, "ensemble_s": {}}
    for kind in cfg.estimators:
        spec = cfg.spec(kind)
        base = _best_time(lambda: baseline_entropy(X, spec), repeats)
        ens = [time_ensemble(X, G, d_baseline, spec, cfg.master_seed, repeats) for G in cfg.G_set]
        out["baseline_s"][kind] = base
        out["ensemble_s"][kind] = ens
        out["rows"][kind] = [base / t if t > 0 else float("inf") for t in ens]
    return out


def format_speedup_table(table: dict) -> str:
    head = "estimator," + ",".join(f"G={G}" for G in table["G"])
    lines = [head]
    for kind, ratios in table["rows"].items():
        lines.append(kind + "," + ",".join(f"{r:.2f}" for r in ratios))
    return "\n".join(lines) + "\n"
