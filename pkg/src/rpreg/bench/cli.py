"""Command-line entry point: ``rpreg register`` and ``rpreg bench``.

Exit codes: 0 success, 2 configuration error, 3 dataset error,
4 every lattice cell failed.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

from ..entropy.estimators import KINDS
from ..errors import ConfigError, DatasetError, RPRegError
from ..registration import EntropyObjective, NormObjective, sweep
from .experiment import (
    DATASETS,
    ExperimentConfig,
    format_speedup_table,
    prepare_dataset,
    run_experiment,
    speedup_table,
)

EXIT_OK, EXIT_CONFIG, EXIT_DATASET, EXIT_ALL_FAILED = 0, 2, 3, 4

log = logging.getLogger("rpreg")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _int_list(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _common(p):
    p.add_argument("--ref", help="reference image (PNG/PGM/PPM)")
    p.add_argument("--test", help="test image for --dataset custom (default: --ref)")
    p.add_argument("--dataset", choices=DATASETS, default="lena_style")
    p.add_argument("--ref-channel", default="gray", choices=("red", "green", "blue", "gray"))
    p.add_argument("--test-channel", default="gray", choices=("red", "green", "blue", "gray"))
    p.add_argument("--ref-filter", default="none", choices=("none", "sobel"))
    p.add_argument("--test-filter", default="none", choices=("none", "sobel"))
    p.add_argument("--alpha", type=float, default=0.95)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--angles", default="paper", help="'paper' or e.g. '-2:2:0.5,0.25'")
    p.add_argument("--max-samples", type=int, default=None)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--calibrate", action="store_true", help="calibrate graph-length constants")
    p.add_argument("--fresh-per-angle", action="store_true",
                   help="draw new group plans and projections at every angle")
    p.add_argument("--out", default=None)
    p.add_argument("--emit", choices=("csv", "json"), default="csv")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser():
    parser = _Parser(prog="rpreg", description="Random-projection entropy registration")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    reg = sub.add_parser("register", help="one angle sweep")
    _common(reg)
    reg.add_argument("--estimator", default="knn_k", choices=KINDS + ("l1", "l2"))
    reg.add_argument("--h", type=int, default=3)
    reg.add_argument("--d", type=int, default=5)
    reg.add_argument("--G", type=int, default=100)

    bench = sub.add_parser("bench", help="parameter lattice of seeded sweeps")
    _common(bench)
    bench.add_argument("--estimator", type=lambda s: [x for x in s.split(",") if x], default=["knn_k"],
                       help="comma-separated list of " + ",".join(KINDS))
    bench.add_argument("--h", type=_int_list, default=[3])
    bench.add_argument("--d", type=_int_list, default=[5])
    bench.add_argument("--G", type=_int_list, default=[100])
    bench.add_argument("--runs", type=int, default=10)
    bench.add_argument("--resume", action="store_true")
    bench.add_argument("--no-timing", action="store_true",
                       help="leave elapsed_ms empty so repeated runs are byte-identical")
    bench.add_argument("--speedup", type=int, default=None, metavar="D",
                       help="print raw-vs-ensemble speedups at RP dimension D instead of sweeping")
    return parser


def _config(args, *, estimators, h_set, d_set, G_set, runs) -> ExperimentConfig:
    return ExperimentConfig(
        dataset=args.dataset, ref_path=args.ref, test_path=args.test,
        ref_channel=args.ref_channel, test_channel=args.test_channel,
        ref_filter=args.ref_filter, test_filter=args.test_filter,
        estimators=estimators, h_set=h_set, d_set=d_set, G_set=G_set, runs=runs,
        master_seed=args.seed, max_samples=args.max_samples, angles=args.angles,
        alpha=args.alpha, k=args.k, calibrate=args.calibrate,
        shared_randomness=not args.fresh_per_angle,
        record_timing=not getattr(args, "no_timing", False),
        output_path=args.out, emit=args.emit, workers=args.workers,
    )


def _register(args) -> int:
    norm = args.estimator in ("l1", "l2")
    kinds = ["knn_k"] if norm else [args.estimator]
    cfg = _config(args, estimators=kinds, h_set=[args.h], d_set=[args.d], G_set=[args.G], runs=1)
    cfg.validate()
    ref, test = prepare_dataset(cfg)
    if norm:
        objective = NormObjective(h=args.h, q=1 if args.estimator == "l1" else 2)
    else:
        objective = EntropyObjective(h=args.h, d=args.d, G=args.G, spec=cfg.spec(args.estimator),
                                     max_samples=args.max_samples, workers=args.workers)
    res = sweep(ref, test, cfg.angle_grid(), objective, args.seed, shared_randomness=cfg.shared_randomness)
    records = [{"theta": r.theta, "J": r.J, "elapsed_ms": r.elapsed_ms, "valid": r.valid,
                "flags": list(r.flags)} for r in res.per_angle]
    doc = {"theta_star": res.theta_star, "error_deg": res.error_deg, "per_angle": records}
    text = json.dumps(doc, indent=2) + "\n" if args.emit == "json" else (
        "theta,J,elapsed_ms,valid,flags\n"
        + "".join(f"{r['theta']!r},{r['J']!r},{r['elapsed_ms']:.3f},{int(r['valid'])},{';'.join(r['flags'])}\n"
                  for r in records)
    )
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    print(f"theta_star={res.theta_star} error_deg={res.error_deg}")
    return EXIT_OK


def _bench(args) -> int:
    cfg = _config(args, estimators=args.estimator, h_set=args.h, d_set=args.d, G_set=args.G, runs=args.runs)
    if args.speedup is not None:
        table = speedup_table(cfg, args.speedup)
        text = format_speedup_table(table)
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text)
        print(text, end="")
        return EXIT_OK
    rows = run_experiment(cfg, resume=args.resume)
    failed = sum(1 for r in rows if r["flags"].startswith("failed:"))
    log.info("%d rows, %d failed", len(rows), failed)
    if rows and failed == len(rows):
        return EXIT_ALL_FAILED
    if not args.out:
        from .experiment import rows_to_csv, rows_to_json

        sys.stdout.write(rows_to_json(rows, cfg) if cfg.emit == "json" else rows_to_csv(rows))
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "register":
            return _register(args)
        return _bench(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DatasetError, FileNotFoundError, OSError) as exc:
        print(f"dataset error: {exc}", file=sys.stderr)
        return EXIT_DATASET
    except RPRegError as exc:
        # image-level failures (wrong channel, unsupported file) are dataset problems
        print(f"dataset error: {exc}", file=sys.stderr)
        return EXIT_DATASET


if __name__ == "__main__":
    sys.exit(main())
