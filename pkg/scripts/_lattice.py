"""Shared driver for the registration-error reproductions."""
import argparse

from rpreg.bench.experiment import ExperimentConfig, cell_summaries, run_experiment


def main(dataset: str, default_ref: str, doc: str) -> None:
    ap = argparse.ArgumentParser(description=doc)
    ap.add_argument("--ref", default=default_ref)
    ap.add_argument("--estimators", default="knn_k")
    ap.add_argument("--h", default="3")
    ap.add_argument("--d", default="1,2,3,4,5")
    ap.add_argument("--G", default="100")
    ap.add_argument("--runs", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default=f"results_{dataset}.csv")
    ap.add_argument("--resume", action="store_true")
    args = ap.parse_args()

    ints = lambda s: [int(x) for x in s.split(",")]  # noqa: E731
    cfg = ExperimentConfig(dataset=dataset, ref_path=args.ref, estimators=args.estimators.split(","),
                           h_set=ints(args.h), d_set=ints(args.d), G_set=ints(args.G), runs=args.runs,
                           master_seed=args.seed, workers=args.workers, output_path=args.out)
    rows = run_experiment(cfg, resume=args.resume)
    print(f"wrote {len(rows)} rows to {args.out}")
    print(f"{'estimator':>9} {'h':>3} {'d':>3} {'G':>5}  q1     median q3     max    hits<=0.5")
    for c in cell_summaries(rows):
        b = c["error_deg"]
        if b is None:
            print(f"{c['estimator']:>9} {c['h']:>3} {c['d']:>3} {c['G']:>5}  all runs failed")
            continue
        errs = [float(r["error_deg"]) for r in rows if r["error_deg"] and
                (r["estimator"], r["h"], r["d"], r["G"]) == (c["estimator"], str(c["h"]), str(c["d"]), str(c["G"]))]
        hits = sum(e <= 0.5 for e in errs)
        print(f"{c['estimator']:>9} {c['h']:>3} {c['d']:>3} {c['G']:>5}  "
              f"{b['q1']:<6.2f} {b['q2']:<6.2f} {b['q3']:<6.2f} {b['whisker_hi']:<6.2f} {hits}/{len(errs)}")
