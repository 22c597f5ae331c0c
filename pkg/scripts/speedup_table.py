"""Raw-feature estimation time over RP-ensemble time, per estimator and group size."""
import argparse

from rpreg.bench.experiment import ExperimentConfig, format_speedup_table, speedup_table

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ref", default="fixtures/texture_rgb.png")
    ap.add_argument("--estimators", default="kdp,knn_k,knn_1k,mst,wknn")
    ap.add_argument("--G", default="20,50,100,1000")
    ap.add_argument("--h", type=int, default=3)
    ap.add_argument("--d", type=int, default=2, help="RP dimension of the ensemble")
    ap.add_argument("--max-samples", type=int, default=10_000)
    ap.add_argument("--repeats", type=int, default=1)
    args = ap.parse_args()
    cfg = ExperimentConfig(ref_path=args.ref, estimators=args.estimators.split(","), h_set=[args.h],
                           G_set=[int(g) for g in args.G.split(",")], max_samples=args.max_samples)
    table = speedup_table(cfg, d_baseline=args.d, repeats=args.repeats)
    print(format_speedup_table(table), end="")
    print("\nseconds (raw baseline):", {k: round(v, 3) for k, v in table["baseline_s"].items()})
