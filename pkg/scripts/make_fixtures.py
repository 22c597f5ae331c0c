"""Regenerate the synthetic 128x128 fixture images."""
import argparse

from rpreg.synthetic import write_fixtures

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="fixtures")
    ap.add_argument("--size", type=int, default=128)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    for name, path in write_fixtures(args.out, args.size, args.seed).items():
        print(f"{name}: {path}")
