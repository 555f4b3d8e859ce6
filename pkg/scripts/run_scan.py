"""Run the Heinz/Hopf candidate scan and write the per-cell CSV."""

import argparse
import time

from scherk import cli


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--grid", type=int, default=32)
    parser.add_argument("--rmax", type=float, default=0.9)
    parser.add_argument("--out", default="scan.csv")
    parser.add_argument("--workers", type=int)
    args = parser.parse_args()
    argv = ["scan", "--grid", str(args.grid), "--rmax", str(args.rmax), "--out", args.out]
    if args.workers:
        argv += ["--workers", str(args.workers)]
    start = time.perf_counter()
    code = cli.main(argv)
    print(f"elapsed {time.perf_counter() - start:.1f}s")
    raise SystemExit(code)


if __name__ == "__main__":
    main()
