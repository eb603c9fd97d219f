"""Stage-3 speedup benchmark on synthetic data.

    python scripts/run_bench.py --sizes 25000,50000,100000 --workers 1,2,4 --out bench_out
"""

import argparse
import os
from pathlib import Path

from tweetprep.bench import BenchConfig, bench_dedup, write_report

ROOT = Path(__file__).resolve().parent.parent


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", type=Path, default=ROOT / "bench.cfg")
    ap.add_argument("--sizes", default="25000,50000,100000")
    ap.add_argument("--workers", default="1,2,4")
    ap.add_argument("--backend", choices=("thread", "process"))
    ap.add_argument("--repeats", type=int)
    ap.add_argument("--no-sequential", action="store_true", help="skip the reference engine timings")
    ap.add_argument("--out", type=Path, default=Path("bench_out"))
    args = ap.parse_args()

    cfg = BenchConfig.from_file(args.config) if args.config.exists() else BenchConfig()
    if args.backend:
        cfg.backend = args.backend
    if args.repeats:
        cfg.repeats = args.repeats
    sizes = [int(s) for s in args.sizes.split(",")]
    workers = [int(w) for w in args.workers.split(",")]

    report = bench_dedup(cfg, sizes, workers, include_sequential=not args.no_sequential)
    print(report.format())
    print(f"size-monotone (25% tolerance): {report.monotone_in_size()}")
    cores = os.cpu_count() or 1
    if 4 in workers:
        largest = max(sizes)
        sp = report.speedup(largest, 4)
        verdict = "n/a" if cores < cfg.min_cores else ("met" if sp >= cfg.speedup_target else "missed")
        print(f"4-worker speedup at {largest}: {sp:.2f}x, target {cfg.speedup_target}x on >= "
              f"{cfg.min_cores} cores ({cores} here): {verdict}")
    print(f"report -> {write_report(report, args.out)}")


if __name__ == "__main__":
    main()
