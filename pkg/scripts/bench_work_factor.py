"""Honest vs eavesdropper puzzle work across several key sizes.

    python scripts/bench_work_factor.py --count 64 --seeds 20 --bits 8 10 12
"""

import argparse

from adhocauth.bench import bench_puzzles


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--bits", type=int, nargs="+", default=[8, 10, 12])
    ap.add_argument("--count", type=int, default=64)
    ap.add_argument("--seeds", type=int, default=20)
    args = ap.parse_args()
    print(f"{'k':>3}{'honest_mean':>14}{'expected':>12}{'eaves_mean':>14}{'ratio':>9}")
    for k in args.bits:
        r = bench_puzzles(k, args.count, args.seeds)
        eaves = f"{r.eavesdropper.mean:.1f}" if r.eavesdropper else "skipped"
        ratio = f"{r.work_ratio:.2f}" if r.work_ratio is not None else "-"
        print(f"{k:>3}{r.honest.mean:>14.1f}{r.expected_honest:>12.1f}{eaves:>14}{ratio:>9}")
    print(f"k=32 by the same law: 2^31 = {2 ** 31} expected trials (not executed)")


if __name__ == "__main__":
    main()
