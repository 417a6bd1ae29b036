"""Puzzle-set overhead against message length for a few set sizes.

    python scripts/size_sweep.py
"""

import argparse
import random

from adhocauth import gqid
from adhocauth.bench import size_ratio
from adhocauth.frames import PuzzleSet
from adhocauth.puzzle import PuzzleParams, make_puzzle_set


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--bits", type=int, default=512, help="modulus size")
    ap.add_argument("--counts", type=int, nargs="+", default=[1, 4, 16, 64])
    ap.add_argument("--lengths", type=int, nargs="+", default=[1024, 16384, 65536, 1 << 20])
    args = ap.parse_args()
    gq = gqid.keygen(args.bits, 65537, random.Random(0)).public
    print(f"{'n':>4}{'set_bytes':>11}" + "".join(f"{'m=' + str(m):>12}" for m in args.lengths))
    for n in args.counts:
        puzzles, _ = make_puzzle_set(PuzzleParams(n=n, k=0), gq, bytes(32), random.Random(n))
        size = len(PuzzleSet(tuple(puzzles)).encode())
        ratios = "".join(f"{size_ratio(size, m):>12.5f}" for m in args.lengths)
        print(f"{n:>4}{size:>11}{ratios}")


if __name__ == "__main__":
    main()
