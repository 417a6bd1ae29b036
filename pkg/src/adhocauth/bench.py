"""Puzzle work-factor measurements and puzzle-overhead size reports."""

from __future__ import annotations

import random
import statistics
import time
from dataclasses import dataclass

from . import gqid
from .puzzle import SOLVE_ALL_BUDGET, PuzzleParams, make_puzzle_set, solve_all, solve_one

# small fixed modulus: u only needs to exist, its size does not affect solving
_BENCH_KEYS_BITS = 128


@dataclass(frozen=True)
class TrialStats:
    mean: float
    min: int
    max: int
    wall: float

    @classmethod
    def of(cls, trials: list[int], wall: float) -> TrialStats:
        return cls(statistics.fmean(trials), min(trials), max(trials), wall)


@dataclass(frozen=True)
class BenchReport:
    k: int
    n: int
    seeds: int
    honest: TrialStats
    eavesdropper: TrialStats | None

    @property
    def expected_honest(self) -> float:
        return (2 ** self.k + 1) / 2

    @property
    def work_ratio(self) -> float | None:
        if self.eavesdropper is None:
            return None
        return self.eavesdropper.mean / self.honest.mean

    def rows(self) -> list[str]:
        out = [f"puzzle bench: k={self.k} n={self.n} seeds={self.seeds}",
               f"{'solver':<14}{'mean':>14}{'min':>10}{'max':>12}{'wall_s':>10}"]
        for label, st in (("honest-one", self.honest), ("eavesdrop-all", self.eavesdropper)):
            if st is not None:
                out.append(f"{label:<14}{st.mean:>14.1f}{st.min:>10}{st.max:>12}{st.wall:>10.3f}")
        if self.eavesdropper is None:
            out.append("eavesdrop-all skipped: n*2^k above the 2^26 budget")
        out.append(f"expected honest trials (2^k+1)/2 = {self.expected_honest:.1f}")
        if self.work_ratio is not None:
            out.append(f"eavesdropper/honest work ratio = {self.work_ratio:.2f} (n = {self.n})")
        out.append(f"analytic k=32: expected trials per puzzle = 2^31 = {2 ** 31} (not executed)")
        return out


def bench_puzzles(k: int, n: int, seeds: int) -> BenchReport:
    params = PuzzleParams(n=n, k=k)
    gq = gqid.keygen(_BENCH_KEYS_BITS, 65537, random.Random(0)).public
    do_all = n * params.keyspace <= SOLVE_ALL_BUDGET
    honest, eaves, t_one, t_all = [], [], 0.0, 0.0
    for seed in range(seeds):
        rng = random.Random(f"bench:{k}:{n}:{seed}")
        puzzles, _ = make_puzzle_set(params, gq, rng.randbytes(32), rng)
        t0 = time.perf_counter()
        honest.append(solve_one(puzzles, params, rng).trials)
        t_one += time.perf_counter() - t0
        if do_all:
            t0 = time.perf_counter()
            eaves.append(solve_all(puzzles, params).trials)
            t_all += time.perf_counter() - t0
    return BenchReport(k, n, seeds, TrialStats.of(honest, t_one),
                       TrialStats.of(eaves, t_all) if do_all else None)


def size_ratio(set_bytes: int, message_bytes: int) -> float | None:
    """Puzzle-set overhead relative to the message; None when undefined."""
    if message_bytes <= 0:
        return None
    return set_bytes / message_bytes


@dataclass(frozen=True)
class SizeReport:
    rounds: list[tuple[int, int]]

    @property
    def ratio(self) -> float | None:
        return size_ratio(sum(s for s, _ in self.rounds), sum(m for _, m in self.rounds))

    def rows(self) -> list[str]:
        out = [f"{'round':<7}{'set_bytes':>11}{'msg_bytes':>11}{'ratio':>12}"]
        for i, (s, m) in enumerate(self.rounds, 1):
            r = size_ratio(s, m)
            out.append(f"{i:<7}{s:>11}{m:>11}{'undefined' if r is None else f'{r:.6f}':>12}")
        r = self.ratio
        out.append("total ratio: " + ("undefined (no message bytes)" if r is None else f"{r:.6f}"))
        return out
