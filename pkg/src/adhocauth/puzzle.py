"""Merkle puzzles carrying a GQ commitment.

Each puzzle is the payload ``K_const || X || F(X) || u`` encrypted under a
short key R drawn from [0, 2^k). The cipher is a SHA-256 counter-mode
keystream; brute-force hardness is set by k alone.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass

from . import gqid
from .errors import BudgetExceeded, MalformedFrame, UnsolvablePuzzle
from .wire import Reader, encode_bytes, encode_int, u32

K_CONST = b"MERKLE01"
X_LEN = 16
FX_LEN = 32
MAX_KEY_BITS = 40
SOLVE_ALL_BUDGET = 1 << 26
TAG_PUZZLES = 0x02

_ZERO_BLOCK = (0).to_bytes(8, "big")


@dataclass(frozen=True)
class PuzzleParams:
    n: int = 16
    k: int = 12
    k_const: bytes = K_CONST

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("a puzzle set needs at least one puzzle")
        if not 0 <= self.k <= MAX_KEY_BITS:
            raise ValueError(f"key bits must lie in [0, {MAX_KEY_BITS}]")
        if len(self.k_const) != 8:
            raise ValueError("redundancy constant must be 8 bytes")

    @property
    def keyspace(self) -> int:
        return 1 << self.k

    @property
    def expected_trials(self) -> float:
        """Mean brute-force trials for one puzzle, (2^k + 1) / 2."""
        return (self.keyspace + 1) / 2


@dataclass(frozen=True)
class Puzzle:
    ciphertext: bytes


@dataclass(frozen=True)
class PuzzlePayload:
    k_const: bytes
    x: bytes
    fx: bytes
    u: int

    def to_bytes(self) -> bytes:
        return self.k_const + self.x + self.fx + encode_int(self.u)

    @classmethod
    def from_bytes(cls, data: bytes) -> PuzzlePayload:
        rd = Reader(data)
        k_const, x, fx = rd.take(8), rd.take(X_LEN), rd.take(FX_LEN)
        u = rd.int()
        rd.finish()
        return cls(k_const, x, fx, u)


@dataclass(frozen=True, repr=False)
class PuzzleSecret:
    x: bytes
    fx: bytes
    key: int
    r: int
    u: int

    def __repr__(self) -> str:
        return f"PuzzleSecret(x={self.x.hex()})"


@dataclass(frozen=True)
class Solution:
    index: int
    x: bytes
    fx: bytes
    u: int
    trials: int


@dataclass(frozen=True)
class BruteForceReport:
    payloads: list[PuzzlePayload]
    trials: int


def keystream(key: bytes, length: int) -> bytes:
    blocks = (length + 31) // 32
    return b"".join(hashlib.sha256(key + j.to_bytes(8, "big")).digest()
                    for j in range(blocks))[:length]


def xor(data: bytes, stream: bytes) -> bytes:
    return (int.from_bytes(data, "big") ^ int.from_bytes(stream, "big")).to_bytes(len(data), "big")


def g_encrypt(payload: bytes, key: int) -> bytes:
    """G(payload, R); its own inverse."""
    return xor(payload, keystream(key.to_bytes(8, "big"), len(payload)))


def secret_function(f_secret: bytes, x: bytes) -> bytes:
    """The initiator's keyed F(X)."""
    return hashlib.sha256(f_secret + x).digest()[:FX_LEN]


def make_puzzle_set(params: PuzzleParams, gq: gqid.PublicParams, f_secret: bytes,
                    rng: random.Random) -> tuple[list[Puzzle], list[PuzzleSecret]]:
    if len(f_secret) != 32:
        raise ValueError("F secret must be 32 bytes")
    puzzles, secrets, seen = [], [], set()
    while len(puzzles) < params.n:
        x = rng.randbytes(X_LEN)
        if x in seen:
            continue
        seen.add(x)
        fx = secret_function(f_secret, x)
        c = gqid.commit(gq, rng)
        key = rng.getrandbits(params.k) if params.k else 0
        payload = PuzzlePayload(params.k_const, x, fx, c.u).to_bytes()
        puzzles.append(Puzzle(g_encrypt(payload, key)))
        secrets.append(PuzzleSecret(x, fx, key, c.r, c.u))
    return puzzles, secrets


def _try_key(puzzle: Puzzle, key: int, params: PuzzleParams) -> PuzzlePayload | None:
    try:
        payload = PuzzlePayload.from_bytes(g_encrypt(puzzle.ciphertext, key))
    except MalformedFrame:
        return None
    return payload if payload.k_const == params.k_const else None


def _search(puzzle: Puzzle, params: PuzzleParams, start: int, stride: int):
    """Walk keys start, start+stride, ... mod 2^k. Returns (payload, trials)."""
    ct = puzzle.ciphertext
    if len(ct) < 8:
        raise UnsolvablePuzzle("ciphertext shorter than the redundancy constant")
    target = xor(ct[:8], params.k_const)
    mask = params.keyspace - 1
    sha = hashlib.sha256
    key = start
    for trial in range(1, params.keyspace + 1):
        if sha(key.to_bytes(8, "big") + _ZERO_BLOCK).digest()[:8] == target:
            payload = _try_key(puzzle, key, params)
            if payload is not None:
                return payload, trial
        key = (key + stride) & mask
    raise UnsolvablePuzzle("no key in the key space opens this puzzle")


def solve_one(puzzles: list[Puzzle], params: PuzzleParams, rng: random.Random) -> Solution:
    """Pick one puzzle uniformly and brute-force it in a random key order."""
    if not puzzles:
        raise ValueError("empty puzzle set")
    index = rng.randrange(len(puzzles))
    # odd stride makes the affine walk a permutation of the key space
    start = rng.getrandbits(params.k) if params.k else 0
    stride = rng.getrandbits(params.k) | 1 if params.k else 1
    payload, trials = _search(puzzles[index], params, start, stride)
    return Solution(index, payload.x, payload.fx, payload.u, trials)


def solve_all(puzzles: list[Puzzle], params: PuzzleParams) -> BruteForceReport:
    """Eavesdropper's oracle: open every puzzle, counting every trial."""
    if len(puzzles) * params.keyspace > SOLVE_ALL_BUDGET:
        raise BudgetExceeded(f"n*2^k = {len(puzzles) * params.keyspace} exceeds 2^26")
    payloads, total = [], 0
    for puzzle in puzzles:
        payload, trials = _search(puzzle, params, 0, 1)
        payloads.append(payload)
        total += trials
    return BruteForceReport(payloads, total)


def encode_puzzle_set(puzzles: list[Puzzle]) -> bytes:
    if not puzzles:
        raise ValueError("empty puzzle set")
    return bytes([TAG_PUZZLES]) + u32(len(puzzles)) + b"".join(
        encode_bytes(p.ciphertext) for p in puzzles)


def decode_puzzle_set(data: bytes) -> list[Puzzle]:
    rd = Reader(data)
    if rd.byte() != TAG_PUZZLES:
        raise MalformedFrame("not a puzzle-set frame")
    n = rd.u32()
    if n == 0:
        raise MalformedFrame("empty puzzle set")
    if n > rd.remaining() // 4:
        raise MalformedFrame(f"count {n} cannot fit in frame")
    puzzles = [Puzzle(rd.bytes()) for _ in range(n)]
    rd.finish()
    return puzzles
