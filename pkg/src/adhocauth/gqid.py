"""Guillou-Quisquater identification over an RSA-like modulus.

The bootstrap owns (p, q, k_p); everyone else sees (N, K_P). A node proves
knowledge of sigma with sigma^K_P * J == 1 (mod N) through the usual
commitment u = r^K_P, challenge b, response v = r * sigma^b.
"""

from __future__ import annotations

import hashlib
import math
import random
from dataclasses import dataclass

from .errors import ChallengeOutOfRange, KeygenError, NotInvertible

MR_ROUNDS = 64
KEYGEN_ATTEMPTS = 64

_SMALL_PRIMES = [p for p in range(3, 1000) if all(p % d for d in range(2, int(p ** 0.5) + 1))]


def H(data: bytes) -> bytes:
    return hashlib.sha256(data).digest()


def is_probable_prime(n: int, rng: random.Random, rounds: int = MR_ROUNDS) -> bool:
    if n < 2:
        return False
    if n in (2, 3):
        return True
    if n % 2 == 0:
        return False
    for p in _SMALL_PRIMES:
        if n == p:
            return True
        if n % p == 0:
            return False
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for _ in range(rounds):
        a = rng.randrange(2, n - 1)
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def random_prime(bits: int, rng: random.Random) -> int:
    """Random prime with its top two bits set, so products have full length."""
    if bits < 3:
        raise ValueError("prime size must be at least 3 bits")
    while True:
        cand = rng.getrandbits(bits) | (3 << (bits - 2)) | 1
        if is_probable_prime(cand, rng):
            return cand


@dataclass(frozen=True)
class PublicParams:
    N: int
    K_P: int

    def __post_init__(self):
        if self.N <= 3:
            raise ValueError("modulus must exceed 3")
        if not 1 < self.K_P < self.N:
            raise ValueError("public exponent must lie in (1, N)")


@dataclass(frozen=True, repr=False)
class BootstrapKeys:
    p: int
    q: int
    N: int
    K_P: int
    k_p: int

    @property
    def phi(self) -> int:
        return (self.p - 1) * (self.q - 1)

    @property
    def public(self) -> PublicParams:
        return PublicParams(self.N, self.K_P)

    def check(self, rng: random.Random | None = None) -> None:
        """Raise ValueError unless every key invariant holds."""
        rng = rng or random.Random(0)
        if self.p == self.q:
            raise ValueError("p and q must differ")
        if not (is_probable_prime(self.p, rng) and is_probable_prime(self.q, rng)):
            raise ValueError("p and q must be prime")
        if self.N != self.p * self.q:
            raise ValueError("N != p*q")
        if math.gcd(self.K_P, self.phi) != 1 or self.K_P * self.k_p % self.phi != 1:
            raise ValueError("K_P is not inverted by k_p")

    def __repr__(self) -> str:
        return f"BootstrapKeys(N={self.N:#x}, K_P={self.K_P})"


def keygen(bits: int, exponent: int, rng: random.Random, *,
           p: int | None = None, q: int | None = None) -> BootstrapKeys:
    """Generate bootstrap keys; pass ``p`` and ``q`` to force tiny fixtures."""
    if exponent <= 2 or exponent % 2 == 0:
        raise ValueError("public exponent must be odd and > 2")
    if p is not None or q is not None:
        if p is None or q is None:
            raise ValueError("force both p and q or neither")
        return _finish_keys(p, q, exponent, rng)
    if bits < 16:
        raise ValueError("modulus must be at least 16 bits")
    pbits = bits // 2
    for _ in range(KEYGEN_ATTEMPTS):
        p_ = random_prime(pbits, rng)
        q_ = random_prime(bits - pbits, rng)
        if p_ == q_ or p_ * q_ <= exponent:
            continue
        try:
            return _finish_keys(p_, q_, exponent, rng)
        except KeygenError:
            continue
    raise KeygenError(f"no prime pair coprime to K_P={exponent} in {KEYGEN_ATTEMPTS} attempts")


def _finish_keys(p: int, q: int, exponent: int, rng: random.Random) -> BootstrapKeys:
    if p == q or not is_probable_prime(p, rng) or not is_probable_prime(q, rng):
        raise ValueError("p and q must be distinct primes")
    phi = (p - 1) * (q - 1)
    if math.gcd(exponent, phi) != 1:
        raise KeygenError(f"K_P={exponent} shares a factor with (p-1)(q-1)")
    keys = BootstrapKeys(p=p, q=q, N=p * q, K_P=exponent, k_p=pow(exponent, -1, phi))
    keys.public  # validates 1 < K_P < N
    return keys


def derive_j(identity: bytes, params: PublicParams) -> int:
    """Public map ID -> J: H(ID || counter) mod N, first coprime value > 1."""
    if not identity:
        raise ValueError("identity must be non-empty")
    counter = 0
    while True:
        j = int.from_bytes(H(identity + counter.to_bytes(4, "big")), "big") % params.N
        if j > 1 and math.gcd(j, params.N) == 1:
            return j
        counter += 1


def encode_digest(digest: bytes, N: int) -> int:
    """Injective-in-practice map of a digest into the signable range of Z_N."""
    if not digest:
        raise ValueError("digest must be non-empty")
    x = int.from_bytes(H(digest), "big") % N
    counter = 1
    while x <= 1 or math.gcd(x, N) != 1:
        x = int.from_bytes(H(digest + counter.to_bytes(4, "big")), "big") % N
        counter += 1
    return x


@dataclass(frozen=True)
class Identity:
    ID: bytes
    J: int

    @classmethod
    def from_id(cls, identity: bytes, params: PublicParams) -> Identity:
        return cls(identity, derive_j(identity, params))


@dataclass(frozen=True, repr=False)
class Credential:
    identity: Identity
    sigma: int

    @property
    def ID(self) -> bytes:
        return self.identity.ID

    def holds(self, params: PublicParams) -> bool:
        """Issuance equation sigma^K_P * J == 1, checkable without k_p."""
        return pow(self.sigma, params.K_P, params.N) * self.identity.J % params.N == 1

    def __repr__(self) -> str:
        return f"Credential(ID={self.identity.ID.hex()})"


@dataclass(frozen=True, repr=False)
class Commitment:
    r: int
    u: int

    def __repr__(self) -> str:
        return f"Commitment(u={self.u})"


def issue_credential(keys: BootstrapKeys, identity: bytes, j: int | None = None) -> Credential:
    """sigma = J^(-k_p) mod N. ``j`` overrides the derived value for fixtures."""
    if j is None:
        j = derive_j(identity, keys.public)
    if math.gcd(j, keys.N) != 1:
        raise NotInvertible("J shares a factor with N; choose another ID")
    sigma = pow(pow(j, -1, keys.N), keys.k_p, keys.N)
    return Credential(Identity(identity, j), sigma)


def commit(params: PublicParams, rng: random.Random, r: int | None = None) -> Commitment:
    if r is None:
        r = rng.randint(1, params.N - 1)
    return Commitment(r, pow(r, params.K_P, params.N))


def challenge_bound(params: PublicParams, bound: int | None) -> int:
    return params.N if bound is None else bound


def draw_challenge(params: PublicParams, rng: random.Random, bound: int | None = None) -> int:
    return rng.randint(1, challenge_bound(params, bound))


def respond(cred: Credential, r: int, b: int, params: PublicParams,
            bound: int | None = None) -> int:
    if not 1 <= b <= challenge_bound(params, bound):
        raise ChallengeOutOfRange(f"b={b} outside [1, {challenge_bound(params, bound)}]")
    if not 1 <= r < params.N:
        raise ValueError("nonce outside [1, N-1]")
    return r * pow(cred.sigma, b, params.N) % params.N


def verify(J: int, b: int, v: int, u: int, params: PublicParams) -> bool:
    """Accept iff J^b * v^K_P == u (mod N).

    Zero v or u is refused: it satisfies the equation for every J.
    """
    N = params.N
    if not (0 < v < N and 0 < u < N and 0 < J < N and b >= 0):
        return False
    return pow(J, b, N) * pow(v, params.K_P, N) % N == u


def sign_digest(keys: BootstrapKeys, digest: bytes) -> int:
    return pow(encode_digest(digest, keys.N), keys.k_p, keys.N)


def verify_sig(params: PublicParams, sig: int, digest: bytes) -> bool:
    if not digest or not 0 < sig < params.N:
        return False
    return pow(sig, params.K_P, params.N) == encode_digest(digest, params.N)
