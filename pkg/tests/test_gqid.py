import hashlib
import itertools
import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from adhocauth import gqid
from adhocauth.errors import ChallengeOutOfRange, KeygenError, NotInvertible


def test_forced_micro_keys(micro_keys):
    assert (micro_keys.N, micro_keys.K_P, micro_keys.k_p) == (55, 3, 27)
    assert 3 * 27 % 40 == 1
    micro_keys.check()


def test_keygen_512_invariants(keys512):
    keys512.check()
    assert keys512.N.bit_length() == 512
    assert keys512.K_P * keys512.k_p % keys512.phi == 1
    assert math.gcd(keys512.K_P, keys512.phi) == 1


def test_keygen_is_deterministic():
    a = gqid.keygen(256, 65537, random.Random(5))
    b = gqid.keygen(256, 65537, random.Random(5))
    assert (a.p, a.q, a.k_p) == (b.p, b.q, b.k_p)
    c = gqid.keygen(256, 65537, random.Random(6))
    assert c.N != a.N


@pytest.mark.parametrize("bits", [16, 17, 33, 64])
def test_keygen_exact_size(bits):
    keys = gqid.keygen(bits, 3, random.Random(bits))
    assert keys.N.bit_length() == bits
    keys.check()


def test_keygen_rejects_bad_inputs():
    with pytest.raises(ValueError):
        gqid.keygen(8, 3, random.Random(0))
    with pytest.raises(ValueError):
        gqid.keygen(64, 4, random.Random(0))
    # 3 divides (7-1)(11-1)
    with pytest.raises(KeygenError):
        gqid.keygen(0, 3, random.Random(0), p=7, q=11)
    with pytest.raises(ValueError):
        gqid.keygen(0, 3, random.Random(0), p=5, q=5)


def test_keygen_reports_after_bounded_retries(monkeypatch):
    # every candidate is 1 mod 3, so K_P=3 never inverts
    primes = itertools.cycle([193, 199, 211, 223, 229, 241])
    calls = []

    def fake_prime(bits, rng):
        calls.append(bits)
        return next(primes)

    monkeypatch.setattr(gqid, "random_prime", fake_prime)
    with pytest.raises(KeygenError):
        gqid.keygen(16, 3, random.Random(0))
    assert len(calls) == 2 * gqid.KEYGEN_ATTEMPTS


def test_primality_against_sieve():
    rng = random.Random(0)
    sieve = [True] * 5000
    sieve[0] = sieve[1] = False
    for i in range(2, 71):
        for j in range(i * i, 5000, i):
            sieve[j] = False
    assert [n for n in range(5000) if gqid.is_probable_prime(n, rng)] == \
        [n for n in range(5000) if sieve[n]]
    # Carmichael numbers fool Fermat but not Miller-Rabin
    for n in (561, 41041, 825265, 321197185):
        assert not gqid.is_probable_prime(n, rng)


def test_derive_j_hand_evaluated():
    params = gqid.PublicParams(55, 3)
    digest = hashlib.sha256(b"A" + (0).to_bytes(4, "big")).digest()
    assert int.from_bytes(digest, "big") % 55 == 38
    assert gqid.derive_j(b"A", params) == 38


def test_derive_j_skips_non_coprime():
    params = gqid.PublicParams(55, 3)
    for i in range(300):
        j = gqid.derive_j(i.to_bytes(2, "big"), params)
        assert 1 < j < 55 and math.gcd(j, 55) == 1


def test_derive_j_pure_and_collision_free(keys512):
    params = keys512.public
    rng = random.Random(9)
    ids = {rng.randbytes(16) for _ in range(10_000)}
    js = {gqid.derive_j(i, params) for i in ids}
    assert len(js) == len(ids)
    some = next(iter(ids))
    assert gqid.derive_j(some, params) == gqid.derive_j(some, params)
    with pytest.raises(ValueError):
        gqid.derive_j(b"", params)


def test_issue_micro_credential(micro_keys):
    cred = gqid.issue_credential(micro_keys, b"fixture", j=4)
    assert cred.sigma == 9
    assert 9 ** 3 * 4 == 2916 and 2916 % 55 == 1
    assert cred.holds(micro_keys.public)
    assert gqid.issue_credential(micro_keys, b"one", j=1).sigma == 1
    with pytest.raises(NotInvertible):
        gqid.issue_credential(micro_keys, b"bad", j=5)


def test_issue_512_holds(keys512):
    rng = random.Random(4)
    for _ in range(50):
        assert gqid.issue_credential(keys512, rng.randbytes(16)).holds(keys512.public)


def test_commit_micro(micro_keys):
    params = micro_keys.public
    assert gqid.commit(params, None, r=2).u == 8
    assert gqid.commit(params, None, r=1).u == 1


def test_commit_determinism(keys512):
    params = keys512.public
    a = gqid.commit(params, random.Random(1))
    b = gqid.commit(params, random.Random(1))
    c = gqid.commit(params, random.Random(2))
    assert (a.r, a.u) == (b.r, b.u)
    assert a.r != c.r
    assert a.u == pow(a.r, params.K_P, params.N)


def test_respond_and_verify_micro(micro_keys):
    params = micro_keys.public
    cred = gqid.issue_credential(micro_keys, b"fixture", j=4)
    assert gqid.respond(cred, 2, 3, params) == 28
    assert gqid.verify(4, 3, 28, 8, params)
    assert not gqid.verify(4, 3, 27, 8, params)
    one = gqid.issue_credential(micro_keys, b"one", j=1)
    assert gqid.respond(one, 5, 7, params) == 5
    for b in range(1, 56):
        assert gqid.verify(1, b, 5, pow(5, 3, 55), params)


def test_respond_rejects_out_of_range(micro_keys):
    params = micro_keys.public
    cred = gqid.issue_credential(micro_keys, b"fixture", j=4)
    with pytest.raises(ChallengeOutOfRange):
        gqid.respond(cred, 2, 0, params)
    with pytest.raises(ChallengeOutOfRange):
        gqid.respond(cred, 2, 56, params)
    with pytest.raises(ChallengeOutOfRange):
        gqid.respond(cred, 2, 11, params, bound=10)
    assert gqid.respond(cred, 2, 55, params) == 2 * pow(9, 55, 55) % 55


def test_verify_refuses_zero_and_malformed(micro_keys):
    params = micro_keys.public
    # v = u = 0 satisfies J^b * 0 == 0 for every J
    assert not gqid.verify(4, 3, 0, 0, params)
    assert not gqid.verify(4, 3, 28, 63, params)
    assert not gqid.verify(4, -1, 28, 8, params)
    assert not gqid.verify(0, 3, 28, 8, params)


def test_draw_challenge_range(micro_keys):
    rng = random.Random(0)
    draws = [gqid.draw_challenge(micro_keys.public, rng) for _ in range(10_000)]
    assert min(draws) == 1 and max(draws) == 55
    draws = [gqid.draw_challenge(micro_keys.public, rng, bound=10) for _ in range(10_000)]
    assert set(draws) == set(range(1, 11))


def test_sign_micro(micro_keys):
    params = micro_keys.public
    digest = next(d for d in (i.to_bytes(4, "big") for i in range(10_000))
                  if gqid.encode_digest(d, 55) == 4)
    sig = gqid.sign_digest(micro_keys, digest)
    assert sig == 49 == pow(4, 27, 55)
    assert pow(49, 3, 55) == 4
    assert gqid.verify_sig(params, sig, digest)


def test_encode_digest_range():
    for i in range(500):
        x = gqid.encode_digest(i.to_bytes(2, "big"), 55)
        assert 1 < x < 55 and math.gcd(x, 55) == 1


def test_signature_bit_flips_rejected(keys512):
    params = keys512.public
    rng = random.Random(8)
    false_accepts = 0
    for _ in range(1000):
        digest = rng.randbytes(32)
        sig = gqid.sign_digest(keys512, digest)
        assert gqid.verify_sig(params, sig, digest)
        bit = rng.randrange(256)
        flipped = (int.from_bytes(digest, "big") ^ (1 << bit)).to_bytes(32, "big")
        false_accepts += gqid.verify_sig(params, sig, flipped)
    assert false_accepts == 0


def test_verify_sig_malformed(keys512):
    params = keys512.public
    assert not gqid.verify_sig(params, 0, b"x")
    assert not gqid.verify_sig(params, params.N, b"x")
    assert not gqid.verify_sig(params, 5, b"")


def test_exhaustive_micro_against_enumeration(micro_keys):
    """Every (r, b) round agrees with brute-force enumeration of valid v."""
    params = micro_keys.public
    cred = gqid.issue_credential(micro_keys, b"fixture", j=4)
    for r in range(1, 55):
        u = pow(r, 3, 55)
        for b in range(1, 11):
            valid = [v for v in range(1, 55) if pow(4, b, 55) * pow(v, 3, 55) % 55 == u]
            v = gqid.respond(cred, r, b, params)
            assert v in valid
            assert [w for w in range(1, 55) if gqid.verify(4, b, w, u, params)] == valid


@settings(max_examples=200, deadline=None)
@given(seed=st.integers(0, 2 ** 32), b=st.integers(1, 2 ** 64))
def test_completeness_property(keys512, seed, b):
    params = keys512.public
    rng = random.Random(seed)
    cred = gqid.issue_credential(keys512, rng.randbytes(16))
    c = gqid.commit(params, rng)
    v = gqid.respond(cred, c.r, b, params)
    assert gqid.verify(cred.identity.J, b, v, c.u, params)


def test_soundness_random_v(keys64):
    params = keys64.public
    rng = random.Random(10)
    cred = gqid.issue_credential(keys64, b"victim")
    accepts = 0
    for _ in range(10_000):
        u = gqid.commit(params, rng).u
        b = gqid.draw_challenge(params, rng)
        accepts += gqid.verify(cred.identity.J, b, rng.randrange(params.N), u, params)
    assert accepts == 0


def test_residue_guess_forgery_succeeds_at_rate_one_over_exponent():
    """Without sigma, guessing b mod K_P forges with probability ~1/K_P.

    This is why deployments with a full-range challenge want a large K_P.
    """
    keys = gqid.keygen(64, 3, random.Random(12))
    params = keys.public
    J = gqid.derive_j(b"victim", params)
    rng = random.Random(13)
    wins, trials = 0, 3000
    for _ in range(trials):
        guess = rng.randrange(3)
        w = rng.randrange(1, params.N)
        u = pow(J, guess, params.N) * pow(w, 3, params.N) % params.N
        b = gqid.draw_challenge(params, rng)
        if b % 3 != guess:
            continue
        v = w * pow(pow(J, -1, params.N), (b - guess) // 3, params.N) % params.N
        wins += gqid.verify(J, b, v, u, params)
    assert 800 <= wins <= 1200
