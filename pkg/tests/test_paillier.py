import math
import random
from functools import reduce

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rache import paillier
from rache.errors import DomainError, KeyGenerationError, MalformedCiphertextError
from rache.paillier import Ciphertext, decrypt, encrypt, he_add, keygen, rerandomize


def test_key_invariants(pk, sk):
    assert pk.n_squared == pk.n * pk.n
    assert pk.g == pk.n + 1
    assert pk.n.bit_length() == pk.key_bits == 512
    assert sk.n == pk.n
    g_lambda = pow(pk.g, sk.lambda_, pk.n_squared)
    assert sk.mu * ((g_lambda - 1) // pk.n) % pk.n == 1
    assert math.gcd(sk.lambda_, pk.n) == 1


def test_seeded_keygen_is_deterministic():
    a, _ = keygen(512, paillier.insecure_seeded_rng(7))
    b, _ = keygen(512, paillier.insecure_seeded_rng(7))
    c, _ = keygen(512, paillier.insecure_seeded_rng(8))
    assert a.n == b.n
    assert a.n != c.n


def test_keygen_primes_have_half_the_bits():
    rng = paillier.insecure_seeded_rng(3)
    p = paillier.generate_prime(128, rng)
    assert p.bit_length() == 128
    assert paillier.is_probable_prime(p, rng)


@pytest.mark.parametrize("bits", [0, 128, 255, 513])
def test_keygen_rejects_bad_sizes(bits):
    with pytest.raises(DomainError):
        keygen(bits)


def test_prime_search_retry_bound():
    class Composite:
        # every candidate is divisible by 3
        def getrandbits(self, k):
            return 3 * 2 ** (k - 4)

        def randrange(self, a, b):
            return a

    with pytest.raises(KeyGenerationError):
        paillier.generate_prime(64, Composite(), max_attempts=10)


def test_miller_rabin_against_trial_division():
    rng = paillier.insecure_seeded_rng(5)

    def brute(k):
        return k >= 2 and all(k % d for d in range(2, math.isqrt(k) + 1))

    for k in range(0, 5000):
        assert paillier.is_probable_prime(k, rng) == brute(k), k
    # Carmichael numbers fool Fermat but not Miller-Rabin
    for k in (561, 1105, 1729, 2465, 2821, 6601, 8911, 41041, 825265):
        assert not paillier.is_probable_prime(k, rng)


def test_powmod_matches_builtin():
    rng = random.Random(0)
    for _ in range(200):
        b, e, m = rng.getrandbits(300), rng.getrandbits(200), rng.getrandbits(256) | 1
        assert paillier.powmod(b, e, m) == pow(b, e, m)
    with pytest.raises(DomainError):
        paillier.powmod(2, -1, 7)


def test_zero_and_boundary_round_trip(pk, sk, rng):
    assert decrypt(sk, encrypt(pk, 0, rng)) == 0
    assert decrypt(sk, encrypt(pk, pk.n - 1, rng)) == pk.n - 1
    assert decrypt(sk, encrypt(pk, 5, rng)) == 5
    assert decrypt(sk, encrypt(pk, 21, rng)) == 21


def test_encrypt_rejects_out_of_space(pk):
    with pytest.raises(DomainError):
        encrypt(pk, -1)
    with pytest.raises(DomainError):
        encrypt(pk, pk.n)


def test_encrypt_is_probabilistic(pk):
    assert encrypt(pk, 5) != encrypt(pk, 5)


def test_encrypt_is_deterministic_in_test_mode(pk):
    a = encrypt(pk, 5, paillier.insecure_seeded_rng(1))
    b = encrypt(pk, 5, paillier.insecure_seeded_rng(1))
    assert a == b


def test_ciphertext_is_unit(pk, rng):
    c = encrypt(pk, 12345, rng)
    assert 1 <= c.value < pk.n_squared
    assert math.gcd(c.value, pk.n_squared) == 1


def test_round_trip_sweep(pk, sk):
    rng = random.Random(2024)
    for _ in range(1000):
        m = rng.randrange(pk.n)
        assert decrypt(sk, encrypt(pk, m)) == m


def test_decrypt_rejects_non_units(pk, sk):
    for bad in (0, pk.n, pk.n_squared, pk.n_squared + 1):
        with pytest.raises(MalformedCiphertextError):
            decrypt(sk, Ciphertext(bad))


def test_he_add(pk, sk, rng):
    assert decrypt(sk, he_add(pk, encrypt(pk, 2, rng), encrypt(pk, 3, rng))) == 5
    a = 987654321
    assert decrypt(sk, he_add(pk, encrypt(pk, a, rng), encrypt(pk, 0, rng))) == a


def test_he_add_sweep_wraps_mod_n(pk, sk):
    rng = random.Random(77)
    for _ in range(100):
        a, b = rng.randrange(pk.n), rng.randrange(pk.n)
        assert decrypt(sk, he_add(pk, encrypt(pk, a), encrypt(pk, b))) == (a + b) % pk.n


@settings(max_examples=25, deadline=None)
@given(values=st.lists(st.integers(min_value=0, max_value=2**64), min_size=1, max_size=8), order=st.randoms())
def test_fold_order_does_not_matter(pk, sk, values, order):
    cts = [encrypt(pk, v) for v in values]
    order.shuffle(cts)
    total = reduce(lambda x, y: he_add(pk, x, y), cts)
    assert decrypt(sk, total) == sum(values) % pk.n


def test_rerandomize(pk, sk, rng):
    c = encrypt(pk, 7, rng)
    c2 = rerandomize(pk, c)
    assert c2 != c
    assert decrypt(sk, c2) == 7


def test_rerandomize_does_not_count_as_encryption(pk, rng):
    c = encrypt(pk, 7, rng)
    before = paillier.encryption_count()
    rerandomize(pk, c, rng)
    he_add(pk, c, c)
    assert paillier.encryption_count() == before
    encrypt(pk, 1, rng)
    assert paillier.encryption_count() == before + 1


def test_public_key_validation():
    with pytest.raises(DomainError):
        paillier.PublicKey(n=15, n_squared=225, g=17, key_bits=4)
    with pytest.raises(DomainError):
        paillier.PublicKey(n=15, n_squared=225, g=16, key_bits=5)
