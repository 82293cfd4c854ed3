"""Paillier additive homomorphic cryptosystem over Python integers.

Keys use the ``g = n + 1`` variant, so ``g^m mod n^2`` collapses to
``1 + m*n``.  The only modular exponentiation routine is :func:`powmod`;
encrypt, decrypt and rerandomize all go through it.

WARNING: nothing here is constant time.  This module backs a benchmark
harness and must not be used to protect real data.

Randomness is passed explicitly as an *entropy source*: any object with
``getrandbits(k)`` and ``randrange(a, b)``, i.e. :class:`random.Random` or
:class:`random.SystemRandom`.  The default is always the operating system
CSPRNG; :func:`insecure_seeded_rng` exists only for reproducible tests.
"""
from __future__ import annotations

import math
import random
import threading
from dataclasses import dataclass, field

import gmpy2

from rache.errors import DomainError, KeyGenerationError, MalformedCiphertextError

DEFAULT_KEY_BITS = 2048
TEST_KEY_BITS = 512
MILLER_RABIN_ROUNDS = 40

_SMALL_PRIMES = [p for p in range(3, 2000, 2) if all(p % d for d in range(3, math.isqrt(p) + 1, 2))]

# he(.) calls made in this process; read through encryption_count()
_encryptions = 0
_encryptions_lock = threading.Lock()


def default_rng() -> random.SystemRandom:
    return random.SystemRandom()


def insecure_seeded_rng(seed: int) -> random.Random:
    """Deterministic entropy source for TEST MODE ONLY.

    Keys and ciphertexts produced with it are reproducible from the seed,
    which is exactly what makes them worthless as secrets.
    """
    return random.Random(seed)


def powmod(base: int, exponent: int, modulus: int) -> int:
    """Return ``base ** exponent % modulus`` (GMP backed, not constant time)."""
    if exponent < 0:
        raise DomainError("negative exponents are not supported")
    return int(gmpy2.powmod(base, exponent, modulus))


def encryption_count() -> int:
    """Number of homomorphic encryptions performed by this process so far."""
    return _encryptions


def _l_function(u: int, n: int) -> int:
    return (u - 1) // n


def is_probable_prime(candidate: int, rng, rounds: int = MILLER_RABIN_ROUNDS) -> bool:
    """Miller-Rabin with ``rounds`` random bases drawn from ``rng``."""
    if candidate < 2:
        return False
    if candidate in (2, 3):
        return True
    if candidate % 2 == 0:
        return False
    for p in _SMALL_PRIMES:
        if candidate == p:
            return True
        if candidate % p == 0:
            return False

    d, s = candidate - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for _ in range(rounds):
        a = rng.randrange(2, candidate - 1)
        x = powmod(a, d, candidate)
        if x in (1, candidate - 1):
            continue
        for _ in range(s - 1):
            x = x * x % candidate
            if x == candidate - 1:
                break
        else:
            return False
    return True


def generate_prime(bits: int, rng, max_attempts: int | None = None) -> int:
    """Random probable prime of exactly ``bits`` bits with the top two bits set.

    Setting the two top bits guarantees that the product of two such primes
    has exactly ``2 * bits`` bits.
    """
    if max_attempts is None:
        # prime density near 2^bits is ~1/(bits ln 2); odd candidates double it
        max_attempts = 50 * bits
    for _ in range(max_attempts):
        candidate = rng.getrandbits(bits) | (0b11 << (bits - 2)) | 1
        if is_probable_prime(candidate, rng):
            return candidate
    raise KeyGenerationError(f"no {bits}-bit prime found in {max_attempts} attempts")


@dataclass(frozen=True)
class PublicKey:
    n: int
    n_squared: int = field(repr=False)
    g: int = field(repr=False)
    key_bits: int

    def __post_init__(self):
        if self.n_squared != self.n * self.n:
            raise DomainError("n_squared must equal n * n")
        if self.g != self.n + 1:
            raise DomainError("only g = n + 1 is supported")
        if self.n.bit_length() != self.key_bits:
            raise DomainError(f"n has {self.n.bit_length()} bits, expected {self.key_bits}")

    @classmethod
    def from_modulus(cls, n: int) -> PublicKey:
        return cls(n=n, n_squared=n * n, g=n + 1, key_bits=n.bit_length())


@dataclass(frozen=True)
class PrivateKey:
    lambda_: int = field(repr=False)
    mu: int = field(repr=False)
    n: int

    def __post_init__(self):
        if math.gcd(self.lambda_, self.n) != 1:
            raise DomainError("lambda must be coprime to n")
        g_lambda = powmod(self.n + 1, self.lambda_, self.n * self.n)
        if self.mu * _l_function(g_lambda, self.n) % self.n != 1:
            raise DomainError("mu is not the inverse of L(g^lambda mod n^2)")


@dataclass(frozen=True, slots=True)
class Ciphertext:
    """An element of the unit group modulo n^2."""

    value: int


def keygen(key_bits: int = DEFAULT_KEY_BITS, rng=None) -> tuple[PublicKey, PrivateKey]:
    if key_bits < 256 or key_bits % 2:
        raise DomainError(f"key_bits must be an even number >= 256, got {key_bits}")
    rng = rng or default_rng()
    half = key_bits // 2
    # p == q, or a lambda sharing a factor with n, are astronomically rare
    for _ in range(16):
        p = generate_prime(half, rng)
        q = generate_prime(half, rng)
        if p == q:
            continue
        n = p * q
        lam = math.lcm(p - 1, q - 1)
        if math.gcd(lam, n) != 1:
            continue
        pk = PublicKey.from_modulus(n)
        mu = int(gmpy2.invert(_l_function(powmod(pk.g, lam, pk.n_squared), n), n))
        return pk, PrivateKey(lambda_=lam, mu=mu, n=n)
    raise KeyGenerationError("could not find a valid prime pair")


def _random_unit(n: int, rng) -> int:
    while True:
        rho = rng.randrange(1, n)
        if math.gcd(rho, n) == 1:
            return rho


def encrypt(pk: PublicKey, m: int, rng=None) -> Ciphertext:
    if not 0 <= m < pk.n:
        raise DomainError(f"plaintext must lie in [0, n); got {m}")
    global _encryptions
    rng = rng or default_rng()
    with _encryptions_lock:
        _encryptions += 1
    rho_n = powmod(_random_unit(pk.n, rng), pk.n, pk.n_squared)
    return Ciphertext((1 + m * pk.n) * rho_n % pk.n_squared)


def check_ciphertext(n_squared: int, c: Ciphertext) -> None:
    if not 0 < c.value < n_squared or math.gcd(c.value, n_squared) != 1:
        raise MalformedCiphertextError("ciphertext is not a unit modulo n^2")


def decrypt(sk: PrivateKey, c: Ciphertext) -> int:
    n_squared = sk.n * sk.n
    check_ciphertext(n_squared, c)
    return _l_function(powmod(c.value, sk.lambda_, n_squared), sk.n) * sk.mu % sk.n


def he_add(pk: PublicKey, c1: Ciphertext, c2: Ciphertext) -> Ciphertext:
    """Homomorphic addition: the result decrypts to ``(m1 + m2) mod n``."""
    return Ciphertext(c1.value * c2.value % pk.n_squared)


def rerandomize(pk: PublicKey, c: Ciphertext, rng=None) -> Ciphertext:
    """Multiply by a fresh encryption of zero; the plaintext is unchanged."""
    rng = rng or default_rng()
    rho_n = powmod(_random_unit(pk.n, rng), pk.n, pk.n_squared)
    return Ciphertext(c.value * rho_n % pk.n_squared)
