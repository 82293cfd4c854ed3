"""Radix-additive caching: build ciphertexts from cached radix powers.

A one-time initialization encrypts every power ``r^0 .. r^k`` of the radix
(``k = floor(log_r m)`` for the largest plaintext ``m``) plus one encryption
of zero.  Every plaintext is then written in base ``r`` and its ciphertext
is assembled with homomorphic additions only: digit ``d_i`` contributes
``d_i`` copies of the cached ``he(r^i)``.

Outputs are deterministic for a given cache, so equal plaintexts produce
equal ciphertexts.  Pass ``randomize=True`` to rerandomize every output at
the cost of one modular exponentiation each.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

from rache import paillier
from rache._parallel import run_chunked
from rache.errors import DomainError, OutOfCacheRangeError
from rache.paillier import Ciphertext, PublicKey

DEFAULT_RADIX = 2


@dataclass(frozen=True)
class DigitVector:
    radix: int
    digits: tuple[int, ...]

    def __post_init__(self):
        if self.radix < 2:
            raise DomainError(f"radix must be >= 2, got {self.radix}")
        if not self.digits:
            raise DomainError("a digit vector has at least one digit")
        if any(not 0 <= d < self.radix for d in self.digits):
            raise DomainError(f"digits must lie in [0, {self.radix})")
        if len(self.digits) > 1 and self.digits[-1] == 0:
            raise DomainError("the most significant digit must be nonzero")

    @property
    def digit_sum(self) -> int:
        return sum(self.digits)


@dataclass(frozen=True)
class EncodeStats:
    additions: int = 0
    cache_hits: int = 0

    def __add__(self, other: EncodeStats) -> EncodeStats:
        return EncodeStats(self.additions + other.additions, self.cache_hits + other.cache_hits)


@dataclass(frozen=True)
class RadixCache:
    """Encrypted radix powers ``entries[i] = he(r^i)`` and an encrypted zero."""

    radix: int
    max_value: int
    entries: tuple[Ciphertext, ...]
    zero_ct: Ciphertext
    key: PublicKey
    init_encryptions: int

    @property
    def depth(self) -> int:
        """Highest cached exponent, ``floor(log_r m)``; -1 for an empty cache."""
        return len(self.entries) - 1


def integer_log(x: int, r: int) -> int:
    """``floor(log_r x)`` computed exactly for integers ``x >= 1``."""
    if x < 1 or r < 2:
        raise DomainError("integer_log needs x >= 1 and r >= 2")
    k, power = 0, r
    while power <= x:
        power *= r
        k += 1
    return k


def decompose(x: int, r: int) -> DigitVector:
    """Base-``r`` digits of ``x``, least significant first; ``[0]`` for zero."""
    if r < 2:
        raise DomainError(f"radix must be >= 2, got {r}")
    if x < 0:
        raise DomainError(f"only non-negative values can be decomposed, got {x}")
    if x == 0:
        return DigitVector(r, (0,))
    digits = []
    while x:
        x, d = divmod(x, r)
        digits.append(d)
    return DigitVector(r, tuple(digits))


def recompose(d: DigitVector) -> int:
    value = 0
    for digit in reversed(d.digits):
        value = value * d.radix + digit
    return value


def cache_init(pk: PublicKey, r: int = DEFAULT_RADIX, m: int = 1, rng=None) -> RadixCache:
    """Encrypt ``r^0 .. r^floor(log_r m)`` and one zero.

    Performs exactly ``floor(log_r m) + 2`` encryptions, or a single one
    (the zero) when ``m == 0``.
    """
    if r < 2:
        raise DomainError(f"radix must be >= 2, got {r}")
    if m < 0:
        raise DomainError(f"maximal value must be non-negative, got {m}")
    if m >= pk.n:
        raise DomainError(f"maximal value {m} leaves the message space [0, n)")
    rng = rng or paillier.default_rng()
    k = integer_log(m, r) if m >= 1 else -1
    entries = tuple(paillier.encrypt(pk, r**i, rng) for i in range(k + 1))
    zero_ct = paillier.encrypt(pk, 0, rng)
    return RadixCache(r, m, entries, zero_ct, pk, init_encryptions=len(entries) + 1)


def _fold(entries, n_squared: int, zero: int, r: int, x: int) -> tuple[int, int, int]:
    # ascending radix index, starting from the first contributing entry
    acc = None
    additions = hits = 0
    i = 0
    while x:
        x, d = divmod(x, r)
        if d:
            e = entries[i]
            hits += d
            if acc is None:
                acc = e
                d -= 1
            for _ in range(d):
                acc = acc * e % n_squared
            additions += d
        i += 1
    if acc is None:
        return zero, 0, 0
    return acc, additions, hits


def _check_range(cache: RadixCache, x: int, index: int | None = None) -> None:
    where = "" if index is None else f" at index {index}"
    if x < 0:
        raise DomainError(f"negative plaintext {x}{where}")
    if x > cache.max_value:
        raise OutOfCacheRangeError(f"plaintext {x}{where} exceeds cache maximum {cache.max_value}")


def rache_encrypt(cache: RadixCache, x: int, randomize: bool = False, rng=None) -> tuple[Ciphertext, EncodeStats]:
    """Encrypt ``x`` using only homomorphic additions over ``cache``."""
    _check_range(cache, x)
    entries = [c.value for c in cache.entries]
    value, additions, hits = _fold(entries, cache.key.n_squared, cache.zero_ct.value, cache.radix, x)
    ct = Ciphertext(value)
    if randomize:
        ct = paillier.rerandomize(cache.key, ct, rng)
    return ct, EncodeStats(additions, hits)


def _encode_chunk(state, lo: int, hi: int):
    entries, n_squared, zero, r, xs, randomize, pk = state
    rng = paillier.default_rng() if randomize else None
    out = []
    additions = hits = 0
    for x in xs[lo:hi]:
        value, a, h = _fold(entries, n_squared, zero, r, x)
        if randomize:
            value = paillier.rerandomize(pk, Ciphertext(value), rng).value
        out.append(value)
        additions += a
        hits += h
    return out, additions, hits


def rache_encrypt_batch(
    cache: RadixCache, xs, workers: int = 1, randomize: bool = False
) -> tuple[list[Ciphertext], EncodeStats, float]:
    """Encode every value in ``xs``; returns ciphertexts, summed stats and wall seconds.

    ``xs`` is split into ``workers`` contiguous chunks.  Without
    randomization the output does not depend on ``workers``.
    """
    if workers < 1:
        raise DomainError(f"workers must be >= 1, got {workers}")
    xs = list(xs)
    for i, x in enumerate(xs):
        _check_range(cache, x, i)
    state = (
        [c.value for c in cache.entries],
        cache.key.n_squared,
        cache.zero_ct.value,
        cache.radix,
        xs,
        randomize,
        cache.key,
    )
    start = time.perf_counter()
    parts = run_chunked(_encode_chunk, state, len(xs), workers)
    elapsed = time.perf_counter() - start
    cts = [Ciphertext(v) for values, _, _ in parts for v in values]
    stats = EncodeStats(sum(p[1] for p in parts), sum(p[2] for p in parts))
    return cts, stats, elapsed


def worst_case_additions(r: int, m: int) -> float:
    """Worst-case addition count ``(r - 1) * log_r(m + 1) - 1``.

    This is the continuous cost model; it is an integer only when ``m + 1``
    is an integral power of ``r``, and in that case the logarithm is
    computed exactly.
    """
    if r < 2 or m < 2:
        raise DomainError("worst_case_additions needs r >= 2 and m >= 2")
    k = integer_log(m + 1, r)
    log_value = float(k) if r**k == m + 1 else math.log(m + 1) / math.log(r)
    return (r - 1) * log_value - 1


def optimal_radix(m: int, r_max: int = 64) -> int:
    """Radix in ``[2, r_max]`` minimizing :func:`worst_case_additions`; ties go low."""
    if r_max < 2:
        raise DomainError(f"r_max must be >= 2, got {r_max}")
    return min(range(2, r_max + 1), key=lambda r: (worst_case_additions(r, m), r))
