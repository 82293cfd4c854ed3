"""Benchmark harness: micro-benchmark, dataset encodings, scaling, memory.

Every phase is timed around the complete call with a monotonic clock and
repeated ``repetitions`` times; records carry the mean and the standard
error of the mean.  No timing is reported for output that has not been
decrypt-checked: each pipeline's full output is verified once per
configuration, and a mismatch raises :class:`VerificationError`.
"""
from __future__ import annotations

import logging
import math
import os
import random
import statistics
import time
import warnings
from dataclasses import dataclass, field

from rache import paillier, radix
from rache._parallel import run_chunked
from rache.dataio import scan_max
from rache.errors import DomainError, VerificationError
from rache.paillier import Ciphertext

log = logging.getLogger(__name__)

PHASES = ("rache_init", "rache_exec", "paillier", "he_add_micro", "he_enc_micro")


@dataclass(frozen=True)
class BenchConfig:
    key_bits: int = paillier.DEFAULT_KEY_BITS
    radix: int = radix.DEFAULT_RADIX
    workers: int = 1
    n_items: int = 1024
    max_value_override: int | None = None
    seed: int | None = None
    randomize_outputs: bool = False
    repetitions: int = 5
    probe_memory: bool = False

    def __post_init__(self):
        if self.repetitions < 1:
            raise DomainError("repetitions must be >= 1")
        if self.workers < 1:
            raise DomainError("workers must be >= 1")
        if self.radix < 2:
            raise DomainError("radix must be >= 2")
        if self.n_items < 1:
            raise DomainError("n_items must be >= 1")

    @property
    def data_seed(self) -> int:
        return 0 if self.seed is None else self.seed


@dataclass(frozen=True)
class PhaseRecord:
    workload: str
    phase: str
    workers: int
    n_items: int
    mean_seconds: float
    stderr_seconds: float
    op_count: int


@dataclass(frozen=True)
class MemorySample:
    normalized_time: float
    resident_bytes: int


@dataclass
class BenchReport:
    workload: str
    records: list[PhaseRecord] = field(default_factory=list)
    memory_samples: list[MemorySample] = field(default_factory=list)

    def get(self, phase: str, workers: int | None = None) -> PhaseRecord:
        for rec in self.records:
            if rec.phase == phase and (workers is None or rec.workers == workers):
                return rec
        raise KeyError((phase, workers))

    def keys(self) -> set[tuple[str, str, int]]:
        return {(r.workload, r.phase, r.workers) for r in self.records}


def gen_uniform(n: int, seed: int) -> list[int]:
    """``n`` values drawn uniformly from ``[0, n)`` by a seeded generator."""
    if n < 1:
        raise DomainError("n must be >= 1")
    rng = random.Random(seed)
    return [rng.randrange(n) for _ in range(n)]


def _rss_bytes() -> int:
    try:
        import psutil

        return psutil.Process(os.getpid()).memory_info().rss
    except Exception:
        # psutil missing or refusing; Linux exposes the same number directly
        with open("/proc/self/statm") as fh:
            return int(fh.read().split()[1]) * os.sysconf("SC_PAGE_SIZE")


def probe_memory(normalized_time: float = 0.0) -> MemorySample:
    """Current resident set size of this process."""
    rss = _rss_bytes()
    if rss <= 0:
        raise OSError("resident memory accounting returned no data")
    return MemorySample(normalized_time, rss)


def summarize(samples: list[float]) -> tuple[float, float]:
    """Mean and standard error of the mean (0 for a single sample)."""
    mean = statistics.fmean(samples)
    if len(samples) < 2:
        return mean, 0.0
    return mean, statistics.stdev(samples) / math.sqrt(len(samples))


def _timed(fn, repetitions: int):
    times = []
    result = None
    for _ in range(repetitions):
        start = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - start)
    return result, times


def _encrypt_chunk(state, lo, hi):
    pk, xs = state
    rng = paillier.default_rng()
    return [paillier.encrypt(pk, x, rng).value for x in xs[lo:hi]]


def paillier_encrypt_batch(pk, xs, workers: int = 1) -> list[Ciphertext]:
    """Plain per-item Paillier encryption, split like the Rache batch."""
    xs = list(xs)
    parts = run_chunked(_encrypt_chunk, (pk, xs), len(xs), workers)
    return [Ciphertext(v) for part in parts for v in part]


def _verify(sk, cts, expected, pipeline: str) -> None:
    if len(cts) != len(expected):
        raise VerificationError(f"{pipeline}: produced {len(cts)} ciphertexts for {len(expected)} inputs")
    for i, (c, x) in enumerate(zip(cts, expected)):
        got = paillier.decrypt(sk, c)
        if got != x:
            raise VerificationError(f"{pipeline}: item {i} decrypts to {got}, expected {x}")


def _keys(cfg: BenchConfig, keys):
    if keys is not None:
        return keys
    log.info("generating %d-bit key pair", cfg.key_bits)
    return paillier.keygen(cfg.key_bits)


def _add_chunk(state, lo, hi):
    operands, n_squared = state
    top = len(operands)
    out = []
    for i in range(lo, hi):
        a = i.bit_length() - 1 if i else 0
        out.append(operands[a] * operands[(a + 1) % top] % n_squared)
    return out


def bench_micro(cfg: BenchConfig, keys=None) -> BenchReport:
    """Time ``n_items`` encryptions ``he(i)`` against ``n_items`` homomorphic additions.

    Additions walk round-robin over precomputed ``he(j)``,
    ``j = 0 .. floor(log2 n)``: item ``i`` adds ``he(floor(log2 i))`` and
    ``he((floor(log2 i) + 1) mod (floor(log2 n) + 1))``.
    """
    pk, sk = _keys(cfg, keys)
    n = cfg.n_items
    if n > pk.n:
        raise DomainError("n_items exceeds the message space")
    xs = list(range(n))
    top = n.bit_length()  # floor(log2 n) + 1
    operands = [paillier.encrypt(pk, j).value for j in range(top)]

    enc_out, enc_times = _timed(lambda: paillier_encrypt_batch(pk, xs, cfg.workers), cfg.repetitions)
    _verify(sk, enc_out, xs, "he_enc_micro")

    add_state = (operands, pk.n_squared)
    add_out, add_times = _timed(lambda: run_chunked(_add_chunk, add_state, n, cfg.workers), cfg.repetitions)
    sums = []
    for i in range(n):
        a = i.bit_length() - 1 if i else 0
        sums.append((a + (a + 1) % top) % pk.n)
    _verify(sk, [Ciphertext(v) for part in add_out for v in part], sums, "he_add_micro")

    report = BenchReport("micro")
    for phase, times in (("he_enc_micro", enc_times), ("he_add_micro", add_times)):
        mean, err = summarize(times)
        report.records.append(PhaseRecord("micro", phase, cfg.workers, n, mean, err, n))
    return report


def _probed_exec(cache, xs, workers: int, randomize: bool):
    """Run the encode once, sampling RSS at the 11 timeline points."""
    samples = []
    cts = []
    try:
        samples.append(probe_memory(0.0))
    except OSError as exc:
        warnings.warn(f"memory probing disabled: {exc}", RuntimeWarning, stacklevel=3)
        out, _, _ = radix.rache_encrypt_batch(cache, xs, workers, randomize)
        return out, []
    n = len(xs)
    for step in range(1, 11):
        lo, hi = (step - 1) * n // 10, step * n // 10
        if hi > lo:
            out, _, _ = radix.rache_encrypt_batch(cache, xs[lo:hi], workers, randomize)
            cts.extend(out)
        samples.append(probe_memory(step / 10))
    return cts, samples


def _dataset_phases(report: BenchReport, cfg: BenchConfig, keys, xs: list[int], workers: int, reference=None):
    """Append the three dataset phases to ``report``.

    ``reference`` is a previously decrypt-checked rache output for the same
    ``xs`` and cache; deterministic output is then checked by exact equality
    instead of decrypting again.  Returns the checked output (None when
    outputs are randomized).
    """
    pk, sk = keys
    if not xs:
        raise DomainError("dataset is empty")
    top = scan_max(xs)
    m = cfg.max_value_override if cfg.max_value_override is not None else top
    if top >= pk.n or m >= pk.n:
        raise DomainError("dataset values must lie in the message space [0, n)")
    if top > m:
        raise DomainError(f"dataset maximum {top} exceeds max_value_override {m}")
    n_items = len(xs)
    workload = report.workload

    cache, init_times = _timed(lambda: radix.cache_init(pk, cfg.radix, m), cfg.repetitions)
    if reference is not None:
        # a fresh cache holds fresh encryptions; equality needs the reference's cache
        cache, reference_cts = reference

    # untimed pass: correctness check and, if asked, the memory timeline
    if cfg.probe_memory:
        check, samples = _probed_exec(cache, xs, workers, cfg.randomize_outputs)
        report.memory_samples = samples
    else:
        check, _, _ = radix.rache_encrypt_batch(cache, xs, workers, cfg.randomize_outputs)
    if reference is not None and not cfg.randomize_outputs and check == reference_cts:
        verified = reference
    else:
        _verify(sk, check, xs, "rache_exec")
        verified = None if cfg.randomize_outputs else (cache, check)

    exec_times = []
    stats = radix.EncodeStats()
    for _ in range(cfg.repetitions):
        _, stats, elapsed = radix.rache_encrypt_batch(cache, xs, workers, cfg.randomize_outputs)
        exec_times.append(elapsed)

    pail_out, pail_times = _timed(lambda: paillier_encrypt_batch(pk, xs, workers), cfg.repetitions)
    _verify(sk, pail_out, xs, "paillier")
    del pail_out

    for phase, times, ops in (
        ("rache_init", init_times, cache.init_encryptions),
        ("rache_exec", exec_times, stats.additions),
        ("paillier", pail_times, n_items),
    ):
        mean, err = summarize(times)
        report.records.append(PhaseRecord(workload, phase, workers, n_items, mean, err, ops))
        log.info("%s %s workers=%d mean=%.6fs", workload, phase, workers, mean)
    return verified


def bench_dataset(cfg: BenchConfig, xs, keys=None, workload: str = "dataset") -> BenchReport:
    """Rache Init, Rache Exec and plain Paillier phases over one dataset."""
    report = BenchReport(workload)
    _dataset_phases(report, cfg, _keys(cfg, keys), list(xs), cfg.workers)
    return report


def worker_counts(max_workers: int) -> list[int]:
    counts, w = [], 1
    while w <= max_workers:
        counts.append(w)
        w *= 2
    if counts[-1] != max_workers:
        counts.append(max_workers)
    return counts


def bench_scaling(cfg: BenchConfig, mode: str, keys=None) -> BenchReport:
    """Strong scaling (fixed ``n_items``) or weak scaling (``n_items`` per worker).

    Weak mode regenerates ``n_items * workers`` uniform values in
    ``[0, n_items * workers)`` at every scale.
    """
    if mode not in ("strong", "weak"):
        raise DomainError(f"scaling mode must be 'strong' or 'weak', got {mode!r}")
    keys = _keys(cfg, keys)
    report = BenchReport(f"{mode}-scaling")
    strong_xs = gen_uniform(cfg.n_items, cfg.data_seed) if mode == "strong" else None
    verified = None
    for w in worker_counts(cfg.workers):
        if mode == "strong":
            verified = _dataset_phases(report, cfg, keys, strong_xs, w, verified)
        else:
            _dataset_phases(report, cfg, keys, gen_uniform(cfg.n_items * w, cfg.data_seed), w)
    return report
