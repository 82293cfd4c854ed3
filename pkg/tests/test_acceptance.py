"""Exit criteria.  Run alone with ``pytest tests/test_acceptance.py``.

Each test prints one ``ACCEPTANCE <n> PASS|FAIL`` line with the measured
numbers.  The timing criteria use 2048-bit keys and take several minutes.
"""
import math
import os
import statistics
import time

import pytest

from rache import bench, paillier, radix
from rache.bench import BenchConfig

pytestmark = pytest.mark.acceptance

BENCH_BITS = 2048


@pytest.fixture
def verdict(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\nACCEPTANCE {number} {'PASS' if ok else 'FAIL'}: {detail}")
        return ok

    return emit


@pytest.fixture(scope="module")
def bench_keys():
    return paillier.keygen(BENCH_BITS)


@pytest.fixture(scope="module")
def uniform_report(bench_keys):
    cfg = BenchConfig(key_bits=BENCH_BITS, workers=1, n_items=1024, seed=1, repetitions=5, probe_memory=True)
    xs = bench.gen_uniform(1024, cfg.data_seed)
    return bench.bench_dataset(cfg, xs, bench_keys, workload="uniform-1024")


def test_1_micro_ratio(bench_keys, verdict):
    start = time.perf_counter()
    cfg = BenchConfig(key_bits=BENCH_BITS, n_items=1000, repetitions=3)
    report = bench.bench_micro(cfg, bench_keys)
    enc = report.get("he_enc_micro").mean_seconds / 1000
    add = report.get("he_add_micro").mean_seconds / 1000
    ratio = enc / add
    ok = verdict(1, add <= enc / 50, f"encrypt {enc * 1e3:.3f} ms/op, add {add * 1e6:.2f} us/op, "
                 f"ratio {ratio:.0f} (need >= 50), {time.perf_counter() - start:.0f}s")
    assert ok


def test_2_rache_speedup(uniform_report, verdict):
    init = uniform_report.get("rache_init").mean_seconds
    exe = uniform_report.get("rache_exec").mean_seconds
    pail = uniform_report.get("paillier").mean_seconds
    exec_speedup = pail / exe
    total_speedup = pail / (init + exe)
    ok = verdict(2, exec_speedup >= 10 and total_speedup >= 5,
                 f"init {init:.3f}s exec {exe:.4f}s paillier {pail:.2f}s; "
                 f"exec speedup {exec_speedup:.0f}x (need >= 10), init+exec speedup {total_speedup:.1f}x (need >= 5)")
    assert ok


def test_3_exhaustive_oracle(verdict):
    pk, sk = paillier.keygen(paillier.TEST_KEY_BITS)
    failures = 0
    for r in (2, 3, 10):
        cache = radix.cache_init(pk, r, 4096)
        for x in range(4097):
            ct, _ = radix.rache_encrypt(cache, x)
            failures += paillier.decrypt(sk, ct) != x
    ok = verdict(3, failures == 0, f"{3 * 4097} encodings over r in {{2, 3, 10}}, {failures} failures")
    assert ok


def test_4_cost_model(verdict):
    pk, _ = paillier.keygen(paillier.TEST_KEY_BITS)
    problems = []
    for k in range(2, 33):
        m = 2**k - 1
        if radix.worst_case_additions(2, m) != k - 1:
            problems.append(f"f(2, 2^{k}-1) = {radix.worst_case_additions(2, m)!r}")
        _, stats = radix.rache_encrypt(radix.cache_init(pk, 2, m), m)
        if stats.additions != k - 1:
            problems.append(f"measured additions for 2^{k}-1 = {stats.additions}")
    for m in (2, 10**3, 10**6, 10**9):
        values = [radix.worst_case_additions(r, m) for r in range(2, 65)]
        if not all(a < b for a, b in zip(values, values[1:])):
            problems.append(f"f not strictly increasing at m={m}")
        if radix.optimal_radix(m, 64) != 2:
            problems.append(f"optimal_radix({m}) != 2")
    ok = verdict(4, not problems, "; ".join(problems) or "f exact for k in [2, 32], measured counts match, monotone, argmin 2")
    assert ok


def test_5_cache_size(verdict):
    pk, _ = paillier.keygen(paillier.TEST_KEY_BITS)
    before = paillier.encryption_count()
    cache = radix.cache_init(pk, 2, 10**9)
    init_encs = paillier.encryption_count() - before
    before = paillier.encryption_count()
    for x in range(0, 10**9, 10**9 // 997):
        radix.rache_encrypt(cache, x)
    radix.rache_encrypt_batch(cache, list(range(1000)))
    encode_encs = paillier.encryption_count() - before
    expected = math.floor(math.log2(10**9)) + 2
    ok = verdict(5, len(cache.entries) == 30 and init_encs == expected == cache.init_encryptions and encode_encs == 0,
                 f"{len(cache.entries)} entries (need 30), {init_encs} init encryptions (need {expected}), "
                 f"{encode_encs} encryptions while encoding (need 0)")
    assert ok


def test_6_strong_scaling(bench_keys, verdict):
    start = time.perf_counter()
    cfg = BenchConfig(key_bits=BENCH_BITS, workers=4, n_items=4096, seed=1, repetitions=1)
    report = bench.bench_scaling(cfg, "strong", bench_keys)
    rache_speedup = report.get("rache_exec", 1).mean_seconds / report.get("rache_exec", 4).mean_seconds
    pail_speedup = report.get("paillier", 1).mean_seconds / report.get("paillier", 4).mean_seconds
    cpus = len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else os.cpu_count()
    ok = verdict(6, rache_speedup >= 2.5 and pail_speedup >= 2.5,
                 f"rache_exec speedup {rache_speedup:.2f}x, paillier speedup {pail_speedup:.2f}x (need >= 2.5 each); "
                 f"{cpus} CPU(s) available, {time.perf_counter() - start:.0f}s")
    assert ok


def test_7_memory_flatness(uniform_report, verdict):
    samples = uniform_report.memory_samples
    assert len(samples) == 11
    interior = [s.resident_bytes for s in samples[1:10]]
    spread = max(interior) - min(interior)
    mean = statistics.fmean(interior)
    ok = verdict(7, spread <= 0.05 * mean,
                 f"interior RSS spread {spread / 1024:.0f} KiB over mean {mean / 2**20:.1f} MiB "
                 f"= {100 * spread / mean:.2f}% (need <= 5%)")
    assert ok


def test_8_determinism(verdict):
    pk, sk = paillier.keygen(paillier.TEST_KEY_BITS)
    xs = bench.gen_uniform(4096, 8)
    cache = radix.cache_init(pk, 2, max(xs))
    serial, _, _ = radix.rache_encrypt_batch(cache, xs, workers=1)
    parallel, _, _ = radix.rache_encrypt_batch(cache, xs, workers=4)
    identical = serial == parallel
    randomized, _, _ = radix.rache_encrypt_batch(cache, xs, workers=4, randomize=True)
    bad = sum(paillier.decrypt(sk, c) != x for c, x in zip(randomized, xs))
    ok = verdict(8, identical and bad == 0 and len(randomized) == len(xs),
                 f"4-worker output bit-identical to 1-worker: {identical}; randomized decrypt failures: {bad}/{len(xs)}")
    assert ok
