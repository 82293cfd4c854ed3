"""Command line entry point: ``rache <command> [flags]``.

Exit status is 0 on success, 1 on usage errors and 2 on runtime or
verification errors.  Progress goes to standard error; CSV output is
written only to the paths given with ``--csv`` / ``--mem-csv``.
"""
from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

from rache import bench, dataio, paillier, radix
from rache.errors import RacheError

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _radix(text: str) -> int:
    value = int(text)
    if value < 2:
        raise argparse.ArgumentTypeError(f"radix must be >= 2, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = _Parser(prog="rache", description="Paillier encryption with radix-additive caching.", formatter_class=fmt)
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to standard error")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("keygen", help="generate a Paillier key pair", formatter_class=fmt)
    p.add_argument("--bits", type=int, default=paillier.DEFAULT_KEY_BITS, help="modulus size in bits")
    p.add_argument("--out-dir", type=Path, required=True, help="directory receiving key.pub and key.priv")

    p = sub.add_parser("encrypt", help="encrypt a plaintext file", formatter_class=fmt)
    p.add_argument("--pub", type=Path, required=True, help="public key file")
    p.add_argument("--in", dest="infile", type=Path, required=True, help="plaintext file")
    p.add_argument("--out", type=Path, required=True, help="ciphertext file to write")
    p.add_argument("--mode", choices=("rache", "paillier"), default="rache", help="encoding pipeline")
    p.add_argument("--radix", type=_radix, default=radix.DEFAULT_RADIX, help="radix of the cache (rache mode)")
    p.add_argument("--max", dest="max_value", type=int, default=None, help="cache maximum; default scans the input")
    p.add_argument("--workers", type=_positive, default=1, help="worker processes")
    p.add_argument("--randomize", action="store_true", help="rerandomize every rache output")

    p = sub.add_parser("decrypt", help="decrypt a ciphertext file", formatter_class=fmt)
    p.add_argument("--priv", type=Path, required=True, help="private key file")
    p.add_argument("--in", dest="infile", type=Path, required=True, help="ciphertext file")
    p.add_argument("--out", type=Path, required=True, help="plaintext file to write")

    p = sub.add_parser("radix-info", help="tabulate the worst-case addition count per radix", formatter_class=fmt)
    p.add_argument("--max", dest="max_value", type=int, required=True, help="maximal plaintext (>= 2)")
    p.add_argument("--r-max", type=_radix, default=16, help="largest radix in the table")

    p = sub.add_parser("bench", help="run a benchmark", formatter_class=fmt)
    p.add_argument("kind", choices=("micro", "dataset", "scaling"))
    p.add_argument("--items", type=_positive, default=1024, help="operations / plaintexts (per worker in weak scaling)")
    p.add_argument("--reps", type=_positive, default=5, help="repetitions per phase")
    p.add_argument("--workers", type=_positive, default=1, help="worker processes (maximum for scaling)")
    p.add_argument("--radix", type=_radix, default=radix.DEFAULT_RADIX, help="radix of the cache")
    p.add_argument("--seed", type=int, default=0, help="seed of the uniform data generator")
    p.add_argument("--bits", type=int, default=paillier.DEFAULT_KEY_BITS, help="modulus size in bits")
    p.add_argument("--mode", choices=("strong", "weak"), default="strong", help="scaling mode")
    p.add_argument("--max", dest="max_value", type=int, default=None, help="cache maximum override")
    p.add_argument("--randomize", action="store_true", help="rerandomize every rache output")
    p.add_argument("--in", dest="infile", type=Path, default=None, help="plaintext file (dataset); default uniform data")
    p.add_argument("--csv", type=Path, required=True, help="report CSV path")
    p.add_argument("--mem-csv", type=Path, default=None, help="memory timeline CSV path (enables probing)")
    return parser


def _cmd_keygen(args) -> None:
    pk, sk = paillier.keygen(args.bits)
    pub, priv = dataio.write_keypair(args.out_dir, pk, sk)
    print(f"wrote {pub} and {priv}", file=sys.stderr)


def _cmd_encrypt(args) -> None:
    pk = dataio.read_public_key(args.pub)
    data = dataio.load_plaintexts(args.infile)
    if args.mode == "paillier":
        start = time.perf_counter()
        cts = bench.paillier_encrypt_batch(pk, data.values, args.workers)
        print(f"paillier seconds: {time.perf_counter() - start:.6f}", file=sys.stderr)
    else:
        m = data.max_value if args.max_value is None else args.max_value
        start = time.perf_counter()
        cache = radix.cache_init(pk, args.radix, m)
        init_seconds = time.perf_counter() - start
        cts, _, exec_seconds = radix.rache_encrypt_batch(cache, data.values, args.workers, args.randomize)
        print(f"rache init seconds: {init_seconds:.6f}", file=sys.stderr)
        print(f"rache exec seconds: {exec_seconds:.6f}", file=sys.stderr)
    dataio.write_ciphertexts(args.out, pk, cts)


def _cmd_decrypt(args) -> None:
    sk = dataio.read_private_key(args.priv)
    _, cts = dataio.read_ciphertexts(args.infile, expected_n=sk.n)
    dataio.write_plaintexts(args.out, [paillier.decrypt(sk, c) for c in cts])


def _cmd_radix_info(args) -> None:
    if args.max_value < 2:
        raise UsageError("rache radix-info: error: --max must be >= 2")
    print(f"{'radix':>5}  worst_case_additions")
    for r in range(2, args.r_max + 1):
        print(f"{r:>5}  {radix.worst_case_additions(r, args.max_value):.4f}")
    print(f"argmin {radix.optimal_radix(args.max_value, args.r_max)}")


def _cmd_bench(args) -> None:
    cfg = bench.BenchConfig(
        key_bits=args.bits,
        radix=args.radix,
        workers=args.workers,
        n_items=args.items,
        max_value_override=args.max_value,
        seed=args.seed,
        randomize_outputs=args.randomize,
        repetitions=args.reps,
        probe_memory=args.mem_csv is not None,
    )
    if args.kind == "micro":
        report = bench.bench_micro(cfg)
    elif args.kind == "dataset":
        if args.infile is not None:
            data = dataio.load_plaintexts(args.infile)
            report = bench.bench_dataset(cfg, data.values, workload=data.name)
        else:
            xs = bench.gen_uniform(cfg.n_items, cfg.data_seed)
            report = bench.bench_dataset(cfg, xs, workload=f"uniform-{cfg.n_items}")
    else:
        report = bench.bench_scaling(cfg, args.mode)
    dataio.write_report_csv(args.csv, report.records)
    if args.mem_csv is not None:
        dataio.write_memory_csv(args.mem_csv, report.workload, report.memory_samples)
    for rec in report.records:
        print(f"{rec.workload} {rec.phase} workers={rec.workers} mean={rec.mean_seconds:.6f}s "
              f"stderr={rec.stderr_seconds:.6f}s ops={rec.op_count}", file=sys.stderr)


COMMANDS = {
    "keygen": _cmd_keygen,
    "encrypt": _cmd_encrypt,
    "decrypt": _cmd_decrypt,
    "radix-info": _cmd_radix_info,
    "bench": _cmd_bench,
}


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr)
        COMMANDS[args.command](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"rache: error: file not found: {exc.filename}", file=sys.stderr)
        return EXIT_RUNTIME
    except RacheError as exc:
        print(f"rache: error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (OSError, ValueError) as exc:
        print(f"rache: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def main() -> None:
    sys.exit(run())
