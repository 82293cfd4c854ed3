"""Plaintext datasets, key and ciphertext files, and benchmark CSVs.

Every big integer is written as lowercase big-endian hex without padding.
Key files are ``name=hex`` lines; a ciphertext file starts with ``n=<hex>``
followed by one ciphertext per line.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

from rache.errors import EmptyDatasetError, FormatError, KeyMismatchError
from rache.paillier import Ciphertext, PrivateKey, PublicKey

REPORT_HEADER = ["workload", "phase", "workers", "n_items", "mean_seconds", "stderr_seconds", "op_count"]
MEMORY_HEADER = ["workload", "normalized_time", "resident_bytes"]


@dataclass(frozen=True)
class Dataset:
    name: str
    values: list[int]
    max_value: int


def scan_max(values) -> int:
    if not values:
        raise EmptyDatasetError("cannot take the maximum of an empty dataset")
    return max(values)


def load_plaintexts(path) -> Dataset:
    """Read one unsigned decimal per line; blank lines and ``#`` comments are skipped."""
    path = Path(path)
    values = []
    max_value = 0
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            # int() alone would also accept "+7", "-0" and "1_000"
            if not text.isascii() or not text.isdigit():
                raise FormatError(f"{path}:{lineno}: not an unsigned decimal integer: {text!r}")
            value = int(text)
            values.append(value)
            if value > max_value:
                max_value = value
    if not values:
        raise EmptyDatasetError(f"{path}: no values")
    return Dataset(path.stem, values, max_value)


def write_plaintexts(path, values) -> None:
    Path(path).write_text("".join(f"{v}\n" for v in values), encoding="utf-8")


def _hex(value: int) -> str:
    return format(value, "x")


def _parse_hex(text: str, where: str) -> int:
    text = text.strip()
    if not text or any(ch not in "0123456789abcdef" for ch in text):
        raise FormatError(f"{where}: malformed lowercase hex {text!r}")
    return int(text, 16)


def _read_fields(path) -> dict[str, int]:
    fields = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        name, sep, value = line.partition("=")
        if not sep:
            raise FormatError(f"{path}:{lineno}: expected name=hex")
        fields[name.strip()] = _parse_hex(value, f"{path}:{lineno}")
    return fields


def _require(fields: dict[str, int], names, path) -> None:
    missing = [name for name in names if name not in fields]
    if missing:
        raise FormatError(f"{path}: missing field(s) {', '.join(missing)}")


def write_public_key(path, pk: PublicKey) -> None:
    Path(path).write_text(f"n={_hex(pk.n)}\ng={_hex(pk.g)}\nkey_bits={_hex(pk.key_bits)}\n", encoding="utf-8")


def read_public_key(path) -> PublicKey:
    fields = _read_fields(path)
    _require(fields, ("n", "g", "key_bits"), path)
    n = fields["n"]
    try:
        return PublicKey(n=n, n_squared=n * n, g=fields["g"], key_bits=fields["key_bits"])
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from exc


def write_private_key(path, sk: PrivateKey) -> None:
    Path(path).write_text(f"n={_hex(sk.n)}\nlambda={_hex(sk.lambda_)}\nmu={_hex(sk.mu)}\n", encoding="utf-8")


def read_private_key(path) -> PrivateKey:
    fields = _read_fields(path)
    _require(fields, ("n", "lambda", "mu"), path)
    try:
        return PrivateKey(lambda_=fields["lambda"], mu=fields["mu"], n=fields["n"])
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from exc


def write_keypair(out_dir, pk: PublicKey, sk: PrivateKey) -> tuple[Path, Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    pub, priv = out_dir / "key.pub", out_dir / "key.priv"
    write_public_key(pub, pk)
    write_private_key(priv, sk)
    return pub, priv


def write_ciphertexts(path, pk: PublicKey, cts) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"n={_hex(pk.n)}\n")
        for c in cts:
            fh.write(_hex(c.value))
            fh.write("\n")


def read_ciphertexts(path, expected_n: int | None = None) -> tuple[int, list[Ciphertext]]:
    """Return ``(n, ciphertexts)``; with ``expected_n`` set, a different header raises."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or not lines[0].startswith("n="):
        raise FormatError(f"{path}: missing n=<hex> header")
    n = _parse_hex(lines[0][2:], f"{path}:1")
    if expected_n is not None and n != expected_n:
        raise KeyMismatchError(f"{path}: ciphertexts were produced under a different key")
    n_squared = n * n
    cts = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        value = _parse_hex(line, f"{path}:{lineno}")
        if not 0 < value < n_squared:
            raise FormatError(f"{path}:{lineno}: ciphertext outside [1, n^2)")
        cts.append(Ciphertext(value))
    return n, cts


def write_report_csv(path, records) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(REPORT_HEADER)
        for rec in records:
            writer.writerow(
                [rec.workload, rec.phase, rec.workers, rec.n_items, repr(rec.mean_seconds), repr(rec.stderr_seconds), rec.op_count]
            )


def write_memory_csv(path, workload: str, samples) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(MEMORY_HEADER)
        for s in samples:
            writer.writerow([workload, f"{s.normalized_time:.1f}", s.resident_bytes])


def read_report_csv(path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != REPORT_HEADER:
            raise FormatError(f"{path}: unexpected header {reader.fieldnames}")
        return list(reader)
