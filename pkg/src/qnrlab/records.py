"""Experiment records, CSV / JSON-lines emission, run manifests and the prime cache."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import os
import platform
import struct
import tempfile
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from . import __version__
from .errors import ResourceError
from .ntcore import SIEVE_CAP, prime_bitmap

log = logging.getLogger(__name__)


def _canon(v: Any) -> Any:
    """Stable, JSON-compatible rendering of a value."""
    if isinstance(v, bool) or v is None or isinstance(v, (int, str)):
        return v
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}" if v.denominator != 1 else str(v.numerator)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return repr(float(v))
    if isinstance(v, (list, tuple)):
        return [_canon(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _canon(x) for k, x in v.items()}
    return str(v)


@dataclass
class ExperimentRecord:
    subcommand: str
    params: Dict[str, Any]
    outputs: Dict[str, Any]
    runtime_ms: int = 0
    artifact_version: str = __version__
    experiment_id: str = ""

    def __post_init__(self):
        if not self.experiment_id:
            blob = json.dumps({"cmd": self.subcommand, "params": _canon(self.params)},
                              sort_keys=True).encode()
            self.experiment_id = hashlib.sha256(blob).hexdigest()[:16]

    def flat(self) -> Dict[str, Any]:
        """Row used for CSV: id, then params and outputs (scalar-rendered)."""
        row: Dict[str, Any] = {"experiment_id": self.experiment_id}
        for k, v in self.params.items():
            row[k] = _cell(v)
        for k, v in self.outputs.items():
            row[k] = _cell(v)
        return row

    def to_json(self, timings: bool = False) -> str:
        d = {
            "experiment_id": self.experiment_id,
            "subcommand": self.subcommand,
            "params": _canon(self.params),
            "outputs": _canon(self.outputs),
            "artifact_version": self.artifact_version,
        }
        if timings:
            d["runtime_ms"] = self.runtime_ms
        return json.dumps(d, sort_keys=True)


def _cell(v: Any) -> str:
    c = _canon(v)
    if isinstance(c, (list, dict)):
        return json.dumps(c, sort_keys=True, separators=(",", ":"))
    if c is None:
        return ""
    return str(c)


def emit_csv(records: Sequence[ExperimentRecord], header: Optional[List[str]] = None) -> bytes:
    """RFC-4180 CSV, UTF-8, "\\n" line endings.

    Columns: experiment_id, sorted param keys, sorted output keys.  Records
    must share one key set; rows keep the order they are given in (callers
    sort by primary key).
    """
    if records:
        keysets = {(tuple(sorted(r.params)), tuple(sorted(r.outputs))) for r in records}
        if len(keysets) != 1:
            raise ValueError("heterogeneous records in one CSV stream")
        pk, ok = keysets.pop()
        header = ["experiment_id", *pk, *[k for k in ok if k not in pk]]
    elif header is None:
        header = ["experiment_id"]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
    w.writerow(header)
    for r in records:
        row = r.flat()
        w.writerow([row.get(k, "") for k in header])
    return buf.getvalue().encode("utf-8")


def emit_jsonl(records: Sequence[ExperimentRecord], timings: bool = False) -> bytes:
    return "".join(r.to_json(timings) + "\n" for r in records).encode("utf-8")


def write_manifest(path: Path, argv: List[str], output: bytes, extra: Optional[dict] = None) -> dict:
    manifest = {
        "argv": list(argv),
        "artifact_version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "output_sha256": hashlib.sha256(output).hexdigest(),
        "output_bytes": len(output),
    }
    if extra:
        manifest.update(_canon(extra))
    Path(path).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return manifest


# -- prime cache ------------------------------------------------------------------

MAGIC = b"BGLPRIME"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<8sIQ")


@dataclass
class PrimeCache:
    """Bitset over odd integers: bit i set iff 2i+1 is prime (2 is implicit)."""

    limit: int
    bits: np.ndarray  # bool, length (limit + 1) // 2

    def is_prime(self, n: int) -> bool:
        if n > self.limit:
            raise ValueError(f"{n} beyond cache limit {self.limit}")
        if n == 2:
            return True
        if n < 2 or n % 2 == 0:
            return False
        return bool(self.bits[n // 2])

    def primes(self, upto: Optional[int] = None) -> List[int]:
        upto = self.limit if upto is None else upto
        odd = (2 * np.flatnonzero(self.bits[: (upto + 1) // 2]) + 1).tolist()
        return ([2] if upto >= 2 else []) + odd

    @classmethod
    def build(cls, limit: int) -> "PrimeCache":
        bm = prime_bitmap(limit)
        return cls(limit, bm[1::2].copy())

    def to_bytes(self) -> bytes:
        payload = np.packbits(self.bits, bitorder="little").tobytes()
        return _HEADER.pack(MAGIC, FORMAT_VERSION, self.limit) + payload

    @classmethod
    def from_bytes(cls, data: bytes) -> "PrimeCache":
        if len(data) < _HEADER.size:
            raise ValueError("truncated header")
        magic, ver, limit = _HEADER.unpack_from(data)
        if magic != MAGIC or ver != FORMAT_VERSION:
            raise ValueError("bad magic or version")
        nbits = (limit + 1) // 2
        payload = np.frombuffer(data, dtype=np.uint8, offset=_HEADER.size)
        if len(payload) != (nbits + 7) // 8:
            raise ValueError("payload length does not match header limit")
        bits = np.unpackbits(payload, bitorder="little")[:nbits].astype(bool)
        return cls(limit, bits)


def prime_cache_io(path, limit: int, cap: int = SIEVE_CAP) -> PrimeCache:
    """Load a cache covering ``limit`` or regenerate it and write atomically."""
    if limit > cap:
        raise ResourceError(f"cache limit {limit} exceeds cap {cap}")
    path = Path(path)
    if path.exists():
        try:
            cache = PrimeCache.from_bytes(path.read_bytes())
            if cache.limit >= limit:
                return cache
            log.info("prime cache %s covers %d < %d; regenerating", path, cache.limit, limit)
        except ValueError as exc:
            log.warning("prime cache %s is corrupt (%s); regenerating", path, exc)
    cache = PrimeCache.build(limit)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
        with os.fdopen(fd, "wb") as fh:
            fh.write(cache.to_bytes())
        os.replace(tmp, path)
    except OSError as exc:
        raise ResourceError(f"cannot write prime cache {path}: {exc}") from exc
    return cache


def cached_primes(limit: int) -> List[int]:
    """Primes <= limit, through $BGL_CACHE_DIR/primes.bin when that is set."""
    d = os.environ.get("BGL_CACHE_DIR")
    if not d:
        return np.flatnonzero(prime_bitmap(limit)).tolist()
    return prime_cache_io(Path(d) / "primes.bin", limit).primes(limit)
