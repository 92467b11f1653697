"""Shared plumbing: deterministic seeding, canonical JSON, atomic writes."""

from __future__ import annotations

import hashlib
import json
import os
from fractions import Fraction
from pathlib import Path

SCHEMA_VERSION = 1


def derive_seed(master_seed: int, label: str) -> int:
    """Derive a per-stage seed from the master seed and a stage label.

    Stable across runs and platforms (sha256 of "master:label"), so any
    stage can be re-run in isolation and see the same randomness.
    """
    digest = hashlib.sha256(f"{master_seed}:{label}".encode()).digest()
    return int.from_bytes(digest[:8], "big") % (2**32)


def round_sig(x: float, digits: int = 12) -> float:
    """Round to `digits` significant digits (decimal), for stable JSON."""
    return float(f"{x:.{digits}g}")


def _jsonable(obj):
    if isinstance(obj, float):
        return round_sig(obj)
    if isinstance(obj, Fraction):
        return round_sig(float(obj))
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "tolist"):  # numpy scalars and arrays
        return _jsonable(obj.tolist())
    return obj


def dumps_canonical(obj) -> str:
    """Serialize with sorted keys and 12-significant-digit floats.

    Identical inputs always produce identical bytes, which is what makes
    artifact directories byte-comparable across runs.
    """
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def config_hash(obj) -> str:
    return hashlib.sha256(dumps_canonical(obj).encode()).hexdigest()[:16]


def write_text_atomic(path: Path, text: str) -> None:
    """Write via a temp file + rename so failures never leave partial files."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    try:
        tmp.write_text(text)
        os.replace(tmp, path)
    finally:
        if tmp.exists():
            tmp.unlink()


def write_json_atomic(path: Path, obj) -> None:
    write_text_atomic(path, dumps_canonical(obj))


def read_json(path: Path):
    return json.loads(Path(path).read_text())
