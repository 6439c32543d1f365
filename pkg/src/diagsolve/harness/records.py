"""Experiment records and the append-only JSONL run store.

A record's canonical form is JSON with sorted keys, no insignificant
whitespace and shortest round-trip floats.  The hash covers everything
except ``provenance``, so it depends only on what was computed.
"""

from __future__ import annotations

import datetime as _dt
import hashlib
import json
import math
import os
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .. import __version__
from ..errors import DomainError

HASHED_FIELDS = ("kind", "params", "seed", "results")


def jsonable(obj):
    """Convert tuples, numpy scalars, Fractions and dataclass-like objects into plain JSON values."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, (bool, type(None), str)):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        if not math.isfinite(f):
            return None if math.isnan(f) else ("inf" if f > 0 else "-inf")
        return f
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if hasattr(obj, "to_dict"):
        return jsonable(obj.to_dict())
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def canonical_json(obj) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, separators=(",", ":"), ensure_ascii=False, allow_nan=False)


def canonical_hash(payload: dict) -> str:
    core = {key: payload[key] for key in HASHED_FIELDS}
    return hashlib.sha256(canonical_json(core).encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class ExperimentRecord:
    kind: str
    params: dict
    seed: int
    results: dict
    provenance: dict = field(default_factory=dict, compare=False)
    canonical_hash: str = ""

    @classmethod
    def create(cls, kind: str, params: dict, seed: int, results: dict, **provenance) -> "ExperimentRecord":
        params, results = jsonable(params), jsonable(results)
        prov = {
            "tool_version": __version__,
            "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        }
        prov.update(jsonable(provenance))
        digest = canonical_hash({"kind": kind, "params": params, "seed": seed, "results": results})
        return cls(kind, params, seed, results, prov, digest)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "params": self.params,
            "seed": self.seed,
            "results": self.results,
            "provenance": self.provenance,
            "canonical_hash": self.canonical_hash,
        }

    def canonical(self) -> str:
        """Canonical serialisation without provenance; equal for reproduced runs."""
        d = self.to_dict()
        d.pop("provenance")
        return canonical_json(d)

    def to_line(self) -> str:
        return canonical_json(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentRecord":
        missing = [key for key in (*HASHED_FIELDS, "canonical_hash") if key not in d]
        if missing:
            raise DomainError(f"record lacks fields {missing}")
        return cls(d["kind"], d["params"], d["seed"], d["results"], d.get("provenance", {}), d["canonical_hash"])

    def verify(self) -> bool:
        return canonical_hash(self.to_dict()) == self.canonical_hash


def run_store_append(record: ExperimentRecord, path) -> None:
    """Append one canonical line; the file is flushed and fsynced before returning."""
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(record.to_line() + "\n")
        fh.flush()
        os.fsync(fh.fileno())


def run_store_read(path) -> list[ExperimentRecord]:
    """Records in file order.

    A malformed line raises DomainError with its line number, except an
    unterminated last line (an interrupted append), which is skipped with a
    warning.  Stored hashes are re-checked.
    """
    text = Path(path).read_text(encoding="utf-8")
    lines = text.split("\n")
    trailing = lines.pop()  # "" when the file ends with a newline
    out = []
    for no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        out.append(_parse(line, no))
    if trailing.strip():
        try:
            out.append(_parse(trailing, len(lines) + 1))
        except DomainError:
            warnings.warn(f"{path}: ignoring partial trailing line {len(lines) + 1}", stacklevel=2)
    return out


def _parse(line: str, no: int) -> ExperimentRecord:
    try:
        rec = ExperimentRecord.from_dict(json.loads(line))
    except (json.JSONDecodeError, DomainError, TypeError, AttributeError) as exc:
        raise DomainError(f"line {no}: malformed record ({exc})") from None
    if not rec.verify():
        raise DomainError(f"line {no}: canonical_hash does not match the record contents")
    return rec
