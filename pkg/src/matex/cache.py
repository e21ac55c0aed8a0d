"""Append-only JSONL store of proved solver results.

Each line is one record. Reads scan newest first, skip unproved records and
re-verify the witness of a candidate before serving it; a record that fails
to parse or verify is evicted by rewriting the file without it.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

from . import __version__
from .extremal import SolveResult, SolveTask, avoids, objective_value
from .tensor import Tensor01, TensorError, tensor_from_dict

DEFAULT_CACHE = Path.home() / ".cache" / "matex" / "results.jsonl"


def default_path() -> Path:
    env = os.environ.get("MATEX_CACHE")
    return Path(env) if env else DEFAULT_CACHE


@dataclass(frozen=True)
class CacheRecord:
    key: tuple
    optimum: int
    witness: Tensor01
    proved_optimal: bool
    version: str
    timestamp: str | None = None

    def to_dict(self) -> dict[str, Any]:
        pattern_hash, dims, predicate, objective, threshold = self.key
        return {
            "key": {
                "pattern_hash": pattern_hash,
                "dims": list(dims),
                "predicate": predicate,
                "objective": objective,
                "threshold": threshold,
            },
            "optimum": self.optimum,
            "witness": self.witness.to_dict(),
            "proved_optimal": self.proved_optimal,
            "version": self.version,
            "timestamp": self.timestamp,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> CacheRecord:
        k = data["key"]
        key = (str(k["pattern_hash"]), tuple(int(n) for n in k["dims"]), k["predicate"], k["objective"], k["threshold"])
        return cls(
            key=key,
            optimum=int(data["optimum"]),
            witness=tensor_from_dict(data["witness"]),
            proved_optimal=bool(data["proved_optimal"]),
            version=str(data["version"]),
            timestamp=data.get("timestamp"),
        )


class ResultCache:
    """JSONL result store; ``get``/``put`` match the hooks used by ``extremal.solve``."""

    def __init__(self, path: str | Path | None = None, timestamps: bool = True) -> None:
        self.path = Path(path) if path is not None else default_path()
        self.timestamps = timestamps

    def _lines(self) -> list[str]:
        if not self.path.exists():
            return []
        return self.path.read_text(encoding="utf-8").splitlines()

    def records(self) -> list[CacheRecord]:
        out = []
        for text in self._lines():
            try:
                out.append(CacheRecord.from_dict(json.loads(text)))
            except (ValueError, KeyError, TypeError, TensorError):
                continue
        return out

    def _evict(self, bad: set[int]) -> None:
        keep = [t for i, t in enumerate(self._lines()) if i not in bad]
        self.path.write_text("".join(t + "\n" for t in keep), encoding="utf-8")

    def get_record(self, task: SolveTask) -> CacheRecord | None:
        lines = self._lines()
        bad: set[int] = set()
        found = None
        for i in range(len(lines) - 1, -1, -1):
            try:
                rec = CacheRecord.from_dict(json.loads(lines[i]))
            except (ValueError, KeyError, TypeError, TensorError):
                bad.add(i)
                continue
            if rec.key != task.key or not rec.proved_optimal:
                continue
            if _verified(rec, task):
                found = rec
                break
            bad.add(i)
        if bad:
            self._evict(bad)
        return found

    def get(self, task: SolveTask) -> SolveResult | None:
        rec = self.get_record(task)
        if rec is None:
            return None
        return SolveResult(task, rec.optimum, rec.witness, True, source="cache")

    def put_record(self, rec: CacheRecord) -> None:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with self.path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(rec.to_dict(), separators=(",", ":"), sort_keys=True) + "\n")

    def put(self, result: SolveResult) -> None:
        if not result.proved_optimal:
            return
        stamp = datetime.now(timezone.utc).isoformat() if self.timestamps else None
        self.put_record(
            CacheRecord(result.task.key, result.optimum, result.witness, True, __version__, stamp)
        )

    def clear(self) -> int:
        n = len(self._lines())
        if self.path.exists():
            self.path.unlink()
        return n


def _verified(rec: CacheRecord, task: SolveTask) -> bool:
    W = rec.witness
    if W.dims != task.dims:
        return False
    return avoids(W, task.pattern.tensor, task.predicate) and objective_value(W, task) == rec.optimum
