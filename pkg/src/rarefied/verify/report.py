"""Identity reports and their JSON-lines form."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import IO, Iterable

import numpy as np

from ..kernels import BalancedParams
from ..qseries import Bases

PROVED = "proved"
CONJECTURE = "conjecture-consistent"

STATUS_OK = "ok"
STATUS_SKIPPED = "skipped"
STATUS_ERROR = "error"


def cpair(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def relative_deviation(lhs: complex, rhs: complex) -> float:
    """|lhs/rhs - 1|, or |lhs| when the right side is exactly zero."""
    lhs, rhs = complex(lhs), complex(rhs)
    if rhs == 0:
        return abs(lhs)
    return abs(lhs / rhs - 1.0)


@dataclass
class IdentityReport:
    """Outcome of one identity check.

    ``passed`` is true exactly when the status is ok and ``rel_dev`` is at most
    ``tolerance``.  Residual-type checks store the normalized residual as
    ``lhs`` and 0 as ``rhs``.
    """

    identity_id: str
    lhs: complex
    rhs: complex
    rel_dev: float
    tolerance: float
    params: dict | None = None
    bases: dict | None = None
    grid_used: int = 0
    wall_time: float = 0.0
    label: str = PROVED
    status: str = STATUS_OK
    message: str = ""
    seed: int | None = None
    tags: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == STATUS_OK and math.isfinite(self.rel_dev) and self.rel_dev <= self.tolerance

    @classmethod
    def build(cls, identity_id, lhs, rhs, tolerance, params=None, bases=None, **kw) -> "IdentityReport":
        rel = kw.pop("rel_dev", None)
        if rel is None:
            rel = relative_deviation(lhs, rhs)
        if isinstance(params, BalancedParams):
            params = params.as_dict()
        if isinstance(bases, Bases):
            bases = bases.as_dict()
        return cls(identity_id, complex(lhs), complex(rhs), float(rel), float(tolerance), params, bases, **kw)

    @classmethod
    def skipped(cls, identity_id, message, label=PROVED, **kw) -> "IdentityReport":
        return cls(identity_id, 0j, 0j, math.nan, 0.0, label=label, status=STATUS_SKIPPED, message=message, **kw)

    def to_record(self, timing: bool = True) -> dict:
        rec = {
            "identity_id": self.identity_id,
            "pass": self.passed,
            "status": self.status,
            "label": self.label,
            "rel_dev": None if not math.isfinite(self.rel_dev) else self.rel_dev,
            "tolerance": self.tolerance,
            "lhs": cpair(self.lhs),
            "rhs": cpair(self.rhs),
            "params": self.params,
            "bases": self.bases,
            "grid_used": self.grid_used,
            "seed": self.seed,
        }
        if self.tags:
            rec["tags"] = self.tags
        if self.message:
            rec["message"] = self.message
        if timing:
            rec["wall_time_ms"] = round(1000.0 * self.wall_time, 3)
        return rec

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_record(timing), sort_keys=True, default=_json_default)


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, complex):
        return cpair(o)
    raise TypeError(f"not serializable: {type(o)}")


def write_jsonl(reports: Iterable[IdentityReport], fh: IO[str], timing: bool = True) -> int:
    count = 0
    for rep in reports:
        fh.write(rep.to_json(timing) + "\n")
        fh.flush()
        count += 1
    return count


def read_jsonl(fh: IO[str]) -> list:
    """Parse a report file; raises ValueError on a malformed line."""
    out = []
    for lineno, line in enumerate(fh, 1):
        line = line.strip()
        if not line:
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValueError(f"line {lineno}: {exc}") from exc
        if not isinstance(rec, dict) or "identity_id" not in rec or "pass" not in rec:
            raise ValueError(f"line {lineno}: missing identity_id/pass")
        out.append(rec)
    return out


__all__ = [
    "IdentityReport",
    "PROVED",
    "CONJECTURE",
    "relative_deviation",
    "write_jsonl",
    "read_jsonl",
]
