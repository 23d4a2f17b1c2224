"""Per-iteration trace rows and their CSV/JSON serialization.

Reals are printed with 17 significant digits so files round-trip to the
exact same doubles.  The entropy column may be empty (CSV) or null (JSON)
for runs whose stop rule never evaluates entropy.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

from .core import GroverError

CSV_HEADER = "iter,vx,va,p_success,entropy_bits"
FORMATS = ("csv", "json")


@dataclass(frozen=True)
class TraceRow:
    """One sampled iteration: category amplitudes, marked-mass probability,
    and (optionally) the Shannon entropy in bits."""

    iter: int
    vx: float
    va: float
    p_success: float
    entropy_bits: float | None = None


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def rows_to_csv(rows: list[TraceRow]) -> str:
    lines = [CSV_HEADER]
    for r in rows:
        ent = "" if r.entropy_bits is None else _fmt(r.entropy_bits)
        lines.append(f"{r.iter},{_fmt(r.vx)},{_fmt(r.va)},{_fmt(r.p_success)},{ent}")
    return "\n".join(lines) + "\n"


def rows_to_json(rows: list[TraceRow]) -> str:
    payload = [
        {
            "iter": r.iter,
            "vx": r.vx,
            "va": r.va,
            "p_success": r.p_success,
            "entropy_bits": r.entropy_bits,
        }
        for r in rows
    ]
    return json.dumps(payload, indent=1) + "\n"


def emit_trace(rows: list[TraceRow], fmt: str, path) -> None:
    """Write rows to `path` in the requested format ("csv" or "json")."""
    if not rows:
        raise GroverError("refusing to emit an empty trace")
    if fmt not in FORMATS:
        raise GroverError(f"unknown trace format {fmt!r}; expected one of {FORMATS}")
    text = rows_to_csv(rows) if fmt == "csv" else rows_to_json(rows)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def read_trace(path, fmt: str) -> list[TraceRow]:
    """Inverse of :func:`emit_trace` (used by tests and external tooling)."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    if fmt == "csv":
        lines = [ln for ln in text.splitlines() if ln]
        if not lines or lines[0] != CSV_HEADER:
            raise GroverError(f"bad trace header in {path}")
        rows = []
        for ln in lines[1:]:
            it, vx, va, p, ent = ln.split(",")
            rows.append(
                TraceRow(
                    iter=int(it),
                    vx=float(vx),
                    va=float(va),
                    p_success=float(p),
                    entropy_bits=None if ent == "" else float(ent),
                )
            )
        return rows
    if fmt == "json":
        return [TraceRow(**obj) for obj in json.loads(text)]
    raise GroverError(f"unknown trace format {fmt!r}; expected one of {FORMATS}")
