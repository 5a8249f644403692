"""Task-dataset records and their JSONL format.

One record per line: ``text``, ``time`` ("YYYY", "YYYY-MM", or
"YYYY-MM-DD"), and optional ``context_timestamp`` / ``context_text``.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterator

from .errors import ParseError
from .finetune import LabeledInstance
from .timescale import CorpusSpan, Granularity, TimePoint, timestamp_to_label


def read_task_records(path: str | Path) -> Iterator[dict]:
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc}", lineno) from None
            if "text" not in rec or "time" not in rec:
                raise ParseError("task record needs 'text' and 'time'", lineno)
            yield rec


def write_task_records(records: list[dict], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True, ensure_ascii=False))
            fh.write("\n")


def record_to_instance(rec: dict, granularity: Granularity, span: CorpusSpan) -> LabeledInstance:
    """Map a task record to a labeled instance at the requested granularity."""
    t = TimePoint.parse(rec["time"])
    gold = timestamp_to_label(t, granularity, span)
    return LabeledInstance(
        text=rec["text"],
        gold=gold,
        context_timestamp=rec.get("context_timestamp"),
        context_text=rec.get("context_text"),
    )


def derive_task_span(records: list[dict]) -> CorpusSpan:
    """Smallest span covering every record time, at the records' precision."""
    points = [TimePoint.parse(rec["time"]) for rec in records]
    if not points:
        raise ParseError("cannot derive a span from an empty dataset")
    lo = min(points, key=lambda p: p.sort_key())
    hi = max(points, key=lambda p: p.sort_key())
    return CorpusSpan(lo, hi)
