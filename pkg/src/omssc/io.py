"""Trace files and run reports.

A trace file is JSON lines: a header ``{"n": N, "r": R}`` followed by one
``{"set": [ids...]}`` object per request, ids 1-based.
"""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path

from .core import InvalidInputError, RequestSet, Trace


def dumps_trace(trace: Trace) -> str:
    lines = [json.dumps({"n": trace.n, "r": trace.r})]
    lines.extend(json.dumps({"set": list(s.elements)}) for s in trace.sets)
    return "\n".join(lines) + "\n"


def loads_trace(text: str) -> Trace:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise InvalidInputError("empty trace file")
    try:
        header = json.loads(lines[0])
        n, r = int(header["n"]), int(header["r"])
    except (ValueError, KeyError, TypeError) as exc:
        raise InvalidInputError(f"bad trace header {lines[0]!r}") from exc
    sets = []
    for lineno, ln in enumerate(lines[1:], start=2):
        try:
            ids = json.loads(ln)["set"]
        except (ValueError, KeyError, TypeError) as exc:
            raise InvalidInputError(f"line {lineno}: bad request {ln!r}") from exc
        s = RequestSet.of(ids, n)
        if s.r != r:
            raise InvalidInputError(f"line {lineno}: request {ids} has size {s.r}, header says r={r}")
        sets.append(s)
    return Trace(n, r, tuple(sets))


def write_trace(trace: Trace, path) -> None:
    Path(path).write_text(dumps_trace(trace))


def read_trace(path) -> Trace:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InvalidInputError(f"cannot read trace {path}: {exc}") from exc
    return loads_trace(text)


CSV_FIELDS = ("t", "access", "moving", "cumAccess", "cumMoving")


def report_csv(report) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    cum_a = cum_m = 0
    for step in report.ledger.steps:
        cum_a += step.access
        cum_m += step.moving
        writer.writerow((step.t, step.access, step.moving, cum_a, cum_m))
    return buf.getvalue()


def report_json(report) -> str:
    return json.dumps(report.to_dict(), indent=2) + "\n"


def write_report(report, path, format: str = "json") -> None:
    if format == "json":
        text = report_json(report)
    elif format == "csv":
        text = report_csv(report)
    else:
        raise InvalidInputError(f"unknown report format {format!r}")
    Path(path).write_text(text)
