"""JSON and CSV writers for command results.

Single objects are written as JSON, tables as CSV (UTF-8, LF line endings,
'.' decimal point). Nothing time-dependent is written, so identical inputs give
byte-identical files.
"""

import csv
import io
import json
import sys
from collections.abc import Iterable, Mapping, Sequence
from pathlib import Path
from typing import Any, TextIO

PLOT_COLUMNS = ("metric", "x", "y", "stderr")


def _open(path: str | Path | None) -> tuple[TextIO, bool]:
    if path is None:
        return sys.stdout, False
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    return open(target, "w", encoding="utf-8", newline=""), True


def dumps_json(data: Any) -> str:
    return json.dumps(data, indent=2, default=str) + "\n"


def write_json(data: Any, path: str | Path | None = None) -> None:
    """Write one object as indented JSON to ``path`` or standard output."""
    stream, owned = _open(path)
    try:
        stream.write(dumps_json(data))
    finally:
        if owned:
            stream.close()


def write_jsonl(lines: Iterable[str], path: str | Path | None = None) -> None:
    """Write pre-serialized JSON documents, one per line."""
    stream, owned = _open(path)
    try:
        for line in lines:
            stream.write(line.rstrip("\n") + "\n")
    finally:
        if owned:
            stream.close()


def format_csv(rows: Sequence[Mapping[str, Any]], fieldnames: Sequence[str] | None = None) -> str:
    """Render rows as CSV text; columns default to the keys of the first row."""
    if fieldnames is None:
        fieldnames = list(rows[0].keys()) if rows else []
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(fieldnames), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({key: _cell(row.get(key, "")) for key in fieldnames})
    return buffer.getvalue()


def _cell(value: Any) -> Any:
    if value is None:
        return ""
    if isinstance(value, (dict, list, tuple)):
        return json.dumps(value, default=str)
    return value


def write_csv(
    rows: Sequence[Mapping[str, Any]],
    path: str | Path | None = None,
    fieldnames: Sequence[str] | None = None,
) -> None:
    """Write rows as CSV to ``path`` or standard output."""
    stream, owned = _open(path)
    try:
        stream.write(format_csv(rows, fieldnames))
    finally:
        if owned:
            stream.close()


def plot_path(out: str | Path) -> Path:
    """Companion plot-data file ``<out>.plot.csv``."""
    out = Path(out)
    return out.with_name(out.name + ".plot.csv")


def write_plot_data(points: Sequence[Mapping[str, Any]], path: str | Path) -> None:
    """Write (metric, x, y, stderr) rows for external plotting."""
    write_csv(points, path, fieldnames=PLOT_COLUMNS)
