"""CSV and JSON serialization of handler reports.

CSV files are locale independent: ``.`` decimal point, no grouping, ``\\n``
line endings and 17 significant digits so that values round-trip exactly.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence, TextIO
import csv
import io
import json
import math
import sys

FORMATS = ("csv", "json")


@dataclass
class Report:
    """
    Tabular result of one subcommand.

    Attributes
    ----------
    name : str
        Report kind (``trajectory``, ``coeffs``, ``order``...).
    headers : Sequence[str]
        Column names, written verbatim as the CSV header row.
    rows : list[Sequence[Any]]
        Row values; floats, ints, strings or ``None``.
    meta : dict[str, Any]
        Run metadata (scheme, h, seed...); JSON carries it, CSV prints it to stderr.
    """

    name: str
    headers: Sequence[str]
    rows: list[Sequence[Any]]
    meta: dict[str, Any] = field(default_factory=dict)


def format_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return "nan" if math.isnan(value) else format(value, ".17g")
    return str(value)


def _json_value(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, (list, tuple)):
        return [_json_value(v) for v in value]
    if isinstance(value, dict):
        return {k: _json_value(v) for k, v in value.items()}
    return value


def render_csv(report: Report) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(report.headers)
    for row in report.rows:
        writer.writerow([format_cell(v) for v in row])
    return buffer.getvalue()


def render_json(report: Report) -> str:
    body = {
        "report": report.name,
        "meta": _json_value(report.meta),
        "columns": list(report.headers),
        "rows": [dict(zip(report.headers, _json_value(list(row)))) for row in report.rows],
    }
    return json.dumps(body, indent=2) + "\n"


def write_report(report: Report, path: Path | str | None = None, fmt: str = "csv", stream: TextIO | None = None) -> None:
    """Write ``report`` to ``path`` (or ``stream``/stdout when no path is given)."""
    text = render_json(report) if fmt == "json" else render_csv(report)
    if path:
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        with open(target, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        (stream or sys.stdout).write(text)
