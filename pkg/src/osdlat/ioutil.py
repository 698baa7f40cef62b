"""Stable text formatting for CSV/JSON outputs (golden-file friendly)."""

from __future__ import annotations

import json


def fmt(value) -> str:
    """Format a cell deterministically; None becomes an empty cell."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def csv_text(header, rows) -> str:
    """CSV document with LF line endings and '.' decimal separator."""
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(cell) for cell in row))
    return "\n".join(lines) + "\n"


def json_text(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"
