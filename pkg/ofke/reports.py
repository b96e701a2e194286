"""
Report rendering: JSON, CSV and plain text with a fixed numeric format.

Every float is rounded to 12 significant digits before it is written, so JSON
and CSV carry the same values and repeated runs produce identical bytes.
"""
from typing import Any, Dict, List, Mapping, Sequence
import csv
import io
import json
import logging

logger = logging.getLogger(__name__)

SIGNIFICANT_DIGITS = 12


def round_sig(x: float) -> float:
    """Round ``x`` to 12 significant digits."""
    return float(f"{x:.{SIGNIFICANT_DIGITS}g}")


def normalize(obj: Any) -> Any:
    """Recursively round floats; tuples become lists, key order is kept."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return round_sig(obj)
    if isinstance(obj, Mapping):
        return {str(key): normalize(value) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [normalize(item) for item in obj]
    if hasattr(obj, "item"):
        return normalize(obj.item())
    raise TypeError(f"Cannot render value of type {type(obj).__name__}")


def dumps(payload: Any) -> str:
    """Canonical JSON text of ``payload``."""
    return json.dumps(normalize(payload), indent=2, allow_nan=False)


def _flatten(record: Mapping[str, Any], prefix: str = "") -> Dict[str, Any]:
    flat: Dict[str, Any] = {}
    for key, value in record.items():
        name = f"{prefix}{key}"
        if isinstance(value, Mapping):
            flat.update(_flatten(value, f"{name}."))
        elif isinstance(value, (list, tuple)):
            for index, item in enumerate(value):
                if isinstance(item, Mapping):
                    flat.update(_flatten(item, f"{name}.{index}."))
                else:
                    flat[f"{name}.{index}"] = item
        else:
            flat[name] = value
    return flat


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{round_sig(value):.{SIGNIFICANT_DIGITS}g}"
    return str(value)


def render_json(header: Mapping[str, Any], results: Sequence[Mapping[str, Any]]) -> str:
    return dumps({"header": header, "results": list(results)}) + "\n"


def render_csv(header: Mapping[str, Any], results: Sequence[Mapping[str, Any]]) -> str:
    """
    One row per result, nested fields flattened to dotted column names.

    The header is written as leading ``# key=value`` comment lines.
    """
    buffer = io.StringIO()
    for key, value in _flatten(header).items():
        buffer.write(f"# {key}={_cell(value)}\n")

    rows = [_flatten(result) for result in results]
    columns: List[str] = []
    for row in rows:
        columns.extend(column for column in row if column not in columns)

    writer = csv.DictWriter(buffer, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({column: _cell(row.get(column)) for column in columns})
    return buffer.getvalue()


def render_text(header: Mapping[str, Any], results: Sequence[Mapping[str, Any]]) -> str:
    lines = [f"{key}: {_cell(value)}" for key, value in _flatten(header).items()]
    for index, result in enumerate(results):
        lines.append("")
        lines.append(f"[result {index}]")
        lines.extend(f"  {key}: {_cell(value)}" for key, value in _flatten(result).items())
    return "\n".join(lines) + "\n"


RENDERERS = {
    "json": render_json,
    "csv": render_csv,
    "text": render_text,
}


def render(fmt: str, header: Mapping[str, Any], results: Sequence[Mapping[str, Any]]) -> str:
    """Render a report envelope in ``fmt`` (json, csv or text)."""
    if fmt not in RENDERERS:
        raise ValueError(f"Unknown report format '{fmt}'")
    return RENDERERS[fmt](header, results)
