"""
Versioned JSON record files shared by checkpoints and reports.

Records are written with sorted keys and compact separators so identical
content always produces identical bytes; floats are written with ``repr``
precision and therefore round-trip losslessly.
"""

import json
from pathlib import Path
from typing import Any, Dict, Iterable, List

import numpy as np

from dwsl.utils.errors import DatasetFormatError


def to_builtin(value: Any) -> Any:
    """Convert numpy scalars/arrays nested in ``value`` to JSON-compatible types."""
    if isinstance(value, dict):
        return {str(k): to_builtin(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_builtin(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_builtin(value.tolist())
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, Path):
        return str(value)
    return value


def dumps_record(record: Dict[str, Any]) -> str:
    """Serialise one record to a single JSON line (no trailing newline)."""
    return json.dumps(to_builtin(record), sort_keys=True, separators=(",", ":"))


def write_record(path: Path, record: Dict[str, Any]) -> Path:
    """
    Write a single record file.

    Args:
        path: Destination path (parent directories are created)
        record: JSON-compatible mapping; must contain ``format_version``

    Returns:
        The path written
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps_record(record) + "\n", encoding="utf-8")
    return path


def write_lines(path: Path, records: Iterable[Dict[str, Any]]) -> Path:
    """Write line-delimited records, one JSON object per line."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for record in records:
            f.write(dumps_record(record) + "\n")
    return path


def read_text_lines(path: Path) -> List[str]:
    """
    Read a UTF-8 text file as lines.

    Raises:
        DatasetFormatError: On the first line that is not valid UTF-8
    """
    lines = []
    for number, raw in enumerate(Path(path).read_bytes().splitlines(), start=1):
        try:
            lines.append(raw.decode("utf-8"))
        except UnicodeDecodeError as e:
            raise DatasetFormatError(f"invalid UTF-8 ({e.reason})", line=number) from e
    return lines


def parse_line(text: str, line: int) -> Dict[str, Any]:
    """Parse one JSON object line, raising DatasetFormatError with its line number."""
    try:
        record = json.loads(text)
    except json.JSONDecodeError as e:
        raise DatasetFormatError(f"malformed record ({e.msg})", line=line) from e
    if not isinstance(record, dict):
        raise DatasetFormatError("record is not an object", line=line)
    return record


def read_record(path: Path, kind: str, version: int) -> Dict[str, Any]:
    """
    Read a single record file and check its kind and format version.

    Args:
        path: File to read
        kind: Expected value of the ``kind`` field
        version: Supported ``format_version``

    Returns:
        The parsed record
    """
    lines = read_text_lines(path)
    if not lines:
        raise DatasetFormatError("empty file", line=1)
    record = parse_line(lines[0], 1)
    if record.get("kind") != kind:
        raise DatasetFormatError(
            f"expected a '{kind}' record, found {record.get('kind')!r}", line=1
        )
    if record.get("format_version") != version:
        raise DatasetFormatError(
            f"unsupported format_version {record.get('format_version')!r} "
            f"(expected {version})",
            line=1,
        )
    return record


def read_lines(path: Path) -> List[Dict[str, Any]]:
    """Read every line of a line-delimited record file."""
    lines = read_text_lines(path)
    return [parse_line(text, number) for number, text in enumerate(lines, start=1)]
