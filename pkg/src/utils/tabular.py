"""
CSV and flat key-value writers shared by every command.

CSV dialect: comma-separated, `#`-prefixed header lines, floats written with
17 significant digits so reruns are byte-identical.
"""
import math
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import pandas as pd

from src.utils.path_utils import ensure_output_dir


def _format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return repr(value)
    return str(value)


def write_csv(frame: pd.DataFrame, path: str | Path, header: Sequence[str] = ()) -> Path:
    """Writes `frame` under `# ` header lines; None/NaN cells stay empty."""
    path = Path(path)
    ensure_output_dir(path.parent)
    with path.open("w", encoding="utf-8", newline="") as handle:
        for line in header:
            handle.write(f"# {line}\n")
        frame.to_csv(handle, index=False, lineterminator="\n", float_format="%.17g")
    return path


def read_csv(path: str | Path) -> pd.DataFrame:
    """Reads a CSV written by `write_csv`, skipping header comments."""
    return pd.read_csv(path, comment="#")


def records_frame(rows: Iterable, columns: Sequence[str]) -> pd.DataFrame:
    """DataFrame from pydantic rows (or dicts), restricted to `columns` in order."""
    records = [row.model_dump() if hasattr(row, "model_dump") else dict(row) for row in rows]
    return pd.DataFrame.from_records(records, columns=list(columns))


def format_report(values: Mapping[str, object]) -> str:
    """Flat `key = value` text, one pair per line, in mapping order."""
    return "".join(f"{key} = {_format_value(value)}\n" for key, value in values.items())


def write_report(values: Mapping[str, object], path: str | Path, header: Sequence[str] = ()) -> Path:
    path = Path(path)
    ensure_output_dir(path.parent)
    text = "".join(f"# {line}\n" for line in header) + format_report(values)
    path.write_text(text, encoding="utf-8")
    return path


def parse_report(text: str) -> dict[str, str]:
    """Inverse of `format_report`; values stay strings."""
    values = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return values
