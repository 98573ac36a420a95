"""CSV and JSON writers shared by profiles, oracle results and sweeps.

CSV: header row, '.' decimal separator, LF line endings, ``%.17g`` numbers so
that repeated runs are byte-identical.
"""
from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, Iterable, Sequence


def fmt(v: Any) -> str:
    if isinstance(v, bool) or v is None:
        return "" if v is None else str(v).lower()
    if isinstance(v, (int,)):
        return str(v)
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        return format(v, ".17g")
    return str(v)


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    path = Path(path)
    with open(path, "w", newline="\n", encoding="ascii") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")
    return path


def read_csv(path: str | Path) -> tuple[list[str], list[list[str]]]:
    lines = Path(path).read_text(encoding="ascii").splitlines()
    return lines[0].split(","), [ln.split(",") for ln in lines[1:]]


def _clean(obj: Any) -> Any:
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item"):  # numpy scalars
        return _clean(obj.item())
    return obj


def dumps(obj: Any) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=False)


def write_json(path: str | Path, obj: Any) -> Path:
    path = Path(path)
    path.write_text(dumps(obj) + "\n", encoding="utf-8")
    return path
