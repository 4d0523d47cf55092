"""Deterministic JSON/CSV output and schema validation helpers.

Every artifact the package writes goes through these functions so that two
runs with the same seed produce byte-identical files: keys are sorted, floats
use Python's shortest round-trip repr, and numpy scalars are coerced to plain
Python types before encoding.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

_SCHEMA_DIR = Path(__file__).parent / "schemas"


def _coerce(obj):
    if isinstance(obj, dict):
        return {str(k): _coerce(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_coerce(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)) and not isinstance(obj, bool):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return _coerce(obj.tolist())
    return obj


def dumps(obj) -> str:
    """Canonical JSON text: sorted keys, two-space indent, round-trip floats."""
    return json.dumps(_coerce(obj), sort_keys=True, indent=2, allow_nan=False)


def dump(obj, path) -> None:
    Path(path).write_text(dumps(obj) + "\n")


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (np.floating, float)):
        return repr(float(value))
    if isinstance(value, (np.integer, int)) and not isinstance(value, bool):
        return str(int(value))
    return str(value)


def write_csv(path, header, rows) -> None:
    """CSV with LF line endings and repr-formatted floats (None -> empty)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])


def schema_names() -> list[str]:
    return sorted(p.stem for p in _SCHEMA_DIR.glob("*.json"))


def load_schema(name: str) -> dict:
    path = _SCHEMA_DIR / f"{name}.json"
    if not path.exists():
        raise KeyError(f"no schema named {name!r}; have {schema_names()}")
    return json.loads(path.read_text())


def validate(obj: dict, schema_name: str) -> None:
    """Validate a report dict against its bundled schema (needs jsonschema)."""
    import jsonschema

    jsonschema.validate(_coerce(obj), load_schema(schema_name))
