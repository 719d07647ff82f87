"""Deterministic JSON and CSV emission of result records.

Floats are written with 17 significant digits (enough to round-trip any
double) and non-finite values as the ``Infinity``/``NaN`` literals that
:func:`json.loads` accepts, so ``loads(dumps(x)) == x`` for every record.
Key order is the insertion order of the record builders.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import math
from dataclasses import asdict, is_dataclass

import numpy as np

SCHEMA_VERSION = "1"


def _float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    text = format(x, ".17g")
    # keep floats recognisable as floats after a round trip
    if not any(ch in text for ch in ".en"):
        text += ".0"
    return text


def plain(obj):
    """Convert numpy scalars, enums, tuples and dataclasses into JSON-ready builtins."""
    if hasattr(obj, "as_dict"):
        return plain(obj.as_dict())
    if is_dataclass(obj) and not isinstance(obj, type):
        return plain(asdict(obj))
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [plain(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def _encode(obj, indent: int, level: int) -> str:
    pad = "\n" + " " * (indent * (level + 1))
    end = "\n" + " " * (indent * level)
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{json.dumps(k)}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{" + pad + ("," + pad).join(items) + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        return "[" + pad + ("," + pad).join(_encode(v, indent, level + 1) for v in obj) + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(record, indent: int = 2) -> str:
    """Serialise a record; identical input gives byte-identical output."""
    return _encode(plain(record), indent, 0) + "\n"


def loads(text: str):
    return json.loads(text)


def make_record(command: str, inputs: dict, result) -> dict:
    return {"schema_version": SCHEMA_VERSION, "command": command, "input": inputs, "result": result}


def flatten(obj, prefix: str = "") -> dict:
    """Dotted-path view of nested dicts; lists are joined element-wise with an index."""
    out = {}
    obj = plain(obj)
    if isinstance(obj, dict):
        for k, v in obj.items():
            out.update(flatten(v, f"{prefix}{k}."))
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            out.update(flatten(v, f"{prefix}{i}."))
    else:
        out[prefix[:-1]] = obj
    return out


def to_csv(rows: list[dict], first: str | None = None) -> str:
    """One CSV row per record (flattened); ``first`` names the leading column."""
    flat = [flatten(r) for r in rows]
    header = []
    for f in flat:
        for k in f:
            if k not in header:
                header.append(k)
    if first in header:
        header.remove(first)
        header.insert(0, first)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for f in flat:
        writer.writerow([_cell(f.get(k, "")) for k in header])
    return buf.getvalue()


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return _float(v)
    if v is None:
        return ""
    return str(v)
