"""Serialization of reports to JSON and CSV.

JSON encoding rules: complex numbers become {"re": x, "im": y}, LogScaled
values become {"log_modulus": x, "phase": y}, tuples and numpy arrays become
lists and dataclasses become objects.  :func:`loads` reverses the first two
rules, so ``loads(dumps(structure(r))) == structure(r)``.
"""
from __future__ import annotations

import csv
import dataclasses
import io
import json
import math

import numpy as np

from .specfun import LogScaled

CSV_COLUMNS = ("k", "re_s", "im_s", "re_w", "im_w", "re_N", "im_N", "abs_N", "remainder_ratio", "certified")


def structure(obj):
    """Plain nested form of a report: dicts, lists, str, int, float, bool, None, complex, LogScaled."""
    if isinstance(obj, LogScaled):
        return obj
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return complex(obj)
    if obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, np.ndarray):
        return [structure(x) for x in obj.tolist()]
    if dataclasses.is_dataclass(obj):
        return {f.name: structure(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): structure(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [structure(x) for x in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _encode(obj):
    if isinstance(obj, LogScaled):
        return {"log_modulus": obj.log_modulus, "phase": obj.phase}
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, dict):
        return {k: _encode(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_encode(x) for x in obj]
    return obj


def _decode(obj):
    if isinstance(obj, dict):
        keys = set(obj)
        if keys == {"re", "im"}:
            return complex(obj["re"], obj["im"])
        if keys == {"log_modulus", "phase"}:
            return LogScaled(obj["log_modulus"], obj["phase"])
        return {k: _decode(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_decode(x) for x in obj]
    return obj


def dumps(report, indent: int | None = 2) -> str:
    return json.dumps(_encode(structure(report)), indent=indent)


def loads(text: str):
    return _decode(json.loads(text))


def scan_rows(scan) -> list[dict]:
    """One row per grid point of a scan report."""
    k = scan.region.k
    margin = np.abs(scan.N) - scan.remainder_ratio
    rows = []
    for s, w, n, r, m in zip(scan.s, scan.w, scan.N, scan.remainder_ratio, margin):
        rows.append({"k": k, "re_s": s.real, "im_s": s.imag, "re_w": w.real, "im_w": w.imag,
                     "re_N": n.real, "im_N": n.imag, "abs_N": abs(n), "remainder_ratio": float(r),
                     "certified": bool(m > 0)})
    return rows


def to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: (repr(float(v)) if isinstance(v, float) else v) for k, v in row.items()})
    return buf.getvalue()


def emit_report(report, fmt: str = "json", path=None) -> str:
    """Serialize ``report``; write it to ``path`` when given.  CSV expects a list of grid rows."""
    if fmt == "json":
        text = dumps(report)
    elif fmt == "csv":
        text = to_csv(report)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text
