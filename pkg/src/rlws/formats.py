"""Deterministic serialization helpers: CSV, OBJ, JSON float formatting.

CSV carries full round-trip precision (17 significant digits), OBJ rounds
to 9 significant digits, SVG (see portrait.py) to 6.
"""
from __future__ import annotations

import csv
import io
import json


def fmt17(x: float) -> str:
    return f"{x:.17g}"


def fmt9(x: float) -> str:
    return f"{x:.9g}"


def fmt6(x: float) -> str:
    return f"{x:.6g}"


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf)
    wr.writerow(header)
    for row in rows:
        wr.writerow(row)
    return buf.getvalue()


def json_text(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def obj_text(vertices3, faces, comments=()) -> str:
    """Wavefront OBJ with quads split into triangles, 1-based indices."""
    lines = [f"# {c}" for c in comments]
    for v in vertices3:
        lines.append("v " + " ".join(fmt9(float(x)) for x in v))
    for f in faces:
        if len(f) == 4:
            p, q, r, s = (i + 1 for i in f)
            lines.append(f"f {p} {q} {r}")
            lines.append(f"f {p} {r} {s}")
        else:
            lines.append("f " + " ".join(str(i + 1) for i in f))
    return "\n".join(lines) + "\n"
