"""Reading and writing space files, travel time CSVs and JSON reports.

Floats go through ``repr`` (Python's shortest round-trip form), so a space
written and read back is bit-identical.
"""

from __future__ import annotations

import csv
import io as _io
import json
import math
from pathlib import Path

import numpy as np

from .errors import ParameterError
from .metric_core import FiniteMetricSpace, validate_metric


def _finite(x):
    # JSON has no inf/nan; callers decide what a sentinel means
    x = float(x)
    return x if math.isfinite(x) else None


def space_to_dict(space: FiniteMetricSpace, provenance: dict | None = None) -> dict:
    doc = {
        "labels": list(space.labels),
        "dist": [[float(v) for v in row] for row in space.dist],
        "measurement_set": list(space.measurement_set) if space.measurement_set is not None else [],
    }
    if provenance is not None:
        doc["provenance"] = provenance
    return doc


def space_from_dict(doc: dict, slack: float = 0.0) -> FiniteMetricSpace:
    try:
        dist = doc["dist"]
    except (KeyError, TypeError):
        raise ParameterError("space document has no 'dist' matrix") from None
    ms = doc.get("measurement_set") or None
    return validate_metric(dist, labels=doc.get("labels"), measurement_set=ms, slack=slack)


def dumps(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True, allow_nan=False) + "\n"


def write_space(path, space: FiniteMetricSpace, provenance: dict | None = None) -> None:
    Path(path).write_text(dumps(space_to_dict(space, provenance)))


def read_space(path, slack: float | None = None) -> tuple[FiniteMetricSpace, dict]:
    """Load and validate a space file; returns the space and its provenance block.

    When ``slack`` is None the file's own ``provenance.slack`` (if any) is used.
    """
    doc = json.loads(Path(path).read_text())
    prov = doc.get("provenance") or {}
    if slack is None:
        slack = float(prov.get("slack", 0.0))
    return space_from_dict(doc, slack=slack), prov


def data_to_csv(data) -> str:
    """CSV text of a :class:`~ttlab.travel_time.TravelTimeData`.

    First column holds source labels, the header carries sensor labels.
    """
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["source", *data.sensor_labels])
    for label, row in zip(data.source_labels, data.rows):
        w.writerow([label, *(repr(float(v)) for v in row)])
    return buf.getvalue()


def data_from_csv(text: str):
    from .travel_time import TravelTimeData

    rows = list(csv.reader(_io.StringIO(text)))
    if not rows or rows[0][:1] != ["source"]:
        raise ParameterError("travel time CSV must start with a 'source' header column")
    header = rows[0][1:]
    labels = [r[0] for r in rows[1:]]
    values = np.array([[float(v) for v in r[1:]] for r in rows[1:]], dtype=float).reshape(len(labels), len(header))
    return TravelTimeData(values, tuple(labels), tuple(header))


def check_report_to_dict(report) -> dict:
    wp = report.worst_pair
    return {
        "passed": bool(report.passed),
        "epsilon": _finite(report.epsilon),
        "tol": _finite(report.tol),
        "worst_pair": None if wp is None else {"p": int(wp[0]), "q": int(wp[1]), "gap": float(wp[2])},
        "margin": _finite(report.margin),
    }
