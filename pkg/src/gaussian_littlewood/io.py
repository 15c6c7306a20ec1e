"""CSV and JSON formats.

Data files (coefficients, samples, matrices) write floats with ``repr`` so
they round-trip bit-exactly.  Report CSVs print 9 significant digits;
their JSON mirrors carry full precision.  Every CSV starts with the comment
line ``# schema=1``.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
from pathlib import Path

import numpy as np

from .exceptions import ValidationError
from .hardy import CoefficientSeries

SCHEMA_LINE = "# schema=1"
REPORT_COLUMNS = ("bound_name", "estimate", "stderr", "bound_value", "satisfied",
                  "margin", "p", "q", "T", "M", "seed")


def fmt9(x):
    """Nine significant digits; ``inf``/``nan`` spelled as Python does."""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if not math.isfinite(x):
        return repr(x)
    return f"{x:.9g}"


def _comment_lines(lines):
    return [line for line in lines if not line.startswith("#")]


def _write_text(path, text):
    Path(path).write_text(text, encoding="utf-8", newline="")


def coeffs_to_csv(f, path=None):
    buf = io.StringIO()
    buf.write(SCHEMA_LINE + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["index", "re", "im"])
    for k, a in enumerate(f.coeffs):
        writer.writerow([k, repr(float(a.real)), repr(float(a.imag))])
    text = buf.getvalue()
    if path is not None:
        _write_text(path, text)
    return text


def coeffs_from_csv(text):
    rows = list(csv.reader(_comment_lines(text.splitlines())))
    if not rows or [c.strip() for c in rows[0]] != ["index", "re", "im"]:
        raise ValidationError("coeffs", "CSV needs header index,re,im")
    body = rows[1:]
    coeffs = np.zeros(len(body), dtype=complex)
    for row in body:
        k = int(row[0])
        if not 0 <= k < len(body):
            raise ValidationError("coeffs", f"index {k} out of range")
        coeffs[k] = complex(float(row[1]), float(row[2]))
    return CoefficientSeries(coeffs)


def coeffs_to_json(f, path=None):
    text = json.dumps([[float(a.real), float(a.imag)] for a in f.coeffs])
    if path is not None:
        _write_text(path, text)
    return text


def coeffs_from_json(text):
    pairs = json.loads(text)
    if not isinstance(pairs, list) or not all(isinstance(p, list) and len(p) == 2 for p in pairs):
        raise ValidationError("coeffs", "JSON must be an array of [re, im] pairs")
    return CoefficientSeries(np.array([complex(re, im) for re, im in pairs], dtype=complex))


def load_coeffs(path):
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".json":
        return coeffs_from_json(text)
    return coeffs_from_csv(text)


def sample_to_csv(sample, path=None):
    buf = io.StringIO()
    buf.write(SCHEMA_LINE + "\n")
    buf.write(f"# model={sample.model_id}\n")
    buf.write(f"# seed={sample.seed.root_seed} stream={sample.seed.stream_id}\n")
    buf.write("n,X_n\n")
    for n, x in enumerate(sample.values):
        buf.write(f"{n},{float(x)!r}\n")
    text = buf.getvalue()
    if path is not None:
        _write_text(path, text)
    return text


def matrix_to_csv(T, path=None):
    values = T.values
    buf = io.StringIO()
    buf.write(SCHEMA_LINE + "\n")
    buf.write(f"# order={values.shape[0]}\n")
    for row in values:
        buf.write(",".join(repr(float(x)) for x in row) + "\n")
    text = buf.getvalue()
    if path is not None:
        _write_text(path, text)
    return text


def report_row(report):
    return {
        "bound_name": report.bound_name,
        "estimate": report.estimate,
        "stderr": report.stderr,
        "bound_value": report.bound_value,
        "satisfied": report.satisfied,
        "margin": report.margin,
        "p": report.p,
        "q": report.q,
        "T": report.trials,
        "M": report.grid_size,
        "seed": report.seed,
    }


def reports_to_csv(reports, path=None):
    return rows_to_csv([report_row(r) for r in reports], REPORT_COLUMNS, path)


def reports_to_json(reports, path=None):
    payload = []
    for r in reports:
        row = report_row(r)
        row["kind"] = r.kind
        payload.append(row)
    return dump_json(payload, path)


def rows_to_csv(rows, columns, path=None):
    buf = io.StringIO()
    buf.write(SCHEMA_LINE + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt9(row[c]) if not isinstance(row[c], str) else row[c] for c in columns])
    text = buf.getvalue()
    if path is not None:
        _write_text(path, text)
    return text


def _jsonable(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: _jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        # JSON has no inf/nan; keep them readable and parseable.
        return x if math.isfinite(x) else repr(x)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def dump_json(obj, path=None):
    text = json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"
    if path is not None:
        _write_text(path, text)
    return text
