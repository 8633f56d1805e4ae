"""CSV/JSON readers and writers for tables, groups, weights, reports and curves."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import sys
from typing import Sequence, TextIO

import numpy as np

from .agreement import AgreementReport
from .core import Score, ScoreReport
from .data import DataTable, GroupFamily
from .errors import (InvalidGroup, InvalidInput, IoError, ParseError, SchemaError,
                     UnknownColumn)
from .transfer import Knee, TransferCurve

SIG_DIGITS = 12

CURVE_COLUMNS = ("fraction", "repeat", "rows", "seconds", "jaccard_at_k", "spearman",
                 "kendall", "procrustes_residual", "sym_kl")
REPORT_COLUMNS = ("kind", "name", "cir", "ratio_nd", "neutral", "rank")


def _open_text(path):
    try:
        return open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc.strerror or exc}") from exc


def _parse_cell(text: str, line: int, column: str) -> float:
    s = text.strip()
    if not s:
        raise ParseError("blank cell", line, column)
    try:
        v = float(s)
    except ValueError:
        raise ParseError(f"not a number: {s!r}", line, column) from None
    if not math.isfinite(v):
        raise ParseError(f"non-finite value {s!r}", line, column)
    return v


def read_csv_matrix(path) -> tuple[list[str], np.ndarray]:
    """Header names and an (n, columns) float matrix; line numbers are 1-based."""
    with _open_text(path) as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("empty file", 1) from None
        header = [h.strip() for h in header]
        if any(not h for h in header):
            raise SchemaError("blank column name in header")
        seen = set()
        for h in header:
            if h in seen:
                raise SchemaError(f"duplicate column name {h!r}")
            seen.add(h)
        rows = []
        for row in reader:
            line = reader.line_num
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != len(header):
                raise ParseError(f"expected {len(header)} fields, found {len(row)}", line)
            rows.append([_parse_cell(c, line, header[j]) for j, c in enumerate(row)])
    if not rows:
        raise ParseError("no data rows", 2)
    return header, np.array(rows, dtype=np.float64)


def load_table(path, target: str | None = None,
               class_columns: Sequence[str] | None = None) -> DataTable:
    """Read a headed CSV; every column that is not an output is a feature."""
    header, M = read_csv_matrix(path)
    outputs = ([target] if target else []) + list(class_columns or [])
    if not outputs:
        raise InvalidInput("a target or at least one class column is required")
    for name in outputs:
        if name not in header:
            raise UnknownColumn(name)
    feat = [h for h in header if h not in outputs]
    if not feat:
        raise SchemaError("no feature columns left after removing outputs")
    X = M[:, [header.index(h) for h in feat]]
    return DataTable(X, tuple(feat), {o: M[:, header.index(o)] for o in outputs})


def load_groups(path, feature_names: Sequence[str]) -> GroupFamily:
    """``{"groups": {name: [feature, ...]}}`` resolved against ``feature_names``."""
    with _open_text(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno) from None
    if not isinstance(doc, dict) or not isinstance(doc.get("groups"), dict):
        raise SchemaError('groups file must be an object with a "groups" mapping')
    spec = doc["groups"]
    for name, members in spec.items():
        if not isinstance(members, list) or not all(isinstance(m, str) for m in members):
            raise SchemaError(f"group {name!r} must list feature names")
        if not members:
            raise InvalidGroup(f"group {name!r} is empty")
    return GroupFamily.from_names(spec, feature_names)


def load_weights(path, n: int) -> np.ndarray:
    """Single-column CSV of n nonnegative weights; an optional header is skipped."""
    with _open_text(path) as fh:
        lines = [(i, ln.strip()) for i, ln in enumerate(fh, start=1) if ln.strip()]
    if lines:
        try:
            float(lines[0][1])
        except ValueError:
            lines = lines[1:]
    vals = []
    for line, text in lines:
        if "," in text:
            raise ParseError("weights file must have a single column", line)
        vals.append(_parse_cell(text, line, "weight"))
    if len(vals) != n:
        raise SchemaError(f"weights file has {len(vals)} values, table has {n} rows")
    return np.array(vals)


def _num(v: float | None) -> float | None:
    if v is None:
        return None
    return float(f"{v:.{SIG_DIGITS}g}")


def _score_rows(scores: Sequence[Score], ranked: bool) -> list[dict]:
    order = sorted(scores, key=lambda s: (-s.cir, s.name))
    out = []
    for rank, s in enumerate(order, start=1):
        row = {"name": s.name, "cir": _num(s.cir), "ratio_nd": _num(s.ratio_nd),
               "neutral": s.neutral}
        if ranked:
            row["rank"] = rank
        out.append(row)
    return out


def report_to_dict(report: ScoreReport, seed: int | None = None, **extra_meta) -> dict:
    meta = {"centering": report.centering.to_dict(), "rows_used": report.rows_used,
            "seed": seed, "weighted": report.weighted}
    if report.class_label is not None:
        meta["class"] = report.class_label
    meta.update(extra_meta)
    return {"meta": meta,
            "features": _score_rows(report.features, ranked=True),
            "groups": _score_rows(report.groups, ranked=False)}


def report_csv_rows(report: ScoreReport) -> list[list]:
    rows = []
    for r in _score_rows(report.features, ranked=True):
        rows.append(["feature", r["name"], r["cir"], r["ratio_nd"], r["neutral"], r["rank"]])
    for r in _score_rows(report.groups, ranked=False):
        rows.append(["group", r["name"], r["cir"], r["ratio_nd"], r["neutral"], ""])
    return rows


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(float(f"{v:.{SIG_DIGITS}g}"))
    return str(v)


def _csv_text(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _json_text(doc) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def reports_text(reports: Sequence[ScoreReport], fmt: str = "json",
                 seed: int | None = None, **extra_meta) -> str:
    """Serialize one report, or a list of class-conditioned reports."""
    if fmt == "json":
        if len(reports) == 1 and reports[0].class_label is None:
            return _json_text(report_to_dict(reports[0], seed, **extra_meta))
        return _json_text({"reports": [report_to_dict(r, seed, **extra_meta)
                                       for r in reports]})
    if fmt == "csv":
        if any(r.class_label is not None for r in reports):
            rows = [[r.class_label, *row] for r in reports for row in report_csv_rows(r)]
            return _csv_text(("class",) + REPORT_COLUMNS, rows)
        return _csv_text(REPORT_COLUMNS, report_csv_rows(reports[0]))
    raise InvalidInput(f"unknown format {fmt!r}")


def curve_rows(curve: TransferCurve) -> list[list]:
    rows = []
    for r in curve.records:
        a = r.agreement
        rows.append([r.fraction, r.repeat, r.rows, r.seconds, a.jaccard_at_k, a.spearman,
                     a.kendall, a.procrustes_residual, a.sym_kl])
    return rows


def curve_to_dict(curve: TransferCurve, knee: Knee | None = None,
                  target_jaccard: float | None = None, spec=None) -> dict:
    cfg = curve.config
    meta = {"seed": cfg.seed, "k": min(cfg.k, len(curve.reference.features))
            if curve.reference else cfg.k,
            "fractions": list(cfg.fractions), "repeats": cfg.repeats}
    if spec is not None:
        meta["centering"] = spec.to_dict()
    doc = {"meta": meta,
           "curve": [{c: (_num(v) if isinstance(v, float) else v)
                      for c, v in zip(CURVE_COLUMNS, row)} for row in curve_rows(curve)],
           "runs": [{"fraction": r.fraction, "repeat": r.repeat, "rows": r.rows,
                     "features": _score_rows(r.report.features, ranked=True)}
                    for r in curve.records]}
    if knee is not None:
        doc["knee"] = {"fraction": knee.fraction, "no_knee": knee.no_knee,
                       "target_jaccard": target_jaccard}
    return doc


def curve_text(curve: TransferCurve, fmt: str = "json", knee: Knee | None = None,
               target_jaccard: float | None = None, spec=None) -> str:
    if fmt == "json":
        return _json_text(curve_to_dict(curve, knee, target_jaccard, spec))
    if fmt == "csv":
        return _csv_text(CURVE_COLUMNS, curve_rows(curve))
    raise InvalidInput(f"unknown format {fmt!r}")


def agreement_text(report: AgreementReport, fmt: str = "json") -> str:
    d = {k: (_num(v) if isinstance(v, float) else v) for k, v in report.to_dict().items()}
    if fmt == "json":
        return _json_text(d)
    if fmt == "csv":
        return _csv_text(list(d), [list(d.values())])
    raise InvalidInput(f"unknown format {fmt!r}")


def write_text(text: str, path=None, stream: TextIO | None = None) -> None:
    if path is None or path == "-":
        (stream or sys.stdout).write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc.strerror or exc}") from exc


def emit_report(report: ScoreReport | TransferCurve, fmt: str = "json", path=None,
                **kwargs) -> str:
    """Serialize a score report or transfer curve; write it to ``path`` when given."""
    if isinstance(report, TransferCurve):
        text = curve_text(report, fmt, **kwargs)
    else:
        text = reports_text([report], fmt, **kwargs)
    if path is not None:
        write_text(text, path)
    return text


def load_scores(path) -> dict[str, float]:
    """Feature scores from an emitted JSON or CSV report (first report if several)."""
    if not os.path.exists(path):
        raise IoError(f"cannot read {path}: no such file")
    with _open_text(path) as fh:
        text = fh.read()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno) from None
        if "reports" in doc:
            doc = doc["reports"][0]
        if "features" not in doc:
            raise SchemaError("report has no 'features' list")
        return {f["name"]: float(f["cir"]) for f in doc["features"]}
    reader = csv.DictReader(io.StringIO(text))
    if not reader.fieldnames or not {"kind", "name", "cir"} <= set(reader.fieldnames):
        raise SchemaError("CSV report needs kind, name and cir columns")
    out = {}
    for row in reader:
        if row["kind"] == "feature" and row["name"] not in out:
            out[row["name"]] = _parse_cell(row["cir"], reader.line_num, "cir")
    return out
