"""Reading and writing instances, reports and iteration logs.

Instances travel in a single self-describing JSON document tagged
``alpn-socp/1``; reports use the companion tag ``alpn-socp-report/1``.
Floating-point values are encoded with Python's shortest round-trip
decimal representation, so write/read cycles reproduce the exact
binary values.  The iteration log can additionally be written as a
flat CSV table for spreadsheet use.
"""

from __future__ import annotations

import csv
import json

import numpy as np

from .alpn import IterationRecord, SolveReport, SolveStatus
from .dual import DualCertificate, ResidualBundle
from .model import ConeStructure, SocpInstance

__all__ = [
    "INSTANCE_FORMAT",
    "REPORT_FORMAT",
    "REPORT_STYLES",
    "CSV_LOG_HEADER",
    "InstanceFormatError",
    "read_instance",
    "read_provenance",
    "write_instance",
    "write_report",
]

INSTANCE_FORMAT = "alpn-socp/1"
REPORT_FORMAT = "alpn-socp-report/1"
REPORT_STYLES = ("structured", "csv-log")
CSV_LOG_HEADER = ["k", "gamma", "zeta", "b_dist", "cuts_total", "qp_inner_iters"]


class InstanceFormatError(ValueError):
    """Raised when an instance document cannot be parsed or validated."""


def _load_document(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc


def _field(doc, name, path):
    if name not in doc:
        raise InstanceFormatError(f"{path}: missing field '{name}'")
    return doc[name]


def read_instance(path) -> SocpInstance:
    """Parse and validate an instance document.

    Raises
    ------
    InstanceFormatError
        On malformed JSON, an unknown format tag, missing fields, or
        shape/value validation failures; messages name the offending
        field.
    """
    doc = _load_document(path)
    if not isinstance(doc, dict):
        raise InstanceFormatError(f"{path}: top level must be an object")
    version = _field(doc, "format_version", path)
    if version != INSTANCE_FORMAT:
        raise InstanceFormatError(
            f"{path}: format_version {version!r} is not {INSTANCE_FORMAT!r}"
        )
    m = _field(doc, "m", path)
    dims = _field(doc, "dims", path)
    if not isinstance(m, int) or isinstance(m, bool):
        raise InstanceFormatError(f"{path}: field 'm' must be an integer")
    try:
        cone = ConeStructure(tuple(dims))
    except (TypeError, ValueError) as exc:
        raise InstanceFormatError(f"{path}: field 'dims' is invalid: {exc}") from exc
    rows = _field(doc, "A", path)
    if not isinstance(rows, list) or len(rows) != m:
        raise InstanceFormatError(f"{path}: field 'A' must be a list of {m} rows")
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != cone.n:
            raise InstanceFormatError(
                f"{path}: row {i} of 'A' must be a list of {cone.n} numbers"
            )
    try:
        return SocpInstance(
            A=np.array(rows, dtype=float),
            b=np.array(_field(doc, "b", path), dtype=float),
            c=np.array(_field(doc, "c", path), dtype=float),
            cone=cone,
        )
    except (TypeError, ValueError) as exc:
        raise InstanceFormatError(f"{path}: {exc}") from exc


def read_provenance(path) -> dict | None:
    """Return the optional provenance object of an instance document."""
    doc = _load_document(path)
    prov = doc.get("provenance") if isinstance(doc, dict) else None
    return prov if isinstance(prov, dict) else None


def write_instance(instance: SocpInstance, path, provenance: dict | None = None):
    """Write an instance document; round-trips bit-exactly."""
    doc = {
        "format_version": INSTANCE_FORMAT,
        "m": instance.m,
        "dims": list(instance.cone.block_dims),
        "A": [[float(v) for v in row] for row in instance.A],
        "b": [float(v) for v in instance.b],
        "c": [float(v) for v in instance.c],
    }
    if provenance is not None:
        doc["provenance"] = provenance
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def _certificate_doc(cert: DualCertificate | None):
    if cert is None:
        return None
    return {
        "y": [float(v) for v in cert.y],
        "eta": [float(v) for v in cert.eta],
        "residuals": _residuals_doc(cert.residuals),
    }


def _residuals_doc(res: ResidualBundle):
    return {
        "primal_eq": res.primal_eq,
        "primal_cone": res.primal_cone,
        "dual_cone": res.dual_cone,
        "complementarity": res.complementarity,
        "duality_gap": res.duality_gap,
    }


def _log_rows(log):
    return [
        {
            "k": rec.k,
            "gamma": rec.gamma,
            "zeta": rec.zeta,
            "b_dist": rec.b_dist,
            "cuts_total": rec.cuts_total,
            "qp_inner_iters": rec.qp_inner_iters,
        }
        for rec in log
    ]


def report_document(report: SolveReport) -> dict:
    """Plain-data view of a report, as serialized by ``write_report``."""
    return {
        "format_version": REPORT_FORMAT,
        "status": report.status.value,
        "objective": report.objective,
        "x": [float(v) for v in report.x],
        "certificate": _certificate_doc(report.certificate),
        "residuals": _residuals_doc(report.residuals),
        "iterations": report.iterations,
        "gamma0": report.gamma0,
        "escalations": report.escalations,
        "hyperplanes": {
            "initial": report.initial_hyperplanes,
            "final": report.final_hyperplanes,
            "final_per_block": list(report.final_hyperplanes_per_block),
        },
        "wall_time_seconds": report.wall_time_seconds,
        "message": report.message,
        "log": _log_rows(report.log),
    }


def write_report(report: SolveReport, path, format: str = "structured"):
    """Write a report document or its iteration log.

    Parameters
    ----------
    report : SolveReport
    path : str or path-like
    format : {"structured", "csv-log"}
        ``structured`` writes the full JSON document; ``csv-log``
        writes only the per-iteration table with header
        ``k,gamma,zeta,b_dist,cuts_total,qp_inner_iters``.

    Everything written is reproducible byte for byte across runs with
    the same inputs, except the wall-time field of the structured form.
    """
    if format not in REPORT_STYLES:
        raise ValueError(f"format must be one of {REPORT_STYLES}, got {format!r}")
    if format == "structured":
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(report_document(report), fh, indent=1)
            fh.write("\n")
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_LOG_HEADER)
        for rec in report.log:
            writer.writerow(
                [
                    rec.k,
                    repr(rec.gamma),
                    repr(rec.zeta),
                    repr(rec.b_dist),
                    rec.cuts_total,
                    rec.qp_inner_iters,
                ]
            )
