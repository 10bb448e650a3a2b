# services/lab/reports.py
from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict
from pathlib import Path
from typing import Any

from services.lab.experiments import Report

CSV_FIELDS = ["scheme", "T", "b", "replicate", "statistic", "value"]


def report_csv(report: Report) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for row in report.rows:
        rec = asdict(row)
        rec["b"] = repr(float(rec["b"]))
        rec["value"] = repr(float(rec["value"]))
        w.writerow(rec)
    return buf.getvalue()


def report_json(report: Report) -> str:
    return json.dumps(report.summary, indent=2, sort_keys=True) + "\n"


def write_report(
    report: Report, csv_path: str | Path | None, json_path: str | Path | None
) -> dict[str, Any]:
    written: dict[str, Any] = {}
    for path, render in ((csv_path, report_csv), (json_path, report_json)):
        if path is None:
            continue
        p = Path(path)
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(render(report), encoding="utf-8")
        written["csv" if render is report_csv else "json"] = str(p)
    return written
