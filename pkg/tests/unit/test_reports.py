# tests/unit/test_reports.py
from __future__ import annotations

import csv
import json

from services.lab import Report, ReportRow
from services.lab.reports import CSV_FIELDS, report_csv, report_json, write_report


def _report() -> Report:
    r = Report("consistency")
    r.rows.append(ReportRow("corner", 32, 0.125, 0, "sup_distance", 0.1))
    r.rows.append(ReportRow("corner", 32, 0.125, 1, "sup_distance", 1 / 3))
    r.summary = {"experiment": "consistency", "strictly_decreasing": True}
    return r


def test_csv_columns_and_exact_floats():
    lines = report_csv(_report()).splitlines()
    assert lines[0] == ",".join(CSV_FIELDS)
    rows = list(csv.DictReader(lines))
    assert float(rows[1]["value"]) == 1 / 3
    assert rows[0]["T"] == "32"


def test_write_report(tmp_path):
    written = write_report(_report(), tmp_path / "out" / "r.csv", tmp_path / "out" / "r.json")
    assert set(written) == {"csv", "json"}
    assert json.loads((tmp_path / "out" / "r.json").read_text())["strictly_decreasing"] is True
    assert write_report(_report(), None, None) == {}
    assert report_json(_report()) == report_json(_report())
