"""Analysis report documents and their JSON / CSV renderings."""
from __future__ import annotations

import csv
import io
import json

from .exceptions import MalformedAnalysis
from .stability import COMPONENTS

REPORT_FORMAT = "repo-stability/analysis"
REPORT_VERSION = 1

CSV_COLUMNS = (
    "repo", "c", "cv_daily", "cv_weekly", "i_ratio", "i_time", "p_ratio", "p_time",
    "a", "active_ratio", "phi_c", "phi_i", "phi_p", "phi_a", "csi",
    "verdict_commit", "verdict_issue", "verdict_pull", "verdict_activity", "status",
)
_METRIC_COLUMNS = {
    "c": "c", "cv_daily": "cv_daily", "cv_weekly": "cv_weekly",
    "i_ratio": "i_ratio", "i_time": "i_time", "p_ratio": "p_ratio", "p_time": "p_time",
    "a": "a", "active_ratio": "active_user_ratio",
}


def error_record(repo: str, source: str, exc: BaseException) -> dict:
    return {"repo": repo, "source": source, "status": "error",
            "error": {"type": type(exc).__name__, "message": str(exc)}}


def build_report(config: dict, records: list) -> dict:
    return {"format": REPORT_FORMAT, "version": REPORT_VERSION, "config": config, "records": records}


def dumps_json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def check_report(doc) -> list:
    if not isinstance(doc, dict) or not isinstance(doc.get("records"), list):
        raise MalformedAnalysis("analysis document must be an object with a 'records' list")
    for n, record in enumerate(doc["records"]):
        if not isinstance(record, dict) or "repo" not in record or "status" not in record:
            raise MalformedAnalysis(f"records[{n}]: needs 'repo' and 'status'")
        if record["status"] == "ok":
            for key in ("metrics", "verdicts", "csi"):
                if not isinstance(record.get(key), (dict, list)):
                    raise MalformedAnalysis(f"records[{n}]: missing {key!r}")
    return doc["records"]


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def csv_row(record: dict) -> dict:
    row = {col: "" for col in CSV_COLUMNS}
    row["repo"] = record["repo"]
    row["status"] = record["status"]
    if record["status"] != "ok":
        return row
    metrics, csi = record["metrics"], record["csi"]
    try:
        for col, key in _METRIC_COLUMNS.items():
            row[col] = _fmt(metrics.get(key))
        for k in ("phi_c", "phi_i", "phi_p", "phi_a", "csi"):
            row[k] = _fmt(csi[k])
        status = {v["component"]: v["status"] for v in record["verdicts"]}
        for component in COMPONENTS:
            row[f"verdict_{component}"] = status[component]
    except (KeyError, TypeError) as exc:
        raise MalformedAnalysis(f"record {record['repo']!r}: {exc}") from None
    return row


def render(doc: dict, fmt: str = "json") -> str:
    records = check_report(doc)
    if fmt == "json":
        return dumps_json(doc)
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for record in records:
        writer.writerow(csv_row(record))
    return buf.getvalue()
