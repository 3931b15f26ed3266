# reports.py
# -------------------------------
# Serialization of analysis results (BoundReport, RiskSummary,
# EstimateWithCI) to JSON or CSV, and the matching parser.
#
# Format rules:
#   - reals carry 12 significant digits; non-finite reals are written as the
#     strings "inf", "-inf", "nan"
#   - JSON: one object {"schema_version", "generated_at", "reports": [...]}
#   - CSV: RFC-4180 quoting, one fixed superset header, blanks where a
#     field does not apply; `inputs` is a JSON object inside one cell
#   - generated_at is the only run-dependent field and is omitted (JSON) or
#     left blank (CSV) when timestamps are disabled
# -------------------------------

from __future__ import annotations

import csv
import io
import json
import logging
import math
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import click

from config import Config
from errors import ArgumentError
from models import BoundReport, EstimateWithCI, RiskSummary

logger = logging.getLogger(__name__)

Result = Union[BoundReport, RiskSummary, EstimateWithCI]
Item = Union[Result, Tuple[Optional[str], Result]]

RISK_FIELDS = ("expected_empirical", "expected_population", "gen_error",
               "abs_gen_error", "excess_risk")
CSV_HEADER = (
    "kind", "label", "name", "anchor", "inputs",
    "bound_value", "measured_value", "satisfied", "slack",
    *RISK_FIELDS,
    "mean", "std_error", "trials", "ci95_lo", "ci95_hi",
    "schema_version", "generated_at",
)


# ---------- Number formatting ----------

def fmt_real(value: Optional[float]) -> Any:
    if value is None:
        return None
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return float(f"{value:.{Config.SIGNIFICANT_DIGITS}g}")


def read_real(value: Any) -> Optional[float]:
    if value is None or value == "":
        return None
    return float(value)


def _fmt_input(value: Any) -> Any:
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, int):
        return value
    if isinstance(value, (list, tuple)):
        return [_fmt_input(v) for v in value]
    return fmt_real(value)


# ---------- Records ----------

def _unpack(item: Item) -> Tuple[Optional[str], Result]:
    if isinstance(item, tuple) and len(item) == 2:
        return item[0], item[1]
    return None, item


def to_record(item: Item) -> Dict[str, Any]:
    label, result = _unpack(item)
    if isinstance(result, BoundReport):
        return {
            "kind": "bound",
            "label": label,
            "name": result.name,
            "anchor": result.anchor,
            "inputs": {k: _fmt_input(v) for k, v in result.inputs.items()},
            "bound_value": fmt_real(result.bound_value),
            "measured_value": fmt_real(result.measured_value),
            "satisfied": result.satisfied,
            "slack": fmt_real(result.slack),
        }
    if isinstance(result, RiskSummary):
        record: Dict[str, Any] = {"kind": "risk", "label": label}
        record.update({name: fmt_real(getattr(result, name)) for name in RISK_FIELDS})
        return record
    if isinstance(result, EstimateWithCI):
        return {
            "kind": "estimate",
            "label": label,
            "mean": fmt_real(result.mean),
            "std_error": fmt_real(result.std_error),
            "trials": result.trials,
            "ci95_lo": fmt_real(result.ci95[0]),
            "ci95_hi": fmt_real(result.ci95[1]),
        }
    raise ArgumentError(f"Cannot serialize {type(result).__name__}.")


def from_record(record: Dict[str, Any]) -> Tuple[Optional[str], Result]:
    kind = record.get("kind")
    label = record.get("label") or None
    if kind == "bound":
        satisfied = record.get("satisfied")
        if isinstance(satisfied, str):
            satisfied = {"true": True, "false": False}.get(satisfied.lower())
        inputs = record.get("inputs") or {}
        if isinstance(inputs, str):
            inputs = json.loads(inputs) if inputs else {}
        return label, BoundReport(
            name=record["name"],
            anchor=record["anchor"],
            inputs={k: (read_real(v) if v in ("inf", "-inf", "nan") else v)
                    for k, v in inputs.items()},
            bound_value=read_real(record["bound_value"]),
            measured_value=read_real(record.get("measured_value")),
            satisfied=satisfied,
            slack=read_real(record.get("slack")),
        )
    if kind == "risk":
        return label, RiskSummary(**{name: read_real(record[name]) for name in RISK_FIELDS})
    if kind == "estimate":
        return label, EstimateWithCI(
            mean=read_real(record["mean"]),
            std_error=read_real(record["std_error"]),
            trials=int(record["trials"]),
            ci95=(read_real(record["ci95_lo"]), read_real(record["ci95_hi"])),
        )
    raise ArgumentError(f"Unknown report kind {kind!r}.")


# ---------- Emit / parse ----------

def _timestamp() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def emit_report(reports: Sequence[Item], fmt: str = "json", timestamp: bool = True) -> str:
    if not reports:
        raise ArgumentError("Nothing to report.")
    records = [to_record(item) for item in reports]
    generated_at = _timestamp() if timestamp else None

    if fmt == "json":
        document: Dict[str, Any] = {"schema_version": Config.SCHEMA_VERSION}
        if generated_at:
            document["generated_at"] = generated_at
        document["reports"] = records
        return json.dumps(document, indent=2, ensure_ascii=False) + "\n"

    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\r\n")
        writer.writerow(CSV_HEADER)
        for record in records:
            row = []
            for column in CSV_HEADER:
                if column == "schema_version":
                    value: Any = Config.SCHEMA_VERSION
                elif column == "generated_at":
                    value = generated_at
                else:
                    value = record.get(column)
                if column == "inputs" and value is not None:
                    value = json.dumps(value, sort_keys=False)
                elif isinstance(value, bool):
                    value = "true" if value else "false"
                row.append("" if value is None else value)
            writer.writerow(row)
        return buffer.getvalue()

    raise ArgumentError(f"Unknown report format {fmt!r}.")


def parse_report(text: str, fmt: str = "json") -> List[Tuple[Optional[str], Result]]:
    if fmt == "json":
        document = json.loads(text)
        if document.get("schema_version") != Config.SCHEMA_VERSION:
            raise ArgumentError(f"Unsupported schema_version {document.get('schema_version')!r}.")
        return [from_record(record) for record in document["reports"]]
    if fmt == "csv":
        reader = csv.DictReader(io.StringIO(text, newline=""))
        if tuple(reader.fieldnames or ()) != CSV_HEADER:
            raise ArgumentError("CSV header does not match the report layout.")
        return [from_record(row) for row in reader]
    raise ArgumentError(f"Unknown report format {fmt!r}.")


def write_report(text: str, path: Union[str, Path, None]) -> None:
    """Write to `path` (UTF-8); `None` or "-" means stdout."""
    if path is None or str(path) == "-":
        click.echo(text, nl=False)
        return
    target = Path(path)
    # newline="" keeps the CSV \r\n terminators intact
    with target.open("w", encoding="utf-8", newline="") as handle:
        handle.write(text)
    logger.info("wrote report to %s", target)


def all_satisfied(reports: Iterable[Item]) -> bool:
    return all(_unpack(item)[1].satisfied is not False
               for item in reports if isinstance(_unpack(item)[1], BoundReport))
