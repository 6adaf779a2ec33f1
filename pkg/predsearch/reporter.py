import csv
import json
import logging
import os
from typing import Any, Iterable, List, Optional, Sequence

from pydantic import BaseModel

from predsearch.models.eval_model import AggregateRow, CurvePoint, EvalRecord, PerturbSummary, ReliabilityRow
from predsearch.models.train_model import TrainHistory

logger = logging.getLogger(__name__)

RECORD_COLUMNS = ["instance", "method", "obj", "bks", "gap_abs", "gap_rel", "wall_time", "status"]
AGGREGATE_COLUMNS = ["method", "instances", "solved", "avg_obj", "avg_gap_abs", "avg_gap_rel", "gain_pct"]


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse_float(text: str) -> Optional[float]:
    return None if text == "" else float(text)


def _ensure_dir(path: str):
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)


def write_rows(path: str, columns: Sequence[str], rows: Iterable[Sequence[Any]]):
    _ensure_dir(path)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
    logger.info(f"📝 Wrote {path}")


def write_records_csv(records: Sequence[EvalRecord], path: str, time_axis: str = "wall"):
    """Wall-clock times are left out on the lp_iterations axis so reruns stay byte-identical."""
    columns = [c for c in RECORD_COLUMNS if time_axis == "wall" or c != "wall_time"]
    write_rows(path, columns, ([getattr(r, c) for c in columns] for r in records))


def read_records_csv(path: str) -> List[EvalRecord]:
    out = []
    with open(path, newline="", encoding="utf-8") as f:
        for row in csv.DictReader(f):
            out.append(EvalRecord(
                instance=row["instance"],
                method=row["method"],
                obj=_parse_float(row["obj"]),
                bks=_parse_float(row["bks"]),
                gap_abs=_parse_float(row["gap_abs"]),
                gap_rel=_parse_float(row["gap_rel"]),
                wall_time=_parse_float(row.get("wall_time", "")) or 0.0,
                status=row["status"],
            ))
    return out


def write_aggregate_csv(rows: Sequence[AggregateRow], path: str):
    write_rows(path, AGGREGATE_COLUMNS, ([getattr(r, c) for c in AGGREGATE_COLUMNS] for r in rows))


def write_curves_csv(points: Sequence[CurvePoint], path: str, time_axis: str = "wall"):
    t_col = "seconds" if time_axis == "wall" else "lp_iterations"
    write_rows(path, ["method", t_col, "mean_gap_rel"], ((p.method, p.t, p.mean_gap_rel) for p in points))


def write_history_csv(history: TrainHistory, path: str):
    write_rows(path, ["epoch", "train_loss", "valid_loss"],
               ((e.epoch, e.train_loss, e.valid_loss) for e in history.epochs))


def write_perturb_csv(instance: str, summaries: Sequence[PerturbSummary], path: str):
    columns = ["flips", "trials", "infeasible_pct", "gap_min", "gap_avg", "gap_max"]
    write_rows(path, ["instance"] + columns,
               ([instance] + [getattr(s, c) for c in columns] for s in summaries))


def write_reliability_csv(instance: str, rows: Sequence[ReliabilityRow], path: str):
    write_rows(path, ["instance", "k0", "k1", "distance", "wrong"],
               ((instance, r.k0, r.k1, r.distance, r.wrong) for r in rows))


def write_json(obj: Any, path: str):
    _ensure_dir(path)
    data = obj.model_dump(mode="json") if isinstance(obj, BaseModel) else obj
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=2, sort_keys=True)
        f.write("\n")
    logger.info(f"📝 Wrote {path}")
