"""
Instance x method evaluation: BKS pass, parallel method runs, BKS update, gaps,
aggregates and anytime curves.
"""
import concurrent.futures
import json
import logging
import os
from typing import Dict, List, Optional, Sequence, Tuple

from predsearch.errors import MissingInputError
from predsearch.harness.bks import compute_bks, regap, update_bks
from predsearch.harness.metrics import gain, gaps
from predsearch.learning.gnn import GnnModel
from predsearch.milp.mps import read_mps_file
from predsearch.models.eval_model import (
    AggregateRow,
    CurvePoint,
    EvalRecord,
    EvalReport,
    EvalSpec,
    Family,
    MethodKind,
    MethodSpec,
)
from predsearch.models.label_model import LabeledSample
from predsearch.models.milp_model import MilpInstance
from predsearch.models.search_model import SearchConfig
from predsearch.models.solve_model import SolveParams, SolveResult
from predsearch.search.predict_search import default_search_config, predict_and_search
from predsearch.solver.branch_bound import solve_milp

logger = logging.getLogger(__name__)


def load_instances(paths: Sequence[str]) -> List[MilpInstance]:
    missing = [p for p in paths if not os.path.exists(p)]
    if missing:
        raise MissingInputError(f"instance files not found: {missing}")
    return [read_mps_file(p) for p in paths]


def load_labels(label_dir: str, name: str) -> LabeledSample:
    path = os.path.join(label_dir, f"{name}.json")
    if not os.path.exists(path):
        raise MissingInputError(f"label file not found: {path}")
    with open(path, encoding="utf-8") as f:
        return LabeledSample.model_validate(json.load(f))


def method_search_config(method: MethodSpec, inst: MilpInstance, spec: EvalSpec) -> SearchConfig:
    if method.search is not None:
        cfg = method.search
    else:
        family = Family(inst.meta.get("family", Family.INDEPENDENT_SET.value))
        cfg = default_search_config(family, inst.num_binary)
    solve_params = cfg.solve_params.model_copy(update={"node_limit": spec.node_limit, "seed": spec.seed})
    return cfg.model_copy(update={"time_limit": spec.time_limit, "solve_params": solve_params})


def _curve(inst: MilpInstance, result: SolveResult, time_axis: str, offset: float) -> List[Tuple[float, float]]:
    if time_axis == "lp_iterations":
        return [(float(e.lp_iterations), inst.to_original_sense(e.objective)) for e in result.incumbent_trace]
    return [(e.seconds + offset, inst.to_original_sense(e.objective)) for e in result.incumbent_trace]


def run_method(inst: MilpInstance, method: MethodSpec, spec: EvalSpec,
               model: Optional[GnnModel] = None) -> EvalRecord:
    if method.kind == MethodKind.SOLVE:
        params = SolveParams(time_limit=spec.time_limit, node_limit=spec.node_limit, seed=spec.seed)
        result = solve_milp(inst, params)
        offset = 0.0
    else:
        cfg = method_search_config(method, inst, spec)
        probs = load_labels(method.label_dir, inst.name).marginals if method.label_dir else None
        searched = predict_and_search(inst, model, cfg, probs=probs)
        result = searched.result
        offset = searched.predict_seconds
    obj = inst.to_original_sense(result.objective) if result.has_solution else None
    return EvalRecord(
        instance=inst.name,
        method=method.tag,
        obj=obj,
        wall_time=result.stats.wall_time + offset,
        status=result.status.value,
        curve=_curve(inst, result, spec.time_axis, offset),
    )


def aggregate(records: Sequence[EvalRecord], baseline_tag: Optional[str] = None) -> List[AggregateRow]:
    """Per-method means over the instances each method solved, plus gain against the baseline."""
    methods: List[str] = []
    for rec in records:
        if rec.method not in methods:
            methods.append(rec.method)
    rows = []
    for method in methods:
        recs = [r for r in records if r.method == method]
        solved = [r for r in recs if r.obj is not None and r.gap_abs is not None]
        n = len(solved)
        rows.append(AggregateRow(
            method=method,
            instances=len(recs),
            solved=n,
            avg_obj=sum(r.obj for r in solved) / n if n else None,
            avg_gap_abs=sum(r.gap_abs for r in solved) / n if n else None,
            avg_gap_rel=sum(r.gap_rel for r in solved) / n if n else None,
        ))
    base = next((r for r in rows if r.method == baseline_tag), None)
    if base is not None and base.avg_gap_abs is not None:
        rows = [r.model_copy(update={"gain_pct": gain(base.avg_gap_abs, r.avg_gap_abs)})
                if r.avg_gap_abs is not None else r for r in rows]
    return rows


def curves(records: Sequence[EvalRecord], bks: Dict[str, float]) -> List[CurvePoint]:
    """
    Mean relative gap per method at every incumbent event time. An instance counts
    as gap 1 before its first incumbent; gaps are capped at 1.
    """
    points: List[CurvePoint] = []
    methods: List[str] = []
    for rec in records:
        if rec.method not in methods:
            methods.append(rec.method)
    for method in methods:
        recs = [r for r in records if r.method == method and r.instance in bks]
        if not recs:
            continue
        times = sorted({0.0} | {t for r in recs for t, _ in r.curve})
        for t in times:
            total = 0.0
            for r in recs:
                seen = [obj for te, obj in r.curve if te <= t]
                total += min(1.0, gaps(seen[-1], bks[r.instance])[1]) if seen else 1.0
            points.append(CurvePoint(method=method, t=t, mean_gap_rel=total / len(recs)))
    return points


def evaluate(spec: EvalSpec, instances: Optional[List[MilpInstance]] = None) -> EvalReport:
    instances = instances if instances is not None else load_instances(spec.instances)
    models: Dict[str, GnnModel] = {}
    for method in spec.methods:
        if method.kind == MethodKind.SEARCH and method.label_dir is None:
            if not method.model_path or not os.path.exists(method.model_path):
                raise MissingInputError(f"method {method.tag}: model file {method.model_path!r} not found")
            models[method.tag] = GnnModel.load(method.model_path)

    bks_params = SolveParams(time_limit=spec.bks_time_limit, node_limit=spec.bks_node_limit, seed=spec.seed)
    bks = compute_bks(instances, bks_params, spec.workers)

    tasks = [(inst, method) for inst in instances for method in spec.methods]
    records: List[Optional[EvalRecord]] = [None] * len(tasks)
    logger.info(f"Evaluating {len(instances)} instances x {len(spec.methods)} methods on {spec.workers} workers")
    with concurrent.futures.ThreadPoolExecutor(max_workers=spec.workers) as executor:
        futures = {
            executor.submit(run_method, inst, method, spec, models.get(method.tag)): idx
            for idx, (inst, method) in enumerate(tasks)
        }
        for future in concurrent.futures.as_completed(futures):
            idx = futures[future]
            inst, method = tasks[idx]
            try:
                records[idx] = future.result()
            except Exception as e:
                logger.error(f"❌ Worker Error on {inst.name}/{method.tag}: {e}")
                records[idx] = EvalRecord(instance=inst.name, method=method.tag, status="error")

    senses = {inst.name: inst.sense_flag for inst in instances}
    bks = update_bks(bks, records, senses)
    final = regap(records, bks)
    return EvalReport(
        records=final,
        aggregate=aggregate(final, spec.baseline_tag),
        curves=curves(final, bks),
        bks=bks,
        time_axis=spec.time_axis,
    )
