import concurrent.futures
import logging
from typing import Dict, List, Sequence

from predsearch.harness.metrics import gaps, is_better
from predsearch.models.eval_model import EvalRecord
from predsearch.models.milp_model import MilpInstance, ObjSense
from predsearch.models.solve_model import SolveParams
from predsearch.solver.branch_bound import solve_milp

logger = logging.getLogger(__name__)


def compute_bks(instances: Sequence[MilpInstance], params: SolveParams, workers: int = 1) -> Dict[str, float]:
    """
    Long reference solve per instance; values are in each instance's original sense.
    Instances without a feasible solution inside the budget are left out.
    """
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as executor:
        results = list(executor.map(lambda inst: solve_milp(inst, params), instances))
    bks: Dict[str, float] = {}
    for inst, res in zip(instances, results):
        if not res.has_solution:
            logger.warning(f"⚠️ No feasible solution for {inst.name} within the BKS budget "
                           f"({res.status.value}); excluding it")
            continue
        bks[inst.name] = inst.to_original_sense(res.objective)
    logger.info(f"BKS computed for {len(bks)}/{len(instances)} instances")
    return bks


def update_bks(bks: Dict[str, float], records: List[EvalRecord], senses: Dict[str, ObjSense]) -> Dict[str, float]:
    """Replace a BKS by any better OBJ seen in the evaluation pass."""
    updated = dict(bks)
    for rec in records:
        if rec.obj is None or rec.instance not in updated:
            continue
        if is_better(rec.obj, updated[rec.instance], senses[rec.instance]):
            logger.info(f"BKS of {rec.instance} improved by {rec.method}: {updated[rec.instance]} -> {rec.obj}")
            updated[rec.instance] = rec.obj
    return updated


def regap(records: List[EvalRecord], bks: Dict[str, float]) -> List[EvalRecord]:
    out = []
    for rec in records:
        b = bks.get(rec.instance)
        if rec.obj is None or b is None:
            out.append(rec.model_copy(update={"bks": b, "gap_abs": None, "gap_rel": None}))
            continue
        gap_abs, gap_rel = gaps(rec.obj, b)
        out.append(rec.model_copy(update={"bks": b, "gap_abs": gap_abs, "gap_rel": gap_rel}))
    return out
