import logging
import math
import time
from typing import Optional, Sequence

import numpy as np

from predsearch.errors import DimensionMismatchError
from predsearch.learning.features import featurize
from predsearch.learning.gnn import GnnModel
from predsearch.milp.feasibility import make_solution
from predsearch.milp.transform import drop_inserted
from predsearch.models.eval_model import Family
from predsearch.models.milp_model import MilpInstance
from predsearch.models.search_model import (
    PartialSolution,
    SearchConfig,
    SearchMode,
    SearchResult,
)
from predsearch.models.solve_model import PoolEntry, SolutionPool, SolveResult
from predsearch.search.partial import select_partial
from predsearch.search.trust_region import build_fixing, build_trust_region
from predsearch.solver.branch_bound import solve_milp

logger = logging.getLogger(__name__)

# (k0, k1, delta) used at full scale, per benchmark family and run variant
FULL_SCALE_SETTINGS = {
    "IP": {"search_scip": (400, 5, 1), "search_gurobi": (400, 5, 10), "fixing": (400, 5, 0)},
    "WA": {"search_scip": (0, 500, 5), "search_gurobi": (0, 500, 10), "fixing": (0, 500, 0)},
    "IS": {"search_scip": (300, 300, 15), "search_gurobi": (300, 300, 20), "fixing": (300, 300, 0)},
    "CA": {"search_scip": (400, 0, 10), "search_gurobi": (600, 0, 1), "fixing": (600, 0, 0)},
}
FULL_SCALE_BINARIES = {"IS": 1500, "CA": 1500}


def default_search_config(family: Family, q: int, **overrides) -> SearchConfig:
    """Full-scale IS/CA settings scaled by q / 1500 (radius rounded up, at least 1)."""
    if family == Family.INDEPENDENT_SET:
        k0 = k1 = int(round(0.2 * q))
        delta = max(1, math.ceil(15 * q / FULL_SCALE_BINARIES["IS"]))
    else:
        k0, k1 = int(round(0.27 * q)), 0
        delta = max(1, math.ceil(10 * q / FULL_SCALE_BINARIES["CA"]))
    delta = min(delta, k0 + k1)
    return SearchConfig(**{"k0": k0, "k1": k1, "delta": delta, **overrides})


def restricted_instance(inst: MilpInstance, ps: PartialSolution, cfg: SearchConfig) -> MilpInstance:
    if cfg.mode == SearchMode.FIX:
        return build_fixing(inst, ps)
    return build_trust_region(inst, ps, cfg.delta, cfg.formulation)


def _project(inst: MilpInstance, sub: SolveResult, added: int) -> SolveResult:
    """Map a restricted-problem result back onto the original variables."""
    if added == 0:
        return sub
    q = inst.num_binary
    incumbent = None
    if sub.incumbent is not None:
        incumbent = make_solution(inst, drop_inserted(sub.incumbent.values, q, added))
    pool = SolutionPool(entries=[
        PoolEntry(x=drop_inserted(e.x, q, added), objective=e.objective) for e in sub.pool.entries
    ])
    return sub.model_copy(update={"incumbent": incumbent, "pool": pool})


def predict_and_search(
    inst: MilpInstance,
    model: Optional[GnnModel],
    cfg: SearchConfig,
    probs: Optional[Sequence[float]] = None,
) -> SearchResult:
    """
    Predict marginals (or take them from `probs`), pin the most confident binaries
    and solve the restricted problem once.
    """
    start = time.perf_counter()
    if probs is None:
        if model is None:
            raise ValueError("either a model or explicit probabilities is required")
        probs = model.forward(featurize(inst))
    probs = np.asarray(probs, dtype=np.float64)
    if probs.shape != (inst.num_binary,):
        raise DimensionMismatchError(f"expected {inst.num_binary} probabilities, got {probs.shape[0]}")
    ps = select_partial(probs, cfg.k0, cfg.k1)
    predict_seconds = time.perf_counter() - start

    sub = restricted_instance(inst, ps, cfg)
    sub_result = solve_milp(sub, cfg.effective_solve_params())
    result = _project(inst, sub_result, sub.num_vars - inst.num_vars)
    if not result.has_solution:
        logger.warning(f"{inst.name}: restricted problem ({cfg.mode.value}, k0={cfg.k0}, k1={cfg.k1}, "
                       f"delta={cfg.effective_delta}) ended {result.status.value} without a solution")
    objective = inst.to_original_sense(result.objective) if result.has_solution else None
    return SearchResult(
        instance_name=inst.name,
        config=cfg,
        partial=ps,
        result=result,
        objective=objective,
        predict_seconds=predict_seconds,
    )
