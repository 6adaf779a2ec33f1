"""
Prediction-error simulation: flip k pinned components of a known optimum, fix them
and see how often the fixed problem stays feasible and how far its optimum drifts.

Each trial draws one random order of the pinned positions and flips its first k
entries, so the flipped sets for different k are nested within a trial.
"""
import logging
from typing import List, Optional, Sequence

import numpy as np

from predsearch.errors import InvalidSizeError, PredSearchError
from predsearch.models.eval_model import PerturbSpec, PerturbSummary
from predsearch.models.milp_model import MilpInstance
from predsearch.models.search_model import PartialSolution
from predsearch.models.solve_model import SolveParams, SolveStatus
from predsearch.search.partial import select_partial
from predsearch.search.trust_region import build_fixing
from predsearch.solver.branch_bound import solve_milp

logger = logging.getLogger(__name__)


def pinned_indices(x_opt: np.ndarray, q: int, restrict=None) -> np.ndarray:
    if restrict is None:
        return np.arange(q)
    ps = select_partial(x_opt[:q], *restrict)
    return np.asarray(sorted(ps.i0 + ps.i1), dtype=np.int64)


def perturb_experiment(
    inst: MilpInstance,
    spec: Optional[PerturbSpec] = None,
    params: Optional[SolveParams] = None,
    x_opt: Optional[Sequence[float]] = None,
) -> List[PerturbSummary]:
    spec = spec or PerturbSpec()
    params = params or SolveParams(time_limit=None)
    q = inst.num_binary
    if x_opt is None:
        ref = solve_milp(inst, params)
        if ref.status != SolveStatus.OPTIMAL:
            raise PredSearchError(f"{inst.name}: reference solve ended {ref.status.value}; an optimum is required")
        x_opt = ref.incumbent.values
        opt_obj = ref.incumbent.objective
    else:
        opt_obj = float(np.dot(inst.objective, x_opt))
    x_opt = np.asarray(x_opt, dtype=np.float64)
    pinned = pinned_indices(x_opt, q, spec.restrict)
    base = np.rint(x_opt[pinned]).astype(np.int64)

    most = max(spec.flips, default=0)
    if most > len(pinned):
        raise InvalidSizeError(f"cannot flip {most} of {len(pinned)} pinned binaries")
    rng = np.random.default_rng(np.random.SeedSequence(spec.seed & 0xFFFFFFFFFFFFFFFF))
    orders = [rng.permutation(len(pinned)) for _ in range(spec.trials)]

    summaries = []
    for k in spec.flips:
        gap_list, infeasible = [], 0
        for order in orders:
            values = base.copy()
            flip = order[:k]
            values[flip] = 1 - values[flip]
            ps = PartialSolution(
                i0=[int(d) for d, v in zip(pinned, values) if v == 0],
                i1=[int(d) for d, v in zip(pinned, values) if v == 1],
            )
            res = solve_milp(build_fixing(inst, ps), params)
            if res.has_solution:
                gap_list.append(abs(res.objective - opt_obj))
            else:
                infeasible += 1
        gap_arr = np.asarray(gap_list)
        summary = PerturbSummary(
            flips=k,
            trials=spec.trials,
            infeasible_pct=100.0 * infeasible / spec.trials,
            gap_min=float(gap_arr.min()) if len(gap_arr) else None,
            gap_avg=float(gap_arr.mean()) if len(gap_arr) else None,
            gap_max=float(gap_arr.max()) if len(gap_arr) else None,
        )
        logger.info(f"{inst.name}: k={k} infeasible {summary.infeasible_pct:.1f}%, "
                    f"avg gap {summary.gap_avg if summary.gap_avg is not None else 'n/a'}")
        summaries.append(summary)
    return summaries
