"""
Energy-weighted training targets: pool solutions get softmax(-objective / temperature)
weights and each binary's label is the total weight of the solutions that set it to 1.
"""
import hashlib
import logging
from typing import Optional, Sequence

import numpy as np

from predsearch.errors import DimensionMismatchError, EmptyPoolError
from predsearch.models.label_model import LabeledSample
from predsearch.models.milp_model import MilpInstance
from predsearch.models.solve_model import SolutionPool, SolveParams
from predsearch.solver.branch_bound import solve_milp
from predsearch.solver.brute_force import enumerate_feasible

logger = logging.getLogger(__name__)


def softmax_weights(objectives: Sequence[float], temperature: float = 1.0) -> np.ndarray:
    if len(objectives) == 0:
        raise EmptyPoolError("cannot weight an empty solution pool")
    energy = -np.asarray(objectives, dtype=np.float64) / temperature
    energy -= np.max(energy)
    w = np.exp(energy)
    return w / np.sum(w)


def solution_weights(pool: SolutionPool, temperature: float = 1.0) -> np.ndarray:
    return softmax_weights(pool.objectives, temperature)


def weighted_marginals(X: np.ndarray, weights: np.ndarray) -> np.ndarray:
    if X.shape[0] != weights.shape[0]:
        raise DimensionMismatchError(f"{X.shape[0]} solutions but {weights.shape[0]} weights")
    p = weights @ (X > 0.5)
    return np.clip(p, 0.0, 1.0)


def marginals(pool: SolutionPool, weights: Sequence[float], q: Optional[int] = None) -> np.ndarray:
    """p_d = sum of the weights of pool entries with x_d = 1, over the first q variables."""
    weights = np.asarray(weights, dtype=np.float64)
    if len(pool) == 0:
        raise EmptyPoolError("cannot label from an empty solution pool")
    width = len(pool.entries[0].x) if q is None else q
    X = np.asarray([e.x[:width] for e in pool.entries], dtype=np.float64)
    return weighted_marginals(X, weights)


def exact_marginals(inst: MilpInstance, temperature: float = 1.0) -> np.ndarray:
    """Marginals of the full feasible-set distribution of a tiny pure-binary instance."""
    X, objs = enumerate_feasible(inst)
    return weighted_marginals(X, softmax_weights(objs, temperature))


def pool_digest(pool: SolutionPool, q: int) -> str:
    h = hashlib.sha256()
    for e in pool.entries:
        h.update(np.asarray(np.rint(e.x[:q]), dtype=np.int8).tobytes())
        h.update(repr(e.objective).encode())
    return h.hexdigest()


def make_labeled_sample(inst: MilpInstance, pool: SolutionPool, temperature: float = 1.0) -> LabeledSample:
    q = inst.num_binary
    w = solution_weights(pool, temperature)
    p = marginals(pool, w, q)
    return LabeledSample(
        instance_name=inst.name,
        objectives=pool.objectives,
        weights=w.tolist(),
        marginals=p.tolist(),
        bks_objective=min(pool.objectives),
        pool_digest=pool_digest(pool, q),
        temperature=temperature,
    )


def collect_sample(inst: MilpInstance, params: SolveParams, temperature: float = 1.0) -> LabeledSample:
    """Solve with a solution pool and turn the pool into a labeled sample."""
    result = solve_milp(inst, params)
    if len(result.pool) == 0:
        raise EmptyPoolError(f"{inst.name}: solve ended with status {result.status.value} and no solutions")
    sample = make_labeled_sample(inst, result.pool, temperature)
    logger.info(f"Collected {len(result.pool)} solutions for {inst.name} (best {sample.bks_objective:.6g})")
    return sample
