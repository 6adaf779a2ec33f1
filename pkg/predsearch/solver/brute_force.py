import logging
from typing import Tuple

import numpy as np

from predsearch.errors import InvalidSizeError, ProblemTooLargeError
from predsearch.milp.dense import dense_form
from predsearch.milp.feasibility import make_solution
from predsearch.models.milp_model import MilpInstance
from predsearch.models.solve_model import BruteForceResult, SolveStatus

logger = logging.getLogger(__name__)

MAX_BINARIES = 24
_CHUNK = 1 << 16
_OPT_TOL = 1e-9


def enumerate_feasible(inst: MilpInstance, tol: float = 1e-6) -> Tuple[np.ndarray, np.ndarray]:
    """
    Every feasible binary vector of a pure-binary instance, in increasing order of
    sum_j x_j 2^j, together with its objective. Returns (X [k, q], objectives [k]).
    """
    form = dense_form(inst)
    q = form.q
    if form.n != q:
        raise InvalidSizeError(f"{inst.name}: enumeration needs a pure binary instance ({form.n - q} continuous variables)")
    if q > MAX_BINARIES:
        raise ProblemTooLargeError(f"{inst.name}: q={q} exceeds the enumeration limit of {MAX_BINARIES}")

    shifts = np.arange(q, dtype=np.int64)
    kept_x, kept_obj = [], []
    total = 1 << q
    for start in range(0, total, _CHUNK):
        codes = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        X = ((codes[:, None] >> shifts[None, :]) & 1).astype(np.float64)
        ok = np.all((X >= form.lower - tol) & (X <= form.upper + tol), axis=1)
        if form.m:
            act = X @ form.A.T
            le = form.senses == 0
            ge = form.senses == 2
            eq = form.senses == 1
            ok &= np.all(act[:, le] <= form.b[le] + tol, axis=1)
            ok &= np.all(act[:, ge] >= form.b[ge] - tol, axis=1)
            ok &= np.all(np.abs(act[:, eq] - form.b[eq]) <= tol, axis=1)
        if ok.any():
            kept_x.append(X[ok])
            kept_obj.append(X[ok] @ form.c)
    if not kept_x:
        return np.zeros((0, q)), np.zeros(0)
    return np.vstack(kept_x), np.concatenate(kept_obj)


def brute_force(inst: MilpInstance) -> BruteForceResult:
    X, objs = enumerate_feasible(inst)
    if len(objs) == 0:
        logger.info(f"Brute force on {inst.name}: infeasible")
        return BruteForceResult(status=SolveStatus.INFEASIBLE)
    best = float(np.min(objs))
    optimal = np.flatnonzero(objs <= best + _OPT_TOL)
    x = X[optimal[0]]
    logger.info(f"Brute force on {inst.name}: obj={best:.6g}, {len(optimal)} optimal of {len(objs)} feasible")
    return BruteForceResult(
        status=SolveStatus.OPTIMAL,
        incumbent=make_solution(inst, x),
        num_optimal=len(optimal),
        num_feasible=len(objs),
    )
