"""
Best-bound branch-and-bound over the binary variables, with a depth-first dive after
every branched node and a bounded pool of the integral solutions seen along the way.
"""
import heapq
import itertools
import logging
import math
import time
from typing import List, Optional, Sequence

import numpy as np

from predsearch.errors import LpNumericsError
from predsearch.milp.dense import DenseForm, dense_form, objective_value
from predsearch.milp.feasibility import check_feasible, make_solution
from predsearch.models.milp_model import MilpInstance
from predsearch.models.solve_model import (
    IncumbentEvent,
    SolveParams,
    SolveResult,
    SolveStats,
    SolveStatus,
)
from predsearch.solver.pool import PoolCollector
from predsearch.solver.simplex import LpResult, LpStatus, solve_lp

logger = logging.getLogger(__name__)

_IMPROVE_EPS = 1e-9


class _BudgetExhausted(Exception):
    pass


class BranchAndBound:
    def __init__(self, inst: MilpInstance, params: SolveParams,
                 lower: Optional[Sequence[float]] = None, upper: Optional[Sequence[float]] = None):
        self.inst = inst
        self.params = params
        self.form: DenseForm = dense_form(inst)
        self.lower = np.array(self.form.lower if lower is None else lower, dtype=np.float64)
        self.upper = np.array(self.form.upper if upper is None else upper, dtype=np.float64)
        self.q = self.form.q
        self.pool = PoolCollector(params.pool_size, self.q)
        self.stats = SolveStats()
        self.trace: List[IncumbentEvent] = []
        self.best_x: Optional[np.ndarray] = None
        self.best_obj = math.inf
        self._counter = itertools.count()
        self._start = 0.0
        # bound of the node being expanded when a budget runs out mid-node
        self._open_bound: Optional[float] = None

    # -- budget ------------------------------------------------------------

    def _elapsed(self) -> float:
        return time.perf_counter() - self._start

    def _out_of_time(self) -> bool:
        limit = self.params.time_limit
        return limit is not None and self._elapsed() >= limit

    def _out_of_nodes(self) -> bool:
        limit = self.params.node_limit
        return limit is not None and self.stats.nodes >= limit

    # -- LP ----------------------------------------------------------------

    def _lp(self, lo: np.ndarray, up: np.ndarray) -> LpResult:
        if self._out_of_time():
            raise _BudgetExhausted()
        res = solve_lp(self.form, lo, up)
        self.stats.lp_solves += 1
        self.stats.lp_iterations += res.iterations
        return res

    def _most_fractional(self, x: np.ndarray) -> Optional[int]:
        if self.q == 0:
            return None
        xb = x[: self.q]
        frac = np.minimum(xb - np.floor(xb), np.ceil(xb) - xb)
        j = int(np.argmax(frac))
        return j if frac[j] > self.params.int_tol else None

    def _cutoff(self, bound: float) -> bool:
        return bound >= self.best_obj - _IMPROVE_EPS

    # -- incumbents ----------------------------------------------------------

    def _accept(self, x: np.ndarray, lo: np.ndarray, up: np.ndarray):
        x = x.copy()
        x[: self.q] = np.rint(x[: self.q])
        if self.form.n > self.q:
            # re-solve the continuous tail with the rounded binaries fixed
            flo, fup = lo.copy(), up.copy()
            flo[: self.q] = fup[: self.q] = x[: self.q]
            res = self._lp(flo, fup)
            if res.status != LpStatus.OPTIMAL:
                return
            x = res.x
            x[: self.q] = np.rint(x[: self.q])
        if not check_feasible(self.inst, x, form=self.form):
            logger.debug(f"{self.inst.name}: rounded LP point failed the feasibility check")
            return
        obj = objective_value(self.form.c, x)
        self.pool.offer(x, obj)
        if obj < self.best_obj - _IMPROVE_EPS:
            self.best_obj = obj
            self.best_x = x
            self.trace.append(IncumbentEvent(
                seconds=self._elapsed(), lp_iterations=self.stats.lp_iterations, objective=obj))
            logger.debug(f"{self.inst.name}: new incumbent {obj:.6g} after {self.stats.nodes} nodes")

    def _dive(self, lo: np.ndarray, up: np.ndarray, x: np.ndarray):
        lo, up = lo.copy(), up.copy()
        while True:
            j = self._most_fractional(x)
            if j is None:
                self._accept(x, lo, up)
                return
            first = 1.0 if x[j] >= 0.5 else 0.0
            for value in (first, 1.0 - first):
                lo[j] = up[j] = value
                res = self._lp(lo, up)
                if res.status == LpStatus.OPTIMAL:
                    break
            else:
                return
            if self._cutoff(res.objective):
                return
            x = res.x

    # -- main loop -------------------------------------------------------------

    def solve(self) -> SolveResult:
        self._start = time.perf_counter()
        status = None
        heap: list = []
        try:
            root = self._lp(self.lower, self.upper)
            if root.status == LpStatus.INFEASIBLE:
                status = SolveStatus.INFEASIBLE
            elif root.status == LpStatus.UNBOUNDED:
                status = SolveStatus.UNBOUNDED
            else:
                heap.append((root.objective, next(self._counter), self.lower, self.upper, root.x))
                status = self._search(heap)
        except _BudgetExhausted:
            status = SolveStatus.FEASIBLE_TIME_LIMIT if self.best_x is not None else SolveStatus.UNKNOWN
        except LpNumericsError as e:
            logger.warning(f"{self.inst.name}: LP numerics failure ({e}); stopping the search")
            status = SolveStatus.NUMERICS
        return self._result(status, heap)

    def _search(self, heap: list) -> SolveStatus:
        while heap:
            bound, _, lo, up, x = heapq.heappop(heap)
            self._open_bound = bound
            if self._cutoff(bound):
                continue
            gap_tol = self.params.rel_gap_tol * (1.0 + abs(bound))
            if self.best_x is not None and self.best_obj - bound <= gap_tol:
                heap.clear()
                break
            j = self._most_fractional(x)
            if j is None:
                self._accept(x, lo, up)
                continue
            if self._out_of_nodes() or self._out_of_time():
                heapq.heappush(heap, (bound, next(self._counter), lo, up, x))
                self._open_bound = None
                return SolveStatus.FEASIBLE_TIME_LIMIT if self.best_x is not None else SolveStatus.UNKNOWN
            self.stats.nodes += 1
            logger.debug(f"{self.inst.name}: node {self.stats.nodes} bound {bound:.6g} branching on x[{j}]={x[j]:.4f}")
            if self.params.dive:
                self._dive(lo, up, x)
            for value in (0.0, 1.0):
                clo, cup = lo.copy(), up.copy()
                clo[j] = cup[j] = value
                res = self._lp(clo, cup)
                if res.status != LpStatus.OPTIMAL or self._cutoff(res.objective):
                    continue
                if self._most_fractional(res.x) is None:
                    self._accept(res.x, clo, cup)
                else:
                    heapq.heappush(heap, (res.objective, next(self._counter), clo, cup, res.x))
            self._open_bound = None
        return SolveStatus.OPTIMAL if self.best_x is not None else SolveStatus.INFEASIBLE

    def _result(self, status: SolveStatus, heap: list) -> SolveResult:
        self.stats.wall_time = self._elapsed()
        if status == SolveStatus.INFEASIBLE:
            bound = math.inf
        elif status == SolveStatus.UNBOUNDED:
            bound = -math.inf
        elif status == SolveStatus.OPTIMAL:
            bound = self.best_obj
        else:
            open_bounds = [node[0] for node in heap]
            if self._open_bound is not None:
                open_bounds.append(self._open_bound)
            bound = min(open_bounds) if open_bounds else -math.inf
            if self.best_x is not None:
                bound = min(bound, self.best_obj)
        incumbent = make_solution(self.inst, self.best_x, form=self.form) if self.best_x is not None else None
        result = SolveResult(
            status=status,
            incumbent=incumbent,
            bound=bound,
            pool=self.pool.to_pool(),
            stats=self.stats,
            incumbent_trace=self.trace,
        )
        obj = f"{self.best_obj:.6g}" if incumbent is not None else "none"
        logger.info(
            f"Solved {self.inst.name}: {status.value}, obj={obj}, bound={bound:.6g}, "
            f"nodes={self.stats.nodes}, lp_iters={self.stats.lp_iterations}, {self.stats.wall_time:.2f}s"
        )
        return result


def solve_milp(inst: MilpInstance, params: Optional[SolveParams] = None,
               lower: Optional[Sequence[float]] = None, upper: Optional[Sequence[float]] = None) -> SolveResult:
    """`lower`/`upper` override the instance bounds (same length as the variable vector)."""
    return BranchAndBound(inst, params or SolveParams(), lower, upper).solve()
