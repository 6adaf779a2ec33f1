"""
Two-phase bounded-variable primal simplex on a dense tableau.

The LP is the relaxation of a MilpInstance under (optionally overridden) variable
bounds. Before pivoting, fixed columns are substituted out and rows left with a
single active coefficient are turned into bounds; what remains is shifted so every
structural variable lives in [0, U] and solved with slack/artificial columns.
"""
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence, Union

import numpy as np

from predsearch.errors import LpNumericsError
from predsearch.milp.dense import DenseForm, dense_form, objective_value, row_violations
from predsearch.models.milp_model import MilpInstance

logger = logging.getLogger(__name__)

_DJ_TOL = 1e-9
_PIV_TOL = 1e-9
_ZERO = 1e-12
_REINVERT_EVERY = 100


class LpStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass
class LpResult:
    status: LpStatus
    x: Optional[np.ndarray] = None
    objective: float = math.inf
    iterations: int = 0
    bland: bool = field(default=False)


def solve_lp(
    form: Union[DenseForm, MilpInstance],
    lower: Optional[Sequence[float]] = None,
    upper: Optional[Sequence[float]] = None,
    feas_tol: float = 1e-6,
) -> LpResult:
    if isinstance(form, MilpInstance):
        form = dense_form(form)
    lo = np.array(form.lower if lower is None else lower, dtype=np.float64)
    up = np.array(form.upper if upper is None else upper, dtype=np.float64)
    if np.any(lo > up + feas_tol):
        return LpResult(LpStatus.INFEASIBLE)
    up = np.maximum(up, lo)

    reduced = _reduce(form, lo, up, feas_tol)
    if reduced is None:
        return LpResult(LpStatus.INFEASIBLE)
    lo, up, rows = reduced

    active = lo != up
    x0 = np.where(active, 0.0, lo)
    if not active.any() or rows.size == 0:
        # only bounds remain: each column sits at its cheaper finite end
        x = x0.copy()
        for j in np.flatnonzero(active):
            cj = form.c[j]
            if cj > 0:
                x[j] = lo[j]
            elif cj < 0:
                x[j] = up[j]
            else:
                x[j] = lo[j] if math.isfinite(lo[j]) else (up[j] if math.isfinite(up[j]) else 0.0)
            if not math.isfinite(x[j]):
                return LpResult(LpStatus.UNBOUNDED)
        return _finish(form, x, lo, up, 0, False, feas_tol)

    # structural columns in y-space: x_j = x0_j + sign * y_k, y_k in [0, U_k]
    col_src, col_sign, col_cap = [], [], []
    for j in np.flatnonzero(active):
        if math.isfinite(lo[j]):
            x0[j] = lo[j]
            col_src.append(j), col_sign.append(1.0), col_cap.append(up[j] - lo[j])
        elif math.isfinite(up[j]):
            x0[j] = up[j]
            col_src.append(j), col_sign.append(-1.0), col_cap.append(math.inf)
        else:
            x0[j] = 0.0
            col_src += [j, j]
            col_sign += [1.0, -1.0]
            col_cap += [math.inf, math.inf]
    col_src = np.asarray(col_src, dtype=np.int64)
    col_sign = np.asarray(col_sign)

    A = form.A[rows]
    b = form.b[rows] - A @ x0
    senses = form.senses[rows]
    S = A[:, col_src] * col_sign
    cs = form.c[col_src] * col_sign

    tableau = _Tableau.build(S, b, senses, cs, np.asarray(col_cap, dtype=np.float64))
    status = tableau.run_two_phase()
    if status != LpStatus.OPTIMAL:
        return LpResult(status, iterations=tableau.iterations, bland=tableau.bland)

    y = tableau.values()[: len(col_src)]
    x = x0.copy()
    np.add.at(x, col_src, col_sign * y)
    return _finish(form, x, lo, up, tableau.iterations, tableau.bland, feas_tol)


def _finish(form: DenseForm, x: np.ndarray, lo: np.ndarray, up: np.ndarray,
            iterations: int, bland: bool, feas_tol: float) -> LpResult:
    x = np.clip(x, lo, up)
    scale = 1.0 + (np.max(np.abs(form.b)) if form.m else 0.0)
    if form.m and np.max(row_violations(form, x)) > feas_tol * scale:
        raise LpNumericsError(
            f"simplex solution violates rows by {np.max(row_violations(form, x)):.3e}")
    return LpResult(LpStatus.OPTIMAL, x, objective_value(form.c, x), iterations, bland)


def _reduce(form: DenseForm, lo: np.ndarray, up: np.ndarray, feas_tol: float):
    """
    Substitute fixed columns and turn singleton rows into bounds until nothing changes.
    Returns (lower, upper, remaining row indices) or None if a row is provably violated.
    """
    A, b, senses = form.A, form.b, form.senses
    alive = np.ones(form.m, dtype=bool)
    while True:
        fixed = lo == up
        fixed_x = np.where(fixed, lo, 0.0)
        resid = b - A @ fixed_x
        nz = (A != 0.0) & ~fixed
        counts = nz.sum(axis=1)
        changed = False

        empty = alive & (counts == 0)
        if empty.any():
            r = resid[empty]
            s = senses[empty]
            bad = ((s == 0) & (r < -feas_tol)) | ((s == 2) & (r > feas_tol)) | ((s == 1) & (np.abs(r) > feas_tol))
            if bad.any():
                return None
            alive &= ~empty

        for i in np.flatnonzero(alive & (counts == 1)):
            j = int(np.flatnonzero(nz[i])[0])
            a = A[i, j]
            v = resid[i] / a
            s = senses[i]
            # a*x <= r  ->  x <= r/a if a > 0 else x >= r/a
            upper_side = (s == 0 and a > 0) or (s == 2 and a < 0)
            if s == 1:
                new_lo, new_up = max(lo[j], v), min(up[j], v)
            elif upper_side:
                new_lo, new_up = lo[j], min(up[j], v)
            else:
                new_lo, new_up = max(lo[j], v), up[j]
            if new_lo > new_up + feas_tol:
                return None
            if new_lo > new_up:
                new_lo = new_up = min(max(v, lo[j]), up[j])
            lo[j], up[j] = new_lo, new_up
            alive[i] = False
            changed = True
        if not changed:
            return lo, up, np.flatnonzero(alive)


class _Tableau:
    def __init__(self, A_eq, b, cost, cap, basis, n_struct, n_art):
        self.A_eq = A_eq
        self.b = b
        self.cost = cost
        self.cap = cap
        self.basis = basis
        self.m, self.N = A_eq.shape
        self.n_struct = n_struct
        self.n_art = n_art
        self.is_basic = np.zeros(self.N, dtype=bool)
        self.is_basic[basis] = True
        self.at_upper = np.zeros(self.N, dtype=bool)
        self.T = A_eq.copy()
        self.beta = b.copy()
        self.iterations = 0
        self.degenerate = 0
        self.bland = False
        self.bland_after = 2 * (n_struct + self.m)
        self.max_iterations = 50 * (self.m + self.N) + 1000

    @classmethod
    def build(cls, S, b, senses, cs, caps):
        m, ns = S.shape
        n_slack = int(np.sum(senses != 1))
        slack = np.zeros((m, n_slack))
        k = 0
        slack_of_row = np.full(m, -1)
        for i in range(m):
            if senses[i] == 0:
                slack[i, k] = 1.0
            elif senses[i] == 2:
                slack[i, k] = -1.0
            else:
                continue
            slack_of_row[i] = k
            k += 1
        A_eq = np.hstack([S, slack])
        rhs = b.copy()
        neg = rhs < 0
        A_eq[neg] *= -1.0
        rhs[neg] *= -1.0

        basis = np.full(m, -1, dtype=np.int64)
        need_art = []
        for i in range(m):
            k = slack_of_row[i]
            if k >= 0 and A_eq[i, ns + k] > 0:
                basis[i] = ns + k
            else:
                need_art.append(i)
        art = np.zeros((m, len(need_art)))
        for a, i in enumerate(need_art):
            art[i, a] = 1.0
            basis[i] = ns + n_slack + a
        A_eq = np.hstack([A_eq, art])
        cost = np.concatenate([cs, np.zeros(n_slack + len(need_art))])
        cap = np.concatenate([caps, np.full(n_slack + len(need_art), math.inf)])
        return cls(A_eq, rhs, cost, cap, basis, ns, len(need_art))

    def run_two_phase(self) -> LpStatus:
        if self.n_art:
            phase1 = np.zeros(self.N)
            phase1[self.N - self.n_art:] = 1.0
            status = self._run(phase1)
            if status != LpStatus.OPTIMAL:
                raise LpNumericsError("phase 1 reported an unbounded ray")
            infeas = float(np.sum(self.values()[self.N - self.n_art:]))
            if infeas > 1e-7 * (1.0 + float(np.max(np.abs(self.b)))):
                return LpStatus.INFEASIBLE
            # artificials may stay basic at zero but can never move again
            self.cap[self.N - self.n_art:] = 0.0
        return self._run(self.cost)

    def values(self) -> np.ndarray:
        v = np.where(self.at_upper, self.cap, 0.0)
        v[self.basis] = self.beta
        return v

    def _reinvert(self, cost) -> np.ndarray:
        B = self.A_eq[:, self.basis]
        try:
            Binv = np.linalg.inv(B)
        except np.linalg.LinAlgError:
            raise LpNumericsError("singular basis during reinversion")
        self.T = Binv @ self.A_eq
        upper_nb = self.at_upper & ~self.is_basic
        rhs = self.b - self.A_eq[:, upper_nb] @ self.cap[upper_nb]
        self.beta = Binv @ rhs
        return cost - cost[self.basis] @ self.T

    def _run(self, cost) -> LpStatus:
        d = self._reinvert(cost)
        since_reinvert = 0
        while True:
            if self.iterations > self.max_iterations:
                raise LpNumericsError(f"iteration limit {self.max_iterations} reached")
            movable = ~self.is_basic & (self.cap > 0)
            inc = movable & ~self.at_upper & (d < -_DJ_TOL)
            dec = movable & self.at_upper & (d > _DJ_TOL)
            candidates = inc | dec
            if not candidates.any():
                return LpStatus.OPTIMAL
            if self.bland:
                j = int(np.flatnonzero(candidates)[0])
            else:
                j = int(np.argmax(np.where(candidates, np.abs(d), -1.0)))
            sigma = 1.0 if inc[j] else -1.0

            col = self.T[:, j]
            alpha = sigma * col
            beta = np.maximum(self.beta, 0.0)
            ratios = np.full(self.m, math.inf)
            down = alpha > _PIV_TOL
            ratios[down] = beta[down] / alpha[down]
            bcap = self.cap[self.basis]
            up = (alpha < -_PIV_TOL) & np.isfinite(bcap)
            ratios[up] = np.maximum(bcap[up] - self.beta[up], 0.0) / -alpha[up]

            t_row = float(np.min(ratios)) if self.m else math.inf
            t_flip = self.cap[j]
            self.iterations += 1

            if t_flip <= t_row:
                if not math.isfinite(t_flip):
                    return LpStatus.UNBOUNDED
                self.beta -= alpha * t_flip
                self.at_upper[j] = not self.at_upper[j]
                continue

            ties = np.flatnonzero(ratios <= t_row + _ZERO)
            if self.bland:
                r = int(ties[np.argmin(self.basis[ties])])
            else:
                r = int(ties[np.argmax(np.abs(alpha[ties]))])
            t = t_row
            leaving = int(self.basis[r])

            self.beta -= alpha * t
            self.beta[r] = t if sigma > 0 else self.cap[j] - t
            self.at_upper[leaving] = alpha[r] < 0
            self.is_basic[leaving] = False
            self.is_basic[j] = True
            self.at_upper[j] = False
            self.basis[r] = j

            piv = self.T[r, j]
            self.T[r] /= piv
            other = col.copy()
            other[r] = 0.0
            self.T -= np.outer(other, self.T[r])
            d -= d[j] * self.T[r]
            d[j] = 0.0

            if t <= _ZERO:
                self.degenerate += 1
                if not self.bland and self.degenerate >= self.bland_after:
                    self.bland = True
                    logger.debug(f"Bland's rule engaged after {self.degenerate} degenerate pivots")
            since_reinvert += 1
            if since_reinvert >= _REINVERT_EVERY:
                d = self._reinvert(cost)
                since_reinvert = 0
