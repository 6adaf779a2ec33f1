from typing import Optional, Sequence

import numpy as np

from predsearch.config import FEAS_TOL
from predsearch.errors import DimensionMismatchError
from predsearch.milp.dense import DenseForm, dense_form, objective_value, row_violations
from predsearch.models.milp_model import MilpInstance, Solution


def check_feasible(
    inst: MilpInstance,
    x: Sequence[float],
    tol: float = FEAS_TOL,
    form: Optional[DenseForm] = None,
) -> bool:
    """Rows, bounds and binary integrality, each to within tol."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (inst.num_vars,):
        raise DimensionMismatchError(f"expected {inst.num_vars} values, got {x.shape[0] if x.ndim else 0}")
    form = form or dense_form(inst)
    if not np.all(np.isfinite(x)):
        return False
    if np.any(x < form.lower - tol) or np.any(x > form.upper + tol):
        return False
    xb = x[: form.q]
    if np.any(np.minimum(np.abs(xb), np.abs(xb - 1.0)) > tol):
        return False
    return bool(np.all(row_violations(form, x) <= tol))


def is_integral(x: np.ndarray, q: int, tol: float = FEAS_TOL) -> bool:
    xb = x[:q]
    return bool(np.all(np.minimum(np.abs(xb), np.abs(xb - 1.0)) <= tol))


def make_solution(inst: MilpInstance, x: Sequence[float], tol: float = FEAS_TOL,
                  form: Optional[DenseForm] = None) -> Solution:
    form = form or dense_form(inst)
    arr = np.asarray(x, dtype=np.float64)
    return Solution(
        values=arr.tolist(),
        objective=objective_value(form.c, arr),
        feasible=check_feasible(inst, arr, tol, form),
        integral=is_integral(arr, form.q, tol),
    )
