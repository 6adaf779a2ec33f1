from dataclasses import dataclass

import numpy as np

from predsearch.models.milp_model import MilpInstance, Sense, VarKind

SENSE_CODE = {Sense.LE: 0, Sense.EQ: 1, Sense.GE: 2}


@dataclass(frozen=True)
class DenseForm:
    """numpy view of an instance; rows are kept with their senses."""

    A: np.ndarray        # m x n
    b: np.ndarray        # m
    senses: np.ndarray   # m, codes from SENSE_CODE
    c: np.ndarray        # n
    lower: np.ndarray
    upper: np.ndarray
    q: int

    @property
    def n(self) -> int:
        return self.A.shape[1]

    @property
    def m(self) -> int:
        return self.A.shape[0]


def dense_form(inst: MilpInstance) -> DenseForm:
    n, m = inst.num_vars, inst.num_rows
    A = np.zeros((m, n), dtype=np.float64)
    b = np.zeros(m, dtype=np.float64)
    senses = np.zeros(m, dtype=np.int8)
    for i, row in enumerate(inst.rows):
        for j, a in row.coeffs.items():
            A[i, j] = a
        b[i] = row.rhs
        senses[i] = SENSE_CODE[row.sense]
    q = sum(1 for k in inst.var_kind if k == VarKind.BINARY)
    return DenseForm(
        A=A,
        b=b,
        senses=senses,
        c=np.asarray(inst.objective, dtype=np.float64),
        lower=np.asarray(inst.lower, dtype=np.float64),
        upper=np.asarray(inst.upper, dtype=np.float64),
        q=q,
    )


def objective_value(c: np.ndarray, x: np.ndarray) -> float:
    """c.x with a fixed summation order so every module reports identical objectives."""
    return float(np.dot(c, x))


def row_violations(form: DenseForm, x: np.ndarray) -> np.ndarray:
    """Per-row violation amount (0 when satisfied)."""
    act = form.A @ x
    viol = np.zeros(form.m)
    le = form.senses == 0
    ge = form.senses == 2
    eq = form.senses == 1
    viol[le] = np.maximum(act[le] - form.b[le], 0.0)
    viol[ge] = np.maximum(form.b[ge] - act[ge], 0.0)
    viol[eq] = np.abs(act[eq] - form.b[eq])
    return viol
