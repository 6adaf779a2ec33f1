from typing import Dict, List, Optional, Sequence

from predsearch.models.milp_model import MilpInstance, Row, Sense, VarKind


def with_bounds(inst: MilpInstance, lower: Sequence[float], upper: Sequence[float],
                name: Optional[str] = None, meta: Optional[dict] = None) -> MilpInstance:
    return MilpInstance(
        name=name or inst.name,
        objective=list(inst.objective),
        sense_flag=inst.sense_flag,
        rows=list(inst.rows),
        lower=list(lower),
        upper=list(upper),
        var_kind=list(inst.var_kind),
        var_names=list(inst.var_names),
        row_names=list(inst.row_names),
        meta=dict(inst.meta if meta is None else meta),
    )


def insert_binaries(
    inst: MilpInstance,
    new_names: List[str],
    new_rows: List[Row],
    new_row_names: List[str],
    name: Optional[str] = None,
    meta: Optional[dict] = None,
) -> MilpInstance:
    """
    Add zero-cost binary columns right after the existing binaries and append rows.

    New rows address the new columns as q, q+1, ...; columns of the original
    instance keep their own indices except continuous ones, which shift by the
    number of inserted columns.
    """
    q, k = inst.num_binary, len(new_names)

    def shift(j: int) -> int:
        return j if j < q else j + k

    rows = [Row(coeffs={shift(j): a for j, a in r.coeffs.items()}, rhs=r.rhs, sense=r.sense)
            for r in inst.rows] if k and q < inst.num_vars else list(inst.rows)
    rows += new_rows

    cont = slice(q, inst.num_vars)
    return MilpInstance(
        name=name or inst.name,
        objective=inst.objective[:q] + [0.0] * k + inst.objective[cont],
        sense_flag=inst.sense_flag,
        rows=rows,
        lower=inst.lower[:q] + [0.0] * k + inst.lower[cont],
        upper=inst.upper[:q] + [1.0] * k + inst.upper[cont],
        var_kind=inst.var_kind[:q] + [VarKind.BINARY] * k + inst.var_kind[cont],
        var_names=inst.var_names[:q] + new_names + inst.var_names[cont],
        row_names=list(inst.row_names) + new_row_names,
        meta=dict(inst.meta if meta is None else meta),
    )


def drop_inserted(values: Sequence[float], q: int, k: int) -> List[float]:
    """Inverse of insert_binaries on a solution vector."""
    values = list(values)
    return values[:q] + values[q + k:]


def make_row(coeffs: Dict[int, float], rhs: float, sense: Sense = Sense.LE) -> Row:
    return Row(coeffs={j: a for j, a in sorted(coeffs.items()) if a != 0.0}, rhs=rhs, sense=sense)
