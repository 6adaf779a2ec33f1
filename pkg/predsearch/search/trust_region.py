import logging
from typing import List

from predsearch.errors import DimensionMismatchError
from predsearch.milp.transform import insert_binaries, make_row, with_bounds
from predsearch.models.milp_model import MilpInstance, Row, Sense
from predsearch.models.search_model import Formulation, PartialSolution

logger = logging.getLogger(__name__)


def _check_indices(inst: MilpInstance, ps: PartialSolution):
    q = inst.num_binary
    bad = [d for d in ps.i0 + ps.i1 if d >= q]
    if bad:
        raise DimensionMismatchError(f"partial solution indices {bad} are not binary positions of {inst.name} (q={q})")


def _unique(name: str, taken: set) -> str:
    while name in taken:
        name += "_"
    taken.add(name)
    return name


def build_trust_region(inst: MilpInstance, ps: PartialSolution, delta: int,
                       formulation: Formulation = Formulation.INDICATOR) -> MilpInstance:
    """
    Restrict inst to the L1 ball of radius delta around the partial solution. The
    indicator form adds one binary per pinned index; the compact form adds one row.
    Original columns, bounds and rows are left as they are.
    """
    _check_indices(inst, ps)
    meta = {**inst.meta, "trust_region": {"k0": ps.k0, "k1": ps.k1, "delta": delta,
                                          "formulation": formulation.value}}
    name = f"{inst.name}_tr"
    if ps.size == 0:
        return with_bounds(inst, inst.lower, inst.upper, name=name, meta=meta)

    if formulation == Formulation.COMPACT:
        coeffs = {d: 1.0 for d in ps.i0}
        coeffs.update({d: -1.0 for d in ps.i1})
        row = make_row(coeffs, float(delta - ps.k1), Sense.LE)
        row_name = _unique("trust_region", set(inst.row_names))
        return MilpInstance(
            name=name,
            objective=list(inst.objective),
            sense_flag=inst.sense_flag,
            rows=list(inst.rows) + [row],
            lower=list(inst.lower),
            upper=list(inst.upper),
            var_kind=list(inst.var_kind),
            var_names=list(inst.var_names),
            row_names=list(inst.row_names) + [row_name],
            meta=meta,
        )

    q = inst.num_binary
    pinned = sorted(ps.values.items())
    var_taken, row_taken = set(inst.var_names), set(inst.row_names)
    new_names: List[str] = []
    new_rows: List[Row] = []
    new_row_names: List[str] = []
    for slot, (d, value) in enumerate(pinned):
        delta_col = q + slot
        base = inst.var_names[d]
        new_names.append(_unique(f"delta_{base}", var_taken))
        if value == 0:
            # x_d <= delta_d
            new_rows.append(make_row({d: 1.0, delta_col: -1.0}, 0.0))
        else:
            # 1 - x_d <= delta_d
            new_rows.append(make_row({d: -1.0, delta_col: -1.0}, -1.0))
        new_row_names.append(_unique(f"tr_{base}", row_taken))
    new_rows.append(make_row({q + s: 1.0 for s in range(len(pinned))}, float(delta)))
    new_row_names.append(_unique("tr_radius", row_taken))
    return insert_binaries(inst, new_names, new_rows, new_row_names, name=name, meta=meta)


def build_fixing(inst: MilpInstance, ps: PartialSolution) -> MilpInstance:
    """Pin every index of the partial solution through its bounds."""
    _check_indices(inst, ps)
    lower, upper = list(inst.lower), list(inst.upper)
    for d, value in ps.values.items():
        lower[d] = upper[d] = float(value)
    meta = {**inst.meta, "fixing": {"k0": ps.k0, "k1": ps.k1}} if ps.size else dict(inst.meta)
    name = f"{inst.name}_fix" if ps.size else inst.name
    return with_bounds(inst, lower, upper, name=name, meta=meta)
