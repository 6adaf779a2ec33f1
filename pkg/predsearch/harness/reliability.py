from typing import List, Sequence, Tuple

import numpy as np

from predsearch.models.eval_model import ReliabilityRow
from predsearch.models.milp_model import MilpInstance
from predsearch.search.partial import partial_distance, select_partial


def label_distance_experiment(
    inst: MilpInstance,
    marginals: Sequence[float],
    x_opt: Sequence[float],
    sizes: Sequence[Tuple[int, int]],
) -> List[ReliabilityRow]:
    """
    Use the training target itself as the confidence score and measure how far the
    resulting partial solutions sit from a reference optimum, per (k0, k1).
    """
    x = np.asarray(x_opt, dtype=np.float64)[: inst.num_binary]
    rows = []
    for k0, k1 in sizes:
        ps = select_partial(marginals, k0, k1)
        dist = partial_distance(ps, x)
        rows.append(ReliabilityRow(k0=k0, k1=k1, distance=dist, wrong=int(round(dist))))
    return rows
