from typing import Sequence

import numpy as np

from predsearch.errors import InvalidSizeError
from predsearch.models.search_model import PartialSolution


def select_partial(probs: Sequence[float], k0: int, k1: int) -> PartialSolution:
    """
    I0 = the k0 smallest probabilities, I1 = the k1 largest of the rest. Ties go to
    the lower index in both cases.
    """
    p = np.asarray(probs, dtype=np.float64)
    q = len(p)
    if k0 < 0 or k1 < 0 or k0 + k1 > q:
        raise InvalidSizeError(f"need k0 + k1 <= q, got k0={k0}, k1={k1}, q={q}")
    idx = np.arange(q)
    ascending = np.lexsort((idx, p))
    i0 = ascending[:k0]
    rest = np.setdiff1d(idx, i0, assume_unique=True)
    descending = rest[np.lexsort((rest, -p[rest]))]
    i1 = descending[:k1]
    return PartialSolution(i0=sorted(int(d) for d in i0), i1=sorted(int(d) for d in i1))


def partial_distance(ps: PartialSolution, x: Sequence[float]) -> float:
    """||x_I - x̂_I||_1 over the pinned indices."""
    x = np.asarray(x, dtype=np.float64)
    return float(np.sum(np.abs(x[ps.i0])) + np.sum(np.abs(1.0 - x[ps.i1])))
