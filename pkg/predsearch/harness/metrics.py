import logging
import math
from typing import Tuple

from predsearch.models.milp_model import ObjSense

logger = logging.getLogger(__name__)

GAP_EPS = 1e-10


def gaps(obj: float, bks: float) -> Tuple[float, float]:
    """(gap_abs, gap_rel) of an objective against the best known solution."""
    gap_abs = abs(obj - bks)
    return gap_abs, gap_abs / (abs(bks) + GAP_EPS)


def gain(gap_base: float, gap_ours: float) -> float:
    """Percent reduction of the baseline gap; -inf when the baseline is already at 0 and ours is not."""
    if gap_base == 0.0:
        if gap_ours == 0.0:
            return 0.0
        logger.warning(f"gain undefined: baseline gap is 0 but ours is {gap_ours}; reporting -inf")
        return -math.inf
    return (gap_base - gap_ours) / gap_base * 100.0


def is_better(a: float, b: float, sense: ObjSense) -> bool:
    """a strictly improves on b in the given objective sense."""
    return a > b if sense == ObjSense.MAX else a < b
