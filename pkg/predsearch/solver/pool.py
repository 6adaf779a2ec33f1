from typing import Dict, Tuple

import numpy as np

from predsearch.models.solve_model import PoolEntry, SolutionPool


class PoolCollector:
    """Keeps the best `size` integral solutions, distinct on their binary part."""

    def __init__(self, size: int, q: int):
        self.size = size
        self.q = q
        self._entries: Dict[bytes, Tuple[float, np.ndarray]] = {}

    def __len__(self) -> int:
        return len(self._entries)

    def _key(self, x: np.ndarray) -> bytes:
        return np.asarray(np.rint(x[: self.q]), dtype=np.int8).tobytes()

    def _worst(self) -> Tuple[float, bytes]:
        return max((obj, key) for key, (obj, _) in self._entries.items())

    def offer(self, x: np.ndarray, objective: float) -> bool:
        key = self._key(x)
        if key in self._entries:
            if objective < self._entries[key][0]:
                self._entries[key] = (objective, x.copy())
            return False
        if len(self._entries) >= self.size:
            worst_obj, worst_key = self._worst()
            if (objective, key) >= (worst_obj, worst_key):
                return False
            del self._entries[worst_key]
        self._entries[key] = (objective, x.copy())
        return True

    def to_pool(self) -> SolutionPool:
        ordered = sorted(self._entries.items(), key=lambda kv: (kv[1][0], kv[0]))
        return SolutionPool(entries=[PoolEntry(x=x.tolist(), objective=obj) for _, (obj, x) in ordered])
