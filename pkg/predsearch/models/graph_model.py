from typing import Any, Dict

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

VAR_FEATURES = 18
CON_FEATURES = 4
POS_EMB_BITS = 12


class BipartiteGraph(BaseModel):
    """Variable/constraint node features plus the coefficient-weighted edge list."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    var_feats: np.ndarray   # n x 18
    con_feats: np.ndarray   # m x 4
    edge_rows: np.ndarray   # constraint index per edge
    edge_cols: np.ndarray   # variable index per edge
    edge_coeffs: np.ndarray
    n: int
    m: int
    q: int
    normalization_meta: Dict[str, Any] = {}

    @model_validator(mode="after")
    def _check_dims(self) -> "BipartiteGraph":
        if self.var_feats.shape != (self.n, VAR_FEATURES):
            raise ValueError(f"var_feats must be {self.n}x{VAR_FEATURES}, got {self.var_feats.shape}")
        if self.con_feats.shape != (self.m, CON_FEATURES):
            raise ValueError(f"con_feats must be {self.m}x{CON_FEATURES}, got {self.con_feats.shape}")
        if not (len(self.edge_rows) == len(self.edge_cols) == len(self.edge_coeffs)):
            raise ValueError("edge arrays must have equal length")
        if not 0 <= self.q <= self.n:
            raise ValueError("q must lie in [0, n]")
        return self

    @property
    def num_edges(self) -> int:
        return len(self.edge_coeffs)

    def to_json_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "m": self.m,
            "q": self.q,
            "var_feats": self.var_feats.tolist(),
            "con_feats": self.con_feats.tolist(),
            "edges": [
                [int(i), int(j), float(a)]
                for i, j, a in zip(self.edge_rows, self.edge_cols, self.edge_coeffs)
            ],
            "normalization_meta": self.normalization_meta,
        }

    @classmethod
    def from_json_dict(cls, data: Dict[str, Any]) -> "BipartiteGraph":
        edges = data.get("edges", [])
        return cls(
            var_feats=np.asarray(data["var_feats"], dtype=np.float64).reshape(data["n"], VAR_FEATURES),
            con_feats=np.asarray(data["con_feats"], dtype=np.float64).reshape(data["m"], CON_FEATURES),
            edge_rows=np.asarray([e[0] for e in edges], dtype=np.int64),
            edge_cols=np.asarray([e[1] for e in edges], dtype=np.int64),
            edge_coeffs=np.asarray([e[2] for e in edges], dtype=np.float64),
            n=data["n"],
            m=data["m"],
            q=data["q"],
            normalization_meta=data.get("normalization_meta", {}),
        )
