import math
from enum import Enum
from typing import Any, Dict, List

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class Sense(str, Enum):
    LE = "LE"
    GE = "GE"
    EQ = "EQ"


class ObjSense(str, Enum):
    MIN = "min"
    MAX = "max"


class VarKind(str, Enum):
    BINARY = "binary"
    CONTINUOUS = "continuous"


class Row(BaseModel):
    model_config = ConfigDict(frozen=True)

    coeffs: Dict[int, float]
    rhs: float
    sense: Sense = Sense.LE

    @field_validator("coeffs")
    @classmethod
    def _finite_nonzero(cls, v: Dict[int, float]) -> Dict[int, float]:
        for j, a in v.items():
            if j < 0:
                raise ValueError(f"negative column index {j}")
            if a == 0.0 or not math.isfinite(a):
                raise ValueError(f"coefficient of column {j} must be finite and nonzero, got {a}")
        return v

    @field_validator("rhs")
    @classmethod
    def _finite_rhs(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError(f"rhs must be finite, got {v}")
        return v


class MilpInstance(BaseModel):
    """
    Canonical minimization form of a binary MILP: min c.x subject to the rows and
    lower <= x <= upper. Binary variables occupy positions 0..q-1; a max-sense source
    is stored with c negated and sense_flag=max.
    """

    model_config = ConfigDict(frozen=True, ser_json_inf_nan="constants")

    name: str = "instance"
    objective: List[float]
    sense_flag: ObjSense = ObjSense.MIN
    rows: List[Row] = []
    lower: List[float]
    upper: List[float]
    var_kind: List[VarKind]
    var_names: List[str] = []
    row_names: List[str] = []
    meta: Dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="before")
    @classmethod
    def _default_names(cls, data: Any) -> Any:
        if isinstance(data, dict):
            n = len(data.get("objective", []))
            m = len(data.get("rows", []))
            if not data.get("var_names"):
                data = {**data, "var_names": [f"x{j + 1}" for j in range(n)]}
            if not data.get("row_names"):
                data = {**data, "row_names": [f"c{i + 1}" for i in range(m)]}
        return data

    @model_validator(mode="after")
    def _check_shape(self) -> "MilpInstance":
        n = len(self.objective)
        if not (len(self.lower) == len(self.upper) == len(self.var_kind) == len(self.var_names) == n):
            raise ValueError("objective, bounds, var_kind and var_names must have equal length")
        if len(self.row_names) != len(self.rows):
            raise ValueError("row_names must match rows")
        if len(set(self.var_names)) != n or len(set(self.row_names)) != len(self.rows):
            raise ValueError("variable and row names must be unique")
        if any(not math.isfinite(c) for c in self.objective):
            raise ValueError("objective coefficients must be finite")

        seen_continuous = False
        for j, kind in enumerate(self.var_kind):
            lo, up = self.lower[j], self.upper[j]
            if lo > up:
                raise ValueError(f"variable {self.var_names[j]}: lower {lo} > upper {up}")
            if kind == VarKind.BINARY:
                if seen_continuous:
                    raise ValueError("binary variables must precede continuous ones")
                # fixing sub-problems pin binaries to 0 or 1, so [0,0] and [1,1] are legal
                if lo not in (0.0, 1.0) or up not in (0.0, 1.0):
                    raise ValueError(f"binary {self.var_names[j]} must have bounds within {{0,1}}")
            else:
                seen_continuous = True

        for i, row in enumerate(self.rows):
            for j in row.coeffs:
                if j >= n:
                    raise ValueError(f"row {self.row_names[i]} references column {j} >= n={n}")
        return self

    @property
    def num_vars(self) -> int:
        return len(self.objective)

    @property
    def num_binary(self) -> int:
        return sum(1 for k in self.var_kind if k == VarKind.BINARY)

    @property
    def num_rows(self) -> int:
        return len(self.rows)

    def to_original_sense(self, value: float) -> float:
        """Map an internal (minimization) objective back to the source file's sense."""
        return -value if self.sense_flag == ObjSense.MAX else value


class Solution(BaseModel):
    values: List[float]
    objective: float
    feasible: bool = True
    integral: bool = True
