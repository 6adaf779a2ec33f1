from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, NonNegativeInt, PositiveFloat, model_validator

from predsearch.config import TIME_LIMIT
from predsearch.models.solve_model import SolveParams, SolveResult


class SearchMode(str, Enum):
    SEARCH = "search"
    FIX = "fix"


class Formulation(str, Enum):
    INDICATOR = "indicator"
    COMPACT = "compact"


class SearchConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    k0: NonNegativeInt = 0
    k1: NonNegativeInt = 0
    delta: NonNegativeInt = 0
    mode: SearchMode = SearchMode.SEARCH
    formulation: Formulation = Formulation.INDICATOR
    time_limit: Optional[PositiveFloat] = TIME_LIMIT
    solve_params: SolveParams = Field(default_factory=SolveParams)

    @model_validator(mode="after")
    def _check_radius(self) -> "SearchConfig":
        if self.mode == SearchMode.SEARCH and self.delta > self.k0 + self.k1:
            raise ValueError(f"delta={self.delta} exceeds k0+k1={self.k0 + self.k1}")
        return self

    @property
    def effective_delta(self) -> int:
        return 0 if self.mode == SearchMode.FIX else self.delta

    def effective_solve_params(self) -> SolveParams:
        return self.solve_params.model_copy(update={"time_limit": self.time_limit})


class PartialSolution(BaseModel):
    """Indices pinned to 0 (i0) and to 1 (i1); 0-based binary positions."""

    model_config = ConfigDict(frozen=True)

    i0: List[NonNegativeInt] = []
    i1: List[NonNegativeInt] = []

    @model_validator(mode="after")
    def _disjoint(self) -> "PartialSolution":
        if set(self.i0) & set(self.i1):
            raise ValueError("i0 and i1 must be disjoint")
        if len(set(self.i0)) != len(self.i0) or len(set(self.i1)) != len(self.i1):
            raise ValueError("partial solution indices must be distinct")
        return self

    @property
    def k0(self) -> int:
        return len(self.i0)

    @property
    def k1(self) -> int:
        return len(self.i1)

    @property
    def size(self) -> int:
        return len(self.i0) + len(self.i1)

    @property
    def values(self) -> Dict[int, int]:
        out = {d: 0 for d in self.i0}
        out.update({d: 1 for d in self.i1})
        return dict(sorted(out.items()))


class SearchResult(BaseModel):
    """Outcome of one predict-and-search run, reported against the original instance."""

    model_config = ConfigDict(ser_json_inf_nan="constants")

    instance_name: str
    config: SearchConfig
    partial: PartialSolution
    result: SolveResult
    objective: Optional[float] = None  # original sense
    predict_seconds: float = 0.0
