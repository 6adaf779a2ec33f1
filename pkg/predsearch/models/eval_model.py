from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, NonNegativeInt, PositiveFloat, PositiveInt, model_validator

from predsearch.config import (
    BKS_TIME_LIMIT,
    CA_BIDS,
    CA_ITEMS,
    IS_AFFINITY,
    IS_NODES,
    SEED,
    TIME_LIMIT,
    WORKERS,
)
from predsearch.models.search_model import SearchConfig


class Family(str, Enum):
    INDEPENDENT_SET = "independent_set"
    COMBINATORIAL_AUCTION = "combinatorial_auction"


class GenSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    family: Family
    nodes: PositiveInt = IS_NODES
    affinity: PositiveInt = IS_AFFINITY
    items: PositiveInt = CA_ITEMS
    bids: PositiveInt = CA_BIDS
    seed: int = SEED
    count: PositiveInt = 1

    @model_validator(mode="after")
    def _check_sizes(self) -> "GenSpec":
        if self.family == Family.INDEPENDENT_SET and self.affinity >= self.nodes:
            raise ValueError(f"affinity={self.affinity} must be < nodes={self.nodes}")
        return self


class MethodKind(str, Enum):
    SOLVE = "solve"
    SEARCH = "search"


class MethodSpec(BaseModel):
    tag: str
    kind: MethodKind = MethodKind.SOLVE
    search: Optional[SearchConfig] = None
    model_path: Optional[str] = None
    # use label files as predictions instead of the GNN
    label_dir: Optional[str] = None


class EvalSpec(BaseModel):
    instances: List[str]
    methods: List[MethodSpec]
    time_limit: Optional[PositiveFloat] = TIME_LIMIT
    node_limit: Optional[PositiveInt] = None
    bks_time_limit: Optional[PositiveFloat] = BKS_TIME_LIMIT
    bks_node_limit: Optional[PositiveInt] = None
    baseline_tag: Optional[str] = None
    time_axis: str = Field("wall", pattern="^(wall|lp_iterations)$")
    workers: PositiveInt = WORKERS
    seed: int = SEED


class EvalRecord(BaseModel):
    """One (instance, method) outcome; OBJ and BKS are in the instance's original sense."""

    model_config = ConfigDict(ser_json_inf_nan="constants")

    instance: str
    method: str
    obj: Optional[float] = None
    bks: Optional[float] = None
    gap_abs: Optional[float] = None
    gap_rel: Optional[float] = None
    wall_time: float = 0.0
    status: str
    # (time, incumbent OBJ); time is seconds or LP iterations depending on the run's time axis
    curve: List[Tuple[float, float]] = []


class AggregateRow(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="constants")

    method: str
    instances: int
    solved: int
    avg_obj: Optional[float] = None
    avg_gap_abs: Optional[float] = None
    avg_gap_rel: Optional[float] = None
    gain_pct: Optional[float] = None


class PerturbSpec(BaseModel):
    trials: PositiveInt = 50
    flips: List[NonNegativeInt] = [0, 1, 2, 4, 8]
    seed: int = SEED
    # restrict the fixed index set to a (k0, k1) selection of the optimum
    restrict: Optional[Tuple[NonNegativeInt, NonNegativeInt]] = None


class PerturbSummary(BaseModel):
    flips: int
    trials: int
    infeasible_pct: float
    gap_min: Optional[float] = None
    gap_avg: Optional[float] = None
    gap_max: Optional[float] = None


class CurvePoint(BaseModel):
    method: str
    t: float
    mean_gap_rel: float


class EvalReport(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="constants")

    records: List[EvalRecord]
    aggregate: List[AggregateRow]
    curves: List[CurvePoint]
    bks: Dict[str, float]
    time_axis: str = "wall"


class ReliabilityRow(BaseModel):
    k0: int
    k1: int
    distance: float
    # pinned indices whose value disagrees with the reference solution
    wrong: int
