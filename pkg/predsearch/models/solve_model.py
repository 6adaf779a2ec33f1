from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, PositiveInt

from predsearch.config import INT_TOL, POOL_SIZE, REL_GAP_TOL, TIME_LIMIT
from predsearch.models.milp_model import Solution


class SolveStatus(str, Enum):
    OPTIMAL = "optimal"
    FEASIBLE_TIME_LIMIT = "feasible_time_limit"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    # budget ran out before any incumbent was found
    UNKNOWN = "unknown"
    NUMERICS = "numerics"


class SolveParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    time_limit: Optional[PositiveFloat] = TIME_LIMIT
    pool_size: PositiveInt = POOL_SIZE
    rel_gap_tol: PositiveFloat = REL_GAP_TOL
    int_tol: PositiveFloat = INT_TOL
    node_limit: Optional[PositiveInt] = None
    # the tree search makes no random choices; kept so runs record the seed they belong to
    seed: int = 0
    dive: bool = True


class PoolEntry(BaseModel):
    x: List[float]
    objective: float


class SolutionPool(BaseModel):
    """Best distinct (on the binary part) integral solutions, sorted by objective."""

    entries: List[PoolEntry] = []

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def objectives(self) -> List[float]:
        return [e.objective for e in self.entries]


class IncumbentEvent(BaseModel):
    seconds: float
    lp_iterations: int
    objective: float


class SolveStats(BaseModel):
    # nodes that were branched on; an integral root relaxation leaves this at 0
    nodes: int = 0
    lp_solves: int = 0
    lp_iterations: int = 0
    wall_time: float = 0.0


class SolveResult(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="constants")

    status: SolveStatus
    incumbent: Optional[Solution] = None
    bound: float
    pool: SolutionPool = Field(default_factory=SolutionPool)
    stats: SolveStats = Field(default_factory=SolveStats)
    incumbent_trace: List[IncumbentEvent] = []

    @property
    def objective(self) -> Optional[float]:
        return self.incumbent.objective if self.incumbent is not None else None

    @property
    def has_solution(self) -> bool:
        return self.incumbent is not None

    def strip_timings(self) -> "SolveResult":
        """Copy with wall-clock fields zeroed, for byte-comparable outputs."""
        return self.model_copy(update={
            "stats": self.stats.model_copy(update={"wall_time": 0.0}),
            "incumbent_trace": [e.model_copy(update={"seconds": 0.0}) for e in self.incumbent_trace],
        })


class BruteForceResult(BaseModel):
    status: SolveStatus
    incumbent: Optional[Solution] = None
    # assignments attaining the optimum (within 1e-9)
    num_optimal: int = 0
    num_feasible: int = 0
