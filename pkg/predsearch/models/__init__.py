from predsearch.models.eval_model import (
    AggregateRow,
    CurvePoint,
    EvalRecord,
    EvalReport,
    EvalSpec,
    Family,
    GenSpec,
    MethodKind,
    MethodSpec,
    PerturbSpec,
    PerturbSummary,
    ReliabilityRow,
)
from predsearch.models.graph_model import BipartiteGraph
from predsearch.models.label_model import LabeledSample
from predsearch.models.milp_model import MilpInstance, ObjSense, Row, Sense, Solution, VarKind
from predsearch.models.search_model import (
    Formulation,
    PartialSolution,
    SearchConfig,
    SearchMode,
    SearchResult,
)
from predsearch.models.solve_model import (
    BruteForceResult,
    IncumbentEvent,
    PoolEntry,
    SolutionPool,
    SolveParams,
    SolveResult,
    SolveStats,
    SolveStatus,
)
from predsearch.models.train_model import Aggregation, EpochRecord, ModelCheckpoint, TrainConfig, TrainHistory
