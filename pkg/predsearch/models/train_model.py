from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, NonNegativeFloat, PositiveFloat, PositiveInt

from predsearch.config import BATCH_SIZE, EPOCHS, HIDDEN_DIM, LEARNING_RATE, SEED


class Aggregation(str, Enum):
    """How neighbour messages are pooled in a half-convolution."""

    MEAN = "mean"
    SUM = "sum"


class TrainConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    # lr=0 is accepted so a run can be checked to leave parameters untouched
    lr: NonNegativeFloat = LEARNING_RATE
    batch_size: PositiveInt = BATCH_SIZE
    epochs: PositiveInt = EPOCHS
    seed: int = SEED
    clip_norm: Optional[PositiveFloat] = None
    log_eps: PositiveFloat = 1e-7
    hidden_dim: PositiveInt = HIDDEN_DIM
    edge_term: bool = True
    aggregation: Aggregation = Aggregation.MEAN
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: PositiveFloat = 1e-8


class EpochRecord(BaseModel):
    epoch: int
    train_loss: float
    valid_loss: Optional[float] = None


class TrainHistory(BaseModel):
    epochs: List[EpochRecord] = []
    best_epoch: int = 0
    best_valid_loss: Optional[float] = None


class ModelCheckpoint(BaseModel):
    """Serialized GnnModel: flat float64 tensors keyed by parameter name."""

    dims: Dict[str, int]
    seed: int = 0
    edge_term: bool = True
    aggregation: Aggregation = Aggregation.MEAN
    shapes: Dict[str, List[int]]
    params: Dict[str, List[float]]
    meta: Dict[str, Any] = Field(default_factory=dict)
