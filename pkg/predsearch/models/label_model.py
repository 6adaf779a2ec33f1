from typing import List

from pydantic import BaseModel, PositiveFloat


class LabeledSample(BaseModel):
    instance_name: str
    objectives: List[float]
    weights: List[float]
    marginals: List[float]
    bks_objective: float
    pool_digest: str
    temperature: PositiveFloat = 1.0
