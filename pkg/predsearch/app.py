import logging
import os
from contextlib import asynccontextmanager
from typing import Optional

from fastapi import FastAPI, HTTPException, Response
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from predsearch import __version__
from predsearch.config import MODEL_PATH
from predsearch.errors import PredSearchError
from predsearch.learning.features import featurize
from predsearch.learning.gnn import GnnModel
from predsearch.milp.mps import parse_mps
from predsearch.models.search_model import SearchConfig
from predsearch.models.solve_model import SolveParams, SolveResult
from predsearch.search.predict_search import predict_and_search
from predsearch.solver.branch_bound import solve_milp

logger = logging.getLogger(__name__)

state = {"model": None}


class MpsRequest(BaseModel):
    mps: str


class SolveRequest(MpsRequest):
    params: SolveParams = Field(default_factory=SolveParams)


class SearchRequest(MpsRequest):
    config: SearchConfig = Field(default_factory=SearchConfig)


class SolveResponse(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="constants")

    instance: str
    objective: Optional[float] = None
    result: SolveResult


def _json(model: BaseModel) -> Response:
    # infinite bounds serialize as Infinity
    return Response(content=model.model_dump_json(), media_type="application/json")


def _load_model(path: str) -> Optional[GnnModel]:
    if not os.path.exists(path):
        logger.warning(f"No model checkpoint at {path}; /search is disabled")
        return None
    try:
        model = GnnModel.load(path)
    except (PredSearchError, ValidationError, ValueError) as e:
        logger.error(f"❌ Failed to load model {path}: {e}")
        return None
    logger.info(f"✅ Loaded model {path} ({model.num_parameters} parameters)")
    return model


@asynccontextmanager
async def lifespan(app: FastAPI):
    state["model"] = _load_model(MODEL_PATH)
    yield
    state["model"] = None


app = FastAPI(title="Predict-and-Search API", version=__version__, lifespan=lifespan)


def _parse(text: str):
    try:
        return parse_mps(text)
    except (PredSearchError, ValidationError) as e:
        raise HTTPException(status_code=422, detail=str(e))


@app.get("/health")
def health():
    return {"status": "ok", "version": __version__, "model_loaded": state["model"] is not None}


@app.post("/solve")
def solve(req: SolveRequest):
    inst = _parse(req.mps)
    result = solve_milp(inst, req.params)
    return _json(SolveResponse(
        instance=inst.name,
        objective=inst.to_original_sense(result.objective) if result.has_solution else None,
        result=result,
    ))


@app.post("/featurize")
def featurize_endpoint(req: MpsRequest):
    return featurize(_parse(req.mps)).to_json_dict()


@app.post("/search")
def search(req: SearchRequest):
    model = state["model"]
    if model is None:
        raise HTTPException(status_code=503, detail="no model loaded")
    inst = _parse(req.mps)
    try:
        result = predict_and_search(inst, model, req.config)
    except PredSearchError as e:
        raise HTTPException(status_code=422, detail=str(e))
    return _json(result)
