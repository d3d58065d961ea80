from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field
from typing import List, Dict, Any, Optional
from pathlib import Path
import logging
import uuid
from datetime import datetime

from src import __version__
from src.exceptions import (
    ConfigError,
    DimensionMismatchError,
    MixMOBOError,
    PointMismatchError,
    ProtocolError,
    SpaceError,
)
from src.optimizer import MixMOBO, OptimizerConfig
from src.space import MixedSpace, MixedVector
from src.utils import ensure_directories

# Setup
SESSION_DIR = ensure_directories() / "sessions"
logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

# Initialize FastAPI app
app = FastAPI(
    title="MixMOBO API",
    description="Ask/tell sessions for mixed-variable multi-objective Bayesian optimization",
    version=__version__,
)

# CORS middleware
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


# Pydantic models
class SessionRequest(BaseModel):
    """Request model for a new session"""

    space: Dict[str, Any] = Field(..., description="Continuous, ordinal and categorical dims")
    config: Dict[str, Any] = Field(default_factory=dict, description="OptimizerConfig fields")


class PointsResponse(BaseModel):
    session_id: str
    epoch: int
    points: List[Dict[str, List[Any]]]


class TellRequest(BaseModel):
    """Observed objective vectors for the outstanding ask"""

    points: Optional[List[Dict[str, List[Any]]]] = Field(
        None, description="Asked points, in order (defaults to the pending ask)"
    )
    values: List[List[float]] = Field(..., description="One objective vector per point")


class StatusResponse(BaseModel):
    session_id: str
    epoch: int
    epochs: int
    evaluations: int
    pending_points: int
    finished: bool


def _state_path(session_id: str) -> Path:
    return SESSION_DIR / f"{session_id}.json"


def _load(session_id: str) -> MixMOBO:
    path = _state_path(session_id)
    if not session_id.isalnum() or not path.exists():
        raise HTTPException(status_code=404, detail=f"Unknown session {session_id}")
    return MixMOBO.load_state(str(path))


def _raise_http(e: MixMOBOError) -> None:
    if isinstance(e, (ProtocolError, PointMismatchError)):
        raise HTTPException(status_code=409, detail=str(e))
    if isinstance(e, (ConfigError, SpaceError, DimensionMismatchError)):
        raise HTTPException(status_code=400, detail=str(e))
    logger.error(f"Session error: {e}", exc_info=True)
    raise HTTPException(status_code=500, detail=str(e))


def _status(session_id: str, optimizer: MixMOBO) -> Dict[str, Any]:
    pending = optimizer.state.pending
    return {
        "session_id": session_id,
        "epoch": optimizer.state.epoch,
        "epochs": optimizer.config.epochs,
        "evaluations": optimizer.n_evaluations,
        "pending_points": 0 if pending is None else len(pending.points),
        "finished": optimizer.finished,
    }


# Routes
@app.get("/")
async def root():
    """Root endpoint"""
    return {
        "message": "MixMOBO API",
        "version": __version__,
        "endpoints": {
            "create": "/api/sessions",
            "ask": "/api/sessions/{session_id}/ask",
            "tell": "/api/sessions/{session_id}/tell",
            "status": "/api/sessions/{session_id}",
            "result": "/api/sessions/{session_id}/result",
            "health": "/health",
        },
    }


@app.get("/health")
async def health_check():
    """Health check endpoint"""
    return {"status": "healthy", "timestamp": datetime.now().isoformat()}


@app.post("/api/sessions", response_model=StatusResponse)
async def create_session(request: SessionRequest):
    """
    Create an optimization session

    - **space**: declarative space document
    - **config**: optimizer settings (n_init, epochs, batch_size, portfolio, ...)
    """
    try:
        optimizer = MixMOBO(
            MixedSpace.from_dict(request.space), OptimizerConfig.from_dict(request.config)
        )
    except MixMOBOError as e:
        _raise_http(e)
    session_id = uuid.uuid4().hex
    optimizer.save_state(str(_state_path(session_id)))
    logger.info(f"Created session {session_id}")
    return _status(session_id, optimizer)


@app.post("/api/sessions/{session_id}/ask", response_model=PointsResponse)
async def ask(session_id: str):
    """Propose the next points (the initial design on a fresh session)"""
    optimizer = _load(session_id)
    try:
        points = optimizer.ask()
    except MixMOBOError as e:
        _raise_http(e)
    optimizer.save_state(str(_state_path(session_id)))
    return {
        "session_id": session_id,
        "epoch": optimizer.state.epoch,
        "points": [p.to_dict() for p in points],
    }


@app.post("/api/sessions/{session_id}/tell", response_model=StatusResponse)
async def tell(session_id: str, request: TellRequest):
    """Report observed objective vectors for the outstanding ask"""
    optimizer = _load(session_id)
    try:
        if request.points is not None:
            points = [MixedVector.from_dict(p) for p in request.points]
        elif optimizer.state.pending is not None:
            points = optimizer.state.pending.points
        else:
            raise ProtocolError("tell called without an outstanding ask")
        optimizer.tell(points, request.values)
    except MixMOBOError as e:
        _raise_http(e)
    optimizer.save_state(str(_state_path(session_id)))
    return _status(session_id, optimizer)


@app.get("/api/sessions/{session_id}", response_model=StatusResponse)
async def get_status(session_id: str):
    return _status(session_id, _load(session_id))


@app.get("/api/sessions/{session_id}/result")
async def get_result(session_id: str):
    """Current Pareto set of the observed data"""
    optimizer = _load(session_id)
    if optimizer.n_evaluations == 0:
        raise HTTPException(status_code=409, detail="No observations yet")
    return {"session_id": session_id, **optimizer.pareto_set().to_dict()}


if __name__ == "__main__":
    import uvicorn

    uvicorn.run(app, host="0.0.0.0", port=8000)
