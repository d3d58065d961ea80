import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field, ValidationError, field_validator

from .acquisition import AcquisitionKind, AcquisitionParams
from .exceptions import (
    ConfigError,
    DimensionMismatchError,
    EvaluationError,
    FactorizationError,
    PointMismatchError,
    ProtocolError,
)
from .hedge import HedgeMO, NomineeHistory
from .moga import GaConfig, non_dominated_sort, optimize_acquisition
from .space import MixedSpace, MixedVector, encode_points, mutate_point, sample_uniform
from .surrogate import Dataset, HyperparamSearch, fit_gp, fit_hyperparams
from .utils import (
    SCHEMA_VERSION,
    derive_seed,
    load_json,
    make_rng,
    rng_from_state,
    rng_to_state,
    save_json,
)

logger = logging.getLogger(__name__)

BlackBox = Callable[[MixedVector], Any]


class OptimizerConfig(BaseModel):
    """Settings of the outer optimization loop"""

    n_init: int = Field(50, ge=1, description="Initial uniform samples N_i")
    epochs: int = Field(200, ge=0, description="Optimization epochs N")
    batch_size: int = Field(1, ge=1, description="Points per epoch Q")
    mutation_rate: float = Field(0.5, ge=0.0, le=1.0, description="Dedup mutation rate beta")
    dedup_tolerance: float = Field(1e-6, ge=0.0)
    dedup_retries: int = Field(100, ge=0)
    dedup_against_dataset: bool = True
    portfolio: List[AcquisitionKind] = Field(
        default_factory=lambda: [
            AcquisitionKind.EI,
            AcquisitionKind.PI,
            AcquisitionKind.UCB,
            AcquisitionKind.SMC,
        ]
    )
    ucb_kappa: float = Field(2.0, gt=0.0)
    xi: float = Field(0.01, ge=0.0)
    eta: float = Field(1.0, gt=0.0)
    ga: GaConfig = Field(default_factory=GaConfig)
    hyperparams: HyperparamSearch = Field(default_factory=HyperparamSearch)
    seed: Optional[int] = 0

    @field_validator("portfolio", mode="before")
    @classmethod
    def normalize_names(cls, v: Any) -> Any:
        if isinstance(v, str):
            v = v.split(",")
        return [x.strip().upper() if isinstance(x, str) else x for x in v]

    @field_validator("portfolio")
    @classmethod
    def check_portfolio(cls, v: List[AcquisitionKind]) -> List[AcquisitionKind]:
        if not v:
            raise ValueError("portfolio must not be empty")
        if len(set(v)) != len(v):
            raise ValueError("portfolio entries must be unique")
        if AcquisitionKind.UCB not in v:
            raise ValueError("portfolio must contain UCB")
        return v

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "OptimizerConfig":
        try:
            return cls.model_validate(data)
        except ValidationError as e:
            raise ConfigError(f"Invalid optimizer config: {e}")


@dataclass
class ParetoSet:
    """Mutually non-dominated points with their objective vectors"""

    points: List[MixedVector]
    values: np.ndarray

    def to_dict(self) -> Dict[str, Any]:
        return {
            "points": [p.to_dict() for p in self.points],
            "values": np.asarray(self.values).tolist(),
        }


@dataclass
class PendingAsk:
    points: List[MixedVector]
    nominees: Optional[List[List[MixedVector]]] = None
    trace: Dict[str, Any] = field(default_factory=dict)

    @property
    def initial(self) -> bool:
        return self.nominees is None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "points": [p.to_dict() for p in self.points],
            "nominees": (
                None
                if self.nominees is None
                else [[p.to_dict() for p in row] for row in self.nominees]
            ),
            "trace": self.trace,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "PendingAsk":
        nominees = data.get("nominees")
        return cls(
            [MixedVector.from_dict(p) for p in data["points"]],
            None if nominees is None else [[MixedVector.from_dict(p) for p in r] for r in nominees],
            data.get("trace", {}),
        )


@dataclass
class OptimizerState:
    dataset: Dataset
    history: NomineeHistory
    rng: np.random.Generator
    epoch: int = 0
    pending: Optional[PendingAsk] = None
    traces: List[Dict[str, Any]] = field(default_factory=list)


def initial_design(s: MixedSpace, n_init: int, rng: np.random.Generator) -> List[MixedVector]:
    return [sample_uniform(s, rng) for _ in range(n_init)]


def evaluate_points(f: BlackBox, points: Sequence[MixedVector]) -> np.ndarray:
    """
    Evaluate the black box at each point
    Args:
        f: Black-box function returning a scalar or a K-vector
        points: Points to evaluate
    Returns:
        Array of shape (len(points), K)
    """
    rows = []
    for point in points:
        try:
            value = np.atleast_1d(np.asarray(f(point), dtype=float))
        except Exception as e:
            raise EvaluationError(f"Black-box evaluation failed at {point}: {e}", point=point)
        rows.append(value)
    if len({len(r) for r in rows}) > 1:
        raise DimensionMismatchError("Black box returned objective vectors of varying length")
    return np.vstack(rows)


def initialize_dataset(
    f: BlackBox, s: MixedSpace, n_init: int, rng: np.random.Generator
) -> Dataset:
    """Sample n_init uniform points and evaluate them"""
    points = initial_design(s, n_init, rng)
    return Dataset().append(points, evaluate_points(f, points))


def _too_close(
    candidate: MixedVector, others: Sequence[MixedVector], s: MixedSpace, tol: float
) -> bool:
    if not others:
        return False
    a = encode_points([candidate], s)
    b = encode_points(others, s)
    numeric = np.abs(a[0] - b[0])
    hamming = (a[1] != b[1]).astype(float)
    distances = np.sqrt(np.sum(numeric**2, axis=1) + np.sum(hamming, axis=1))
    return bool(np.any(distances < tol))


def dedup_mutate(
    batch: Sequence[MixedVector],
    dataset: Optional[Dataset],
    s: MixedSpace,
    beta: float,
    tol: float,
    rng: np.random.Generator,
    max_retries: int = 100,
) -> List[MixedVector]:
    """
    Mutate batch members that sit within tol of an earlier member or a known point
    Args:
        batch: Proposed points
        dataset: Observed data to keep clear of (None for batch-only checks)
        s: Design space
        beta: Mutation rate
        tol: L2 tolerance in normalized distance units (strict: distance < tol triggers)
        rng: Random stream
        max_retries: Mutation attempts before accepting a point as-is
    Returns:
        Deduplicated batch of the same length
    """
    if tol <= 0:
        return list(batch)
    known = list(dataset.points) if dataset is not None else []
    accepted: List[MixedVector] = []
    for point in batch:
        candidate = point
        retries = 0
        while _too_close(candidate, accepted + known, s, tol):
            if retries >= max_retries:
                logger.warning(
                    f"Dedup retries exhausted after {max_retries} mutations, accepting {candidate}"
                )
                break
            candidate = mutate_point(point, s, beta, rng)
            retries += 1
        accepted.append(candidate)
    return accepted


def extract_pareto_set(d: Dataset) -> ParetoSet:
    """Non-dominated subset of the data (maximization), duplicates retained"""
    if d.size == 0:
        raise DimensionMismatchError("Cannot extract a Pareto set from an empty dataset")
    values = d.values()
    front = non_dominated_sort(values)[0]
    return ParetoSet([d.points[i] for i in front], values[front])


class MixMOBO:
    """Mixed-variable multi-objective Bayesian optimizer with an ask/tell interface"""

    def __init__(
        self,
        space: MixedSpace,
        config: Optional[OptimizerConfig] = None,
        state: Optional[OptimizerState] = None,
    ):
        """
        Initialize MixMOBO
        Args:
            space: Design space
            config: Loop settings (defaults used when omitted)
            state: Restored state; a fresh one is seeded from config.seed otherwise
        """
        self.space = space
        self.config = config or OptimizerConfig()
        self.portfolio = [kind.value for kind in self.config.portfolio]
        self.hedge = HedgeMO(self.portfolio, eta=self.config.eta)
        self.state = state or OptimizerState(
            Dataset(), NomineeHistory(list(self.portfolio)), make_rng(self.config.seed)
        )

    @property
    def dataset(self) -> Dataset:
        return self.state.dataset

    @property
    def finished(self) -> bool:
        return self.state.epoch >= self.config.epochs

    @property
    def n_evaluations(self) -> int:
        return self.state.dataset.size

    def _dedup(self, batch: Sequence[MixedVector]) -> List[MixedVector]:
        cfg = self.config
        return dedup_mutate(
            batch,
            self.state.dataset if cfg.dedup_against_dataset else None,
            self.space,
            cfg.mutation_rate,
            cfg.dedup_tolerance,
            self.state.rng,
            cfg.dedup_retries,
        )

    def propose_batch(self) -> Tuple[List[MixedVector], List[List[MixedVector]], Dict[str, Any]]:
        """
        Fit the surrogate, nominate Q points per acquisition and hedge between them
        Returns:
            Tuple of (selected batch, L x Q nominees, decision trace)
        """
        cfg = self.config
        rng = self.state.rng
        data = self.state.dataset
        q = cfg.batch_size

        try:
            hp = fit_hyperparams(data, self.space, cfg.hyperparams, rng)
            model = fit_gp(data, self.space, hp)
        except FactorizationError as e:
            logger.warning(f"GP fit failed ({e}), falling back to uniform random proposals")
            batch = self._dedup(initial_design(self.space, q, rng))
            trace = {"fallback": True, "chosen": ["random"] * q}
            return batch, [list(batch) for _ in self.portfolio], trace

        params = AcquisitionParams(tuple(data.best_values()), cfg.ucb_kappa, cfg.xi)
        nominees = []
        for kind in cfg.portfolio:
            ga_rng = make_rng(derive_seed(rng))
            points = optimize_acquisition(model, kind, params, self.space, q, cfg.ga, ga_rng)
            nominees.append(list(points))

        selected, trace = self.hedge.select(model, self.state.history, nominees, rng)
        batch = self._dedup(selected)
        # history records the evaluated points in the slots they were drawn from
        for q, name in enumerate(trace["chosen"]):
            nominees[self.portfolio.index(name)][q] = batch[q]
        return batch, nominees, trace

    def ask(self) -> List[MixedVector]:
        """
        Propose the next points to evaluate
        Returns:
            The n_init initial design on an empty dataset, otherwise a Q-batch
        """
        if self.state.pending is not None:
            raise ProtocolError("ask called twice without tell")
        if self.state.dataset.size == 0:
            points = initial_design(self.space, self.config.n_init, self.state.rng)
            self.state.pending = PendingAsk(points)
        else:
            points, nominees, trace = self.propose_batch()
            self.state.pending = PendingAsk(points, nominees, trace)
        return list(points)

    def tell(self, points: Sequence[MixedVector], values: Any) -> None:
        """
        Report observed objective vectors for the outstanding ask
        Args:
            points: Exactly the asked points, in order
            values: Objective vectors, shape (len(points), K)
        """
        pending = self.state.pending
        if pending is None:
            raise ProtocolError("tell called without an outstanding ask")
        if list(points) != pending.points:
            raise PointMismatchError("Told points differ from the asked points")
        values = np.asarray(values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        if values.shape[0] != len(points):
            raise DimensionMismatchError(f"{len(points)} points but {values.shape[0]} value rows")
        if self.state.dataset.size and values.shape[1] != self.state.dataset.n_objectives:
            raise DimensionMismatchError(
                f"Expected {self.state.dataset.n_objectives} objectives, got {values.shape[1]}"
            )

        self.state.dataset = self.state.dataset.append(points, values)
        if not pending.initial:
            self.state.history.add_epoch(pending.nominees)
            self.state.epoch += 1
            self.state.traces.append(pending.trace)
            logger.info(
                f"Epoch {self.state.epoch}: probabilities={pending.trace.get('probabilities')} "
                f"chosen={pending.trace.get('chosen')} "
                f"points={[p.to_dict() for p in points]} values={values.tolist()}"
            )
        else:
            logger.info(f"Initial design of {len(points)} points recorded")
        self.state.pending = None

    def _evaluate_pending(self, f: BlackBox) -> None:
        rng_state = rng_to_state(self.state.rng)
        points = self.ask()
        try:
            values = evaluate_points(f, points)
        except Exception:
            self.state.pending = None
            self.state.rng = rng_from_state(rng_state)
            raise
        self.tell(points, values)

    def initialize_dataset(self, f: BlackBox) -> Dataset:
        """Evaluate the initial design if the dataset is still empty"""
        if self.state.dataset.size == 0:
            self._evaluate_pending(f)
        return self.state.dataset

    def run_epoch(self, f: BlackBox) -> OptimizerState:
        """One fit-nominate-hedge-evaluate cycle; state is unchanged if evaluation fails"""
        if self.state.dataset.size == 0:
            raise ProtocolError("Initialize the dataset before running epochs")
        self._evaluate_pending(f)
        return self.state

    def run(self, f: BlackBox, callback: Optional[Callable[["MixMOBO"], None]] = None) -> ParetoSet:
        """
        Run the full loop: initial design, then the configured number of epochs
        Args:
            f: Black-box function
            callback: Called after the initial design and after every epoch
        Returns:
            Pareto set of the observed data
        """
        self.initialize_dataset(f)
        if callback:
            callback(self)
        while not self.finished:
            self.run_epoch(f)
            if callback:
                callback(self)
        return self.pareto_set()

    def pareto_set(self) -> ParetoSet:
        return extract_pareto_set(self.state.dataset)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "space": self.space.to_dict(),
            "config": self.config.model_dump(mode="json"),
            "dataset": self.state.dataset.to_dict(),
            "history": self.state.history.to_dict(),
            "epoch": self.state.epoch,
            "rng_state": rng_to_state(self.state.rng),
            "pending_ask": None if self.state.pending is None else self.state.pending.to_dict(),
            "traces": self.state.traces,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "MixMOBO":
        if data.get("schema_version") != SCHEMA_VERSION:
            raise ConfigError(
                f"Unsupported state schema_version {data.get('schema_version')!r}, "
                f"expected {SCHEMA_VERSION}"
            )
        try:
            space = MixedSpace.from_dict(data["space"])
            config = OptimizerConfig.from_dict(data["config"])
            pending = data.get("pending_ask")
            state = OptimizerState(
                Dataset.from_dict(data["dataset"]),
                NomineeHistory.from_dict(data["history"]),
                rng_from_state(data["rng_state"]),
                int(data["epoch"]),
                None if pending is None else PendingAsk.from_dict(pending),
                list(data.get("traces", [])),
            )
        except KeyError as e:
            raise ConfigError(f"State document is missing key {e}")
        return cls(space, config, state)

    def save_state(self, path: str) -> None:
        save_json(self.to_dict(), path)

    @classmethod
    def load_state(cls, path: str) -> "MixMOBO":
        return cls.from_dict(load_json(path))
