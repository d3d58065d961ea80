import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field, field_validator
from scipy.linalg import LinAlgError, cho_solve, cholesky, solve_triangular

from .exceptions import DimensionMismatchError, FactorizationError, SpaceError
from .space import MixedSpace, MixedVector, encode_points, pairwise_distance_tensor

logger = logging.getLogger(__name__)

JITTER_LADDER = (1e-10, 1e-9, 1e-8, 1e-7, 1e-6)


@dataclass(frozen=True)
class KernelHyperparams:
    """Lengthscales h (M = diag(h)^-2), signal amplitude eps_f and noise variance"""

    lengthscales: Tuple[float, ...]
    signal_amplitude: float = 1.0
    noise_variance: float = 1e-6

    def __post_init__(self):
        object.__setattr__(self, "lengthscales", tuple(float(h) for h in self.lengthscales))
        if not self.lengthscales or any(h <= 0 for h in self.lengthscales):
            raise SpaceError("Kernel lengthscales must all be positive")
        if self.signal_amplitude <= 0:
            raise SpaceError("Signal amplitude must be positive")
        if self.noise_variance < 0:
            raise SpaceError("Noise variance must be nonnegative")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "lengthscales": list(self.lengthscales),
            "signal_amplitude": self.signal_amplitude,
            "noise_variance": self.noise_variance,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "KernelHyperparams":
        return cls(
            tuple(data["lengthscales"]),
            float(data["signal_amplitude"]),
            float(data["noise_variance"]),
        )


class HyperparamSearch(BaseModel):
    """Budgeted log-uniform random search over kernel hyperparameters"""

    n_candidates: int = Field(64, ge=1, description="Number of sampled candidates")
    lengthscale_bounds: Tuple[float, float] = (1e-2, 1e1)
    amplitude_bounds: Tuple[float, float] = (1e-1, 1e1)
    noise_bounds: Tuple[float, float] = (1e-6, 1e-1)

    @field_validator("lengthscale_bounds", "amplitude_bounds", "noise_bounds")
    @classmethod
    def check_bounds(cls, v: Tuple[float, float]) -> Tuple[float, float]:
        if not 0 < v[0] <= v[1]:
            raise ValueError(f"bounds must satisfy 0 < lower <= upper, got {v}")
        return v

    def defaults(self, dimension: int) -> KernelHyperparams:
        """Mid-range (geometric mean) hyperparameters"""
        return KernelHyperparams(
            tuple([float(np.sqrt(np.prod(self.lengthscale_bounds)))] * dimension),
            float(np.sqrt(np.prod(self.amplitude_bounds))),
            float(np.sqrt(np.prod(self.noise_bounds))),
        )


@dataclass
class Dataset:
    """Observed points with their objective values (objectives is K x n)"""

    points: List[MixedVector] = field(default_factory=list)
    objectives: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))

    def __post_init__(self):
        self.objectives = np.ascontiguousarray(self.objectives, dtype=float)
        if self.objectives.ndim != 2:
            raise DimensionMismatchError("Objectives must be a K x n matrix")
        if self.points and self.objectives.shape[1] != len(self.points):
            raise DimensionMismatchError(
                f"{len(self.points)} points but {self.objectives.shape[1]} objective columns"
            )

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def n_objectives(self) -> int:
        return self.objectives.shape[0]

    def values(self) -> np.ndarray:
        """Objective vectors as an n x K array"""
        return self.objectives.T

    def append(self, points: Sequence[MixedVector], values: np.ndarray) -> "Dataset":
        """
        Return a new dataset with extra observations
        Args:
            points: New points
            values: Objective vectors, shape (len(points), K)
        Returns:
            Extended dataset
        """
        values = np.atleast_2d(np.asarray(values, dtype=float))
        if values.shape[0] != len(points):
            raise DimensionMismatchError(f"{len(points)} points but {values.shape[0]} value rows")
        if self.size and values.shape[1] != self.n_objectives:
            raise DimensionMismatchError(
                f"Expected {self.n_objectives} objectives per point, got {values.shape[1]}"
            )
        if self.size == 0:
            return Dataset(list(points), values.T.copy())
        return Dataset(self.points + list(points), np.hstack([self.objectives, values.T]))

    def best_values(self) -> np.ndarray:
        """Per-objective best observed value (maximization)"""
        return self.objectives.max(axis=1)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "points": [p.to_dict() for p in self.points],
            "values": self.values().tolist(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Dataset":
        points = [MixedVector.from_dict(p) for p in data.get("points", [])]
        if not points:
            return cls()
        return cls(points, np.asarray(data["values"], dtype=float).T)


@dataclass
class GpModel:
    """Fitted multi-objective GP sharing one kernel and one factorization"""

    space: MixedSpace
    hyperparams: KernelHyperparams
    points: List[MixedVector]
    encoded: Tuple[np.ndarray, np.ndarray]
    chol: np.ndarray
    weights: np.ndarray  # n x K, factor-solved standardized targets
    y_mean: np.ndarray
    y_std: np.ndarray
    jitter: float = 0.0

    @property
    def n_objectives(self) -> int:
        return self.weights.shape[1]

    def standardize(self, values: np.ndarray) -> np.ndarray:
        return (np.asarray(values, dtype=float) - self.y_mean) / self.y_std

    def unstandardize(self, values: np.ndarray) -> np.ndarray:
        return np.asarray(values, dtype=float) * self.y_std + self.y_mean


def kernel_from_distances(dist: np.ndarray, hp: KernelHyperparams) -> np.ndarray:
    """Modified squared exponential eps_f^2 exp(-0.5 d^T M d) over a distance tensor"""
    inv_h2 = 1.0 / np.square(np.asarray(hp.lengthscales))
    quad = np.square(dist) @ inv_h2
    return hp.signal_amplitude**2 * np.exp(-0.5 * quad)


def kernel_eval(w: MixedVector, w2: MixedVector, s: MixedSpace, hp: KernelHyperparams) -> float:
    dist = pairwise_distance_tensor(encode_points([w], s), encode_points([w2], s))
    return float(kernel_from_distances(dist, hp)[0, 0])


def _factorize(cov: np.ndarray, noise_variance: float) -> Tuple[np.ndarray, float]:
    """Cholesky of cov + (noise + jitter) I, walking the jitter ladder on failure"""
    eye = np.eye(cov.shape[0])
    for jitter in JITTER_LADDER:
        try:
            chol = cholesky(cov + (noise_variance + jitter) * eye, lower=True)
            return chol, jitter
        except LinAlgError:
            logger.debug(f"Cholesky failed with jitter {jitter:g}, increasing")
    raise FactorizationError(
        f"Covariance not positive definite after jitter {JITTER_LADDER[-1]:g} (degenerate data)"
    )


def _target_transform(objectives: np.ndarray, standardize: bool) -> Tuple[np.ndarray, np.ndarray]:
    """Per-objective mean and scale used to standardize targets"""
    n_obj = objectives.shape[0]
    if not standardize:
        return np.zeros(n_obj), np.ones(n_obj)
    mean = objectives.mean(axis=1)
    std = objectives.std(axis=1)
    std = np.where(std < 1e-12, 1.0, std)
    return mean, std


def fit_gp(
    d: Dataset, s: MixedSpace, hp: KernelHyperparams, standardize: bool = True
) -> GpModel:
    """
    Fit one GP surface for all K objectives
    Args:
        d: Observed data (n >= 1)
        s: Design space
        hp: Kernel hyperparameters
        standardize: Standardize each objective before fitting (zero prior mean either way)
    Returns:
        Fitted GpModel
    """
    if d.size == 0:
        raise DimensionMismatchError("Cannot fit a GP to an empty dataset")
    if len(hp.lengthscales) != s.dimension:
        raise DimensionMismatchError(
            f"{len(hp.lengthscales)} lengthscales for a {s.dimension}-dimensional space"
        )
    encoded = encode_points(d.points, s)
    cov = kernel_from_distances(pairwise_distance_tensor(encoded, encoded), hp)
    chol, jitter = _factorize(cov, hp.noise_variance)

    y_mean, y_std = _target_transform(d.objectives, standardize)
    targets = ((d.objectives.T - y_mean) / y_std)  # n x K
    weights = cho_solve((chol, True), targets)
    return GpModel(s, hp, list(d.points), encoded, chol, weights, y_mean, y_std, jitter)


def predict_standardized_batch(
    m: GpModel, points: Sequence[MixedVector]
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Posterior in standardized target units
    Args:
        m: Fitted model
        points: Query points
    Returns:
        Tuple of (mean array len(points) x K, shared variance array len(points))
    """
    query = encode_points(points, m.space)
    k_star = kernel_from_distances(pairwise_distance_tensor(query, m.encoded), m.hyperparams)
    mean = k_star @ m.weights
    v = solve_triangular(m.chol, k_star.T, lower=True)
    prior = m.hyperparams.signal_amplitude**2
    variance = np.maximum(prior - np.sum(v * v, axis=0), 0.0)
    return mean, variance


def gp_predict_batch(m: GpModel, points: Sequence[MixedVector]) -> Tuple[np.ndarray, np.ndarray]:
    """Posterior mean on the original objective scale and the shared standardized variance"""
    mean, variance = predict_standardized_batch(m, points)
    return m.unstandardize(mean), variance


def gp_predict(m: GpModel, w: MixedVector) -> Tuple[np.ndarray, float]:
    mean, variance = gp_predict_batch(m, [w])
    return mean[0], float(variance[0])


def _loocv_from_distances(
    dist: np.ndarray, targets: np.ndarray, hp: KernelHyperparams
) -> float:
    """Closed-form leave-one-out mean squared error (targets n x K)"""
    chol, _ = _factorize(kernel_from_distances(dist, hp), hp.noise_variance)
    inv = cho_solve((chol, True), np.eye(dist.shape[0]))
    alpha = inv @ targets
    residuals = alpha / np.diag(inv)[:, None]
    return float(np.mean(np.square(residuals)))


def loocv_score(
    d: Dataset, s: MixedSpace, hp: KernelHyperparams, standardize: bool = True
) -> float:
    """
    Leave-one-out squared prediction error, averaged over points and objectives
    Args:
        d: Observed data (n >= 2)
        s: Design space
        hp: Candidate hyperparameters
        standardize: Score in standardized target units (transform from the full data)
    Returns:
        Mean squared held-out error; lower is better
    """
    if d.size < 2:
        raise DimensionMismatchError("LOOCV needs at least two points")
    encoded = encode_points(d.points, s)
    y_mean, y_std = _target_transform(d.objectives, standardize)
    targets = (d.objectives.T - y_mean) / y_std
    return _loocv_from_distances(pairwise_distance_tensor(encoded, encoded), targets, hp)


def _log_uniform(rng: np.random.Generator, bounds: Tuple[float, float], size=None):
    lo, hi = np.log(bounds[0]), np.log(bounds[1])
    return np.exp(rng.uniform(lo, hi, size=size))


def fit_hyperparams(
    d: Dataset,
    s: MixedSpace,
    search: Optional[HyperparamSearch] = None,
    rng: Optional[np.random.Generator] = None,
    standardize: bool = True,
) -> KernelHyperparams:
    """
    Pick kernel hyperparameters by LOOCV over a log-uniform random search
    Args:
        d: Observed data
        s: Design space
        search: Search budget and bounds
        rng: Random stream (candidates are fully determined by it)
        standardize: Passed through to the LOOCV score
    Returns:
        Best-scoring candidate, or mid-range defaults if none could be factorized
    """
    search = search or HyperparamSearch()
    rng = rng if rng is not None else np.random.default_rng()
    if d.size < 2:
        logger.debug("Fewer than two points, using default hyperparameters")
        return search.defaults(s.dimension)

    encoded = encode_points(d.points, s)
    dist = pairwise_distance_tensor(encoded, encoded)
    y_mean, y_std = _target_transform(d.objectives, standardize)
    targets = (d.objectives.T - y_mean) / y_std

    best: Optional[KernelHyperparams] = None
    best_score = np.inf
    for _ in range(search.n_candidates):
        candidate = KernelHyperparams(
            tuple(_log_uniform(rng, search.lengthscale_bounds, size=s.dimension)),
            float(_log_uniform(rng, search.amplitude_bounds)),
            float(_log_uniform(rng, search.noise_bounds)),
        )
        try:
            score = _loocv_from_distances(dist, targets, candidate)
        except FactorizationError:
            continue
        if score < best_score:
            best, best_score = candidate, score

    if best is None:
        logger.warning("All hyperparameter candidates failed to factorize, using defaults")
        return search.defaults(s.dimension)
    logger.debug(f"LOOCV best score {best_score:.6g}")
    return best
