import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.stats import norm

from .exceptions import ConfigError, DimensionMismatchError
from .space import MixedVector
from .surrogate import GpModel, gp_predict_batch

logger = logging.getLogger(__name__)


class AcquisitionKind(str, Enum):
    EI = "EI"
    PI = "PI"
    UCB = "UCB"
    SMC = "SMC"

    @classmethod
    def parse(cls, name: str) -> "AcquisitionKind":
        try:
            return cls(name.strip().upper())
        except ValueError:
            raise ConfigError(f"Unknown acquisition '{name}', expected one of EI, PI, UCB, SMC")

    @property
    def is_stochastic(self) -> bool:
        return self is AcquisitionKind.SMC


@dataclass(frozen=True)
class AcquisitionParams:
    """UCB kappa, EI/PI jitter xi and per-objective incumbents"""

    incumbents: Tuple[float, ...]
    ucb_kappa: float = 2.0
    pi_ei_xi: float = 0.01

    def __post_init__(self):
        object.__setattr__(self, "incumbents", tuple(float(v) for v in self.incumbents))
        if self.ucb_kappa <= 0:
            raise ConfigError("ucb_kappa must be positive")
        if self.pi_ei_xi < 0:
            raise ConfigError("xi must be nonnegative")


def _improvement(mean: np.ndarray, incumbents: Sequence[float], xi: float) -> np.ndarray:
    incumbents = np.asarray(incumbents, dtype=float)
    if mean.shape[-1] != incumbents.shape[0]:
        raise DimensionMismatchError(
            f"{incumbents.shape[0]} incumbents for {mean.shape[-1]} objectives"
        )
    return mean - incumbents - xi


def ei_from_moments(
    mean: np.ndarray, sigma: np.ndarray, incumbents: Sequence[float], xi: float
) -> np.ndarray:
    """
    Expected improvement per objective (maximization)
    Args:
        mean: Posterior means, shape (..., K)
        sigma: Posterior standard deviations, shape (..., K) or broadcastable
        incumbents: Best observed value per objective
        xi: Exploration jitter
    Returns:
        EI values, shape (..., K), all >= 0
    """
    mean = np.asarray(mean, dtype=float)
    sigma = np.broadcast_to(np.asarray(sigma, dtype=float), mean.shape)
    delta = _improvement(mean, incumbents, xi)
    out = np.maximum(delta, 0.0)
    pos = sigma > 0
    z = delta[pos] / sigma[pos]
    out[pos] = delta[pos] * norm.cdf(z) + sigma[pos] * norm.pdf(z)
    return np.maximum(out, 0.0)


def pi_from_moments(
    mean: np.ndarray, sigma: np.ndarray, incumbents: Sequence[float], xi: float
) -> np.ndarray:
    """Probability of improvement per objective; an indicator where sigma is 0"""
    mean = np.asarray(mean, dtype=float)
    sigma = np.broadcast_to(np.asarray(sigma, dtype=float), mean.shape)
    delta = _improvement(mean, incumbents, xi)
    out = (delta > 0).astype(float)
    pos = sigma > 0
    out[pos] = norm.cdf(delta[pos] / sigma[pos])
    return out


def ucb_from_moments(mean: np.ndarray, sigma: np.ndarray, kappa: float) -> np.ndarray:
    return np.asarray(mean, dtype=float) + kappa * np.asarray(sigma, dtype=float)


def smc_from_moments(mean: np.ndarray, sigma: np.ndarray, unit_draws: np.ndarray) -> np.ndarray:
    """
    Stochastic Monte-Carlo score mu + r with r ~ U(0, 2 sigma)
    Args:
        mean: Posterior means, shape (N, K)
        sigma: Standard deviations, shape (N, K)
        unit_draws: One U(0, 1) draw per point, shape (N,), shared across objectives
    Returns:
        Scores, shape (N, K)
    """
    return np.asarray(mean) + 2.0 * np.asarray(unit_draws)[:, None] * np.asarray(sigma)


def posterior_moments(m: GpModel, points: Sequence[MixedVector]) -> Tuple[np.ndarray, np.ndarray]:
    """Per-objective mean and standard deviation on the original objective scale"""
    mean, variance = gp_predict_batch(m, points)
    sigma = np.sqrt(variance)[:, None] * m.y_std[None, :]
    return mean, sigma


def evaluate_acquisition(
    kind: AcquisitionKind,
    m: GpModel,
    points: Sequence[MixedVector],
    p: AcquisitionParams,
    rng: Optional[np.random.Generator] = None,
) -> np.ndarray:
    """
    Score a batch of points with one acquisition function
    Args:
        kind: Acquisition to apply
        m: Fitted surrogate
        points: Candidate points
        p: Acquisition parameters
        rng: Random stream, required for SMC
    Returns:
        Array of shape (len(points), K)
    """
    mean, sigma = posterior_moments(m, points)
    if kind is AcquisitionKind.EI:
        return ei_from_moments(mean, sigma, p.incumbents, p.pi_ei_xi)
    if kind is AcquisitionKind.PI:
        return pi_from_moments(mean, sigma, p.incumbents, p.pi_ei_xi)
    if kind is AcquisitionKind.UCB:
        return ucb_from_moments(mean, sigma, p.ucb_kappa)
    if rng is None:
        raise ConfigError("SMC acquisition needs a random stream")
    return smc_from_moments(mean, sigma, rng.random(len(points)))


def acq_ei(m: GpModel, w: MixedVector, p: AcquisitionParams) -> np.ndarray:
    return evaluate_acquisition(AcquisitionKind.EI, m, [w], p)[0]


def acq_pi(m: GpModel, w: MixedVector, p: AcquisitionParams) -> np.ndarray:
    return evaluate_acquisition(AcquisitionKind.PI, m, [w], p)[0]


def acq_ucb(m: GpModel, w: MixedVector, p: AcquisitionParams) -> np.ndarray:
    return evaluate_acquisition(AcquisitionKind.UCB, m, [w], p)[0]


def acq_smc(m: GpModel, w: MixedVector, rng: np.random.Generator) -> np.ndarray:
    mean, sigma = posterior_moments(m, [w])
    return smc_from_moments(mean, sigma, rng.random(1))[0]
