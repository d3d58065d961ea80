import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence, Tuple, Union

import numpy as np
from scipy.special import softmax

from .exceptions import ConfigError, DimensionMismatchError
from .space import MixedVector
from .surrogate import GpModel, gp_predict_batch

logger = logging.getLogger(__name__)


@dataclass
class NomineeHistory:
    """Nominated points per epoch, per acquisition function, per batch slot"""

    acquisitions: List[str]
    epochs: List[List[List[MixedVector]]] = field(default_factory=list)

    @property
    def n_epochs(self) -> int:
        return len(self.epochs)

    def add_epoch(self, nominees: Sequence[Sequence[MixedVector]]) -> None:
        """
        Record one epoch of nominees
        Args:
            nominees: L lists of Q points, in portfolio order
        """
        if len(nominees) != len(self.acquisitions):
            raise DimensionMismatchError(
                f"Expected nominees from {len(self.acquisitions)} acquisitions, got {len(nominees)}"
            )
        batch = len(nominees[0])
        if any(len(row) != batch for row in nominees) or (
            self.epochs and batch != len(self.epochs[0][0])
        ):
            raise DimensionMismatchError("Nominee history must stay rectangular (L x Q per epoch)")
        self.epochs.append([list(row) for row in nominees])

    def flat_points(self) -> List[MixedVector]:
        return [pt for epoch in self.epochs for row in epoch for pt in row]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "acquisitions": list(self.acquisitions),
            "epochs": [[[pt.to_dict() for pt in row] for row in epoch] for epoch in self.epochs],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "NomineeHistory":
        history = cls(list(data["acquisitions"]))
        for epoch in data.get("epochs", []):
            history.add_epoch([[MixedVector.from_dict(pt) for pt in row] for row in epoch])
        return history


@dataclass
class HedgeState:
    eta: float
    gains: np.ndarray
    probabilities: np.ndarray


def compute_rewards(m: GpModel, h: NomineeHistory) -> np.ndarray:
    """
    Re-score every historical nominee with the current posterior mean
    Args:
        m: Surrogate fitted on all data so far
        h: Nominee history
    Returns:
        Rewards tensor of shape (epochs, L, Q, K)
    """
    n_acq = len(h.acquisitions)
    if h.n_epochs == 0:
        return np.zeros((0, n_acq, 0, m.n_objectives))
    batch = len(h.epochs[0][0])
    mean, _ = gp_predict_batch(m, h.flat_points())
    return mean.reshape(h.n_epochs, n_acq, batch, m.n_objectives)


def normalize_gains(rewards: np.ndarray) -> np.ndarray:
    """
    Per-objective min-max normalized rewards summed per acquisition
    Args:
        rewards: Tensor (epochs, L, Q, K)
    Returns:
        Gains matrix (L, K); an objective with zero reward range contributes 0
    """
    rewards = np.asarray(rewards, dtype=float)
    n_acq, n_obj = rewards.shape[1], rewards.shape[3]
    if rewards.size == 0:
        return np.zeros((n_acq, n_obj))
    lo = rewards.min(axis=(0, 1, 2))
    span = rewards.max(axis=(0, 1, 2)) - lo
    safe = np.where(span > 0, span, 1.0)
    normalized = np.where(span > 0, (rewards - lo) / safe, 0.0)
    return normalized.sum(axis=(0, 2))


def selection_probabilities(gains: np.ndarray, eta: float) -> np.ndarray:
    """Softmax of eta times the per-acquisition gain summed over objectives"""
    if eta <= 0:
        raise ConfigError("eta must be positive")
    return softmax(eta * np.asarray(gains, dtype=float).sum(axis=1))


def select_indices(probs: np.ndarray, q_total: int, rng: np.random.Generator) -> List[int]:
    """Draw one acquisition index per batch slot"""
    return [int(rng.choice(len(probs), p=probs)) for _ in range(q_total)]


def select_batch(
    nominees: Sequence[Sequence[MixedVector]],
    probs: np.ndarray,
    q_total: int,
    rng: np.random.Generator,
    return_indices: bool = False,
) -> Union[List[MixedVector], Tuple[List[MixedVector], List[int]]]:
    """
    Pick each slot's point from an acquisition drawn with the hedge probabilities
    Args:
        nominees: L lists of Q nominated points for the current epoch
        probs: Selection probabilities, length L
        q_total: Number of slots Q
        rng: Random stream
        return_indices: Also return the acquisition index drawn for each slot
    Returns:
        Selected batch of Q points (and the drawn indices when requested)
    """
    chosen = select_indices(probs, q_total, rng)
    batch = [nominees[a][q] for q, a in enumerate(chosen)]
    if return_indices:
        return batch, chosen
    return batch


class HedgeMO:
    """Multi-objective hedging over a portfolio of acquisition functions"""

    def __init__(self, acquisitions: Sequence[str], eta: float = 1.0):
        """
        Initialize HedgeMO
        Args:
            acquisitions: Portfolio names, in nominee order
            eta: Softmax learning rate
        """
        if eta <= 0:
            raise ConfigError("eta must be positive")
        self.acquisitions = list(acquisitions)
        self.eta = eta

    def state(self, m: GpModel, history: NomineeHistory) -> HedgeState:
        """Gains and probabilities from the whole history (uniform when empty)"""
        if history.n_epochs == 0:
            n_acq = len(self.acquisitions)
            uniform = np.full(n_acq, 1 / n_acq)
            return HedgeState(self.eta, np.zeros((n_acq, m.n_objectives)), uniform)
        gains = normalize_gains(compute_rewards(m, history))
        return HedgeState(self.eta, gains, selection_probabilities(gains, self.eta))

    def select(
        self,
        m: GpModel,
        history: NomineeHistory,
        nominees: Sequence[Sequence[MixedVector]],
        rng: np.random.Generator,
    ) -> Tuple[List[MixedVector], Dict[str, Any]]:
        """
        Select the epoch's batch
        Args:
            m: Current surrogate
            history: Nominees of previous epochs
            nominees: This epoch's L x Q nominees
            rng: Random stream
        Returns:
            Tuple of (selected points, decision trace)
        """
        state = self.state(m, history)
        q_total = len(nominees[0])
        batch, chosen = select_batch(
            nominees, state.probabilities, q_total, rng, return_indices=True
        )
        trace = {
            "probabilities": dict(zip(self.acquisitions, state.probabilities.tolist())),
            "chosen": [self.acquisitions[a] for a in chosen],
        }
        return batch, trace
