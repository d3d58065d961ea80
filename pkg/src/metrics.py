import logging
from typing import List, Sequence

import numpy as np

from .exceptions import DegenerateMetricError
from .moga import non_dominated_sort
from .space import MixedVector

logger = logging.getLogger(__name__)

DEGENERATE_TOLERANCE = 1e-12


def normalized_reward(current_best: float, random_best: float, global_best: float) -> float:
    """
    Progress from the random-sampling optimum towards the global optimum
    Args:
        current_best: Best value found so far
        random_best: Random-sampling optimum at the same budget
        global_best: Global optimum
    Returns:
        (current - random) / (global - random)
    """
    denominator = global_best - random_best
    if abs(denominator) < DEGENERATE_TOLERANCE:
        raise DegenerateMetricError(
            f"Global optimum {global_best} equals the random-sampling optimum {random_best}"
        )
    return float((current_best - random_best) / denominator)


def normalized_reward_curve(
    current: Sequence[float], random_best: float, global_best: float
) -> np.ndarray:
    """Vectorized normalized_reward over a trajectory"""
    denominator = global_best - random_best
    if abs(denominator) < DEGENERATE_TOLERANCE:
        raise DegenerateMetricError(
            f"Global optimum {global_best} equals the random-sampling optimum {random_best}"
        )
    return (np.asarray(current, dtype=float) - random_best) / denominator


def best_so_far(values: Sequence[float]) -> np.ndarray:
    """Running maximum along the first axis (per objective for 2-D input)"""
    return np.maximum.accumulate(np.asarray(values, dtype=float), axis=0)


def hamming_distance(a: MixedVector, b: MixedVector) -> int:
    """Number of differing coordinates"""
    left = a.continuous_values + a.ordinal_indices + a.categorical_indices
    right = b.continuous_values + b.ordinal_indices + b.categorical_indices
    return int(sum(x != y for x, y in zip(left, right)))


def p_optimum(current_pareto: Sequence[MixedVector], global_pareto: Sequence[MixedVector]) -> float:
    """
    Mean over global Pareto points of exp(-distance to the nearest found point)
    Args:
        current_pareto: Pareto set found so far
        global_pareto: Known global Pareto set (nonempty)
    Returns:
        Value in [0, 1]; 1 when every global point was found, 0 for an empty found set
    """
    if not global_pareto:
        raise DegenerateMetricError("Global Pareto set is empty")
    if not current_pareto:
        return 0.0
    distances = np.array(
        [[hamming_distance(t, f) for f in current_pareto] for t in global_pareto], dtype=float
    )
    return float(np.mean(np.exp(-distances.min(axis=1))))


def pareto_trajectory(
    points: Sequence[MixedVector],
    values: np.ndarray,
    global_pareto: Sequence[MixedVector],
) -> np.ndarray:
    """
    P-optimum of the current Pareto front after each evaluation
    Args:
        points: Evaluated points in evaluation order
        values: Their objective vectors, shape (n, K)
        global_pareto: Known global Pareto set
    Returns:
        Array of length n, not monotone (best_so_far gives the running maximum)
    """
    values = np.asarray(values, dtype=float)
    front: List[int] = []
    trajectory = np.zeros(len(points))
    for t in range(len(points)):
        candidates = front + [t]
        first = non_dominated_sort(values[candidates])[0]
        front = [candidates[i] for i in first]
        trajectory[t] = p_optimum([points[i] for i in front], global_pareto)
    return trajectory
