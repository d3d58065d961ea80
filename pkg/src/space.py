import itertools
import logging
from dataclasses import dataclass
from typing import Any, Dict, Iterator, List, Sequence, Tuple

import numpy as np

from .exceptions import SpaceError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MixedVector:
    """One design point: continuous values, ordinal level indices, categorical indices"""

    continuous_values: Tuple[float, ...] = ()
    ordinal_indices: Tuple[int, ...] = ()
    categorical_indices: Tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(
            self, "continuous_values", tuple(float(v) for v in self.continuous_values)
        )
        object.__setattr__(self, "ordinal_indices", tuple(int(v) for v in self.ordinal_indices))
        object.__setattr__(
            self, "categorical_indices", tuple(int(v) for v in self.categorical_indices)
        )

    def to_dict(self) -> Dict[str, List[Any]]:
        return {
            "continuous": list(self.continuous_values),
            "ordinal": list(self.ordinal_indices),
            "categorical": list(self.categorical_indices),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "MixedVector":
        try:
            return cls(
                tuple(data.get("continuous", [])),
                tuple(data.get("ordinal", [])),
                tuple(data.get("categorical", [])),
            )
        except (TypeError, ValueError, AttributeError) as e:
            raise SpaceError(f"Malformed point document {data!r}: {e}")


@dataclass(frozen=True)
class MixedSpace:
    """
    Schema of a mixed design space
    Dimensions are ordered continuous, then ordinal, then categorical everywhere
    (distance vectors, kernel lengthscales, encoded matrices).
    """

    continuous_dims: Tuple[Tuple[float, float], ...] = ()
    ordinal_dims: Tuple[Tuple[float, ...], ...] = ()
    categorical_dims: Tuple[int, ...] = ()

    def __post_init__(self):
        continuous = tuple((float(lo), float(hi)) for lo, hi in self.continuous_dims)
        ordinal = tuple(tuple(float(v) for v in levels) for levels in self.ordinal_dims)
        categorical = tuple(int(c) for c in self.categorical_dims)
        object.__setattr__(self, "continuous_dims", continuous)
        object.__setattr__(self, "ordinal_dims", ordinal)
        object.__setattr__(self, "categorical_dims", categorical)

        for i, (lo, hi) in enumerate(continuous):
            if not lo < hi:
                raise SpaceError(f"Continuous dim {i}: lower {lo} must be < upper {hi}")
        for i, levels in enumerate(ordinal):
            if len(levels) < 2 or any(b <= a for a, b in zip(levels, levels[1:])):
                raise SpaceError(f"Ordinal dim {i} needs >= 2 strictly increasing levels")
        for i, c in enumerate(categorical):
            if c < 2:
                raise SpaceError(f"Categorical dim {i} needs cardinality >= 2, got {c}")
        if self.dimension < 1:
            raise SpaceError("Space must have at least one dimension")

    @property
    def n_continuous(self) -> int:
        return len(self.continuous_dims)

    @property
    def n_ordinal(self) -> int:
        return len(self.ordinal_dims)

    @property
    def n_categorical(self) -> int:
        return len(self.categorical_dims)

    @property
    def dimension(self) -> int:
        return self.n_continuous + self.n_ordinal + self.n_categorical

    @property
    def is_discrete(self) -> bool:
        return self.n_continuous == 0

    @property
    def grid_size(self) -> int:
        """Number of points in a fully discrete space"""
        if not self.is_discrete:
            raise SpaceError("Grid size is only defined for fully discrete spaces")
        size = 1
        for levels in self.ordinal_dims:
            size *= len(levels)
        for c in self.categorical_dims:
            size *= c
        return size

    def discrete_cardinalities(self) -> List[int]:
        return [len(levels) for levels in self.ordinal_dims] + list(self.categorical_dims)

    def enumerate_points(self) -> Iterator[MixedVector]:
        """Iterate over every point of a fully discrete space"""
        if not self.is_discrete:
            raise SpaceError("Only fully discrete spaces can be enumerated")
        for combo in itertools.product(*(range(c) for c in self.discrete_cardinalities())):
            yield MixedVector((), combo[: self.n_ordinal], combo[self.n_ordinal :])

    def to_dict(self) -> Dict[str, Any]:
        return {
            "continuous": [list(b) for b in self.continuous_dims],
            "ordinal": [list(levels) for levels in self.ordinal_dims],
            "categorical": list(self.categorical_dims),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "MixedSpace":
        """
        Build a space from its declarative JSON document
        Args:
            data: {"continuous": [[lo, hi]], "ordinal": [[levels]], "categorical": [C]}
        Returns:
            Validated MixedSpace
        """
        if not isinstance(data, dict):
            raise SpaceError("Space document must be a JSON object")
        unknown = set(data) - {"continuous", "ordinal", "categorical"}
        if unknown:
            raise SpaceError(f"Unknown space keys: {sorted(unknown)}")
        try:
            return cls(
                tuple(tuple(b) for b in data.get("continuous", [])),
                tuple(tuple(levels) for levels in data.get("ordinal", [])),
                tuple(data.get("categorical", [])),
            )
        except (TypeError, ValueError) as e:
            raise SpaceError(f"Malformed space document: {e}")


def validate_point(w: MixedVector, s: MixedSpace) -> bool:
    """True iff w has the right shape and every value lies within its dimension's range"""
    if (
        len(w.continuous_values) != s.n_continuous
        or len(w.ordinal_indices) != s.n_ordinal
        or len(w.categorical_indices) != s.n_categorical
    ):
        return False
    for x, (lo, hi) in zip(w.continuous_values, s.continuous_dims):
        if not lo <= x <= hi:
            return False
    for y, levels in zip(w.ordinal_indices, s.ordinal_dims):
        if not 0 <= y < len(levels):
            return False
    for z, c in zip(w.categorical_indices, s.categorical_dims):
        if not 0 <= z < c:
            return False
    return True


def sample_uniform(s: MixedSpace, rng: np.random.Generator) -> MixedVector:
    """
    Draw one point uniformly from the space
    Args:
        s: Design space
        rng: Random stream
    Returns:
        Uniformly sampled point
    """
    continuous = tuple(float(rng.uniform(lo, hi)) for lo, hi in s.continuous_dims)
    ordinal = tuple(int(rng.integers(0, len(levels))) for levels in s.ordinal_dims)
    categorical = tuple(int(rng.integers(0, c)) for c in s.categorical_dims)
    return MixedVector(continuous, ordinal, categorical)


def mutate_point(
    w: MixedVector, s: MixedSpace, beta: float, rng: np.random.Generator
) -> MixedVector:
    """
    Resample each gene independently with probability beta
    Args:
        w: Point to mutate
        s: Design space
        beta: Per-gene mutation probability in [0, 1]
        rng: Random stream
    Returns:
        Mutated point (may equal w; resampling can redraw the original value)
    """
    mask = rng.random(s.dimension) < beta
    m, n = s.n_continuous, s.n_ordinal

    continuous = list(w.continuous_values)
    for i, (lo, hi) in enumerate(s.continuous_dims):
        if mask[i]:
            continuous[i] = float(rng.uniform(lo, hi))
    ordinal = list(w.ordinal_indices)
    for j, levels in enumerate(s.ordinal_dims):
        if mask[m + j]:
            ordinal[j] = int(rng.integers(0, len(levels)))
    categorical = list(w.categorical_indices)
    for k, c in enumerate(s.categorical_dims):
        if mask[m + n + k]:
            categorical[k] = int(rng.integers(0, c))
    return MixedVector(tuple(continuous), tuple(ordinal), tuple(categorical))


def encode_points(points: Sequence[MixedVector], s: MixedSpace) -> Tuple[np.ndarray, np.ndarray]:
    """
    Encode points for vectorized distance computation
    Args:
        points: Points valid in s
        s: Design space
    Returns:
        Tuple of (numeric array N x (m+n) normalized to [0, 1], categorical int array N x o)
    """
    n_points = len(points)
    numeric = np.zeros((n_points, s.n_continuous + s.n_ordinal))
    categorical = np.zeros((n_points, s.n_categorical), dtype=int)
    if n_points == 0:
        return numeric, categorical

    if s.n_continuous:
        bounds = np.asarray(s.continuous_dims)
        raw = np.array([p.continuous_values for p in points], dtype=float)
        numeric[:, : s.n_continuous] = (raw - bounds[:, 0]) / (bounds[:, 1] - bounds[:, 0])
    for j, levels in enumerate(s.ordinal_dims):
        lv = np.asarray(levels)
        idx = np.array([p.ordinal_indices[j] for p in points], dtype=int)
        numeric[:, s.n_continuous + j] = (lv[idx] - lv[0]) / (lv[-1] - lv[0])
    if s.n_categorical:
        categorical[:] = np.array([p.categorical_indices for p in points], dtype=int)
    return numeric, categorical


def pairwise_distance_tensor(
    a: Tuple[np.ndarray, np.ndarray], b: Tuple[np.ndarray, np.ndarray]
) -> np.ndarray:
    """
    Concatenated mixed distance vectors between two encoded point sets
    Args:
        a: encode_points output for the first set
        b: encode_points output for the second set
    Returns:
        Array of shape (len(a), len(b), m+n+o)
    """
    numeric = np.abs(a[0][:, None, :] - b[0][None, :, :])
    hamming = (a[1][:, None, :] != b[1][None, :, :]).astype(float)
    return np.concatenate([numeric, hamming], axis=2)


def mixed_distance_vector(w: MixedVector, w2: MixedVector, s: MixedSpace) -> np.ndarray:
    """Normalized Euclidean entries for continuous/ordinal dims, Hamming for categorical"""
    return pairwise_distance_tensor(encode_points([w], s), encode_points([w2], s))[0, 0]


def l2_distance(w: MixedVector, w2: MixedVector, s: MixedSpace) -> float:
    return float(np.linalg.norm(mixed_distance_vector(w, w2, s)))
