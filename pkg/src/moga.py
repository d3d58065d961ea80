"""
Constrained multi-objective GA (NSGA-II style) over the acquisition surface

Every individual is built by sampling, crossing or mutating genes within their
own ranges, so the population never leaves the design space.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field, field_validator

from .acquisition import AcquisitionKind, AcquisitionParams, evaluate_acquisition
from .exceptions import ConfigError
from .space import MixedSpace, MixedVector, mutate_point, sample_uniform
from .surrogate import GpModel
from .utils import derive_seed

logger = logging.getLogger(__name__)


class GaConfig(BaseModel):
    """Genetic algorithm settings"""

    population_size: int = Field(100, ge=2)
    generations: int = Field(100, ge=1)
    crossover_rate: float = Field(0.9, ge=0.0, le=1.0)
    mutation_rate: Optional[float] = Field(
        None, ge=0.0, le=1.0, description="Per-gene rate, defaults to 1/(m+n+o)"
    )
    tournament_size: int = Field(2, ge=2)
    blend_rate: float = Field(0.5, ge=0.0, le=1.0, description="Blend vs swap for continuous genes")
    seed: Optional[int] = None

    @field_validator("population_size")
    @classmethod
    def check_even(cls, v: int) -> int:
        if v % 2:
            raise ValueError("population_size must be even")
        return v


@dataclass
class Individual:
    point: MixedVector
    values: np.ndarray
    front_rank: int
    crowding: float


@dataclass
class RankedPopulation:
    """Individuals ordered by front rank, then by descending crowding distance"""

    individuals: List[Individual] = field(default_factory=list)

    def points(self) -> List[MixedVector]:
        return [ind.point for ind in self.individuals]

    def front(self, rank: int) -> List[Individual]:
        return [ind for ind in self.individuals if ind.front_rank == rank]


def dominates(a: Sequence[float], b: Sequence[float]) -> bool:
    """a dominates b (maximization): a >= b everywhere and a != b"""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return bool(np.all(a >= b) and np.any(a > b))


def non_dominated_sort(values: Sequence[Sequence[float]]) -> List[List[int]]:
    """
    Partition points into Pareto fronts
    Args:
        values: Objective vectors (maximization)
    Returns:
        List of fronts, each a list of input indices in input order
    """
    v = np.atleast_2d(np.asarray(values, dtype=float))
    ge = np.all(v[:, None, :] >= v[None, :, :], axis=2)
    gt = np.any(v[:, None, :] > v[None, :, :], axis=2)
    dom = ge & gt
    count = dom.sum(axis=0)
    remaining = np.ones(len(v), dtype=bool)
    fronts = []
    while remaining.any():
        front = np.flatnonzero(remaining & (count == 0))
        fronts.append(front.tolist())
        remaining[front] = False
        count = count - dom[front].sum(axis=0)
    return fronts


def crowding_distance(front_values: Sequence[Sequence[float]]) -> np.ndarray:
    """
    NSGA-II crowding distance in objective space
    Args:
        front_values: Objective vectors of one front
    Returns:
        Distance per member; boundary members get +inf
    """
    v = np.atleast_2d(np.asarray(front_values, dtype=float))
    n = len(v)
    if n <= 2:
        return np.full(n, np.inf)
    distance = np.zeros(n)
    for k in range(v.shape[1]):
        order = np.argsort(v[:, k], kind="stable")
        span = v[order[-1], k] - v[order[0], k]
        distance[order[0]] = distance[order[-1]] = np.inf
        if span > 0:
            distance[order[1:-1]] += (v[order[2:], k] - v[order[:-2], k]) / span
    return distance


def _rank_and_crowd(values: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    ranks = np.zeros(len(values), dtype=int)
    crowd = np.zeros(len(values))
    for r, front in enumerate(non_dominated_sort(values), start=1):
        ranks[front] = r
        crowd[front] = crowding_distance(values[front])
    return ranks, crowd


def rank_population(points: Sequence[MixedVector], values: np.ndarray) -> RankedPopulation:
    ranks, crowd = _rank_and_crowd(np.asarray(values, dtype=float))
    order = sorted(range(len(points)), key=lambda i: (ranks[i], -crowd[i]))
    return RankedPopulation(
        [Individual(points[i], values[i], int(ranks[i]), float(crowd[i])) for i in order]
    )


def _select_survivors(values: np.ndarray, n: int) -> List[int]:
    """Elitist truncation: whole fronts first, the last front by descending crowding"""
    selected: List[int] = []
    for front in non_dominated_sort(values):
        if len(selected) + len(front) <= n:
            selected.extend(front)
        else:
            crowd = crowding_distance(values[front])
            order = sorted(range(len(front)), key=lambda i: -crowd[i])
            selected.extend(front[i] for i in order[: n - len(selected)])
        if len(selected) >= n:
            break
    return selected


def _tournament(
    ranks: np.ndarray, crowd: np.ndarray, size: int, rng: np.random.Generator
) -> int:
    contenders = rng.integers(0, len(ranks), size=size)
    return int(min(contenders, key=lambda i: (ranks[i], -crowd[i])))


def _crossover(
    a: MixedVector, b: MixedVector, blend_rate: float, rng: np.random.Generator
) -> Tuple[MixedVector, MixedVector]:
    """Uniform gene swap; continuous genes may instead blend (stays in bounds)"""
    c1, c2 = list(a.continuous_values), list(b.continuous_values)
    for i in range(len(c1)):
        if rng.random() < blend_rate:
            u = rng.random()
            c1[i], c2[i] = u * c1[i] + (1 - u) * c2[i], (1 - u) * c1[i] + u * c2[i]
        elif rng.random() < 0.5:
            c1[i], c2[i] = c2[i], c1[i]

    def swap(x: Tuple[int, ...], y: Tuple[int, ...]) -> Tuple[List[int], List[int]]:
        x, y = list(x), list(y)
        for j in range(len(x)):
            if rng.random() < 0.5:
                x[j], y[j] = y[j], x[j]
        return x, y

    o1, o2 = swap(a.ordinal_indices, b.ordinal_indices)
    k1, k2 = swap(a.categorical_indices, b.categorical_indices)
    child1 = MixedVector(tuple(c1), tuple(o1), tuple(k1))
    return child1, MixedVector(tuple(c2), tuple(o2), tuple(k2))


class _Evaluator:
    """Acquisition scoring with memoization for deterministic acquisitions"""

    def __init__(
        self,
        m: GpModel,
        kind: AcquisitionKind,
        p: AcquisitionParams,
        smc_seed: int,
    ):
        self.m = m
        self.kind = kind
        self.p = p
        self.smc_seed = smc_seed
        self.cache: Dict[MixedVector, np.ndarray] = {}

    def __call__(self, points: Sequence[MixedVector], generation: int) -> np.ndarray:
        if self.kind.is_stochastic:
            stream = np.random.default_rng([self.smc_seed, generation])
            return evaluate_acquisition(self.kind, self.m, points, self.p, stream)

        missing = list(dict.fromkeys(pt for pt in points if pt not in self.cache))
        if missing:
            scores = evaluate_acquisition(self.kind, self.m, missing, self.p)
            self.cache.update(zip(missing, scores))
        return np.array([self.cache[pt] for pt in points])


def optimize_acquisition(
    m: GpModel,
    kind: AcquisitionKind,
    p: AcquisitionParams,
    s: MixedSpace,
    q: int,
    cfg: Optional[GaConfig] = None,
    rng: Optional[np.random.Generator] = None,
) -> List[MixedVector]:
    """
    Maximize a K-vector acquisition with the GA and return a Q-batch
    Args:
        m: Fitted surrogate
        kind: Acquisition function
        p: Acquisition parameters
        s: Design space
        q: Batch size (<= population size)
        cfg: GA settings
        rng: Random stream (falls back to cfg.seed)
    Returns:
        Top q individuals of the final population, by rank then descending crowding
    """
    cfg = cfg or GaConfig()
    if q > cfg.population_size:
        raise ConfigError(f"Batch size {q} exceeds GA population size {cfg.population_size}")
    rng = rng if rng is not None else np.random.default_rng(cfg.seed)
    mutation_rate = cfg.mutation_rate if cfg.mutation_rate is not None else 1.0 / s.dimension
    evaluate = _Evaluator(m, kind, p, derive_seed(rng))
    size = cfg.population_size

    population = [sample_uniform(s, rng) for _ in range(size)]
    values = evaluate(population, 0)

    for generation in range(1, cfg.generations + 1):
        ranks, crowd = _rank_and_crowd(values)
        offspring: List[MixedVector] = []
        while len(offspring) < size:
            a = population[_tournament(ranks, crowd, cfg.tournament_size, rng)]
            b = population[_tournament(ranks, crowd, cfg.tournament_size, rng)]
            if rng.random() < cfg.crossover_rate:
                a, b = _crossover(a, b, cfg.blend_rate, rng)
            offspring.append(mutate_point(a, s, mutation_rate, rng))
            offspring.append(mutate_point(b, s, mutation_rate, rng))

        combined = population + offspring
        if kind.is_stochastic:
            combined_values = evaluate(combined, generation)
        else:
            combined_values = np.vstack([values, evaluate(offspring, generation)])
        keep = _select_survivors(combined_values, size)
        population = [combined[i] for i in keep]
        values = combined_values[keep]

    ranked = rank_population(population, values)
    logger.debug(
        f"{kind.value}: GA finished, front 1 holds {len(ranked.front(1))} of {size} individuals"
    )
    return ranked.points()[:q]
