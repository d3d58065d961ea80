"""
Test functions for mixed-variable optimization (maximization convention)

Discrete benchmarks place equally spaced levels inside each function's bounds.
Encrypted benchmarks scramble categorical indices with a seeded permutation,
so the optimizer only ever sees the scrambled indices.
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Type

import numpy as np
from scipy.optimize import minimize_scalar

from .exceptions import BenchmarkError, ConfigError
from .moga import non_dominated_sort
from .space import MixedSpace, MixedVector, sample_uniform
from .utils import SCHEMA_VERSION, load_json, make_rng, save_json

logger = logging.getLogger(__name__)

DEFAULT_NOISE_VARIANCE = 0.005
OUTPUT_SCALE_SAMPLES = 512


@dataclass(frozen=True)
class Encryption:
    """Seeded permutation of category indices per categorical dimension"""

    permutations: Tuple[Tuple[int, ...], ...]
    seed: Optional[int] = None

    @classmethod
    def identity(cls, s: MixedSpace) -> "Encryption":
        return cls(tuple(tuple(range(c)) for c in s.categorical_dims))

    def apply_indices(self, categorical: np.ndarray) -> np.ndarray:
        """Map an N x o array of optimizer indices to true level indices"""
        categorical = np.asarray(categorical, dtype=int)
        out = np.empty_like(categorical)
        for j, perm in enumerate(self.permutations):
            out[..., j] = np.asarray(perm)[categorical[..., j]]
        return out

    def invert_indices(self, categorical: np.ndarray) -> np.ndarray:
        categorical = np.asarray(categorical, dtype=int)
        out = np.empty_like(categorical)
        for j, perm in enumerate(self.permutations):
            out[..., j] = np.argsort(perm)[categorical[..., j]]
        return out

    def apply(self, w: MixedVector) -> MixedVector:
        decoded = self.apply_indices(np.array(w.categorical_indices, dtype=int))
        return MixedVector(w.continuous_values, w.ordinal_indices, tuple(decoded.tolist()))

    def invert(self, w: MixedVector) -> MixedVector:
        encoded = self.invert_indices(np.array(w.categorical_indices, dtype=int))
        return MixedVector(w.continuous_values, w.ordinal_indices, tuple(encoded.tolist()))


def make_encryption(s: MixedSpace, seed: Optional[int]) -> Encryption:
    """
    Draw one random permutation per categorical dimension
    Args:
        s: Design space
        seed: Encryption seed
    Returns:
        Encryption over s's categorical dimensions
    """
    rng = make_rng(seed)
    perms = tuple(tuple(int(v) for v in rng.permutation(c)) for c in s.categorical_dims)
    return Encryption(perms, seed)


def add_observation_noise(
    values: Any, variance: float, rng: np.random.Generator, scale: Any = 1.0
) -> np.ndarray:
    """
    Add independent zero-mean Gaussian noise to every objective
    Args:
        values: Objective value or vector
        variance: Noise variance (on the unit output scale)
        rng: Random stream
        scale: Per-objective output scale multiplying the noise
    Returns:
        Noisy values with the input's shape
    """
    if variance < 0:
        raise ConfigError(f"Noise variance must be nonnegative, got {variance}")
    values = np.asarray(values, dtype=float)
    if variance == 0:
        return values.copy()
    noise = rng.standard_normal(values.shape)
    return values + np.asarray(scale, dtype=float) * np.sqrt(variance) * noise


@dataclass(frozen=True)
class BenchmarkSpec:
    name: str
    space: MixedSpace
    n_objectives: int
    noise_variance: float
    seed: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "space": self.space.to_dict(),
            "n_objectives": self.n_objectives,
            "noise_variance": self.noise_variance,
            "seed": self.seed,
        }


class Benchmark:
    """
    Base class for seeded benchmark instances
    Subclasses implement _evaluate_decoded on true (decrypted) inputs.
    """

    name = "benchmark"
    n_objectives = 1

    def __init__(
        self,
        space: MixedSpace,
        seed: int = 0,
        noise_variance: float = DEFAULT_NOISE_VARIANCE,
        encryption: Optional[Encryption] = None,
    ):
        if noise_variance < 0:
            raise ConfigError(f"Noise variance must be nonnegative, got {noise_variance}")
        self.space = space
        self.seed = int(seed)
        self.noise_variance = float(noise_variance)
        self.encryption = encryption or Encryption.identity(space)
        self._output_scale: Optional[np.ndarray] = None

    @property
    def spec(self) -> BenchmarkSpec:
        return BenchmarkSpec(
            self.name, self.space, self.n_objectives, self.noise_variance, self.seed
        )

    @property
    def is_multi_objective(self) -> bool:
        return self.n_objectives > 1

    def _decode(self, points: Sequence[MixedVector]) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Continuous values, ordinal level values and decrypted categorical indices"""
        s = self.space
        n = len(points)
        continuous = np.array([p.continuous_values for p in points], dtype=float).reshape(
            n, s.n_continuous
        )
        ordinal = np.zeros((n, s.n_ordinal))
        for j, levels in enumerate(s.ordinal_dims):
            idx = np.array([p.ordinal_indices[j] for p in points], dtype=int)
            ordinal[:, j] = np.asarray(levels)[idx]
        categorical = np.array([p.categorical_indices for p in points], dtype=int).reshape(
            n, s.n_categorical
        )
        return continuous, ordinal, self.encryption.apply_indices(categorical)

    def _evaluate_decoded(
        self, continuous: np.ndarray, ordinal: np.ndarray, categorical: np.ndarray
    ) -> np.ndarray:
        raise NotImplementedError

    def evaluate_batch(self, points: Sequence[MixedVector]) -> np.ndarray:
        """Noise-free objective vectors, shape (len(points), K)"""
        if not points:
            return np.zeros((0, self.n_objectives))
        values = self._evaluate_decoded(*self._decode(points))
        return np.asarray(values, dtype=float).reshape(len(points), self.n_objectives)

    def evaluate_clean(self, w: MixedVector) -> np.ndarray:
        return self.evaluate_batch([w])[0]

    @property
    def output_scale(self) -> np.ndarray:
        """Per-objective standard deviation of the clean function under uniform sampling"""
        if self._output_scale is None:
            rng = np.random.default_rng([self.seed, OUTPUT_SCALE_SAMPLES])
            sample = [sample_uniform(self.space, rng) for _ in range(OUTPUT_SCALE_SAMPLES)]
            scale = self.evaluate_batch(sample).std(axis=0)
            self._output_scale = np.where(scale > 0, scale, 1.0)
        return self._output_scale

    def evaluate(self, w: MixedVector, rng: np.random.Generator) -> np.ndarray:
        """Objective vector with observation noise on the benchmark's output scale"""
        return add_observation_noise(
            self.evaluate_clean(w), self.noise_variance, rng, self.output_scale
        )

    def objective(self, rng: np.random.Generator) -> Callable[[MixedVector], np.ndarray]:
        """Black-box callable drawing its noise from rng"""

        def f(w: MixedVector) -> np.ndarray:
            return self.evaluate(w, rng)

        return f

    def global_optimum(self) -> np.ndarray:
        raise BenchmarkError(f"{self.name} has no single-objective global optimum")

    def global_pareto_set(self) -> List[MixedVector]:
        raise BenchmarkError(f"{self.name} has no enumerable global Pareto set")


# ---------------------------------------------------------------------------
# Contamination
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ContaminationParams:
    dimension: int = 21
    repetitions: int = 100
    cost: float = 0.2
    upper_limit: float = 0.1
    penalty: float = 1.0
    l1_weight: float = 0.01
    initial_contamination: float = 0.01
    # stored for reference, not part of the objective
    epsilon: float = 0.05


def f_contamination(
    w: np.ndarray, omega: np.ndarray, sigma: np.ndarray, params: ContaminationParams
) -> np.ndarray:
    """
    Lagrangian-relaxed contamination reward
    Args:
        w: Binary prevention decisions, shape (..., D)
        omega: Contamination rates per repetition and stage, shape (T, D)
        sigma: Decontamination rates per repetition and stage, shape (T, D)
        params: Problem constants
    Returns:
        Reward per decision vector, shape (...)
    """
    w = np.asarray(w, dtype=float)
    batch = w.reshape(-1, params.dimension)
    z = np.full((len(batch), params.repetitions), params.initial_contamination)
    violations = np.zeros(len(batch))
    for i in range(params.dimension):
        wi = batch[:, i : i + 1]
        z = omega[None, :, i] * (1 - wi) * (1 - z) + (1 - sigma[None, :, i] * wi) * z
        violations += (z > params.upper_limit).sum(axis=1)
    prevention = batch.sum(axis=1)
    reward = -(params.cost * prevention + params.penalty * violations / params.repetitions)
    reward -= params.l1_weight * prevention
    return reward.reshape(w.shape[:-1])


class ContaminationBenchmark(Benchmark):
    """Food supply chain contamination control over D binary stages"""

    name = "contamination"

    def __init__(
        self,
        seed: int = 0,
        noise_variance: float = DEFAULT_NOISE_VARIANCE,
        params: Optional[ContaminationParams] = None,
        cache_dir: Optional[str] = None,
    ):
        self.params = params or ContaminationParams()
        space = MixedSpace(categorical_dims=(2,) * self.params.dimension)
        super().__init__(space, seed, noise_variance)
        rng = make_rng(self.seed)
        shape = (self.params.repetitions, self.params.dimension)
        self.omega = rng.uniform(size=shape)
        self.sigma = rng.uniform(size=shape)
        self.cache_dir = Path(cache_dir) if cache_dir else None
        self._optimum: Optional[Tuple[float, List[int]]] = None

    def _evaluate_decoded(self, continuous, ordinal, categorical):
        return f_contamination(categorical, self.omega, self.sigma, self.params)

    def _cache_path(self) -> Optional[Path]:
        if self.cache_dir is None:
            return None
        p = self.params
        name = f"contamination_d{p.dimension}_t{p.repetitions}_seed{self.seed}.json"
        return self.cache_dir / name

    def _enumerate_optimum(self, chunk: int = 8192) -> Tuple[float, List[int]]:
        d = self.params.dimension
        bits = np.arange(d)
        best_value, best_code = -np.inf, 0
        for start in range(0, 2**d, chunk):
            codes = np.arange(start, min(start + chunk, 2**d))
            w = (codes[:, None] >> bits) & 1
            values = f_contamination(w, self.omega, self.sigma, self.params)
            i = int(np.argmax(values))
            if values[i] > best_value:
                best_value, best_code = float(values[i]), int(codes[i])
        return best_value, [int(b) for b in (best_code >> bits) & 1]

    def _load_optimum(self) -> Tuple[float, List[int]]:
        if self._optimum is not None:
            return self._optimum
        path = self._cache_path()
        if path is not None and path.exists():
            cached = load_json(str(path))
            self._optimum = (float(cached["value"]), list(cached["argmax"]))
            return self._optimum

        logger.warning(
            f"Contamination optimum not cached for seed {self.seed}, "
            f"enumerating 2^{self.params.dimension} points"
        )
        self._optimum = self._enumerate_optimum()
        if path is not None:
            save_json(
                {
                    "schema_version": SCHEMA_VERSION,
                    "seed": self.seed,
                    "dimension": self.params.dimension,
                    "value": self._optimum[0],
                    "argmax": self._optimum[1],
                },
                str(path),
            )
        return self._optimum

    def global_optimum(self) -> np.ndarray:
        return np.array([self._load_optimum()[0]])


# ---------------------------------------------------------------------------
# Amalgamated
# ---------------------------------------------------------------------------

AMALGAMATED_BOUNDS: Tuple[Tuple[float, float], ...] = (
    (0.0, np.pi),
    (-5.0, 5.0),
    (-10.0, 10.0),
    (-5.0, 5.0),
    (-2.0, 2.0),
    (-np.pi / 2, np.pi / 2),
    (-30.0, 30.0),
)
ROSENBROCK_PIECE = 4


def amalgamated_piece(k: int, x: np.ndarray, x_prev: Optional[np.ndarray] = None) -> np.ndarray:
    """Contribution of one slot whose piece index is k"""
    x = np.asarray(x, dtype=float)
    if k == 0:
        return np.sin(x)
    if k == 1:
        return -(x**4 - 16 * x**2 + 5 * x) / 2
    if k == 2:
        return -(x**2)
    if k == 3:
        return -(10 + x**2 - 10 * np.cos(2 * np.pi * x))
    if k == 4:
        if x_prev is None:
            raise BenchmarkError("The Rosenbrock piece needs a preceding dimension")
        return -(100 * (x - np.asarray(x_prev) ** 2) ** 2 + (1 - x) ** 2)
    if k == 5:
        return np.abs(np.cos(x))
    if k == 6:
        return -x
    raise BenchmarkError(f"Unknown amalgamated piece {k}")


def f_amalgamated(x: np.ndarray) -> np.ndarray:
    """
    Piece-wise sum over slots, slot i using piece (i mod 7)
    Args:
        x: Slot values in natural order, shape (..., D)
    Returns:
        Function value, shape (...)
    """
    x = np.asarray(x, dtype=float)
    total = np.zeros(x.shape[:-1])
    for i in range(x.shape[-1]):
        k = i % 7
        if k == ROSENBROCK_PIECE and i == 0:
            raise BenchmarkError("The Rosenbrock piece cannot occupy the first slot")
        total = total + amalgamated_piece(k, x[..., i], x[..., i - 1] if i > 0 else None)
    return total


def _continuous_piece_max(k: int, grid_points: int = 20001) -> float:
    lo, hi = AMALGAMATED_BOUNDS[k]
    grid = np.linspace(lo, hi, grid_points)
    values = amalgamated_piece(k, grid)
    i = int(np.argmax(values))
    step = grid[1] - grid[0]
    res = minimize_scalar(
        lambda v: -float(amalgamated_piece(k, np.array(v))),
        bounds=(max(lo, grid[i] - step), min(hi, grid[i] + step)),
        method="bounded",
        options={"xatol": 1e-12},
    )
    return max(float(values[i]), -float(res.fun))


class AmalgamatedBenchmark(Benchmark):
    """
    Anisotropic piece-wise sum of classic test functions over mixed variables
    layout gives each slot's variable type in natural order: c (continuous),
    o (ordinal) or k (categorical).
    """

    name = "amalgamated"
    DEFAULT_LAYOUT = "cc" + "ooo" + "k" * 8

    def __init__(
        self,
        seed: int = 0,
        noise_variance: float = DEFAULT_NOISE_VARIANCE,
        layout: str = DEFAULT_LAYOUT,
        levels: int = 5,
        encrypted: bool = True,
    ):
        if not layout or set(layout) - set("cok"):
            raise BenchmarkError(f"Invalid amalgamated layout {layout!r}")
        self.layout = layout
        self.slot_levels = [
            np.linspace(*AMALGAMATED_BOUNDS[i % 7], levels) for i in range(len(layout))
        ]
        self.continuous_slots = [i for i, t in enumerate(layout) if t == "c"]
        self.ordinal_slots = [i for i, t in enumerate(layout) if t == "o"]
        self.categorical_slots = [i for i, t in enumerate(layout) if t == "k"]
        space = MixedSpace(
            tuple(AMALGAMATED_BOUNDS[i % 7] for i in self.continuous_slots),
            tuple(tuple(self.slot_levels[i]) for i in self.ordinal_slots),
            (levels,) * len(self.categorical_slots),
        )
        encryption = make_encryption(space, seed) if encrypted else None
        super().__init__(space, seed, noise_variance, encryption)

    def slot_values(
        self, continuous: np.ndarray, ordinal: np.ndarray, categorical: np.ndarray
    ) -> np.ndarray:
        x = np.zeros((len(continuous), len(self.layout)))
        x[:, self.continuous_slots] = continuous
        x[:, self.ordinal_slots] = ordinal
        for j, slot in enumerate(self.categorical_slots):
            x[:, slot] = self.slot_levels[slot][categorical[:, j]]
        return x

    def _evaluate_decoded(self, continuous, ordinal, categorical):
        return f_amalgamated(self.slot_values(continuous, ordinal, categorical))

    def global_optimum(self) -> np.ndarray:
        """Analytic maxima on continuous slots, grid maxima on discrete slots and pairs"""
        n_slots = len(self.layout)
        coupled = {i - 1 for i in range(1, n_slots) if i % 7 == ROSENBROCK_PIECE}
        total = 0.0
        for i, kind in enumerate(self.layout):
            k = i % 7
            if i in coupled:
                continue
            if k == ROSENBROCK_PIECE:
                if kind == "c" or self.layout[i - 1] == "c":
                    raise BenchmarkError("Optimum needs discrete Rosenbrock slots and predecessors")
                x, x_prev = np.meshgrid(self.slot_levels[i], self.slot_levels[i - 1])
                pair = amalgamated_piece(k, x, x_prev) + amalgamated_piece(k - 1, x_prev)
                total += float(pair.max())
            elif kind == "c":
                total += _continuous_piece_max(k)
            else:
                total += float(amalgamated_piece(k, self.slot_levels[i]).max())
        return np.array([total])


# ---------------------------------------------------------------------------
# NK landscapes
# ---------------------------------------------------------------------------


@dataclass
class NkLandscape:
    """Multi-category NK landscape: gene i's cost table is indexed by its allele and neighbors'"""

    n_genes: int
    n_categories: int
    ruggedness: float
    neighbors: Tuple[Tuple[int, ...], ...]
    tables: List[np.ndarray]

    def __post_init__(self):
        if len(self.neighbors) != self.n_genes or len(self.tables) != self.n_genes:
            raise BenchmarkError("NK landscape needs one neighbor list and table per gene")
        for i, (nb, table) in enumerate(zip(self.neighbors, self.tables)):
            if table.shape != (self.n_categories,) * (1 + len(nb)):
                raise BenchmarkError(f"Gene {i} table shape {table.shape} does not match neighbors")


def make_nk_landscape(
    n_genes: int = 8, n_categories: int = 4, ruggedness: float = 0.2, seed: Optional[int] = 0
) -> NkLandscape:
    """
    Generate a random NK landscape
    Args:
        n_genes: Number of genes N
        n_categories: Alleles per gene
        ruggedness: Probability that gene j is an epistatic neighbor of gene i
        seed: Instance seed
    Returns:
        NkLandscape with U(0, 1) component tables
    """
    if not 0.0 <= ruggedness <= 1.0:
        raise BenchmarkError(f"Ruggedness must lie in [0, 1], got {ruggedness}")
    rng = make_rng(seed)
    neighbors = []
    tables = []
    for i in range(n_genes):
        links = rng.random(n_genes) < ruggedness
        nb = tuple(j for j in range(n_genes) if j != i and links[j])
        neighbors.append(nb)
        tables.append(rng.uniform(size=(n_categories,) * (1 + len(nb))))
    return NkLandscape(n_genes, n_categories, ruggedness, tuple(neighbors), tables)


def f_nk(alleles: np.ndarray, landscape: NkLandscape) -> np.ndarray:
    """Mean of component costs, shape (...) for alleles of shape (..., N)"""
    alleles = np.asarray(alleles, dtype=int)
    total = np.zeros(alleles.shape[:-1])
    for i, (nb, table) in enumerate(zip(landscape.neighbors, landscape.tables)):
        total = total + table[tuple(alleles[..., j] for j in (i,) + nb)]
    return total / landscape.n_genes


class NkBenchmark(Benchmark):
    name = "nk"
    MAX_ENUMERATION = 2**22

    def __init__(
        self,
        seed: int = 0,
        noise_variance: float = DEFAULT_NOISE_VARIANCE,
        n_genes: int = 8,
        n_categories: int = 4,
        ruggedness: float = 0.2,
        landscape: Optional[NkLandscape] = None,
    ):
        self.landscape = landscape or make_nk_landscape(n_genes, n_categories, ruggedness, seed)
        n = self.landscape.n_genes
        space = MixedSpace(categorical_dims=(self.landscape.n_categories,) * n)
        super().__init__(space, seed, noise_variance)
        self._optimum: Optional[float] = None

    def _evaluate_decoded(self, continuous, ordinal, categorical):
        return f_nk(categorical, self.landscape)

    def global_optimum(self) -> np.ndarray:
        """Maximum over complete enumeration of the landscape"""
        if self._optimum is None:
            size = self.space.grid_size
            if size > self.MAX_ENUMERATION:
                raise BenchmarkError(f"NK landscape with {size} points is too large to enumerate")
            shape = (self.landscape.n_categories,) * self.landscape.n_genes
            grid = np.indices(shape).reshape(len(shape), -1).T
            self._optimum = float(f_nk(grid, self.landscape).max())
        return np.array([self._optimum])


# ---------------------------------------------------------------------------
# Rastrigin, Styblinski-Tang, ZDT6
# ---------------------------------------------------------------------------


def f_rastrigin(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return -np.sum(10 + x**2 - 10 * np.cos(2 * np.pi * x), axis=-1)


class RastriginBenchmark(Benchmark):
    name = "rastrigin"

    def __init__(
        self,
        seed: int = 0,
        noise_variance: float = DEFAULT_NOISE_VARIANCE,
        n_continuous: int = 3,
        n_ordinal: int = 6,
        levels: int = 5,
        bounds: Tuple[float, float] = (-5.0, 5.0),
    ):
        grid = tuple(np.linspace(bounds[0], bounds[1], levels))
        space = MixedSpace((bounds,) * n_continuous, (grid,) * n_ordinal)
        super().__init__(space, seed, noise_variance)

    def _evaluate_decoded(self, continuous, ordinal, categorical):
        return f_rastrigin(np.hstack([continuous, ordinal]))

    def global_optimum(self) -> np.ndarray:
        # continuous dims peak at 0, inside the default bounds
        total = 0.0
        for levels in self.space.ordinal_dims:
            total += float(f_rastrigin(np.asarray(levels)[:, None]).max())
        return np.array([total])


def f_styblinski_tang(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return -np.sum(x**4 - 16 * x**2 + 5 * x, axis=-1) / 2


class StyblinskiTangBenchmark(Benchmark):
    name = "styblinski"

    def __init__(
        self,
        seed: int = 0,
        noise_variance: float = DEFAULT_NOISE_VARIANCE,
        dimension: int = 10,
        levels: int = 5,
        bounds: Tuple[float, float] = (-5.0, 2.5),
        encrypted: bool = True,
    ):
        self.levels = np.linspace(bounds[0], bounds[1], levels)
        space = MixedSpace(categorical_dims=(levels,) * dimension)
        encryption = make_encryption(space, seed) if encrypted else None
        super().__init__(space, seed, noise_variance, encryption)

    def _evaluate_decoded(self, continuous, ordinal, categorical):
        return f_styblinski_tang(self.levels[categorical])

    def global_optimum(self) -> np.ndarray:
        per_dim = f_styblinski_tang(self.levels[:, None]).max()
        return np.array([float(per_dim) * self.space.n_categorical])


def f_zdt6(x: np.ndarray) -> np.ndarray:
    """
    ZDT6 objectives negated for maximization
    Args:
        x: Inputs in [0, 1], shape (..., D) with D >= 2
    Returns:
        Array of shape (..., 2)
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    f1 = np.exp(-4 * x[..., 0]) * np.sin(6 * np.pi * x[..., 0]) ** 6 - 1
    g = 1 + 9 * (np.sum(x[..., 1:], axis=-1) / (n - 1)) ** 0.25
    f2 = -g * (1 - (f1 / g) ** 2)
    return np.stack([f1, f2], axis=-1)


class Zdt6Benchmark(Benchmark):
    name = "zdt6"
    n_objectives = 2

    def __init__(
        self,
        seed: int = 0,
        noise_variance: float = DEFAULT_NOISE_VARIANCE,
        dimension: int = 10,
        levels: int = 5,
        encrypted: bool = True,
    ):
        if dimension < 2:
            raise BenchmarkError("ZDT6 needs at least 2 dimensions")
        self.levels = np.linspace(0.0, 1.0, levels)
        space = MixedSpace(categorical_dims=(levels,) * dimension)
        encryption = make_encryption(space, seed) if encrypted else None
        super().__init__(space, seed, noise_variance, encryption)

    def _evaluate_decoded(self, continuous, ordinal, categorical):
        return f_zdt6(self.levels[categorical])

    def global_pareto_set(self) -> List[MixedVector]:
        """
        Pareto-optimal grid points, found from the (first input, sum of the rest) structure
        Returns:
            Points in the optimizer's (encrypted) index space
        """
        d = self.space.n_categorical
        step = self.levels[1] - self.levels[0]
        sums = np.arange(0, (len(self.levels) - 1) * (d - 1) + 1) * step
        first, rest = np.meshgrid(self.levels, sums, indexing="ij")
        first, rest = first.ravel(), rest.ravel()
        f1 = np.exp(-4 * first) * np.sin(6 * np.pi * first) ** 6 - 1
        g = 1 + 9 * (rest / (d - 1)) ** 0.25
        values = np.stack([f1, -g * (1 - (f1 / g) ** 2)], axis=1)

        front = non_dominated_sort(values)[0]
        if np.any(rest[front] > 0):
            raise BenchmarkError("ZDT6 front leaves the g = 1 plane; enumerate instead")
        points = []
        for idx in front:
            level = int(np.argmin(np.abs(self.levels - first[idx])))
            true = np.array([level] + [0] * (d - 1))
            points.append(MixedVector((), (), tuple(self.encryption.invert_indices(true).tolist())))
        return points


BENCHMARKS: Dict[str, Type[Benchmark]] = {
    "contamination": ContaminationBenchmark,
    "amalgamated": AmalgamatedBenchmark,
    "nk": NkBenchmark,
    "rastrigin": RastriginBenchmark,
    "styblinski": StyblinskiTangBenchmark,
    "zdt6": Zdt6Benchmark,
}


def make_benchmark(
    name: str,
    seed: int = 0,
    noise_variance: float = DEFAULT_NOISE_VARIANCE,
    cache_dir: Optional[str] = None,
    **options: Any,
) -> Benchmark:
    """
    Build a benchmark instance by registry name
    Args:
        name: One of contamination, amalgamated, nk, rastrigin, styblinski, zdt6
        seed: Instance seed (encryption, random tables, contamination rates)
        noise_variance: Observation noise variance
        cache_dir: Where enumerated optima are cached (contamination only)
        options: Benchmark-specific constructor arguments
    Returns:
        Benchmark instance
    """
    key = name.lower().strip()
    if key not in BENCHMARKS:
        raise BenchmarkError(f"Unknown benchmark '{name}', expected one of {sorted(BENCHMARKS)}")
    if key == "contamination":
        options["cache_dir"] = cache_dir
    return BENCHMARKS[key](seed=seed, noise_variance=noise_variance, **options)
