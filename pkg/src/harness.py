"""
Seeded benchmark campaigns, report building and file-backed ask/tell sessions
"""

import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from .benchmarks import (
    BENCHMARKS,
    DEFAULT_NOISE_VARIANCE,
    Benchmark,
    add_observation_noise,
    make_benchmark,
)
from .exceptions import ConfigError
from .metrics import best_so_far, normalized_reward_curve, pareto_trajectory
from .moga import GaConfig
from .optimizer import MixMOBO, OptimizerConfig, ParetoSet
from .space import MixedSpace, MixedVector, sample_uniform
from .utils import (
    SCHEMA_VERSION,
    aggregate_values,
    ensure_directories,
    format_benchmark_name,
    get_output_dir,
    load_json,
    save_json,
)

logger = logging.getLogger(__name__)

METHODS = ("mixmobo", "random")
NOISE_STREAM = 1
RANDOM_STREAM = 2


class RunConfig(BaseModel):
    """Campaign settings; any field may come from a JSON file, CLI flags override"""

    schema_version: int = SCHEMA_VERSION
    benchmark: str
    budget: int = Field(250, ge=1, description="Total black-box evaluations per run")
    n_init: int = Field(50, ge=1)
    batch_size: int = Field(1, ge=1)
    replicates: int = Field(10, ge=1)
    seeds: Optional[List[int]] = None
    eta: float = Field(1.0, gt=0.0)
    acquisitions: List[str] = Field(default_factory=lambda: ["EI", "PI", "UCB", "SMC"])
    noise_variance: float = Field(DEFAULT_NOISE_VARIANCE, ge=0.0)
    instance_seed: int = 0
    mutation_rate: float = Field(0.5, ge=0.0, le=1.0)
    dedup_tolerance: float = Field(1e-6, ge=0.0)
    ga: GaConfig = Field(default_factory=lambda: GaConfig(population_size=40, generations=25))
    benchmark_options: Dict[str, Any] = Field(default_factory=dict)
    output_dir: Optional[str] = None
    workers: int = Field(1, ge=0, description="Replicate processes; 0 uses every CPU")

    @field_validator("benchmark")
    @classmethod
    def known_benchmark(cls, v: str) -> str:
        key = format_benchmark_name(v)
        if key not in BENCHMARKS:
            raise ValueError(f"unknown benchmark '{v}', expected one of {sorted(BENCHMARKS)}")
        return key

    @field_validator("workers")
    @classmethod
    def resolve_workers(cls, v: int) -> int:
        return v or os.cpu_count() or 1

    @field_validator("schema_version")
    @classmethod
    def supported_version(cls, v: int) -> int:
        if v != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {v}, expected {SCHEMA_VERSION}")
        return v

    @model_validator(mode="after")
    def check_budget(self) -> "RunConfig":
        if self.budget < self.n_init:
            raise ValueError(f"budget {self.budget} is smaller than n_init {self.n_init}")
        if (self.budget - self.n_init) % self.batch_size:
            raise ValueError("budget - n_init must be a multiple of the batch size")
        if self.seeds is not None:
            if not self.seeds:
                raise ValueError("seeds must not be empty")
            self.replicates = len(self.seeds)
        try:
            self.optimizer_config(0)
        except ConfigError as e:
            raise ValueError(str(e))
        return self

    @property
    def epochs(self) -> int:
        return (self.budget - self.n_init) // self.batch_size

    def replicate_seeds(self) -> List[int]:
        return list(self.seeds) if self.seeds is not None else list(range(self.replicates))

    def optimizer_config(self, seed: int) -> OptimizerConfig:
        return OptimizerConfig.from_dict(
            {
                "n_init": self.n_init,
                "epochs": self.epochs,
                "batch_size": self.batch_size,
                "mutation_rate": self.mutation_rate,
                "dedup_tolerance": self.dedup_tolerance,
                "portfolio": self.acquisitions,
                "eta": self.eta,
                "ga": self.ga.model_dump(),
                "seed": seed,
            }
        )

    @classmethod
    def from_sources(
        cls, config_file: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None
    ) -> "RunConfig":
        """
        Merge a JSON config file with explicit overrides
        Args:
            config_file: Optional JSON document with RunConfig fields
            overrides: Values taking precedence (None entries are ignored)
        Returns:
            Validated RunConfig
        """
        data: Dict[str, Any] = {}
        if config_file:
            try:
                data.update(load_json(config_file))
            except (OSError, ValueError) as e:
                raise ConfigError(f"Cannot read config file {config_file}: {e}")
        data.update({k: v for k, v in (overrides or {}).items() if v is not None})
        try:
            return cls.model_validate(data)
        except ValidationError as e:
            raise ConfigError(f"Invalid run config: {e}")


def build_benchmark(config: RunConfig) -> Benchmark:
    cache_dir = str(get_output_dir(config.output_dir) / "cache")
    return make_benchmark(
        config.benchmark,
        seed=config.instance_seed,
        noise_variance=config.noise_variance,
        cache_dir=cache_dir,
        **config.benchmark_options,
    )


def make_black_box(
    bench: Benchmark, seed: int
) -> Tuple[Callable[[MixedVector], np.ndarray], Dict[str, List[Any]]]:
    """
    Noisy black box for one replicate, recording clean values and timings
    Args:
        bench: Benchmark instance
        seed: Replicate seed (selects the noise stream)
    Returns:
        Tuple of (callable, record dict with "clean" and "seconds" lists)
    """
    noise_rng = np.random.default_rng([seed, NOISE_STREAM])
    record: Dict[str, List[Any]] = {"clean": [], "seconds": []}

    def f(w: MixedVector) -> np.ndarray:
        start = time.perf_counter()
        clean = bench.evaluate_clean(w)
        noisy = add_observation_noise(clean, bench.noise_variance, noise_rng, bench.output_scale)
        record["clean"].append(clean)
        record["seconds"].append(time.perf_counter() - start)
        return noisy

    return f, record


def run_replicate(config_data: Dict[str, Any], seed: int) -> Dict[str, Any]:
    """
    Run MixMOBO for one seed
    Args:
        config_data: RunConfig as a dict (picklable for worker processes)
        seed: Replicate seed
    Returns:
        Dict with evaluated points, clean values, timings and the final Pareto set
    """
    config = RunConfig.model_validate(config_data)
    bench = build_benchmark(config)
    optimizer = MixMOBO(bench.space, config.optimizer_config(seed))
    f, record = make_black_box(bench, seed)
    pareto = optimizer.run(f)
    logger.info(f"Seed {seed}: MixMOBO finished {optimizer.n_evaluations} evaluations")
    return {
        "method": "mixmobo",
        "seed": seed,
        "points": list(optimizer.dataset.points),
        "clean": np.vstack(record["clean"]),
        "seconds": list(record["seconds"]),
        "pareto": pareto.to_dict(),
    }


def run_random_baseline(config_data: Dict[str, Any], seed: int) -> Dict[str, Any]:
    """Uniform random sampling at the same budget"""
    config = RunConfig.model_validate(config_data)
    bench = build_benchmark(config)
    rng = np.random.default_rng([seed, RANDOM_STREAM])
    points = []
    seconds = []
    for _ in range(config.budget):
        start = time.perf_counter()
        points.append(sample_uniform(bench.space, rng))
        seconds.append(time.perf_counter() - start)
    clean = bench.evaluate_batch(points)
    return {
        "method": "random",
        "seed": seed,
        "points": points,
        "clean": clean,
        "seconds": seconds,
        "pareto": None,
    }


def _run_frame(result: Dict[str, Any], n_objectives: int) -> pd.DataFrame:
    best = best_so_far(result["clean"])
    frame = pd.DataFrame({"seed": result["seed"], "eval": np.arange(1, len(best) + 1)})
    for k in range(n_objectives):
        frame[f"best_f{k + 1}"] = best[:, k]
    return frame


def _write_run(directory: Path, result: Dict[str, Any], frame: pd.DataFrame) -> None:
    name = f"{result['method']}_seed{result['seed']}"
    frame.to_csv(directory / f"run_{name}.csv", index=False)
    pd.DataFrame(
        {"eval": np.arange(1, len(result["seconds"]) + 1), "seconds": result["seconds"]}
    ).to_csv(directory / f"timings_{name}.csv", index=False)
    if result["pareto"] is not None:
        save_json(result["pareto"], str(directory / f"pareto_{name}.json"))


def _collect(
    config: RunConfig, jobs: List[Tuple[Callable, int]], on_result: Callable[[Dict], None]
) -> None:
    data = config.model_dump()
    if config.workers == 1:
        for fn, seed in jobs:
            on_result(fn(data, seed))
        return
    with ProcessPoolExecutor(max_workers=config.workers) as pool:
        futures = [pool.submit(fn, data, seed) for fn, seed in jobs]
        for future in as_completed(futures):
            on_result(future.result())


def _attach_metrics(
    bench: Benchmark, results: Dict[Tuple[str, int], Dict[str, Any]], frames: Dict
) -> Dict[str, Any]:
    """Fill normalized_reward (and p_optimum for multi-objective runs) in every frame"""
    seeds = sorted({seed for _, seed in results})
    if bench.is_multi_objective:
        global_set = bench.global_pareto_set()
        for key, result in results.items():
            trajectory = pareto_trajectory(result["points"], result["clean"], global_set)
            frames[key]["p_optimum"] = trajectory
            frames[key]["p_optimum_best"] = best_so_far(trajectory)
        random_value = float(np.mean([frames[("random", s)]["p_optimum"].iloc[-1] for s in seeds]))
        global_value = 1.0
        column = "p_optimum"
    else:
        random_value = float(np.mean([frames[("random", s)]["best_f1"].iloc[-1] for s in seeds]))
        global_value = float(bench.global_optimum()[0])
        column = "best_f1"

    for frame in frames.values():
        frame["normalized_reward"] = normalized_reward_curve(
            frame[column], random_value, global_value
        )
    return {
        "metric": column,
        "random_optimum": random_value,
        "global_optimum": global_value,
    }


def aggregate_runs(frame: pd.DataFrame) -> pd.DataFrame:
    """Mean and population standard deviation per method and evaluation index"""
    value_columns = [c for c in frame.columns if c not in ("method", "seed", "eval")]
    grouped = frame.groupby(["method", "eval"])[value_columns]
    mean = grouped.mean().add_suffix("_mean")
    std = grouped.std(ddof=0).add_suffix("_std")
    count = grouped.size().rename("n_runs")
    return pd.concat([mean, std, count], axis=1).reset_index()


def cmd_run(config: RunConfig) -> Dict[str, Any]:
    """
    Run MixMOBO and the random baseline for every replicate seed
    Args:
        config: Campaign settings
    Returns:
        Summary with final normalized reward statistics per method
    """
    root = ensure_directories(config.output_dir)
    directory = root / config.benchmark
    directory.mkdir(parents=True, exist_ok=True)
    bench = build_benchmark(config)
    seeds = config.replicate_seeds()
    logger.info(
        f"Running {config.benchmark}: budget={config.budget}, n_init={config.n_init}, "
        f"Q={config.batch_size}, seeds={seeds}, workers={config.workers}"
    )

    results: Dict[Tuple[str, int], Dict[str, Any]] = {}
    frames: Dict[Tuple[str, int], pd.DataFrame] = {}

    def on_result(result: Dict[str, Any]) -> None:
        key = (result["method"], result["seed"])
        results[key] = result
        frames[key] = _run_frame(result, bench.n_objectives)
        _write_run(directory, result, frames[key])

    jobs = [(run_replicate, s) for s in seeds] + [(run_random_baseline, s) for s in seeds]
    try:
        _collect(config, jobs, on_result)
    except KeyboardInterrupt:
        logger.warning(f"Interrupted, {len(results)} finished replicates kept in {directory}")
        raise

    metrics = _attach_metrics(bench, results, frames)
    for (method, seed), frame in sorted(frames.items()):
        frame.to_csv(directory / f"run_{method}_seed{seed}.csv", index=False)

    combined = pd.concat(
        [frames[(m, s)].assign(method=m) for m in METHODS for s in seeds], ignore_index=True
    )
    aggregate = aggregate_runs(combined)
    aggregate.to_csv(directory / "aggregate.csv", index=False)

    meta = {
        "schema_version": SCHEMA_VERSION,
        "benchmark": config.benchmark,
        "config": config.model_dump(mode="json"),
        "seeds": seeds,
        **metrics,
    }
    save_json(meta, str(directory / "run_meta.json"))

    summary = {
        "benchmark": config.benchmark,
        "directory": str(directory),
        **metrics,
        "final_reward": {
            m: aggregate_values(
                [float(frames[(m, s)]["normalized_reward"].iloc[-1]) for s in seeds]
            )
            for m in METHODS
        },
    }
    logger.info(f"Campaign finished, results in {directory}")
    return summary


def load_run_directory(path: str) -> Tuple[Dict[str, Any], pd.DataFrame]:
    """Read run_meta.json and every run CSV of one campaign directory"""
    directory = Path(path)
    meta_path = directory / "run_meta.json"
    if not meta_path.exists():
        raise ConfigError(f"No run_meta.json in {directory}")
    meta = load_json(str(meta_path))
    if meta.get("schema_version") != SCHEMA_VERSION:
        raise ConfigError(f"{directory}: unsupported schema_version {meta.get('schema_version')}")
    frames = []
    for method in METHODS:
        for csv in sorted(directory.glob(f"run_{method}_seed*.csv")):
            frames.append(pd.read_csv(csv).assign(method=method))
    if not frames:
        raise ConfigError(f"No run CSVs in {directory}")
    return meta, pd.concat(frames, ignore_index=True)


def default_checkpoints(budget: int, step: int = 50) -> List[int]:
    return sorted(set(range(step, budget + 1, step)) | {budget})


def cmd_report(
    paths: Sequence[str],
    checkpoints: Optional[Sequence[int]] = None,
    output: Optional[str] = None,
) -> pd.DataFrame:
    """
    Summarize campaign directories of a single benchmark
    Args:
        paths: Campaign directories written by cmd_run
        checkpoints: Evaluation indices to report (defaults to every 50 and the last)
        output: Long-format plot-data CSV path (defaults next to the first directory)
    Returns:
        Summary table with reward mean/std (and P-optimum for multi-objective runs)
    """
    if not paths:
        raise ConfigError("cmd_report needs at least one run directory")
    loaded = [load_run_directory(p) for p in paths]
    benchmarks = {meta["benchmark"] for meta, _ in loaded}
    if len(benchmarks) > 1:
        raise ConfigError(f"Cannot aggregate runs of different benchmarks: {sorted(benchmarks)}")
    benchmark = benchmarks.pop()
    frame = pd.concat([f for _, f in loaded], ignore_index=True)

    budget = int(frame["eval"].max())
    points = list(checkpoints) if checkpoints else default_checkpoints(budget)
    aggregate = aggregate_runs(frame)
    columns = ["method", "eval", "normalized_reward_mean", "normalized_reward_std", "n_runs"]
    if "p_optimum" in frame.columns:
        columns[4:4] = ["p_optimum_mean", "p_optimum_std"]
    summary = aggregate[aggregate["eval"].isin(points)][columns].reset_index(drop=True)

    value_columns = [c for c in frame.columns if c not in ("method", "seed", "eval")]
    long = frame.melt(
        id_vars=["method", "seed", "eval"],
        value_vars=value_columns,
        var_name="metric",
        value_name="value",
    )
    long.insert(0, "benchmark", benchmark)
    out_path = Path(output) if output else Path(paths[0]) / "report_long.csv"
    out_path.parent.mkdir(parents=True, exist_ok=True)
    long.to_csv(out_path, index=False)
    logger.info(f"Plot data written to {out_path}")
    return summary


# ---------------------------------------------------------------------------
# File-backed sessions
# ---------------------------------------------------------------------------


def session_init(
    state_path: str,
    space_doc: Optional[Dict[str, Any]] = None,
    config_doc: Optional[Dict[str, Any]] = None,
    run_config: Optional[RunConfig] = None,
    seed: int = 0,
) -> MixMOBO:
    """
    Write a fresh optimizer state file
    Args:
        state_path: Where to write the state document
        space_doc: Declarative space document (ignored when run_config is given)
        config_doc: OptimizerConfig fields for a custom space
        run_config: Benchmark campaign settings; the session then matches cmd_run for seed
        seed: Replicate seed used with run_config
    Returns:
        The new optimizer
    """
    if run_config is not None:
        bench = build_benchmark(run_config)
        optimizer = MixMOBO(bench.space, run_config.optimizer_config(seed))
    elif space_doc is not None:
        optimizer = MixMOBO(
            MixedSpace.from_dict(space_doc), OptimizerConfig.from_dict(config_doc or {})
        )
    else:
        raise ConfigError("session init needs a space document or a benchmark")
    optimizer.save_state(state_path)
    logger.info(f"Session state written to {state_path}")
    return optimizer


def _load_session(state_path: str) -> MixMOBO:
    if not Path(state_path).exists():
        raise ConfigError(f"No session state at {state_path}")
    return MixMOBO.load_state(state_path)


def session_ask(state_path: str) -> List[MixedVector]:
    optimizer = _load_session(state_path)
    points = optimizer.ask()
    optimizer.save_state(state_path)
    return points


def session_tell(
    state_path: str, values: Any, points: Optional[Sequence[MixedVector]] = None
) -> MixMOBO:
    """Answer the outstanding ask; points default to the asked ones"""
    optimizer = _load_session(state_path)
    if points is None and optimizer.state.pending is not None:
        points = optimizer.state.pending.points
    optimizer.tell(points or [], values)
    optimizer.save_state(state_path)
    return optimizer


def session_status(state_path: str) -> Dict[str, Any]:
    optimizer = _load_session(state_path)
    pending = optimizer.state.pending
    return {
        "epoch": optimizer.state.epoch,
        "epochs": optimizer.config.epochs,
        "evaluations": optimizer.n_evaluations,
        "n_objectives": optimizer.dataset.n_objectives if optimizer.n_evaluations else None,
        "pending_points": 0 if pending is None else len(pending.points),
        "finished": optimizer.finished,
    }


def session_result(state_path: str) -> ParetoSet:
    return _load_session(state_path).pareto_set()
