import json
import logging
import os
from typing import Any, Dict, List, Optional
from pathlib import Path

import numpy as np
import pandas as pd
from dotenv import load_dotenv

load_dotenv()

SCHEMA_VERSION = 1
DEFAULT_OUTPUT_DIR = "results"


def get_output_dir(override: Optional[str] = None) -> Path:
    """
    Resolve the output directory
    Args:
        override: Explicit directory (takes precedence)
    Returns:
        Directory path from override, MIXMOBO_OUTPUT_DIR or the default
    """
    return Path(override or os.getenv("MIXMOBO_OUTPUT_DIR") or DEFAULT_OUTPUT_DIR)


def setup_logging(log_level: str = "INFO", output_dir: Optional[str] = None) -> logging.Logger:
    """Setup logging configuration"""
    log_dir = get_output_dir(output_dir) / "logs"
    log_dir.mkdir(parents=True, exist_ok=True)
    logging.basicConfig(
        level=getattr(logging, log_level.upper()),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=[logging.FileHandler(log_dir / "mixmobo.log"), logging.StreamHandler()],
    )
    return logging.getLogger(__name__)


def ensure_directories(output_dir: Optional[str] = None) -> Path:
    """Create necessary directories if they don't exist"""
    root = get_output_dir(output_dir)
    for directory in [root / "logs", root / "cache", root / "sessions"]:
        directory.mkdir(parents=True, exist_ok=True)
    return root


def save_json(data: Dict[str, Any], filepath: str) -> None:
    """Save data to JSON file"""
    Path(filepath).parent.mkdir(parents=True, exist_ok=True)
    with open(filepath, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=2, ensure_ascii=False)


def load_json(filepath: str) -> Dict[str, Any]:
    """Load data from JSON file"""
    with open(filepath, "r", encoding="utf-8") as f:
        return json.load(f)


def make_rng(seed: Optional[int] = None) -> np.random.Generator:
    """Create a numpy random generator"""
    return np.random.default_rng(seed)


def rng_to_state(rng: np.random.Generator) -> Dict[str, Any]:
    """Snapshot a generator as a JSON-serializable dict"""
    return dict(rng.bit_generator.state)


def rng_from_state(state: Dict[str, Any]) -> np.random.Generator:
    """
    Rebuild a generator from rng_to_state output
    Args:
        state: Bit generator state dict
    Returns:
        Generator continuing the same stream
    """
    rng = np.random.default_rng()
    rng.bit_generator.state = state
    return rng


def derive_seed(rng: np.random.Generator) -> int:
    """Draw a child seed from a generator"""
    return int(rng.integers(0, 2**63 - 1))


def aggregate_values(values: List[float]) -> Dict[str, Any]:
    """
    Aggregate replicate values
    Args:
        values: List of per-replicate values
    Returns:
        Dictionary with aggregated statistics
    """
    if not values:
        return {"mean": 0.0, "median": 0.0, "std": 0.0, "min": 0.0, "max": 0.0, "count": 0}

    series = pd.Series(values, dtype=float)
    return {
        "mean": float(series.mean()),
        "median": float(series.median()),
        "std": float(series.std(ddof=0)),
        "min": float(series.min()),
        "max": float(series.max()),
        "count": len(values),
    }


def format_benchmark_name(name: str) -> str:
    """Normalize a benchmark name to its registry key"""
    return name.lower().strip()
