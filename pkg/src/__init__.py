__version__ = "0.1.0"
__author__ = "Tom Schillerwein"

from .benchmarks import make_benchmark
from .optimizer import MixMOBO, OptimizerConfig
from .space import MixedSpace, MixedVector

__all__ = ["MixMOBO", "OptimizerConfig", "MixedSpace", "MixedVector", "make_benchmark"]
