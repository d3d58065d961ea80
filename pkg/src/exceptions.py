from typing import Any, Optional


class MixMOBOError(Exception):
    """Base class for errors caused by user input or protocol misuse"""


class SpaceError(MixMOBOError):
    """Invalid design space or point"""


class ConfigError(MixMOBOError):
    """Invalid configuration or document schema"""


class FactorizationError(MixMOBOError):
    """Covariance matrix is not positive definite after the jitter ladder"""


class ProtocolError(MixMOBOError):
    """ask/tell called out of order"""


class PointMismatchError(MixMOBOError):
    """Told points differ from the outstanding ask"""


class DimensionMismatchError(MixMOBOError):
    """Objective vectors have the wrong length"""


class BenchmarkError(MixMOBOError):
    """Unknown benchmark or unsupported benchmark layout"""


class DegenerateMetricError(MixMOBOError):
    """Metric denominator is zero"""


class EvaluationError(MixMOBOError):
    """Black-box evaluation failed"""

    def __init__(self, message: str, point: Optional[Any] = None):
        super().__init__(message)
        self.point = point
