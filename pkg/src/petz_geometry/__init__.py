"""Monotone quantum metric tensors, deformed group actions and their verification suites."""

from .config import config
from .core.functions import eval_f, parse_spec
from .core.metric import gradient_field, metric_eval
from .core.models import MetricSpec, MonotoneFunctionSpec

__version__ = "1.0.0"

__all__ = [
    "config",
    "eval_f",
    "parse_spec",
    "gradient_field",
    "metric_eval",
    "MetricSpec",
    "MonotoneFunctionSpec",
    "__version__",
]
