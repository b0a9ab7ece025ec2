"""Malicious domain detection with base, robust and novel features."""

__version__ = "0.1.0"

from .errors import (
    ConfigurationError,
    DegenerateTrainingError,
    DivergenceError,
    EmptyTableError,
    InvalidInputError,
    RobustDomainError,
    SchemaError,
    UndefinedMetricError,
)
from .model import ALL_COLUMNS, DomainRecord, FeatureSetId, Label

__all__ = [
    "ALL_COLUMNS",
    "ConfigurationError",
    "DegenerateTrainingError",
    "DivergenceError",
    "DomainRecord",
    "EmptyTableError",
    "FeatureSetId",
    "InvalidInputError",
    "Label",
    "RobustDomainError",
    "SchemaError",
    "UndefinedMetricError",
    "__version__",
]
