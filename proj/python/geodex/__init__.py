"""Finsler geodesics, Morse indices, and census experiments.

Thin Python veneer over the C++ core. All operations accept a ``Metric``
built from a JSON description (see ``load_metric``) or one of the shipped
factories, and return plain Python containers or ``Path`` objects.
"""

from ._geodex import (
    ChartExitError,
    ConvexityError,
    DomainError,
    InsufficientDataError,
    Metric,
    NotAGeodesicError,
    Path,
    StepSizeError,
    F,
    census,
    closed_through,
    connect,
    ellipsoid_metric,
    fundamental_tensor,
    index_report,
    integrate,
    load_metric,
    load_metric_file,
    morse_index,
    sphere_metric,
    verify_identity,
)

__all__ = [
    "ChartExitError",
    "ConvexityError",
    "DomainError",
    "InsufficientDataError",
    "Metric",
    "NotAGeodesicError",
    "Path",
    "StepSizeError",
    "F",
    "census",
    "closed_through",
    "connect",
    "ellipsoid_metric",
    "fundamental_tensor",
    "index_report",
    "integrate",
    "load_metric",
    "load_metric_file",
    "morse_index",
    "sphere_metric",
    "verify_identity",
]

__version__ = "1.0.0"
