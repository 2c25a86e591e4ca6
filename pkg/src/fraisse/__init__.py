"""Finite Fraisse-limit stages, one-point homomorphism extension, and brute-force oracles."""

from .errors import (
    FraisseError,
    InternalConsistencyError,
    MalformedInputError,
    PreconditionError,
    ResourceBoundError,
    UnsupportedClassError,
)
from .structures import Graph, MetricSpace, Morphism, Poset, classify_morphism, validate

__all__ = [
    "FraisseError",
    "Graph",
    "InternalConsistencyError",
    "MalformedInputError",
    "MetricSpace",
    "Morphism",
    "Poset",
    "PreconditionError",
    "ResourceBoundError",
    "UnsupportedClassError",
    "classify_morphism",
    "validate",
]

__version__ = "0.1.0"
