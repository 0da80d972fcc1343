"""Exact, asymptotic and Monte Carlo counting of uniform hypergraphs with
given degrees and forbidden edges."""

from hyperenum.hypercore import (
    DegreeSequence,
    Edge,
    ForbiddenSet,
    Hypergraph,
    Instance,
    InvalidDegree,
    InvalidInstance,
    degree_sequence_of,
    degree_stats,
    falling_factorial,
    validate_instance,
)

__all__ = [
    "DegreeSequence",
    "Edge",
    "ForbiddenSet",
    "Hypergraph",
    "Instance",
    "InvalidDegree",
    "InvalidInstance",
    "degree_sequence_of",
    "degree_stats",
    "falling_factorial",
    "validate_instance",
]
