"""Curriculum training for signed graph neural networks.

Edges are ranked by how many unbalanced triangles they sit in, then fed to
a two-channel signed GNN from easy to hard under a pacing function.
"""

from .curriculum import CurriculumSchedule, PacingParams, build_schedule, pacing_value, subset_at
from .cycle_census import (
    census,
    difficulty_scores,
    edge_difficulties,
    enumerate_triangles,
    local_balance_degree,
)
from .signed_graph import SignedEdge, SignedGraph, common_neighbors, edge_counts, ingest

__all__ = [
    "CurriculumSchedule",
    "PacingParams",
    "SignedEdge",
    "SignedGraph",
    "build_schedule",
    "census",
    "common_neighbors",
    "difficulty_scores",
    "edge_counts",
    "edge_difficulties",
    "enumerate_triangles",
    "ingest",
    "local_balance_degree",
    "pacing_value",
    "subset_at",
]
