"""Easy-to-hard ordering of training edges and pacing functions.

The pacing function ``g(t)`` gives the fraction of the difficulty-sorted
training set visible at epoch ``t``: it starts at ``lambda0`` and reaches
1 at epoch ``T``.

Note on ``geometric``: the commonly printed geometric formula is the root
formula repeated verbatim.  Here it is ``lambda0 ** (1 - t/T)``, which
grows slowest early and therefore keeps the model on easy edges longest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .signed_graph import SignedEdge

PACING_KINDS = ("linear", "root", "geometric")


@dataclass(frozen=True)
class PacingParams:
    kind: str = "linear"
    lambda0: float = 0.25
    T: int = 20

    def __post_init__(self):
        if self.kind not in PACING_KINDS:
            raise ValueError(f"unknown pacing kind {self.kind!r}; choose from {PACING_KINDS}")
        if not 0 < self.lambda0 <= 1:
            raise ValueError(f"lambda0 must be in (0, 1], got {self.lambda0}")
        if int(self.T) != self.T or self.T < 1:
            raise ValueError(f"T must be a positive integer, got {self.T}")


def pacing_value(params: PacingParams, t: float) -> float:
    if t < 0:
        raise ValueError("epoch index must be non-negative")
    lam, T = params.lambda0, params.T
    if t >= T:
        return 1.0
    frac = t / T
    if params.kind == "linear":
        g = lam + (1 - lam) * frac
    elif params.kind == "root":
        g = math.sqrt(lam * lam + (1 - lam * lam) * frac)
    else:
        g = lam ** (1 - frac)
    return min(1.0, g)


@dataclass(frozen=True)
class CurriculumSchedule:
    ordered_edges: tuple[SignedEdge, ...]
    params: PacingParams

    def __len__(self):
        return len(self.ordered_edges)

    def prefix_len(self, t: float) -> int:
        m = len(self.ordered_edges)
        # guard against 0.625 * 8 = 5.000000000000001 style round-up
        k = math.ceil(round(pacing_value(self.params, t) * m, 9))
        return min(m, k)

    def subset_at(self, t: float) -> list[SignedEdge]:
        return list(self.ordered_edges[: self.prefix_len(t)])

    def dump_rows(self, epochs: int, start: int = 1) -> list[tuple[int, int, float]]:
        return [(t, self.prefix_len(t), pacing_value(self.params, t)) for t in range(start, start + epochs)]


def build_schedule(edges: Sequence[SignedEdge], scores: Mapping, params: PacingParams | None = None
                   ) -> CurriculumSchedule:
    """Sort ``edges`` by ``(score, u, v)``.

    ``scores`` is keyed by ``(u, v)`` tuples.  Exact rationals are fine and
    keep tie-breaking platform independent.
    """
    params = params or PacingParams()
    missing = [e for e in edges if e.key not in scores]
    if missing:
        raise KeyError(f"{len(missing)} edge(s) have no difficulty score, e.g. {missing[0]}")
    ordered = sorted(edges, key=lambda e: (scores[e.key], e.u, e.v))
    return CurriculumSchedule(tuple(ordered), params)


def subset_at(schedule: CurriculumSchedule, t: float) -> list[SignedEdge]:
    return schedule.subset_at(t)
