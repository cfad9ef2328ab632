"""Schedule-weighted soft scoring of optimized graphs.

A heuristic's raw reward on a graph is its robustness R. Structural deviation
from the original graph (per-node degree changes plus edge-count drift, each
normalized to [0,1]) is penalized with a weight that ramps from 0 to 1 over the
course of a run: score = R * (2 - w(t) * Y). A graph that keeps its degree
sequence and edge count intact always earns exactly 2R.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConfigError
from .graph import Graph
from .robustness import robustness_r


@dataclass(frozen=True)
class AffParams:
    """Penalty schedule: weight(t) = (t / total_generations) ** exponent."""

    total_generations: int
    exponent: float = 1.5

    def __post_init__(self):
        if self.total_generations < 1:
            raise ConfigError(f"total_generations must be >= 1, got {self.total_generations}")
        if not self.exponent > 0:
            raise ConfigError(f"exponent must be > 0, got {self.exponent}")


@dataclass(frozen=True)
class StructuralDeviation:
    degree_diff: float
    degree_max: float
    edge_diff: int
    edge_max: int
    y: float


def _check_same_size(original: Graph, optimized: Graph) -> None:
    if original.node_count != optimized.node_count:
        raise ValueError(
            f"node counts differ: {original.node_count} vs {optimized.node_count}"
        )


def degree_deviation(original: Graph, optimized: Graph) -> tuple[float, int]:
    """(mean, max) absolute per-node degree difference under the fixed labeling."""
    _check_same_size(original, optimized)
    n = original.node_count
    diffs = [
        abs(a - b) for a, b in zip(original.degrees(), optimized.degrees())
    ]
    return (sum(diffs) / n, max(diffs, default=0))


def edge_deviation(original: Graph, optimized: Graph) -> tuple[int, int]:
    """(|E - E~|, max(E, E~))."""
    _check_same_size(original, optimized)
    e0, e1 = original.edge_count, optimized.edge_count
    return (abs(e0 - e1), max(e0, e1))


def structural_deviation(original: Graph, optimized: Graph) -> StructuralDeviation:
    """Combined deviation Y in [0, 2]; a zero denominator contributes 0
    (a zero maximum deviation means that constraint is met exactly)."""
    d_diff, d_max = degree_deviation(original, optimized)
    e_diff, e_max = edge_deviation(original, optimized)
    y = (d_diff / d_max if d_max else 0.0) + (e_diff / e_max if e_max else 0.0)
    return StructuralDeviation(d_diff, d_max, e_diff, e_max, y)


def penalty_weight(t: int, params: AffParams) -> float:
    """Constraint weight at generation t: (t/T)^p, 0 at t=0, 1 at t=T."""
    if not 0 <= t <= params.total_generations:
        raise ValueError(
            f"generation index {t} outside [0, {params.total_generations}]"
        )
    return (t / params.total_generations) ** params.exponent


def score_term(r: float, y: float, t: int, params: AffParams) -> float:
    """Single-graph contribution R * (2 - w(t) * Y); lies in [0, 2R]."""
    return r * (2.0 - penalty_weight(t, params) * y)


def adaptive_fitness(
    originals: list[Graph],
    optimizeds: list[Graph],
    t: int,
    params: AffParams,
) -> float:
    """Sum of score_term over paired (original, optimized) graphs."""
    if len(originals) != len(optimizeds):
        raise ValueError(
            f"list lengths differ: {len(originals)} vs {len(optimizeds)}"
        )
    total = 0.0
    for orig, opt in zip(originals, optimizeds):
        dev = structural_deviation(orig, opt)
        total += score_term(robustness_r(opt), dev.y, t, params)
    return total
