"""Catalog of network optimization strategies used to steer variation prompts.

An entry pairs one of 16 strategies with one of 3 edge actions; the network
feature the strategy reads is fixed by a build-time mapping. Sampling draws
(strategy, action) pairs uniformly without replacement, so one sample never
repeats a combination.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

FEATURES: tuple[tuple[str, str], ...] = (
    ("Degree", "The number of connections each node has."),
    ("Path Characteristics", "Shortest path, average path length, and network diameter."),
    ("Clustering Coefficient", "Local and global measures of how nodes tend to cluster together."),
    ("Connectivity", "Connected components and the strength of connections between them."),
    ("Centrality Measures",
     "Degree centrality, betweenness centrality, closeness centrality, and eigenvector centrality."),
    ("Edge Attributes", "Weight and direction of edges."),
    ("Dynamic Characteristics", "Robustness to failures and ability to recover."),
    ("Community Structure", "Tightly-knit groups within the network."),
)

STRATEGIES: tuple[tuple[str, str], ...] = (
    ("High-Degree Node Priority", "Focus on nodes with many connections."),
    ("Low-Degree Node Priority", "Focus on nodes with fewer connections."),
    ("Betweenness Centrality Priority", "Focus on nodes that frequently appear on shortest paths."),
    ("Closeness Centrality Priority",
     "Focus on nodes that have short average distances to all other nodes."),
    ("Eigenvector Centrality Priority", "Focus on nodes that have high influence over the network."),
    ("High-Weight Edge Priority", "Focus on edges with higher weights."),
    ("Low-Weight Edge Priority", "Focus on edges with lower weights."),
    ("Shortest Path Optimization", "Optimize the shortest paths in the network."),
    ("Critical Path Optimization", "Optimize paths that are crucial for network performance."),
    ("Similarity-Based Node Selection", "Focus on nodes with similar attributes or roles."),
    ("Boundary Node Optimization", "Focus on nodes at the boundary of communities or clusters."),
    ("Homophily-Based Edge Optimization", "Focus on edges connecting nodes with similar attributes."),
    ("Heterophily-Based Edge Optimization",
     "Focus on edges connecting nodes with different attributes."),
    ("Hub-Peripheral Optimization", "Optimize the connectivity between hub nodes and peripheral nodes."),
    ("Random Node Selection", "Randomly select nodes for optimization to introduce variability."),
    ("Central Node Optimization",
     "Focus on nodes that are centrally located within their respective communities."),
)

ACTIONS: tuple[tuple[str, str], ...] = (
    ("Edge Addition",
     "Involves the addition of new edges to a network, thereby increasing its redundancy and robustness."),
    ("Edge Relocation",
     "Refers to the process of moving existing edges from one pair of nodes to another. "
     "This strategy alters the degree distribution of the nodes involved."),
    ("Edge Swapping",
     "Involves exchanging the endpoints of two edges within the network. "
     "This technique preserves the original degree distribution."),
)

# strategy -> feature it reads; every feature is used by at least one strategy
STRATEGY_FEATURE: dict[str, str] = {
    "High-Degree Node Priority": "Degree",
    "Low-Degree Node Priority": "Degree",
    "Betweenness Centrality Priority": "Centrality Measures",
    "Closeness Centrality Priority": "Centrality Measures",
    "Eigenvector Centrality Priority": "Centrality Measures",
    "High-Weight Edge Priority": "Edge Attributes",
    "Low-Weight Edge Priority": "Edge Attributes",
    "Shortest Path Optimization": "Path Characteristics",
    "Critical Path Optimization": "Path Characteristics",
    "Similarity-Based Node Selection": "Degree",
    "Boundary Node Optimization": "Community Structure",
    "Homophily-Based Edge Optimization": "Clustering Coefficient",
    "Heterophily-Based Edge Optimization": "Clustering Coefficient",
    "Hub-Peripheral Optimization": "Connectivity",
    "Random Node Selection": "Dynamic Characteristics",
    "Central Node Optimization": "Community Structure",
}


@dataclass(frozen=True)
class StrategyEntry:
    feature: str
    strategy: str
    action: str


def catalog() -> tuple[tuple[tuple[str, str], ...], tuple[tuple[str, str], ...], tuple[tuple[str, str], ...]]:
    """(features, strategies, actions) as (name, description) tuples."""
    return FEATURES, STRATEGIES, ACTIONS


def sample_strategies(seed, count: int) -> list[StrategyEntry]:
    """Draw `count` distinct (strategy, action) pairs uniformly without
    replacement; deterministic per seed."""
    total = len(STRATEGIES) * len(ACTIONS)
    if not 1 <= count <= total:
        raise ValueError(f"count must be in 1..{total}, got {count}")
    rng = random.Random(seed)
    picks = rng.sample(range(total), count)
    entries = []
    for p in picks:
        strategy = STRATEGIES[p // len(ACTIONS)][0]
        action = ACTIONS[p % len(ACTIONS)][0]
        entries.append(StrategyEntry(STRATEGY_FEATURE[strategy], strategy, action))
    return entries


def render_strategies(entries: list[StrategyEntry]) -> str:
    """Numbered 'feature | strategy | action' lines, one per entry."""
    if not entries:
        raise ValueError("cannot render an empty strategy list")
    return "\n".join(
        f"{i}. {e.feature} | {e.strategy} | {e.action}"
        for i, e in enumerate(entries, start=1)
    ) + "\n"
