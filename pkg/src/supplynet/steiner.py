"""Low-cost full-demand networks: oriented Euclidean MST plus greedy
intermediate-node insertion."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import UnsupportedConfigurationError
from .model import Network, Setup, network_cost

# cost decrease below this is treated as a tie
_EPS = 1e-12


def mst_parents(dist: np.ndarray) -> np.ndarray:
    """Prim's algorithm on a dense distance matrix; parent of each vertex
    in the tree rooted at vertex 0 (``-1`` for the root)."""
    k = dist.shape[0]
    parent = np.full(k, -1, dtype=np.intp)
    if k <= 1:
        return parent
    in_tree = np.zeros(k, dtype=bool)
    in_tree[0] = True
    best = dist[0].copy()
    best_from = np.zeros(k, dtype=np.intp)
    for _ in range(k - 1):
        cand = np.where(in_tree, np.inf, best)
        v = int(np.argmin(cand))
        in_tree[v] = True
        parent[v] = best_from[v]
        closer = ~in_tree & (dist[v] < best)
        best[closer] = dist[v][closer]
        best_from[closer] = v
    return parent


def _tree_over(setup: Setup, nodes: Sequence[int]) -> tuple[list[tuple[int, int]], float]:
    """MST over ``nodes`` (first is the root), edges directed away from it."""
    idx = np.asarray(nodes, dtype=np.intp)
    dist = setup.distances[np.ix_(idx, idx)]
    parent = mst_parents(dist)
    edges = [(int(idx[p]), int(idx[v])) for v, p in enumerate(parent) if p >= 0]
    cost = float(sum(dist[p, v] for v, p in enumerate(parent) if p >= 0))
    return edges, cost


def _single_producer(setup: Setup) -> int:
    if len(setup.producers) != 1:
        raise UnsupportedConfigurationError(
            f"the MST heuristic is defined for exactly one producer; setup has {len(setup.producers)}"
        )
    return setup.producers[0]


def terminal_arborescence(setup: Setup) -> Network:
    """Minimum spanning arborescence over the producer and all demanders."""
    root = _single_producer(setup)
    edges, _ = _tree_over(setup, [root, *setup.demanders])
    return Network(setup, tuple(edges))


def insert_intermediates(net: Network) -> Network:
    """Greedily add the intermediate node giving the largest strict cost
    decrease until no candidate improves the network."""
    setup = net.setup
    root = _single_producer(setup)
    touched = {u for e in net.edges for u in e}
    used = [v for v in setup.intermediates if v in touched]
    free = [v for v in setup.intermediates if v not in touched]
    base = [root, *setup.demanders]
    current = network_cost(net)
    best_edges = None
    while free:
        scored = [(_tree_over(setup, [*base, *used, v]), v) for v in free]
        (edges, cost), v = min(scored, key=lambda item: (item[0][1], item[1]))
        if not cost < current - _EPS:
            break
        current = cost
        best_edges = edges
        used.append(v)
        free.remove(v)
    if best_edges is None:
        return net
    return Network(setup, tuple(best_edges))


def solve_min_cost(setup: Setup) -> Network:
    return insert_intermediates(terminal_arborescence(setup))


def connectivity_threshold(setup: Setup) -> float:
    """Longest edge of the Euclidean MST over all nodes: the smallest edge
    length cap under which the undirected geometric graph is connected."""
    parent = mst_parents(setup.distances)
    lengths = [setup.distances[p, v] for v, p in enumerate(parent) if p >= 0]
    return float(max(lengths, default=0.0))
