"""Reference implementations written directly from the definitions, sharing
no code with the package."""

import math
from itertools import combinations, permutations

import networkx as nx

# sorted per-node (out, in, mutual) degrees inside the triple -> class id
DEGREE_SIGNATURES = {
    ((0, 2, 0), (1, 0, 0), (1, 0, 0)): 1,
    ((0, 1, 0), (0, 1, 0), (2, 0, 0)): 2,
    ((0, 1, 0), (1, 0, 0), (1, 1, 0)): 3,
    ((1, 0, 0), (1, 1, 1), (1, 2, 1)): 4,
    ((0, 1, 0), (1, 1, 1), (2, 1, 1)): 5,
    ((1, 1, 1), (1, 1, 1), (2, 2, 2)): 6,
    ((0, 2, 0), (1, 1, 0), (2, 0, 0)): 7,
    ((1, 1, 0), (1, 1, 0), (1, 1, 0)): 8,
    ((1, 2, 1), (1, 2, 1), (2, 0, 0)): 9,
    ((0, 2, 0), (2, 1, 1), (2, 1, 1)): 10,
    ((1, 1, 0), (1, 2, 1), (2, 1, 1)): 11,
    ((1, 2, 1), (2, 1, 1), (2, 2, 2)): 12,
    ((2, 2, 2), (2, 2, 2), (2, 2, 2)): 13,
}

# standard MAN labels of the same classes
MAN_LABELS = {1: "021U", 2: "021D", 3: "021C", 4: "111D", 5: "111U", 6: "201", 7: "030T",
              8: "030C", 9: "120D", 10: "120U", 11: "120C", 12: "210", 13: "300"}


def classify(edges: set, triple) -> int:
    """Class id by degree signature, 0 for a disconnected triple."""
    sig = []
    for a in triple:
        others = [b for b in triple if b != a]
        out = sum((a, b) in edges for b in others)
        inn = sum((b, a) in edges for b in others)
        mut = sum((a, b) in edges and (b, a) in edges for b in others)
        sig.append((out, inn, mut))
    return DEGREE_SIGNATURES.get(tuple(sorted(sig)), 0)


def census(n: int, edges) -> list[int]:
    es = set(edges)
    counts = [0] * 13
    for triple in combinations(range(n), 3):
        cid = classify(es, triple)
        if cid:
            counts[cid - 1] += 1
    return counts


def networkx_census(n: int, edges) -> list[int]:
    g = nx.DiGraph()
    g.add_nodes_from(range(n))
    g.add_edges_from(edges)
    tc = nx.triadic_census(g)
    return [tc[MAN_LABELS[k]] for k in range(1, 14)]


def satisfied(n, edges, producers, demanders) -> int:
    g = nx.DiGraph()
    g.add_nodes_from(range(n))
    g.add_edges_from(edges)
    reach = set(producers)
    for p in producers:
        reach |= nx.descendants(g, p)
    return sum(1 for d in demanders if d in reach)


def removable(n, edges, producers, demanders) -> set:
    base = satisfied(n, edges, producers, demanders)
    out = set()
    for e in edges:
        rest = [f for f in edges if f != e]
        if satisfied(n, rest, producers, demanders) == base:
            out.add(e)
    return out


def canonical_by_permutation(arcs) -> frozenset:
    """Orbit representative of an arc set on nodes {0, 1, 2}."""
    return min(
        (tuple(sorted((p[a], p[b]) for a, b in arcs)) for p in permutations(range(3))),
    )


def mst_cost(points) -> float:
    g = nx.Graph()
    for (i, p), (j, q) in combinations(enumerate(points), 2):
        g.add_edge(i, j, weight=math.dist(p, q))
    if len(points) == 1:
        return 0.0
    return sum(d["weight"] for _, _, d in nx.minimum_spanning_edges(g, data=True))


def subset_optimum(setup) -> float:
    """Cheapest MST over the terminals plus any subset of intermediates."""
    pts = [(nd.x, nd.y) for nd in setup.nodes]
    terms = [pts[i] for i in (*setup.producers, *setup.demanders)]
    inter = [pts[i] for i in setup.intermediates]
    return min(mst_cost(terms + list(sub)) for k in range(len(inter) + 1) for sub in combinations(inter, k))
