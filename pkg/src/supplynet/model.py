"""Spatial supply-network model: setups, networks and their metrics.

A :class:`Setup` is the fixed spatial instance (node coordinates and roles); a
:class:`Network` is a directed edge set over it. The three model metrics are

* cost ``c``: total Euclidean edge length,
* demand satisfaction ``d``: fraction of demanders reachable from a producer,
* robustness ``r``: fraction of edges whose individual removal leaves ``d``
  unchanged.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import _backend
from .errors import LoadError, ParameterError


class NodeRole(str, enum.Enum):
    PRODUCER = "producer"
    DEMANDER = "demander"
    INTERMEDIATE = "intermediate"


@dataclass(frozen=True)
class Node:
    id: int
    x: float
    y: float
    role: NodeRole


@dataclass(frozen=True)
class Setup:
    """Problem instance: ``N`` nodes with coordinates and roles."""

    nodes: tuple[Node, ...]
    rng_seed: int | None = None

    def __post_init__(self):
        nodes = tuple(self.nodes)
        object.__setattr__(self, "nodes", nodes)
        for i, node in enumerate(nodes):
            if node.id != i:
                raise ParameterError(f"node ids must be contiguous from 0; got {node.id} at position {i}")
            if not (math.isfinite(node.x) and math.isfinite(node.y)):
                raise ParameterError(f"node {i} has non-finite coordinates")
            if not isinstance(node.role, NodeRole):
                raise ParameterError(f"node {i} has invalid role {node.role!r}")
        roles = {n.role for n in nodes}
        if NodeRole.PRODUCER not in roles or NodeRole.DEMANDER not in roles:
            raise ParameterError("a setup needs at least one producer and one demander")

    @classmethod
    def from_points(cls, points: Sequence[tuple[float, float]], roles: Sequence[str | NodeRole],
                    seed: int | None = None) -> "Setup":
        return cls(
            tuple(Node(i, float(x), float(y), NodeRole(r)) for i, ((x, y), r) in enumerate(zip(points, roles, strict=True))),
            seed,
        )

    @property
    def n(self) -> int:
        return len(self.nodes)

    @cached_property
    def xy(self) -> np.ndarray:
        return np.array([(nd.x, nd.y) for nd in self.nodes], dtype=float)

    @cached_property
    def producer_mask(self) -> np.ndarray:
        return np.array([nd.role is NodeRole.PRODUCER for nd in self.nodes], dtype=np.uint8)

    @cached_property
    def demander_mask(self) -> np.ndarray:
        return np.array([nd.role is NodeRole.DEMANDER for nd in self.nodes], dtype=np.uint8)

    @cached_property
    def producers(self) -> tuple[int, ...]:
        return tuple(int(i) for i in np.flatnonzero(self.producer_mask))

    @cached_property
    def demanders(self) -> tuple[int, ...]:
        return tuple(int(i) for i in np.flatnonzero(self.demander_mask))

    @cached_property
    def intermediates(self) -> tuple[int, ...]:
        return tuple(nd.id for nd in self.nodes if nd.role is NodeRole.INTERMEDIATE)

    @cached_property
    def distances(self) -> np.ndarray:
        """Pairwise Euclidean distance matrix."""
        diff = self.xy[:, None, :] - self.xy[None, :, :]
        return np.sqrt((diff**2).sum(axis=-1))

    def with_roles(self, roles: Sequence[NodeRole]) -> "Setup":
        return Setup(
            tuple(Node(nd.id, nd.x, nd.y, NodeRole(r)) for nd, r in zip(self.nodes, roles, strict=True)),
            self.rng_seed,
        )


@dataclass(frozen=True, eq=False)
class Network:
    """Directed edge set over a setup.

    Edges are stored sorted lexicographically; mutual pairs ``u->v`` and
    ``v->u`` are distinct edges.
    """

    setup: Setup
    edges: tuple[tuple[int, int], ...] = field(default=())

    def __post_init__(self):
        n = self.setup.n
        norm = sorted((int(u), int(v)) for u, v in self.edges)
        for k, (u, v) in enumerate(norm):
            if u == v:
                raise ParameterError(f"self-loop at node {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ParameterError(f"edge ({u}, {v}) references a node outside 0..{n - 1}")
            if k and norm[k - 1] == (u, v):
                raise ParameterError(f"duplicate edge ({u}, {v})")
        object.__setattr__(self, "edges", tuple(norm))

    @classmethod
    def from_codes(cls, setup: Setup, codes: Iterable[int]) -> "Network":
        """Build from edge codes ``u * N + v`` (assumed valid)."""
        n = setup.n
        net = object.__new__(cls)
        object.__setattr__(net, "setup", setup)
        object.__setattr__(net, "edges", tuple(divmod(c, n) for c in sorted(codes)))
        return net

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def codes(self) -> frozenset[int]:
        n = self.setup.n
        return frozenset(u * n + v for u, v in self.edges)

    @cached_property
    def edge_array(self) -> np.ndarray:
        return np.array(self.edges, dtype=np.int32).reshape(-1, 2)

    @cached_property
    def adjacency(self) -> np.ndarray:
        adj = np.zeros((self.setup.n, self.setup.n), dtype=np.uint8)
        if self.edges:
            ea = self.edge_array
            adj[ea[:, 0], ea[:, 1]] = 1
        return adj

    def with_edges(self, edges: Iterable[tuple[int, int]]) -> "Network":
        return Network(self.setup, tuple(edges))

    def __eq__(self, other):
        if not isinstance(other, Network):
            return NotImplemented
        return self.edges == other.edges and (self.setup is other.setup or self.setup == other.setup)

    def __hash__(self):
        return hash(self.edges)

    def __repr__(self):
        return f"Network(n={self.setup.n}, m={self.m})"


@dataclass(frozen=True)
class Metrics:
    c: float
    d: float
    r: float
    m: int


def generate_setup(n: int, n_producers: int, n_demanders: int, seed: int) -> Setup:
    """Uniform random coordinates on the unit square with permuted roles."""
    if n_producers < 1 or n_demanders < 1 or n < n_producers + n_demanders or n < 2:
        raise ParameterError(
            f"need n >= producers + demanders >= 2 and producers, demanders >= 1; "
            f"got n={n}, producers={n_producers}, demanders={n_demanders}"
        )
    rng = np.random.default_rng(seed)
    xy = rng.random((n, 2))
    roles = (
        [NodeRole.PRODUCER] * n_producers
        + [NodeRole.DEMANDER] * n_demanders
        + [NodeRole.INTERMEDIATE] * (n - n_producers - n_demanders)
    )
    perm = rng.permutation(n)
    nodes = tuple(Node(i, float(xy[i, 0]), float(xy[i, 1]), roles[perm[i]]) for i in range(n))
    return Setup(nodes, seed)


def edge_lengths(net: Network) -> np.ndarray:
    if not net.edges:
        return np.zeros(0)
    ea = net.edge_array
    xy = net.setup.xy
    return np.hypot(*(xy[ea[:, 0]] - xy[ea[:, 1]]).T)


def network_cost(net: Network) -> float:
    return float(edge_lengths(net).sum())


def satisfied_demanders(net: Network) -> int:
    s = net.setup
    return int(_backend.kernels.satisfied_count(net.edge_array, s.n, s.producer_mask, s.demander_mask))


def demand_satisfaction(net: Network) -> float:
    """Fraction of demanders reachable from at least one producer."""
    return satisfied_demanders(net) / len(net.setup.demanders)


def robustness(net: Network) -> tuple[float, frozenset[tuple[int, int]]]:
    """Robustness ``r`` and the safely removable edge set ``E_r``.

    An edge is removable when deleting it alone does not lower ``d``.
    ``r = 0`` for an empty network.
    """
    if not net.edges:
        return 0.0, frozenset()
    s = net.setup
    mask, _ = _backend.kernels.removable_edges(net.edge_array, s.n, s.producer_mask, s.demander_mask)
    removable = frozenset(e for e, keep in zip(net.edges, np.asarray(mask).tolist()) if keep)
    return len(removable) / net.m, removable


def evaluate(net: Network) -> Metrics:
    s = net.setup
    c = network_cost(net)
    if not net.edges:
        return Metrics(c, 0.0, 0.0, 0)
    mask, base = _backend.kernels.removable_edges(net.edge_array, s.n, s.producer_mask, s.demander_mask)
    mask = np.asarray(mask)
    return Metrics(c, base / len(s.demanders), float(mask.sum()) / net.m, net.m)


# -- serialization ---------------------------------------------------------


def setup_to_dict(setup: Setup) -> dict:
    doc = {
        "nodes": [
            {"id": nd.id, "x": nd.x, "y": nd.y, "role": nd.role.value} for nd in setup.nodes
        ]
    }
    if setup.rng_seed is not None:
        doc["seed"] = setup.rng_seed
    return doc


def network_to_dict(net: Network) -> dict:
    doc = setup_to_dict(net.setup)
    doc["edges"] = [[u, v] for u, v in net.edges]
    return doc


def _node_from_dict(i: int, raw) -> Node:
    if not isinstance(raw, dict):
        raise LoadError(f"nodes[{i}]: expected an object, got {type(raw).__name__}")
    try:
        role = NodeRole(raw["role"])
        return Node(int(raw["id"]), float(raw["x"]), float(raw["y"]), role)
    except KeyError as exc:
        raise LoadError(f"nodes[{i}]: missing field {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        raise LoadError(f"nodes[{i}]: {exc}") from None


def setup_from_dict(doc: dict) -> Setup:
    if not isinstance(doc, dict) or "nodes" not in doc:
        raise LoadError("document has no 'nodes' array")
    nodes = sorted((_node_from_dict(i, raw) for i, raw in enumerate(doc["nodes"])), key=lambda nd: nd.id)
    try:
        return Setup(tuple(nodes), doc.get("seed"))
    except ParameterError as exc:
        raise LoadError(str(exc)) from None


def network_from_dict(doc: dict, setup: Setup | None = None) -> Network:
    setup = setup or setup_from_dict(doc)
    raw = doc.get("edges", [])
    try:
        edges = [(int(u), int(v)) for u, v in raw]
    except (TypeError, ValueError):
        raise LoadError("'edges' must be a list of [u, v] pairs") from None
    try:
        return Network(setup, tuple(edges))
    except ParameterError as exc:
        raise LoadError(str(exc)) from None


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=1) + "\n"


def save_network(net: Network, path: str | Path) -> None:
    Path(path).write_text(dumps(network_to_dict(net)))


def save_setup(setup: Setup, path: str | Path) -> None:
    Path(path).write_text(dumps(setup_to_dict(setup)))


def _read_json(path: str | Path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise LoadError(f"{path}: line {exc.lineno}: {exc.msg}") from None


def load_setup(path: str | Path) -> Setup:
    return setup_from_dict(_read_json(path))


def load_network(path: str | Path, setup: Setup | None = None) -> Network:
    return network_from_dict(_read_json(path), setup)
