"""Geo-referenced multi-product networks.

File schema::

    {"facilities": [{"id": ..., "x": ..., "y": ...}, ...],
     "products": [{"name": ..., "suppliers": [ids], "demanders": [ids],
                   "routes": [[u, v], ...]}, ...]}

Facility ids may be any JSON scalar; nodes are numbered in file order.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import LoadError, ParameterError
from .model import Network, Node, NodeRole, Setup

BUDGET_ONE_PLUS_T = "one_plus_t"
BUDGET_T = "t"
_LEN_TOL = 1e-12


@dataclass(frozen=True)
class ProductSubnetwork:
    name: str
    network: Network

    @property
    def setup(self) -> Setup:
        return self.network.setup


def _fail(where: str, msg: str):
    raise LoadError(f"{where}: {msg}")


def _facilities(raw) -> tuple[list, np.ndarray]:
    if not isinstance(raw, list) or not raw:
        _fail("facilities", "expected a non-empty array")
    ids, xy = [], []
    seen = {}
    for i, fac in enumerate(raw):
        where = f"facilities[{i}]"
        if not isinstance(fac, dict):
            _fail(where, "expected an object")
        for key in ("id", "x", "y"):
            if key not in fac:
                _fail(where, f"missing field {key!r}")
        fid = fac["id"]
        if isinstance(fid, (list, dict)):
            _fail(where + ".id", "must be a string or number")
        if fid in seen:
            _fail(where + ".id", f"duplicate facility id {fid!r}")
        try:
            x, y = float(fac["x"]), float(fac["y"])
        except (TypeError, ValueError):
            _fail(where, "coordinates must be numbers")
        if not (math.isfinite(x) and math.isfinite(y)):
            _fail(where, "coordinates must be finite")
        seen[fid] = i
        ids.append(fid)
        xy.append((x, y))
    return ids, np.asarray(xy, dtype=float)


def _id_list(raw, where: str, index: dict) -> list[int]:
    if not isinstance(raw, list):
        _fail(where, "expected an array of facility ids")
    out = []
    for k, fid in enumerate(raw):
        if isinstance(fid, (list, dict)) or fid not in index:
            _fail(f"{where}[{k}]", f"unknown facility id {fid!r}")
        out.append(index[fid])
    return out


def _product(i: int, raw, index: dict) -> tuple[str, list[int], list[int], list[tuple[int, int]]]:
    where = f"products[{i}]"
    if not isinstance(raw, dict):
        _fail(where, "expected an object")
    for key in ("name", "suppliers", "demanders", "routes"):
        if key not in raw:
            _fail(where, f"missing field {key!r}")
    name = str(raw["name"])
    sup = _id_list(raw["suppliers"], where + ".suppliers", index)
    dem = _id_list(raw["demanders"], where + ".demanders", index)
    if not sup:
        _fail(where + ".suppliers", "at least one supplier required")
    if not dem:
        _fail(where + ".demanders", "at least one demander required")
    both = set(sup) & set(dem)
    if both:
        _fail(where, f"facility listed as both supplier and demander (node {min(both)})")
    if not isinstance(raw["routes"], list):
        _fail(where + ".routes", "expected an array of [u, v] pairs")
    routes = set()
    for k, pair in enumerate(raw["routes"]):
        if not isinstance(pair, list) or len(pair) != 2:
            _fail(f"{where}.routes[{k}]", "expected a [u, v] pair")
        u, v = _id_list(pair, f"{where}.routes[{k}]", index)
        if u == v:
            _fail(f"{where}.routes[{k}]", "self-loop")
        routes.add((u, v))
    return name, sup, dem, sorted(routes)


def _role_setup(ids_xy: np.ndarray, producers, demanders) -> Setup:
    prod, dem = set(producers), set(demanders)
    nodes = []
    for i, (x, y) in enumerate(ids_xy):
        role = NodeRole.PRODUCER if i in prod else NodeRole.DEMANDER if i in dem else NodeRole.INTERMEDIATE
        nodes.append(Node(i, float(x), float(y), role))
    return Setup(tuple(nodes))


def parse_geo_network(doc) -> tuple[Setup, list[ProductSubnetwork]]:
    if not isinstance(doc, dict):
        raise LoadError("top level: expected an object")
    for key in ("facilities", "products"):
        if key not in doc:
            raise LoadError(f"top level: missing field {key!r}")
    ids, xy = _facilities(doc["facilities"])
    index = {fid: i for i, fid in enumerate(ids)}
    if not isinstance(doc["products"], list) or not doc["products"]:
        _fail("products", "expected a non-empty array")
    parsed = [_product(i, p, index) for i, p in enumerate(doc["products"])]
    # shared layout: supplier anywhere -> producer; otherwise demander anywhere -> demander
    all_sup = {u for _, s, _, _ in parsed for u in s}
    all_dem = {u for _, _, d, _ in parsed for u in d} - all_sup
    layout = _role_setup(xy, all_sup, all_dem)
    subs = []
    for name, sup, dem, routes in parsed:
        setup = _role_setup(xy, sup, dem)
        subs.append(ProductSubnetwork(name, Network(setup, tuple(routes))))
    return layout, subs


def import_geo_network(path: str | Path) -> tuple[Setup, list[ProductSubnetwork]]:
    """Load a geo-network file; returns the shared layout and one direct-route
    network per product (each with that product's role assignment)."""
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise LoadError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    try:
        return parse_geo_network(doc)
    except LoadError as exc:
        raise LoadError(f"{path}: {exc}") from None


def expand_neighborhood(sub: Network, t: float, budget: str = BUDGET_ONE_PLUS_T) -> Network:
    """Add every path of at most three edges from a producer to a demander
    it already serves directly, when the path is no longer than the budget.

    The budget is ``(1 + t) * L`` for a direct route of length ``L``;
    ``budget="t"`` uses ``t * L`` instead.
    """
    if not t >= 0:
        raise ParameterError(f"t must be >= 0, got {t}")
    if budget not in (BUDGET_ONE_PLUS_T, BUDGET_T):
        raise ParameterError(f"unknown budget rule {budget!r}")
    setup = sub.setup
    if not setup.producers:
        raise ParameterError("subnetwork has no producer")
    factor = 1.0 + t if budget == BUDGET_ONE_PLUS_T else t
    dist = setup.distances
    n = setup.n
    pmask = setup.producer_mask.astype(bool)
    dmask = setup.demander_mask.astype(bool)
    edges = set(sub.edges)
    eye = np.eye(n, dtype=bool)
    for p, q in sub.edges:
        if not (pmask[p] and dmask[q]):
            continue
        limit = factor * dist[p, q]
        limit += _LEN_TOL * max(1.0, limit)
        inner = np.ones(n, dtype=bool)
        inner[[p, q]] = False
        # p -> a -> q
        two = dist[p] + dist[:, q]
        for a in np.flatnonzero(inner & (two <= limit)).tolist():
            edges.add((p, a))
            edges.add((a, q))
        # p -> a -> b -> q
        three = dist[p][:, None] + dist + dist[:, q][None, :]
        ok = (three <= limit) & inner[:, None] & inner[None, :] & ~eye
        for a, b in zip(*np.nonzero(ok)):
            edges.update(((p, int(a)), (int(a), int(b)), (int(b), q)))
    return Network(setup, tuple(edges))


def synthetic_geo(n_facilities: int = 40, n_products: int = 30, seed: int = 0,
                  demanders: tuple[int, int] = (3, 8)) -> dict:
    """Random geo-network document: facilities on the unit square, one
    supplier per product routed directly to each of its demanders."""
    if n_facilities < 2 or n_products < 1:
        raise ParameterError("need >= 2 facilities and >= 1 product")
    lo, hi = demanders
    hi = min(hi, n_facilities - 1)
    lo = min(lo, hi)
    rng = np.random.default_rng(seed)
    xy = rng.random((n_facilities, 2)).round(6)
    facilities = [{"id": f"F{i:03d}", "x": float(x), "y": float(y)} for i, (x, y) in enumerate(xy)]
    products = []
    for k in range(n_products):
        pick = rng.permutation(n_facilities)
        s = int(pick[0])
        dem = sorted(int(v) for v in pick[1:1 + int(rng.integers(lo, hi + 1))])
        products.append({
            "name": f"P{k:03d}",
            "suppliers": [f"F{s:03d}"],
            "demanders": [f"F{v:03d}" for v in dem],
            "routes": [[f"F{s:03d}", f"F{v:03d}"] for v in dem],
        })
    return {"facilities": facilities, "products": products}


def bundled_geo_path() -> Path:
    return Path(str(resources.files("supplynet") / "data" / "synthetic_geo.json"))
