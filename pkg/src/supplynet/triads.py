"""Isomorphism classes of connected directed 3-node subgraphs.

A triad on nodes ``(a, b, c)`` is encoded as a 6-bit integer, most significant
bit first, over the ordered pairs ``(a,b), (a,c), (b,a), (b,c), (c,a), (c,b)``.
The canonical code of a triad is the minimum code over the 6 relabelings.

Class ids 1..13 follow the widely used motif-figure ordering::

     1  in-star       B->A, C->A
     2  out-star      A->B, A->C
     3  chain         A->B, B->C
     4  mutual + in   A<->B, C->B
     5  mutual + out  A<->B, B->C
     6  two mutual    A<->B, B<->C
     7  feed-forward  A->B, A->C, B->C
     8  3-cycle       A->B, B->C, C->A
     9  FFL, mutual target pair   A->B, A->C, B<->C
    10  FFL, mutual source pair   B->A, C->A, B<->C
    11  cycle + mutual            A->B, B->C, A<->C
    12  two mutual + one          A<->B, B<->C, A->C
    13  complete                  all six arcs

The same table ships as ``data/triad_classes.json``.
"""

from __future__ import annotations

import itertools
import json
from importlib import resources

import numpy as np

PAIRS = ((0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1))

N_CLASSES = 13
FFL = 7
CYCLE = 8
DISCONNECTED = "disconnected"

_MUT = "<->"

CLASS_DEFS: dict[int, tuple[str, tuple[tuple[int, int], ...]]] = {
    1: ("in-star", ((1, 0), (2, 0))),
    2: ("out-star", ((0, 1), (0, 2))),
    3: ("chain", ((0, 1), (1, 2))),
    4: ("mutual-in", ((0, 1), (1, 0), (2, 1))),
    5: ("mutual-out", ((0, 1), (1, 0), (1, 2))),
    6: ("double-mutual", ((0, 1), (1, 0), (1, 2), (2, 1))),
    7: ("feed-forward", ((0, 1), (0, 2), (1, 2))),
    8: ("cycle", ((0, 1), (1, 2), (2, 0))),
    9: ("ffl-mutual-targets", ((0, 1), (0, 2), (1, 2), (2, 1))),
    10: ("ffl-mutual-sources", ((1, 0), (2, 0), (1, 2), (2, 1))),
    11: ("cycle-mutual", ((0, 1), (1, 2), (0, 2), (2, 0))),
    12: ("double-mutual-plus", ((0, 1), (1, 0), (1, 2), (2, 1), (0, 2))),
    13: ("complete", tuple(PAIRS)),
}


def encode(adj) -> int:
    """6-bit code of a 3x3 adjacency matrix (diagonal ignored)."""
    code = 0
    for i, j in PAIRS:
        code = (code << 1) | (1 if adj[i][j] else 0)
    return code


def decode(code: int) -> np.ndarray:
    adj = np.zeros((3, 3), dtype=np.uint8)
    for k, (i, j) in enumerate(PAIRS):
        if (code >> (5 - k)) & 1:
            adj[i, j] = 1
    return adj


def canonical_code(code: int) -> int:
    adj = decode(code)
    return min(
        encode(adj[np.ix_(p, p)]) for p in itertools.permutations(range(3))
    )


def is_connected(code: int) -> bool:
    adj = decode(code)
    und = adj | adj.T
    return int(und[0, 1]) + int(und[0, 2]) + int(und[1, 2]) >= 2


def _build_tables() -> tuple[np.ndarray, dict[int, int]]:
    canon_to_class: dict[int, int] = {}
    for cid, (_, edges) in CLASS_DEFS.items():
        adj = np.zeros((3, 3), dtype=np.uint8)
        for i, j in edges:
            adj[i, j] = 1
        canon = canonical_code(encode(adj))
        if canon in canon_to_class:
            raise AssertionError(f"duplicate triad class definition {cid}")
        canon_to_class[canon] = cid
    lut = np.zeros(64, dtype=np.int8)
    for code in range(64):
        if is_connected(code):
            lut[code] = canon_to_class[canonical_code(code)]
    return lut, canon_to_class


#: raw 6-bit code -> class id (0 for disconnected / empty)
CODE_TO_CLASS, CANONICAL_TO_CLASS = _build_tables()
CLASS_TO_CANONICAL = {v: k for k, v in CANONICAL_TO_CLASS.items()}


def class_table() -> list[dict]:
    """Machine-readable class table (id, name, canonical code, arcs)."""
    sorted_codes = sorted(CLASS_TO_CANONICAL.values())
    rows = []
    for cid in range(1, N_CLASSES + 1):
        canon = CLASS_TO_CANONICAL[cid]
        rows.append(
            {
                "id": cid,
                "name": CLASS_DEFS[cid][0],
                "canonical_code": canon,
                "canonical_rank": sorted_codes.index(canon) + 1,
                "arcs": [[int(i), int(j)] for i, j in zip(*decode(canon).nonzero())],
            }
        )
    return rows


def load_class_table() -> list[dict]:
    with resources.files("supplynet").joinpath("data/triad_classes.json").open() as fh:
        return json.load(fh)
