"""Time the hot kernels on both backends and check they agree.

    python3 benchmarks/bench_kernels.py [--repeat R] [--n N] [--m M]
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from supplynet import _backend
from supplynet.evolver import random_network
from supplynet.model import generate_setup
from supplynet.motifs import NullModelConfig, draw_proposals, split_edges
from supplynet.triads import CODE_TO_CLASS


def cases(n: int, m: int, ensemble: int, seed: int = 0):
    setup = generate_setup(n, 1, n // 2, seed)
    net = random_network(setup, m, seed=seed)
    edges = net.edge_array
    adj = np.ascontiguousarray(net.adjacency)
    prod, dem = setup.producer_mask, setup.demander_mask
    singles, pairs = split_edges(net, keep_mutual=True)
    cfg = NullModelConfig(ensemble_size=ensemble)
    rng = np.random.default_rng(seed)
    ps, pp = draw_proposals(rng, len(singles), len(pairs), cfg.swaps_per_edge, ensemble)
    return {
        "triad_census": lambda k: k.triad_census(adj, CODE_TO_CLASS),
        "satisfied_count": lambda k: k.satisfied_count(edges, n, prod, dem),
        "removable_edges": lambda k: k.removable_edges(edges, n, prod, dem),
        "switch_randomize": lambda k: k.switch_randomize(singles, pairs, n, np.ascontiguousarray(ps[0]), np.ascontiguousarray(pp[0]), True),
        f"ensemble_census[{ensemble}]": lambda k: k.ensemble_census(singles, pairs, n, ps, pp, True, CODE_TO_CLASS),
    }


def _same(a, b) -> bool:
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--n", type=int, default=20)
    p.add_argument("--m", type=int, default=30)
    p.add_argument("--ensemble", type=int, default=100)
    a = p.parse_args(argv)
    backends = sorted(_backend.BACKENDS)
    print(f"N={a.n} M={a.m} backends: {', '.join(backends)}")
    print(f"{'kernel':<24}" + "".join(f"{b + ' [ms]':>16}" for b in backends) + f"{'speedup':>10}{'agree':>8}")
    for name, fn in cases(a.n, a.m, a.ensemble).items():
        times, outs = {}, {}
        for b in backends:
            k = _backend.get(b)
            outs[b] = fn(k)
            number = max(1, int(0.2 / max(timeit.timeit(lambda: fn(k), number=1), 1e-6)))
            times[b] = min(timeit.repeat(lambda: fn(k), number=number, repeat=a.repeat)) / number * 1e3
        agree = all(_same(outs[backends[0]], outs[b]) for b in backends[1:])
        speed = times["python"] / times["cython"] if "cython" in times else float("nan")
        print(f"{name:<24}" + "".join(f"{times[b]:>16.4f}" for b in backends) + f"{speed:>9.1f}x{str(agree):>8}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
