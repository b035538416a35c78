"""Multi-objective genetic optimization of networks over a fixed setup.

Objectives are cost ``c`` (minimized) and a secondary quantity: robustness
``r`` or signature strength ``sigma``. In two-sided mode the secondary axis is
folded around a *critical* value, the secondary of the cheapest feasible
member, so that below it the optimizer pushes the secondary down and above it
up. Constraints (``d = 1``, edge-count window) are handled by constrained
dominance: feasible beats infeasible, and infeasible members compare by total
violation.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ParameterError
from .model import Network, Setup, edge_lengths, evaluate
from .motifs import NullModelConfig, TargetSignature, default_target, motif_signature

log = logging.getLogger(__name__)


class Objective(str, enum.Enum):
    COST_ROBUSTNESS = "cost_robustness"
    COST_SIGMA = "cost_sigma"

    @classmethod
    def parse(cls, value: "str | Objective") -> "Objective":
        if isinstance(value, cls):
            return value
        aliases = {"cr": cls.COST_ROBUSTNESS, "csigma": cls.COST_SIGMA}
        try:
            return aliases.get(value) or cls(value)
        except ValueError:
            raise ParameterError(f"unknown objective {value!r}") from None


class Dominance(enum.Enum):
    A_DOMINATES = "a_dominates"
    B_DOMINATES = "b_dominates"
    INCOMPARABLE = "incomparable"


@dataclass(frozen=True)
class GAConfig:
    m_min: int
    m_max: int
    population_size: int = 200
    generations: int = 150
    mutation_size: int = 1
    elite_fraction: float = 0.30
    random_fraction: float = 0.05
    edge_length_cap: float | None = None
    objective: Objective = Objective.COST_ROBUSTNESS
    two_sided: bool = True
    #: two-sided mode only: members on opposite sides of the critical value
    #: are incomparable, so each branch keeps its own front
    separate_branches: bool = True
    seed: int = 0
    motif_cfg: NullModelConfig = field(default_factory=lambda: NullModelConfig(ensemble_size=100))
    #: ensemble size used to re-score sigma of the final archive; None keeps the search values
    final_ensemble_size: int | None = 500
    target: TargetSignature | None = None

    def __post_init__(self):
        object.__setattr__(self, "objective", Objective.parse(self.objective))
        if not 0 < self.elite_fraction < 1:
            raise ParameterError("elite_fraction must lie in (0, 1)")
        if self.random_fraction < 0 or self.elite_fraction + self.random_fraction >= 1:
            raise ParameterError("need random_fraction >= 0 and elite_fraction + random_fraction < 1")
        if not 0 <= self.m_min <= self.m_max:
            raise ParameterError(f"need 0 <= m_min <= m_max, got ({self.m_min}, {self.m_max})")
        if self.population_size < 4:
            raise ParameterError("population_size must be >= 4")
        if self.generations < 1:
            raise ParameterError("generations must be >= 1")
        if self.mutation_size < 1:
            raise ParameterError("mutation_size must be >= 1")
        if self.edge_length_cap is not None and self.edge_length_cap <= 0:
            raise ParameterError("edge_length_cap must be positive")


@dataclass
class Member:
    network: Network
    c: float
    d: float
    r: float
    sigma: float = math.nan
    violation: float = 0.0
    feasible: bool = False
    rank: int = 0
    crowding: float = 0.0

    @property
    def m(self) -> int:
        return self.network.m

    def secondary(self, objective: Objective) -> float:
        return self.r if objective is Objective.COST_ROBUSTNESS else self.sigma


@dataclass
class ParetoArchive:
    members: list[Member]
    objective: Objective
    two_sided: bool
    critical: float
    history: list[dict] = field(default_factory=list)
    diagnostic: str = ""

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)


# -- edge universe ---------------------------------------------------------

_UNIVERSES: dict[tuple[int, float | None], "EdgeUniverse"] = {}


class EdgeUniverse:
    """Admissible directed edges (no self-loops, length within the cap)."""

    def __init__(self, setup: Setup, cap: float | None = None):
        n = setup.n
        dist = setup.distances
        ok = ~np.eye(n, dtype=bool)
        if cap is not None:
            ok &= dist <= cap * (1 + 1e-12)
        u, v = np.nonzero(ok)
        self.setup = setup
        self.cap = cap
        self.codes = (u * n + v).astype(np.int64)
        self.code_list = self.codes.tolist()
        self.code_set = frozenset(self.code_list)
        self.lengths = dist[u, v]

    def __len__(self):
        return len(self.code_list)

    @classmethod
    def of(cls, setup: Setup, cap: float | None = None) -> "EdgeUniverse":
        key = (id(setup), cap)
        uni = _UNIVERSES.get(key)
        if uni is None or uni.setup is not setup:
            if len(_UNIVERSES) > 256:
                _UNIVERSES.clear()
            uni = _UNIVERSES[key] = cls(setup, cap)
        return uni


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator) or hasattr(seed, "random"):
        return seed
    return np.random.default_rng(seed)


def random_network(setup: Setup, m: int, cap: float | None = None, seed=None) -> Network:
    """``m`` distinct admissible edges drawn uniformly without replacement."""
    uni = EdgeUniverse.of(setup, cap)
    if not 0 <= m <= len(uni):
        raise ParameterError(f"cannot draw {m} edges from an admissible universe of {len(uni)}")
    idx = _rng(seed).choice(len(uni), size=m, replace=False)
    return Network.from_codes(setup, uni.codes[idx].tolist())


MUTATIONS = ("remove", "add", "replace")


def mutate(net: Network, cfg: GAConfig, seed=None, kind: str | None = None) -> Network:
    """Remove, add or replace ``cfg.mutation_size`` random edges."""
    rng = _rng(seed)
    if kind is None:
        kind = MUTATIONS[int(rng.integers(3))]
    if kind not in MUTATIONS:
        raise ParameterError(f"unknown mutation {kind!r}")
    uni = EdgeUniverse.of(net.setup, cfg.edge_length_cap)
    present = sorted(net.codes)
    k = cfg.mutation_size
    if kind == "replace":
        absent_n = len(uni.code_set.difference(present))
        k = min(k, len(present), absent_n)
    kept = set(present)
    if kind in ("remove", "replace"):
        drop = rng.choice(len(present), size=min(k, len(present)), replace=False) if present else []
        removed = {present[i] for i in drop}
        kept -= removed
    else:
        removed = set()
    if kind in ("add", "replace"):
        absent = [c for c in uni.code_list if c not in kept and c not in removed]
        take = rng.choice(len(absent), size=min(k, len(absent)), replace=False) if absent else []
        kept.update(absent[i] for i in take)
    return Network.from_codes(net.setup, kept)


def recombine(a: Network, b: Network, seed=None) -> Network:
    """Union of independent fair-coin subsets of each parent's edges."""
    if not (a.setup is b.setup or a.setup == b.setup):
        raise ParameterError("recombine needs networks over the same setup")
    rng = _rng(seed)
    ea, eb = sorted(a.codes), sorted(b.codes)
    keep_a = np.asarray(rng.random(len(ea))) < 0.5
    keep_b = np.asarray(rng.random(len(eb))) < 0.5
    codes = {c for c, k in zip(ea, keep_a) if k} | {c for c, k in zip(eb, keep_b) if k}
    return Network.from_codes(a.setup, codes)


# -- dominance -------------------------------------------------------------


def folded(value: float, critical: float, two_sided: bool) -> float:
    """Secondary objective to maximize: distance from ``critical`` in
    two-sided mode, the raw value otherwise."""
    if not two_sided:
        return value
    return critical - value if value < critical else value - critical


def dominance(a: Member, b: Member, critical: float, cfg: GAConfig) -> Dominance:
    if a.feasible != b.feasible:
        return Dominance.A_DOMINATES if a.feasible else Dominance.B_DOMINATES
    if not a.feasible:
        if a.violation < b.violation:
            return Dominance.A_DOMINATES
        if b.violation < a.violation:
            return Dominance.B_DOMINATES
        return Dominance.INCOMPARABLE
    sa, sb = a.secondary(cfg.objective), b.secondary(cfg.objective)
    if cfg.two_sided and cfg.separate_branches and (sa >= critical) != (sb >= critical):
        return Dominance.INCOMPARABLE
    ga = folded(sa, critical, cfg.two_sided)
    gb = folded(sb, critical, cfg.two_sided)
    if a.c <= b.c and ga >= gb and (a.c < b.c or ga > gb):
        return Dominance.A_DOMINATES
    if b.c <= a.c and gb >= ga and (b.c < a.c or gb > ga):
        return Dominance.B_DOMINATES
    return Dominance.INCOMPARABLE


def _objective_arrays(members: list[Member], critical: float, cfg: GAConfig):
    c = np.array([m.c for m in members])
    s = np.array([m.secondary(cfg.objective) for m in members])
    g = np.abs(s - critical) if cfg.two_sided else s
    g = np.where(np.isnan(g), -np.inf, g)
    feas = np.array([m.feasible for m in members])
    viol = np.array([m.violation for m in members])
    return c, g, feas, viol


def _sides(members: list[Member], critical: float, cfg: GAConfig) -> np.ndarray:
    s = np.array([m.secondary(cfg.objective) for m in members])
    return s >= critical


def dominance_matrix(members: list[Member], critical: float, cfg: GAConfig) -> np.ndarray:
    """``D[i, j]`` is true when member ``i`` dominates member ``j``."""
    c, g, feas, viol = _objective_arrays(members, critical, cfg)
    both = feas[:, None] & feas[None, :]
    if cfg.two_sided and cfg.separate_branches:
        side = _sides(members, critical, cfg)
        both &= side[:, None] == side[None, :]
    pareto = (c[:, None] <= c[None, :]) & (g[:, None] >= g[None, :]) & (
        (c[:, None] < c[None, :]) | (g[:, None] > g[None, :])
    )
    infeas = ~feas[:, None] & ~feas[None, :]
    return (both & pareto) | (feas[:, None] & ~feas[None, :]) | (infeas & (viol[:, None] < viol[None, :]))


def nondominated_sort(members: list[Member], critical: float, cfg: GAConfig) -> list[list[int]]:
    dom = dominance_matrix(members, critical, cfg)
    remaining = np.ones(len(members), dtype=bool)
    fronts = []
    while remaining.any():
        dominated = (dom & remaining[:, None]).any(axis=0)
        front = np.flatnonzero(remaining & ~dominated)
        fronts.append(front.tolist())
        remaining[front] = False
    return fronts


def crowding_distance(c: np.ndarray, g: np.ndarray) -> np.ndarray:
    k = len(c)
    dist = np.zeros(k)
    if k <= 2:
        dist[:] = np.inf
        return dist
    for vals in (c, g):
        vals = np.where(np.isfinite(vals), vals, 0.0)
        order = np.argsort(vals, kind="stable")
        span = vals[order[-1]] - vals[order[0]]
        dist[order[0]] = dist[order[-1]] = np.inf
        if span > 0:
            dist[order[1:-1]] += (vals[order[2:]] - vals[order[:-2]]) / span
    return dist


def hypervolume(points: list[tuple[float, float]], c_ref: float, g_ref: float) -> float:
    """Area dominated by ``(c, g)`` points (minimize c, maximize g) inside the
    box bounded by ``c <= c_ref`` and ``g >= g_ref``."""
    pts = sorted((c, g) for c, g in points if c <= c_ref and g >= g_ref)
    area, best_g = 0.0, g_ref
    stair = []
    for c, g in pts:
        if g > best_g:
            stair.append((c, g))
            best_g = g
    for i, (c, g) in enumerate(stair):
        c_next = stair[i + 1][0] if i + 1 < len(stair) else c_ref
        area += (c_next - c) * (g - g_ref)
    return area


# -- evolution -------------------------------------------------------------


class _Evaluator:
    def __init__(self, setup: Setup, cfg: GAConfig):
        self.setup = setup
        self.cfg = cfg
        self.target = cfg.target or default_target()
        self.cache: dict[frozenset, Member] = {}

    def violation(self, d: float, m: int) -> float:
        cfg = self.cfg
        return (1.0 - d) + max(0, cfg.m_min - m, m - cfg.m_max)

    def __call__(self, net: Network, sigma_seed) -> Member:
        hit = self.cache.get(net.codes)
        if hit is not None:
            return Member(hit.network, hit.c, hit.d, hit.r, hit.sigma, hit.violation, hit.feasible)
        met = evaluate(net)
        viol = self.violation(met.d, met.m)
        mem = Member(net, met.c, met.d, met.r, violation=viol, feasible=viol == 0)
        if self.cfg.objective is Objective.COST_SIGMA and mem.feasible:
            mcfg = self.cfg.motif_cfg.replace(seed=_seed_int(sigma_seed))
            mem.sigma = motif_signature(net, mcfg, self.target).sigma
        self.cache[net.codes] = mem
        return Member(mem.network, mem.c, mem.d, mem.r, mem.sigma, mem.violation, mem.feasible)


def _seed_int(key) -> int:
    return int(np.random.SeedSequence(key).generate_state(1, dtype=np.uint32)[0])


def _critical(members: list[Member], cfg: GAConfig) -> float:
    feas = [(m.c, i) for i, m in enumerate(members) if m.feasible]
    if not feas:
        return 0.0
    _, i = min(feas)
    return members[i].secondary(cfg.objective)


def _branch_crowding(members: list[Member], idx: list[int], critical: float, cfg: GAConfig) -> np.ndarray:
    """Crowding of ``members[idx]``; with separate branches each side is its own front."""
    c, g, _, _ = _objective_arrays([members[i] for i in idx], critical, cfg)
    if not (cfg.two_sided and cfg.separate_branches):
        return crowding_distance(c, g)
    side = _sides([members[i] for i in idx], critical, cfg)
    out = np.empty(len(idx))
    for s in (False, True):
        sel = np.flatnonzero(side == s)
        if len(sel):
            out[sel] = crowding_distance(c[sel], g[sel])
    return out


def _rank(members: list[Member], cfg: GAConfig) -> tuple[float, list[list[int]]]:
    critical = _critical(members, cfg) if cfg.two_sided else 0.0
    fronts = nondominated_sort(members, critical, cfg)
    for rank, front in enumerate(fronts):
        cd = _branch_crowding(members, front, critical, cfg)
        for k, i in enumerate(front):
            members[i].rank = rank
            members[i].crowding = float(cd[k])
    return critical, fronts


def _order_key(members: list[Member]):
    return lambda i: (members[i].rank, -members[i].crowding, i)


def _distinct_first(ranked: list[Member], k: int) -> list[Member]:
    """Best ``k`` members, skipping repeats of a network while distinct ones remain."""
    seen, first, repeats = set(), [], []
    for m in ranked:
        (repeats if m.network.codes in seen else first).append(m)
        seen.add(m.network.codes)
    return (first + repeats)[:k]


def _tournament(elite: list[Member], rng: np.random.Generator) -> Member:
    i, j = rng.integers(len(elite), size=2)
    a, b = elite[i], elite[j]
    if (b.rank, -b.crowding, j) < (a.rank, -a.crowding, i):
        return b
    return a


def _c_ref(setup: Setup, cfg: GAConfig) -> float:
    lengths = np.sort(EdgeUniverse.of(setup, cfg.edge_length_cap).lengths)[::-1]
    return float(lengths[: max(cfg.m_max, 1)].sum())


def _g_ref(cfg: GAConfig) -> float:
    if cfg.two_sided or cfg.objective is Objective.COST_ROBUSTNESS:
        return 0.0
    return -1.0


def evolve(setup: Setup, cfg: GAConfig,
           progress: Callable[[int, dict], None] | None = None) -> ParetoArchive:
    """Run ``cfg.generations`` generations and return the final feasible
    nondominated set."""
    uni = EdgeUniverse.of(setup, cfg.edge_length_cap)
    if cfg.m_min > len(uni):
        raise ParameterError(f"m_min={cfg.m_min} exceeds the {len(uni)} admissible edges")
    m_hi = min(cfg.m_max, len(uni))
    p = cfg.population_size
    n_elite = max(1, int(round(cfg.elite_fraction * p)))
    n_random = int(round(cfg.random_fraction * p))
    n_off = p - n_elite - n_random
    ev = _Evaluator(setup, cfg)
    c_ref, g_ref = _c_ref(setup, cfg), _g_ref(cfg)

    def fresh(gen: int, idx: int) -> Member:
        rng = np.random.default_rng([cfg.seed, gen, idx])
        m = int(rng.integers(cfg.m_min, m_hi + 1))
        return ev(random_network(setup, m, cfg.edge_length_cap, rng), (cfg.seed, gen, idx, 1))

    pop = [fresh(0, i) for i in range(p)]
    history: list[dict] = []
    critical = 0.0
    for gen in range(cfg.generations):
        if gen:
            order = sorted(range(len(pop)), key=_order_key(pop))
            elite = _distinct_first([pop[i] for i in order], n_elite)
            prev_front = len({m.network.codes for m in pop if m.rank == 0 and m.feasible})
            nxt = list(elite)
            for k in range(n_off):
                idx = n_elite + k
                rng = np.random.default_rng([cfg.seed, gen, idx])
                if rng.integers(2) == 0:
                    child = mutate(_tournament(elite, rng).network, cfg, rng)
                else:
                    a = _tournament(elite, rng)
                    b = _tournament(elite, rng)
                    child = recombine(a.network, b.network, rng)
                nxt.append(ev(child, (cfg.seed, gen, idx, 1)))
            nxt.extend(fresh(gen, n_elite + n_off + k) for k in range(n_random))
            pop = nxt
        else:
            prev_front = 0
        critical, fronts = _rank(pop, cfg)
        front = [pop[i] for i in fronts[0] if pop[i].feasible]
        g_vals = [folded(m.secondary(cfg.objective), critical, cfg.two_sided) for m in front]
        rec = {
            "generation": gen,
            "n_feasible": sum(m.feasible for m in pop),
            "front_size": len(front),
            "critical": critical,
            "hypervolume": hypervolume([(m.c, g) for m, g in zip(front, g_vals)], c_ref, g_ref),
            "front_retained": gen == 0 or prev_front <= n_elite,
        }
        history.append(rec)
        if progress is not None:
            progress(gen, rec)

    archive = _final_front(pop, fronts, critical, cfg, ev)
    diag = "" if archive.members else (
        f"no feasible network after {cfg.generations} generations "
        f"(best violation {min(m.violation for m in pop):.3g})"
    )
    archive.history = history
    archive.diagnostic = diag
    if diag:
        log.warning(diag)
    return archive


def _final_front(pop, fronts, critical, cfg: GAConfig, ev: _Evaluator) -> ParetoArchive:
    seen = set()
    members = []
    for i in fronts[0]:
        m = pop[i]
        if m.feasible and m.network.codes not in seen:
            seen.add(m.network.codes)
            members.append(m)
    if (cfg.objective is Objective.COST_SIGMA and cfg.final_ensemble_size
            and members and cfg.final_ensemble_size != cfg.motif_cfg.ensemble_size):
        mcfg = cfg.motif_cfg.replace(ensemble_size=cfg.final_ensemble_size)
        for k, m in enumerate(members):
            sig = motif_signature(m.network, mcfg.replace(seed=_seed_int((cfg.seed, 0xF1, k))), ev.target)
            m.sigma = sig.sigma
    members.sort(key=lambda m: (m.c, m.secondary(cfg.objective)))
    # the archive's own critical value defines its dominance relation; filter
    # until the first front is stable under it
    while members:
        critical = _critical(members, cfg) if cfg.two_sided else 0.0
        keep = nondominated_sort(members, critical, cfg)[0]
        if len(keep) == len(members):
            break
        members = [members[i] for i in keep]
    if members:
        cd = _branch_crowding(members, list(range(len(members))), critical, cfg)
        for m, d in zip(members, cd):
            m.rank = 0
            m.crowding = float(d)
    return ParetoArchive(members, cfg.objective, cfg.two_sided, critical)


def verify_archive(archive: ParetoArchive, cfg: GAConfig) -> list[str]:
    """Integrity problems of an archive: members that are infeasible, out of
    the edge window or cap, or dominated by another member. Empty if sound."""
    problems = []
    cap = cfg.edge_length_cap
    for k, m in enumerate(archive.members):
        met = evaluate(m.network)
        if met.d != 1.0:
            problems.append(f"member {k}: d = {met.d}")
        if not cfg.m_min <= met.m <= cfg.m_max:
            problems.append(f"member {k}: M = {met.m} outside [{cfg.m_min}, {cfg.m_max}]")
        if cap is not None and m.network.edges:
            if float(edge_lengths(m.network).max()) > cap * (1 + 1e-12):
                problems.append(f"member {k}: edge longer than cap {cap}")
    members = archive.members
    for i in range(len(members)):
        for j in range(len(members)):
            if i != j and dominance(members[i], members[j], archive.critical, cfg) is Dominance.A_DOMINATES:
                problems.append(f"member {i} dominates member {j}")
    return problems
