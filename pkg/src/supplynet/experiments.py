"""Declarative experiment runner.

An :class:`ExperimentSpec` describes one study; ``run_experiment`` returns an
:class:`ExperimentResult` holding named tables that are written as CSV files
next to a ``run_manifest.json``. Every run is a pure function of the spec and
its input files.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np
import yaml

from . import __version__, _backend
from .errors import ParameterError, SamplingError
from .evolver import (EdgeUniverse, GAConfig, Objective, ParetoArchive, evolve,
                      random_network, verify_archive)
from .geo import BUDGET_ONE_PLUS_T, BUDGET_T, bundled_geo_path, expand_neighborhood, import_geo_network
from .model import Network, Setup, evaluate, generate_setup
from .motifs import NullModel, NullModelConfig, TargetSignature, default_target, motif_signature, triad_census
from .stats import pearson, spearman
from .steiner import connectivity_threshold
from .triads import FFL, N_CLASSES

log = logging.getLogger(__name__)

E1 = "E1_robustness_signatures"
E2 = "E2_sigma_optimization"
E3 = "E3_heuristic_insertion"
E4 = "E4_geo_neighborhood"
KINDS = (E1, E2, E3, E4)
_KIND_ALIASES = {"e1": E1, "e2": E2, "e3": E3, "e4": E4}


def default_windows(start: int = 10, stop: int = 40, step: int = 3, width: int = 6) -> list[tuple[int, int]]:
    """Edge-count windows ``(m, m + width)`` for ``m = start, start + step, ..., stop``."""
    return [(m, m + width) for m in range(start, stop + 1, step)]


def derive_seed(*key) -> int:
    """Stable 32-bit seed for a unit of work identified by ``key``."""
    words = [int(hashlib.sha256(str(k).encode()).hexdigest()[:8], 16) if isinstance(k, str) else int(k)
             for k in key]
    return int(np.random.SeedSequence(words).generate_state(1, dtype=np.uint32)[0])


# -- spec ------------------------------------------------------------------


@dataclass(frozen=True)
class ExperimentSpec:
    kind: str
    setups: int = 50
    n: int = 20
    n_producers: int = 1
    n_demanders: int | None = None
    m_windows: tuple[tuple[int, int], ...] | None = None
    percentiles: tuple[float, float] = (10.0, 90.0)
    sigma_percentiles: tuple[float, ...] = (10.0, 30.0, 50.0, 70.0, 90.0)
    base_networks: int = 500
    base_attempts: int = 10_000
    top_fraction: float = 0.10
    t_values: tuple[float, ...] = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5)
    budget: str = BUDGET_ONE_PLUS_T
    geo_file: str | None = None
    seed: int = 0
    population_size: int = 200
    generations: int = 150
    mutation_size: int = 1
    elite_fraction: float = 0.30
    random_fraction: float = 0.05
    length_cap_factor: float = 1.2
    null_model: str = NullModel.PRESERVE_MUTUAL.value
    ensemble_size: int = 500
    search_ensemble_size: int = 100
    swaps_per_edge: int = 10
    target: str | None = None
    workers: int = 1

    def __post_init__(self):
        kind = _KIND_ALIASES.get(str(self.kind).lower(), self.kind)
        if kind not in KINDS:
            raise ParameterError(f"unknown experiment kind {self.kind!r}; expected one of {', '.join(KINDS)}")
        object.__setattr__(self, "kind", kind)
        windows = self.m_windows
        if windows is None:
            windows = default_windows() if kind == E1 else [(16, 22)]
        try:
            windows = tuple((int(a), int(b)) for a, b in windows)
        except (TypeError, ValueError):
            raise ParameterError("m_windows must be a list of [m_min, m_max] pairs") from None
        if not windows or any(not 0 <= a <= b for a, b in windows):
            raise ParameterError("every m window needs 0 <= m_min <= m_max")
        object.__setattr__(self, "m_windows", windows)
        object.__setattr__(self, "percentiles", tuple(float(p) for p in self.percentiles))
        object.__setattr__(self, "sigma_percentiles", tuple(float(p) for p in self.sigma_percentiles))
        object.__setattr__(self, "t_values", tuple(float(t) for t in self.t_values))
        object.__setattr__(self, "null_model", NullModel.parse(self.null_model).value)
        if self.n_demanders is None:
            object.__setattr__(self, "n_demanders", self.n // 2)
        lo, hi = self.percentiles if len(self.percentiles) == 2 else (math.nan, math.nan)
        if not 0 <= lo <= hi <= 100:
            raise ParameterError("percentiles must be (low, high) with 0 <= low <= high <= 100")
        if any(not 0 <= p <= 100 for p in self.sigma_percentiles):
            raise ParameterError("sigma_percentiles must lie in [0, 100]")
        if not 0 < self.top_fraction <= 1:
            raise ParameterError("top_fraction must lie in (0, 1]")
        if any(not t >= 0 for t in self.t_values):
            raise ParameterError("t_values must be >= 0")
        if self.budget not in (BUDGET_ONE_PLUS_T, BUDGET_T):
            raise ParameterError(f"budget must be {BUDGET_ONE_PLUS_T!r} or {BUDGET_T!r}")
        for name in ("setups", "base_networks", "base_attempts", "ensemble_size",
                     "search_ensemble_size", "workers"):
            if getattr(self, name) < 1:
                raise ParameterError(f"{name} must be >= 1")
        if self.length_cap_factor <= 0:
            raise ParameterError("length_cap_factor must be positive")

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentSpec":
        if not isinstance(doc, dict):
            raise ParameterError("experiment spec must be a mapping")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(doc) - known)
        if unknown:
            raise ParameterError(f"unknown spec field(s): {', '.join(unknown)}")
        if "kind" not in doc:
            raise ParameterError("experiment spec needs a 'kind'")
        return cls(**doc)

    @classmethod
    def load(cls, path: str | Path) -> "ExperimentSpec":
        try:
            doc = yaml.safe_load(Path(path).read_text())
        except yaml.YAMLError as exc:
            raise ParameterError(f"{path}: {exc}") from None
        return cls.from_dict(doc or {})

    def to_dict(self) -> dict:
        doc = asdict(self)
        doc["m_windows"] = [list(w) for w in self.m_windows]
        for key in ("percentiles", "sigma_percentiles", "t_values"):
            doc[key] = list(doc[key])
        return doc

    def null_config(self, ensemble_size: int | None = None, seed: int = 0) -> NullModelConfig:
        return NullModelConfig(NullModel(self.null_model), ensemble_size or self.ensemble_size,
                               self.swaps_per_edge, seed)

    def target_signature(self) -> TargetSignature:
        return TargetSignature.load(self.target) if self.target else default_target()

    def setup_seed(self, k: int) -> int:
        return derive_seed(self.seed, "setup", k)

    def make_setup(self, k: int) -> Setup:
        return generate_setup(self.n, self.n_producers, self.n_demanders, self.setup_seed(k))


_TEMPLATE_NOTES = {
    E1: "Robust and vulnerable motif signatures along the (c, r) front.",
    E2: "Direct (c, sigma) optimization with an edge-length cap.",
    E3: "Robustness gain of single-edge insertions ranked by motif heuristics.",
    E4: "Neighborhood expansion of product subnetworks and r-sigma correlation.",
}

_FIELD_NOTES = {
    "setups": "number of random setups (E1, E2)",
    "n": "nodes per setup",
    "n_producers": "producers per setup",
    "n_demanders": "demanders per setup; null means n // 2",
    "m_windows": "edge-count windows [m_min, m_max]",
    "percentiles": "low and high r percentiles used to pick vulnerable and robust networks (E1)",
    "sigma_percentiles": "r percentiles at which sigma is sampled (E1)",
    "base_networks": "random full-demand base networks (E3)",
    "base_attempts": "rejection-sampling attempts per base network (E3)",
    "top_fraction": "share of insertions in the high group for z07 and sigma (E3)",
    "t_values": "neighborhood sizes (E4)",
    "budget": "path budget: one_plus_t = (1 + t) * L, t = t * L (E4)",
    "geo_file": "geo-network JSON; null uses the bundled synthetic fixture (E4)",
    "seed": "master seed; every unit derives its own stream from it",
    "population_size": "GA population",
    "generations": "GA generations",
    "mutation_size": "edges touched per mutation",
    "elite_fraction": "share of the population kept as elite",
    "random_fraction": "share of fresh random networks per generation",
    "length_cap_factor": "edge-length cap as a multiple of the connectivity threshold (E2)",
    "null_model": "preserve_mutual | ignore_mutual | preserve_demand",
    "ensemble_size": "null-model ensemble for reported signatures",
    "search_ensemble_size": "null-model ensemble inside the sigma optimizer (E2)",
    "swaps_per_edge": "switch attempts per edge when randomizing",
    "target": "target signature JSON; null uses the bundled default",
    "workers": "worker processes for independent units",
}


def spec_template(kind: str) -> str:
    """Commented YAML spec with the defaults for ``kind``."""
    spec = ExperimentSpec(kind)
    lines = [f"# {_TEMPLATE_NOTES[spec.kind]}", f"kind: {spec.kind}"]
    for key, value in spec.to_dict().items():
        if key == "kind":
            continue
        lines.append(f"# {_FIELD_NOTES[key]}")
        lines.append(f"{key}: {json.dumps(value)}")
    return "\n".join(lines) + "\n"


# -- results ---------------------------------------------------------------


def _cell(v) -> str:
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, np.integer):
        return str(int(v))
    return str(v)


@dataclass
class Table:
    columns: tuple[str, ...]
    rows: list[tuple] = field(default_factory=list)

    def add(self, *row):
        if len(row) != len(self.columns):
            raise ValueError(f"row has {len(row)} cells, table has {len(self.columns)} columns")
        self.rows.append(tuple(row))

    def column(self, name: str) -> list:
        k = self.columns.index(name)
        return [row[k] for row in self.rows]

    def records(self) -> list[dict]:
        return [dict(zip(self.columns, row)) for row in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([_cell(v) for v in row])
        return buf.getvalue()


@dataclass
class ExperimentResult:
    spec: ExperimentSpec
    tables: dict[str, Table]
    provenance: dict[str, Any] = field(default_factory=dict)

    def write(self, out_dir: str | Path) -> Path:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        digests = {}
        for name, tab in self.tables.items():
            text = tab.to_csv()
            (out / f"{name}.csv").write_text(text)
            digests[f"{name}.csv"] = hashlib.sha256(text.encode()).hexdigest()
        (out / "spec.json").write_text(json.dumps(self.spec.to_dict(), indent=1) + "\n")
        manifest = {**self.provenance, "outputs": digests}
        (out / "run_manifest.json").write_text(json.dumps(manifest, indent=1, default=_cell) + "\n")
        return out


def _provenance(spec: ExperimentSpec, **extra) -> dict:
    return {
        "kind": spec.kind,
        "seed": spec.seed,
        "artifact_version": __version__,
        "backend": _backend.BACKEND,
        "spec": spec.to_dict(),
        **extra,
    }


def _pmap(fn: Callable, items: Sequence, workers: int) -> list:
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# -- shared pieces ---------------------------------------------------------


def nearest_member(archive: Sequence, target_r: float):
    """Member whose r is nearest ``target_r``; ties go to the lower cost."""
    return min(enumerate(archive), key=lambda im: (abs(im[1].r - target_r), im[1].c, im[0]))


def _ga_config(spec: ExperimentSpec, window, seed: int, **kw) -> GAConfig:
    return GAConfig(
        m_min=window[0], m_max=window[1],
        population_size=spec.population_size, generations=spec.generations,
        mutation_size=spec.mutation_size, elite_fraction=spec.elite_fraction,
        random_fraction=spec.random_fraction, seed=seed, **kw,
    )


def _checked(archive: ParetoArchive, cfg: GAConfig, where: str) -> ParetoArchive:
    problems = verify_archive(archive, cfg)
    if problems:
        raise RuntimeError(f"{where}: archive integrity violated: {'; '.join(problems[:5])}")
    return archive


_Z_COLS = tuple(f"z{k:02d}" for k in range(1, N_CLASSES + 1))


# -- E1 --------------------------------------------------------------------


def _e1_unit(args):
    spec, w, k = args
    setup = spec.make_setup(k)
    seed = derive_seed(spec.seed, "ga", w, k)
    cfg = _ga_config(spec, spec.m_windows[w], seed)
    archive = _checked(evolve(setup, cfg), cfg, f"window {w} setup {k}")
    return [(m.network.edges, m.c, m.r, m.m) for m in archive], seed


def run_E1(spec: ExperimentSpec, progress: Callable[[str], None] | None = None) -> ExperimentResult:
    """Robust and vulnerable signatures along the (c, r) front per edge window."""
    _require(spec, E1)
    target = spec.target_signature()
    units = [(spec, w, k) for w in range(len(spec.m_windows)) for k in range(spec.setups)]
    raw = _pmap(_e1_unit, units, spec.workers)
    setups = {k: spec.make_setup(k) for k in range(spec.setups)}

    front = Table(("window", "m_min", "m_max", "setup", "setup_seed", "ga_seed", "member", "c", "r", "m"))
    zs = Table(("window", "m_min", "m_max", "setup", "setup_seed", "group", "percentile", "target_r",
                "member", "c", "r", "m", "sigma") + _Z_COLS)
    zsum = Table(("window", "m_min", "m_max", "setup", "seed", "group", "class", "mean", "std",
                  "n", "n_positive", "n_negative"))
    svr = Table(("window", "m_min", "m_max", "setup", "setup_seed", "percentile", "target_r",
                 "member", "c", "r", "sigma"))
    ssum = Table(("window", "m_min", "m_max", "setup", "seed", "percentile", "target_r",
                  "mean_sigma", "std_sigma", "n"))
    wins = Table(("window", "m_min", "m_max", "setup", "seed", "n_setups", "n_with_archive",
                  "p_low", "p_high", "flagged"))

    by_window: dict[int, dict[int, list]] = {}
    for (_, w, k), (members, ga_seed) in zip(units, raw):
        mm = spec.m_windows[w]
        by_window.setdefault(w, {})[k] = members
        for i, (_, c, r, m) in enumerate(members):
            front.add(w, mm[0], mm[1], k, spec.setup_seed(k), ga_seed, i, c, r, m)

    low, high = spec.percentiles
    for w, archives in sorted(by_window.items()):
        mm = spec.m_windows[w]
        pooled = [m[2] for k in sorted(archives) for m in archives[k]]
        with_arch = sum(1 for a in archives.values() if a)
        if not pooled:
            wins.add(w, mm[0], mm[1], "all", spec.seed, spec.setups, 0, math.nan, math.nan, 1)
            log.warning("window %s: no feasible archive in any setup", mm)
            continue
        wanted = sorted({low, high, *spec.sigma_percentiles})
        targets = dict(zip(wanted, np.percentile(pooled, wanted).tolist()))
        wins.add(w, mm[0], mm[1], "all", spec.seed, spec.setups, with_arch,
                 targets[low], targets[high], int(with_arch < spec.setups))
        group_z: dict[str, list[np.ndarray]] = {"vulnerable": [], "robust": []}
        sig_by_p: dict[float, list[float]] = {p: [] for p in spec.sigma_percentiles}
        for k in sorted(archives):
            members = archives[k]
            if not members:
                continue
            setup = setups[k]
            mcfg = spec.null_config(seed=derive_seed(spec.seed, "signature", w, k))
            cache: dict[int, Any] = {}

            def signature(i):
                if i not in cache:
                    net = Network(setup, members[i][0])
                    cache[i] = motif_signature(net, mcfg, target)
                return cache[i]

            def choose(p):
                i, _ = nearest_member([_RC(r=m[2], c=m[1]) for m in members], targets[p])
                return i

            for group, p in (("vulnerable", low), ("robust", high)):
                i = choose(p)
                sig = signature(i)
                _, c, r, m = members[i]
                zs.add(w, mm[0], mm[1], k, spec.setup_seed(k), group, p, targets[p], i, c, r, m,
                       sig.sigma, *[float(x) for x in sig.z])
                group_z[group].append(sig.z)
            for p in spec.sigma_percentiles:
                i = choose(p)
                sig = signature(i)
                _, c, r, _ = members[i]
                svr.add(w, mm[0], mm[1], k, spec.setup_seed(k), p, targets[p], i, c, r, sig.sigma)
                sig_by_p[p].append(sig.sigma)
            if progress:
                progress(f"E1 window {mm} setup {k}: {len(members)} archive members")
        for group, zlist in group_z.items():
            arr = np.array(zlist).reshape(-1, N_CLASSES)
            for cls in range(N_CLASSES):
                col = arr[:, cls]
                zsum.add(w, mm[0], mm[1], "all", spec.seed, group, cls + 1,
                         float(col.mean()) if len(col) else math.nan,
                         float(col.std()) if len(col) else math.nan,
                         len(col), int((col > 0).sum()), int((col < 0).sum()))
        for p in spec.sigma_percentiles:
            vals = np.array(sig_by_p[p])
            ssum.add(w, mm[0], mm[1], "all", spec.seed, p, targets[p],
                     float(vals.mean()) if len(vals) else math.nan,
                     float(vals.std()) if len(vals) else math.nan, len(vals))

    tables = {"front": front, "zscores": zs, "zscore_summary": zsum, "sigma_vs_r": svr,
              "sigma_summary": ssum, "windows": wins}
    return ExperimentResult(spec, tables, _provenance(spec))


@dataclass(frozen=True)
class _RC:
    r: float
    c: float


# -- E2 --------------------------------------------------------------------


def _e2_unit(args):
    spec, w, k = args
    setup = spec.make_setup(k)
    seed = derive_seed(spec.seed, "ga", w, k)
    cap = spec.length_cap_factor * connectivity_threshold(setup)
    mcfg = spec.null_config(spec.search_ensemble_size, seed=derive_seed(spec.seed, "search", w, k))
    cfg = _ga_config(spec, spec.m_windows[w], seed, edge_length_cap=cap,
                     objective=Objective.COST_SIGMA, two_sided=True, motif_cfg=mcfg,
                     final_ensemble_size=spec.ensemble_size, target=spec.target_signature())
    archive = _checked(evolve(setup, cfg), cfg, f"window {w} setup {k}")
    return [(m.c, m.sigma, m.r, m.m) for m in archive], seed, cap


def run_E2(spec: ExperimentSpec, progress: Callable[[str], None] | None = None) -> ExperimentResult:
    """Cost versus signature-strength optimization under an edge-length cap."""
    _require(spec, E2)
    units = [(spec, w, k) for w in range(len(spec.m_windows)) for k in range(spec.setups)]
    raw = _pmap(_e2_unit, units, spec.workers)
    front = Table(("window", "m_min", "m_max", "setup", "setup_seed", "ga_seed", "cap", "member",
                   "c", "sigma", "r", "m"))
    bins = Table(("window", "m_min", "m_max", "setup", "seed", "sigma_low", "sigma_high", "n",
                  "mean_r", "std_r", "min_r", "max_r"))
    summary = Table(("window", "m_min", "m_max", "setup", "seed", "n_members", "sigma_min",
                     "sigma_max", "top_decile_mean_r", "bottom_decile_mean_r", "n_decile"))
    pooled: dict[int, list[tuple[float, float]]] = {}
    for (_, w, k), (members, ga_seed, cap) in zip(units, raw):
        mm = spec.m_windows[w]
        for i, (c, s, r, m) in enumerate(members):
            front.add(w, mm[0], mm[1], k, spec.setup_seed(k), ga_seed, cap, i, c, s, r, m)
            pooled.setdefault(w, []).append((s, r))
        if progress:
            progress(f"E2 window {mm} setup {k}: {len(members)} archive members")
    edges = np.linspace(-1.0, 1.0, 11)
    for w, mm in enumerate(spec.m_windows):
        pts = pooled.get(w, [])
        sig = np.array([p[0] for p in pts])
        rr = np.array([p[1] for p in pts])
        for b in range(len(edges) - 1):
            lo, hi = edges[b], edges[b + 1]
            sel = (sig >= lo) & ((sig < hi) if b < len(edges) - 2 else (sig <= hi))
            vals = rr[sel]
            bins.add(w, mm[0], mm[1], "all", spec.seed, float(lo), float(hi), int(sel.sum()),
                     *([float(vals.mean()), float(vals.std()), float(vals.min()), float(vals.max())]
                       if len(vals) else [math.nan] * 4))
        if len(pts):
            order = sorted(pts)
            kdec = max(1, math.ceil(0.1 * len(order)))
            bottom = float(np.mean([r for _, r in order[:kdec]]))
            top = float(np.mean([r for _, r in order[-kdec:]]))
            summary.add(w, mm[0], mm[1], "all", spec.seed, len(pts), float(sig.min()), float(sig.max()),
                        top, bottom, kdec)
        else:
            summary.add(w, mm[0], mm[1], "all", spec.seed, 0, *[math.nan] * 4, 0)
    tables = {"front": front, "sigma_vs_r": bins, "summary": summary}
    return ExperimentResult(spec, tables, _provenance(spec))


# -- E3 --------------------------------------------------------------------


def sample_full_demand(setup: Setup, window: tuple[int, int], rng: np.random.Generator,
                       attempts: int) -> tuple[Network, int]:
    """Random network with ``d = 1`` by rejection; returns it and the attempts used."""
    for a in range(1, attempts + 1):
        m = int(rng.integers(window[0], window[1] + 1))
        net = random_network(setup, m, None, rng)
        if evaluate(net).d == 1.0:
            return net, a
    raise SamplingError(f"no full-demand network in {attempts} attempts")


def _top_mask(delta: np.ndarray, fraction: float) -> np.ndarray:
    k = max(1, math.ceil(fraction * len(delta)))
    order = np.argsort(-delta, kind="stable")
    mask = np.zeros(len(delta), dtype=bool)
    mask[order[:k]] = True
    return mask


def _e3_unit(args):
    spec, slot = args
    setup = generate_setup(spec.n, spec.n_producers, spec.n_demanders, derive_seed(spec.seed, "e3-setup", slot))
    rng = np.random.default_rng([spec.seed, slot])
    try:
        base, attempts = sample_full_demand(setup, spec.m_windows[0], rng, spec.base_attempts)
    except SamplingError:
        return slot, None, spec.base_attempts
    target = spec.target_signature()
    mcfg = spec.null_config(seed=derive_seed(spec.seed, "e3-signature", slot))
    sig0 = motif_signature(base, mcfg, target)
    r0 = evaluate(base).r
    c07_0 = sig0.counts[FFL]
    rows = []
    for code in EdgeUniverse.of(setup).codes.tolist():
        if code in base.codes:
            continue
        ext = Network.from_codes(setup, base.codes | {code})
        sig = motif_signature(ext, mcfg, target)
        rows.append((*divmod(code, setup.n), sig.counts[FFL] - c07_0, sig.z07 - sig0.z07,
                     sig.sigma - sig0.sigma, evaluate(ext).r - r0))
    return slot, (base, sig0, r0, rows), attempts


def heuristic_groups(d_c07, d_z07, d_sigma, top_fraction: float) -> dict[str, np.ndarray]:
    """High-group masks per criterion: ``c07`` by a positive gain, the others
    by the top ``top_fraction`` of gains."""
    return {
        "c07": np.asarray(d_c07) > 0,
        "z07": _top_mask(np.asarray(d_z07, dtype=float), top_fraction),
        "sigma": _top_mask(np.asarray(d_sigma, dtype=float), top_fraction),
    }


def run_E3(spec: ExperimentSpec, progress: Callable[[str], None] | None = None) -> ExperimentResult:
    """Robustness gain of single insertions split by motif-based heuristics."""
    _require(spec, E3)
    bases = Table(("base", "slot", "seed", "setup_seed", "status", "attempts", "m", "r", "sigma", "z07", "c07"))
    deltas = Table(("base", "seed", "u", "v", "d_c07", "d_z07", "d_sigma", "d_r",
                    "high_c07", "high_z07", "high_sigma"))
    means = Table(("base", "seed", "criterion", "mean_high", "mean_low", "n_high", "n_low"))
    summary = Table(("setup", "seed", "criterion", "pooled_high", "pooled_low", "n_bases"))
    per_crit: dict[str, list[tuple[float, float]]] = {"c07": [], "z07": [], "sigma": []}
    done = failures = 0
    slot = 0
    max_slots = 4 * spec.base_networks
    while done < spec.base_networks and slot < max_slots:
        batch = list(range(slot, min(slot + spec.base_networks - done, max_slots)))
        slot = batch[-1] + 1
        for s, res, attempts in _pmap(_e3_unit, [(spec, s) for s in batch], spec.workers):
            seed = derive_seed(spec.seed, "e3-setup", s)
            if res is None:
                failures += 1
                bases.add("-", s, spec.seed, seed, "failed", attempts, 0, *[math.nan] * 4)
                continue
            if done >= spec.base_networks:
                break
            b = done
            done += 1
            base, sig0, r0, rows = res
            bases.add(b, s, spec.seed, seed, "ok", attempts, base.m, r0, sig0.sigma, sig0.z07, sig0.counts[FFL])
            if not rows:
                continue
            arr = np.array([row[2:] for row in rows], dtype=float)
            groups = heuristic_groups(arr[:, 0], arr[:, 1], arr[:, 2], spec.top_fraction)
            for i, row in enumerate(rows):
                deltas.add(b, spec.seed, row[0], row[1], int(row[2]), row[3], row[4], row[5],
                           bool(groups["c07"][i]), bool(groups["z07"][i]), bool(groups["sigma"][i]))
            dr = arr[:, 3]
            for crit, mask in groups.items():
                hi = float(dr[mask].mean()) if mask.any() else math.nan
                lo = float(dr[~mask].mean()) if (~mask).any() else math.nan
                means.add(b, spec.seed, crit, hi, lo, int(mask.sum()), int((~mask).sum()))
                if math.isfinite(hi) and math.isfinite(lo):
                    per_crit[crit].append((hi, lo))
            if progress:
                progress(f"E3 base {b} (slot {s}): {len(rows)} insertions")
    for crit, pairs in per_crit.items():
        if pairs:
            summary.add("all", spec.seed, crit, float(np.mean([p[0] for p in pairs])),
                        float(np.mean([p[1] for p in pairs])), len(pairs))
        else:
            summary.add("all", spec.seed, crit, math.nan, math.nan, 0)
    if done < spec.base_networks:
        log.warning("E3: only %d of %d base networks generated", done, spec.base_networks)
    tables = {"bases": bases, "deltas": deltas, "group_means": means, "summary": summary}
    return ExperimentResult(spec, tables, _provenance(spec, base_networks=done, base_failures=failures))


# -- E4 --------------------------------------------------------------------


def run_E4(spec: ExperimentSpec, progress: Callable[[str], None] | None = None) -> ExperimentResult:
    """Neighborhood expansion of product subnetworks and the r-sigma correlation."""
    _require(spec, E4)
    path = Path(spec.geo_file) if spec.geo_file else bundled_geo_path()
    _, products = import_geo_network(path)
    target = spec.target_signature()
    scatter = Table(("t", "product", "name", "seed", "n_active", "m", "d", "r", "sigma", "flagged"))
    corr = Table(("t", "setup", "seed", "n", "spearman", "spearman_p", "pearson", "pearson_p"))
    for t in spec.t_values:
        rs, ss = [], []
        for j, prod in enumerate(products):
            net = expand_neighborhood(prod.network, t, spec.budget)
            met = evaluate(net)
            n_active = len({u for e in net.edges for u in e})
            flagged = n_active < 3 or net.m < 2
            sigma = math.nan
            if not flagged:
                mcfg = spec.null_config(seed=derive_seed(spec.seed, "e4", j))
                sigma = motif_signature(net, mcfg, target).sigma
                rs.append(met.r)
                ss.append(sigma)
            scatter.add(t, j, prod.name, spec.seed, n_active, net.m, met.d, met.r, sigma, flagged)
        if len(rs) >= 3:
            rho, p_rho = spearman(rs, ss)
            r_p, p_p = pearson(rs, ss)
        else:
            rho = p_rho = r_p = p_p = math.nan
        corr.add(t, "all", spec.seed, len(rs), rho, p_rho, r_p, p_p)
        if progress:
            progress(f"E4 t={t}: n={len(rs)} spearman={rho:.3f}")
    tables = {"scatter": scatter, "correlations": corr}
    return ExperimentResult(spec, tables, _provenance(spec, geo_file=str(path.name)))


# -- dispatch --------------------------------------------------------------


def _require(spec: ExperimentSpec, kind: str):
    if spec.kind != kind:
        raise ParameterError(f"spec kind is {spec.kind}, expected {kind}")


RUNNERS = {E1: run_E1, E2: run_E2, E3: run_E3, E4: run_E4}


def run_experiment(spec: ExperimentSpec, progress: Callable[[str], None] | None = None) -> ExperimentResult:
    return RUNNERS[spec.kind](spec, progress)
