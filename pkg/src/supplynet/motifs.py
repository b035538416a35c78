"""Triad census, degree-preserving null models and motif signatures."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import _backend
from .errors import LoadError, ParameterError, SamplingError
from .model import Network, satisfied_demanders
from .triads import CODE_TO_CLASS, CYCLE, DISCONNECTED, FFL, N_CLASSES, encode

__all__ = [
    "CYCLE",
    "DISCONNECTED",
    "FFL",
    "MotifSignature",
    "NullModel",
    "NullModelConfig",
    "TargetSignature",
    "TriadCensus",
    "classify_triad",
    "default_target",
    "motif_signature",
    "randomize",
    "signature_strength",
    "triad_census",
]

Z_CAP = 10.0


class NullModel(str, enum.Enum):
    PRESERVE_MUTUAL = "preserve_mutual"
    IGNORE_MUTUAL = "ignore_mutual"
    PRESERVE_DEMAND = "preserve_demand"

    @classmethod
    def parse(cls, value: "str | NullModel") -> "NullModel":
        aliases = {"mutual": cls.PRESERVE_MUTUAL, "nomutual": cls.IGNORE_MUTUAL, "demand": cls.PRESERVE_DEMAND}
        if isinstance(value, cls):
            return value
        try:
            return aliases.get(value) or cls(value)
        except ValueError:
            raise ParameterError(f"unknown null model {value!r}") from None


@dataclass(frozen=True)
class NullModelConfig:
    variant: NullModel = NullModel.PRESERVE_MUTUAL
    ensemble_size: int = 500
    swaps_per_edge: int = 10
    seed: int = 0
    z_cap: float = Z_CAP
    #: whole-randomization retries for ``preserve_demand``
    max_attempts: int = 200

    def __post_init__(self):
        object.__setattr__(self, "variant", NullModel.parse(self.variant))
        if self.ensemble_size < 10:
            raise ParameterError("ensemble_size must be >= 10")
        if self.swaps_per_edge < 1:
            raise ParameterError("swaps_per_edge must be >= 1")
        if self.max_attempts < 1:
            raise ParameterError("max_attempts must be >= 1")

    def replace(self, **kw) -> "NullModelConfig":
        return NullModelConfig(**{**self.__dict__, **kw})


@dataclass(frozen=True)
class TriadCensus:
    """Counts of the 13 connected triad classes; ``census[7]`` is the FFL count."""

    counts: np.ndarray

    def __getitem__(self, class_id: int) -> int:
        if not 1 <= class_id <= N_CLASSES:
            raise IndexError(class_id)
        return int(self.counts[class_id - 1])

    def __eq__(self, other):
        return isinstance(other, TriadCensus) and np.array_equal(self.counts, other.counts)

    def tolist(self) -> list[int]:
        return [int(c) for c in self.counts]


@dataclass(frozen=True)
class TargetSignature:
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (N_CLASSES,):
            raise ParameterError(f"target signature needs {N_CLASSES} components, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ParameterError("target signature has non-finite components")
        if np.ptp(v) == 0:
            raise ParameterError("target signature components must not all be equal")
        object.__setattr__(self, "values", v)

    @classmethod
    def load(cls, path: str | Path) -> "TargetSignature":
        try:
            raw = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise LoadError(f"{path}: line {exc.lineno}: {exc.msg}") from None
        if isinstance(raw, dict):
            raw = raw.get("values")
        if not isinstance(raw, list):
            raise LoadError(f"{path}: expected a JSON array of {N_CLASSES} numbers")
        try:
            return cls(np.array(raw, dtype=float))
        except (TypeError, ValueError) as exc:
            raise LoadError(f"{path}: {exc}") from None


def default_target() -> TargetSignature:
    """Bundled target pattern (``data/target_signature.json``)."""
    return TargetSignature.load(resources.files("supplynet").joinpath("data/target_signature.json"))


@dataclass(frozen=True)
class MotifSignature:
    counts: TriadCensus
    z: np.ndarray
    sp: np.ndarray
    sigma: float
    ensemble_mean: np.ndarray
    ensemble_std: np.ndarray
    ensemble_size: int
    null_model: NullModel = field(default=NullModel.PRESERVE_MUTUAL)

    @property
    def z07(self) -> float:
        return float(self.z[FFL - 1])

    def to_dict(self) -> dict:
        return {
            "counts": self.counts.tolist(),
            "z": [float(x) for x in self.z],
            "sp": [float(x) for x in self.sp],
            "sigma": float(self.sigma),
            "ensemble_size": self.ensemble_size,
            "null_model": self.null_model.value,
        }


def classify_triad(adj) -> int | str:
    """Class id 1..13 of a 3x3 adjacency matrix, or ``"disconnected"``."""
    a = np.asarray(adj)
    if a.shape != (3, 3):
        raise ParameterError("expected a 3x3 adjacency matrix")
    if np.any(np.diag(a)):
        raise ParameterError("adjacency diagonal must be zero")
    cid = int(CODE_TO_CLASS[encode(a)])
    return cid if cid else DISCONNECTED


def _census_counts(adj: np.ndarray) -> np.ndarray:
    if adj.shape[0] < 3:
        return np.zeros(N_CLASSES, dtype=np.int64)
    return np.asarray(_backend.kernels.triad_census(adj, CODE_TO_CLASS))[1:]


def triad_census(net: Network) -> TriadCensus:
    return TriadCensus(_census_counts(net.adjacency))


# -- null models -----------------------------------------------------------


def split_edges(net: Network, keep_mutual: bool) -> tuple[np.ndarray, np.ndarray]:
    """Single edges and mutual pairs ``(u < v)``; all edges are single when
    ``keep_mutual`` is false."""
    if not keep_mutual:
        return net.edge_array.copy(), np.zeros((0, 2), dtype=np.int32)
    present = set(net.edges)
    singles = [(u, v) for u, v in net.edges if (v, u) not in present]
    pairs = [(u, v) for u, v in net.edges if u < v and (v, u) in present]
    return (
        np.array(singles, dtype=np.int32).reshape(-1, 2),
        np.array(pairs, dtype=np.int32).reshape(-1, 2),
    )


def draw_proposals(rng: np.random.Generator, n_singles: int, n_pairs: int,
                   swaps_per_edge: int, members: int) -> tuple[np.ndarray, np.ndarray]:
    """Pre-drawn switch proposals, shapes ``(K, S, 2)`` and ``(K, P, 3)``.

    Each pair counts as two edges toward the attempt budget, so the total
    number of attempts is ``swaps_per_edge * M``.
    """
    ns = swaps_per_edge * n_singles if n_singles >= 2 else 0
    npr = swaps_per_edge * 2 * n_pairs if n_pairs >= 2 else 0
    prop_s = rng.integers(0, max(n_singles, 1), size=(members, ns, 2), dtype=np.int32)
    prop_p = np.empty((members, npr, 3), dtype=np.int32)
    prop_p[..., :2] = rng.integers(0, max(n_pairs, 1), size=(members, npr, 2), dtype=np.int32)
    prop_p[..., 2] = rng.integers(0, 2, size=(members, npr), dtype=np.int32)
    return prop_s, prop_p


def _join(net: Network, singles: np.ndarray, pairs: np.ndarray) -> Network:
    n = net.setup.n
    codes = [int(u) * n + int(v) for u, v in singles.tolist()]
    for u, v in pairs.tolist():
        codes.append(u * n + v)
        codes.append(v * n + u)
    return Network.from_codes(net.setup, codes)


def _randomize_once(net, singles, pairs, cfg, rng, keep_mutual) -> Network:
    prop_s, prop_p = draw_proposals(rng, len(singles), len(pairs), cfg.swaps_per_edge, 1)
    s, p = _backend.kernels.switch_randomize(singles, pairs, net.setup.n, prop_s[0], prop_p[0], keep_mutual)
    return _join(net, np.asarray(s), np.asarray(p))


def _demand_preserving(net: Network, cfg: NullModelConfig, rng: np.random.Generator) -> Network:
    singles, pairs = split_edges(net, keep_mutual=False)
    target = satisfied_demanders(net)
    for _ in range(cfg.max_attempts):
        cand = _randomize_once(net, singles, pairs, cfg, rng, False)
        if satisfied_demanders(cand) == target:
            return cand
    raise SamplingError(
        f"preserve_demand: no randomization with d = {target / len(net.setup.demanders):.3f} "
        f"in {cfg.max_attempts} attempts; raise max_attempts"
    )


def randomize(net: Network, cfg: NullModelConfig, seed: int | None = None) -> Network:
    """One degree-preserving randomization of ``net`` under ``cfg.variant``."""
    if net.m < 2:
        raise ParameterError("randomize needs at least 2 edges")
    rng = np.random.default_rng(cfg.seed if seed is None else seed)
    if cfg.variant is NullModel.PRESERVE_DEMAND:
        return _demand_preserving(net, cfg, rng)
    keep = cfg.variant is NullModel.PRESERVE_MUTUAL
    singles, pairs = split_edges(net, keep)
    return _randomize_once(net, singles, pairs, cfg, rng, keep)


def ensemble_censuses(net: Network, cfg: NullModelConfig) -> np.ndarray:
    """Census of every ensemble member, shape ``(ensemble_size, 13)``."""
    k = cfg.ensemble_size
    if cfg.variant is NullModel.PRESERVE_DEMAND:
        out = np.empty((k, N_CLASSES), dtype=np.int64)
        for i in range(k):
            rng = np.random.default_rng([cfg.seed, i])
            out[i] = _census_counts(_demand_preserving(net, cfg, rng).adjacency)
        return out
    keep = cfg.variant is NullModel.PRESERVE_MUTUAL
    singles, pairs = split_edges(net, keep)
    rng = np.random.default_rng(cfg.seed)
    prop_s, prop_p = draw_proposals(rng, len(singles), len(pairs), cfg.swaps_per_edge, k)
    if net.setup.n < 3:
        return np.zeros((k, N_CLASSES), dtype=np.int64)
    res = _backend.kernels.ensemble_census(singles, pairs, net.setup.n, prop_s, prop_p, keep, CODE_TO_CLASS)
    return np.asarray(res)[:, 1:]


def z_scores(real: np.ndarray, mean: np.ndarray, std: np.ndarray, z_cap: float = Z_CAP) -> np.ndarray:
    diff = real - mean
    z = np.zeros(N_CLASSES)
    nz = std > 0
    z[nz] = diff[nz] / std[nz]
    # zero variance with a deviating count: capped, sign kept
    flat = ~nz & (diff != 0)
    z[flat] = np.sign(diff[flat]) * z_cap
    return z


def normalize_profile(z: np.ndarray) -> np.ndarray:
    norm = float(np.linalg.norm(z))
    return z / norm if norm > 0 else np.zeros_like(z, dtype=float)


def signature_strength(sig: "MotifSignature | np.ndarray", target: TargetSignature) -> float:
    """Pearson correlation between a significance profile and the target."""
    sp = np.asarray(sig.sp if isinstance(sig, MotifSignature) else sig, dtype=float)
    t = target.values
    sc = sp - sp.mean()
    tc = t - t.mean()
    ss = float(np.sqrt(sc @ sc))
    if ss == 0:
        return 0.0
    rho = float(sc @ tc) / (ss * float(np.sqrt(tc @ tc)))
    return min(1.0, max(-1.0, rho))


def motif_signature(net: Network, cfg: NullModelConfig, target: TargetSignature | None = None) -> MotifSignature:
    """Z-scores of the census against the null-model ensemble.

    ``sigma`` is computed against ``target`` (the bundled default if omitted).
    """
    if net.setup.n < 3 or net.m < 2:
        raise ParameterError("motif_signature needs N >= 3 and M >= 2")
    real = triad_census(net)
    ens = ensemble_censuses(net, cfg).astype(float)
    mean = ens.mean(axis=0)
    std = ens.std(axis=0)
    z = z_scores(real.counts.astype(float), mean, std, cfg.z_cap)
    sp = normalize_profile(z)
    sigma = signature_strength(sp, target or default_target())
    return MotifSignature(real, z, sp, sigma, mean, std, cfg.ensemble_size, cfg.variant)
