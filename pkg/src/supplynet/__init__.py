"""Spatial supply-network model with motif signatures and multi-objective
network optimization."""

__version__ = "0.1.0"

from ._backend import BACKEND  # noqa: E402
from .errors import (LoadError, ParameterError, SamplingError, SupplyNetError,  # noqa: E402
                     UnsupportedConfigurationError)
from .model import (Metrics, Network, Node, NodeRole, Setup, demand_satisfaction, evaluate,  # noqa: E402
                    generate_setup, load_network, load_setup, network_cost, robustness,
                    save_network, save_setup)
from .motifs import (MotifSignature, NullModel, NullModelConfig, TargetSignature, TriadCensus,  # noqa: E402
                     classify_triad, default_target, motif_signature, randomize, signature_strength,
                     triad_census)
from .steiner import connectivity_threshold, solve_min_cost  # noqa: E402
from .evolver import (GAConfig, Objective, ParetoArchive, dominance, evolve, mutate,  # noqa: E402
                      random_network, recombine)
from .geo import expand_neighborhood, import_geo_network  # noqa: E402
from .stats import pearson, spearman  # noqa: E402
from .experiments import ExperimentResult, ExperimentSpec, run_E1, run_E2, run_E3, run_E4, run_experiment  # noqa: E402

__all__ = [name for name in dir() if not name.startswith("_")]
