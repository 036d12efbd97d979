"""Giant components of configuration-model random graphs.

Theory (generating functions, phase, giant size), a lazy half-edge
exploration that builds the graph while finding its components, and a
seeded Monte Carlo harness comparing the two.
"""

from .config_model import ComponentStats, Multigraph, components_unionfind, pair_uniform, sample_simple
from .degree_model import DegreeDistribution, DegreeSequence, from_counts, near_critical_sequence, sample_iid
from .errors import GclError
from .experiments import ExperimentConfig, compare, near_critical_sweep, run_replicas
from .exploration import explore, pure_death_trajectory, trace_deviation
from .theory import (
    GeneratingFunctions,
    Regime,
    classify,
    predict_near_critical,
    predict_supercritical,
    solve_xi,
    theory_report,
)

__version__ = "0.1.0"

__all__ = [
    "ComponentStats",
    "DegreeDistribution",
    "DegreeSequence",
    "ExperimentConfig",
    "GclError",
    "GeneratingFunctions",
    "Multigraph",
    "Regime",
    "classify",
    "compare",
    "components_unionfind",
    "explore",
    "from_counts",
    "near_critical_sequence",
    "near_critical_sweep",
    "pair_uniform",
    "predict_near_critical",
    "predict_supercritical",
    "pure_death_trajectory",
    "run_replicas",
    "sample_iid",
    "sample_simple",
    "solve_xi",
    "theory_report",
    "trace_deviation",
]
