"""Compressed-coding multi-objective evolutionary algorithms for
constrained mean-variance portfolio selection.

The package splits into small layers: :mod:`portmoea.instance` loads
benchmark data, :mod:`portmoea.problem` evaluates objectives and
constraints, :mod:`portmoea.encoding` maps genotypes to feasible
portfolios, :mod:`portmoea.operators` produces offspring,
:mod:`portmoea.moea` runs the optimization loop, :mod:`portmoea.metrics`
scores fronts, and :mod:`portmoea.experiment` drives seeded batch
experiments (also exposed as the ``portmoea`` command line tool).
"""

from .encoding import CCS, DCS, Genotype, ccs_decode, dcs_decode, decode, random_genotype, repair
from .instance import Instance, ReferenceFront, load_frontier, load_instance, parse_frontier, parse_orlibrary
from .metrics import hypervolume_2d, igd, ih, mean_rank, rank_sum_test
from .moea import BACKENDS, Individual, RunConfig, RunResult, run
from .operators import OperatorConfig
from .problem import ConstraintSet, ObjectiveVector, Portfolio, RawPortfolio, check_feasibility, evaluate, preset_constraints

__all__ = [
    "CCS",
    "DCS",
    "BACKENDS",
    "Genotype",
    "Instance",
    "ReferenceFront",
    "ConstraintSet",
    "ObjectiveVector",
    "Portfolio",
    "RawPortfolio",
    "OperatorConfig",
    "Individual",
    "RunConfig",
    "RunResult",
    "ccs_decode",
    "dcs_decode",
    "decode",
    "random_genotype",
    "repair",
    "check_feasibility",
    "evaluate",
    "preset_constraints",
    "load_instance",
    "load_frontier",
    "parse_orlibrary",
    "parse_frontier",
    "hypervolume_2d",
    "igd",
    "ih",
    "mean_rank",
    "rank_sum_test",
    "run",
]

__version__ = "0.1.0"
