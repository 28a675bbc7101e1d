"""Exact rank statistics of labeled 1-2 trees.

Counting recurrences, exhaustive enumeration oracles, exact limiting
probabilities in Q(sqrt3)[pi, 1/pi], and rigorous truncation brackets,
all in exact arithmetic with certified decimal enclosures.
"""

from .constants import Enclosure, ExactConst, halfpi_moment, plane_moment
from .counting import (
    CountSequences,
    RootRankTable,
    joint_vertex_counts,
    rank_vertex_counts,
    root_rank_counts,
    size_vertex_counts,
)
from .enumeration import (
    Census,
    LabeledTree,
    SizeLimitError,
    census,
    check_inequalities,
    enumerate_trees,
    plane_multiplicity_total,
    weighted_onechild_mean,
)
from .limits import (
    BoundReport,
    ClosedFormUnavailableError,
    PoleData,
    bound_interval,
    bound_report_json,
    double_pole_coefficient,
    growth_normalization,
    limit_joint_prob,
    limit_rank_fraction,
    limit_subtree_prob,
    simple_pole_residue,
)
from .series import EgfSeries, SeriesOrderError, base_series, solve_linear_ode, solve_plane_linear_ode
from .variety import TreeVariety

__version__ = "0.1.0"

__all__ = [
    "BoundReport",
    "Census",
    "ClosedFormUnavailableError",
    "CountSequences",
    "EgfSeries",
    "Enclosure",
    "ExactConst",
    "LabeledTree",
    "PoleData",
    "RootRankTable",
    "SeriesOrderError",
    "SizeLimitError",
    "TreeVariety",
    "base_series",
    "bound_interval",
    "bound_report_json",
    "census",
    "check_inequalities",
    "double_pole_coefficient",
    "enumerate_trees",
    "growth_normalization",
    "halfpi_moment",
    "joint_vertex_counts",
    "limit_joint_prob",
    "limit_rank_fraction",
    "limit_subtree_prob",
    "plane_moment",
    "plane_multiplicity_total",
    "rank_vertex_counts",
    "root_rank_counts",
    "simple_pole_residue",
    "size_vertex_counts",
    "solve_linear_ode",
    "solve_plane_linear_ode",
    "weighted_onechild_mean",
    "__version__",
]
