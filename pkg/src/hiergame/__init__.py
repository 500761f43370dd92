"""Status hierarchies and the evolution of cooperation in group games.

Exact expected payoffs for leader-based public goods games (one or many
signalling rounds, with or without memory), the hierarchicalness measure
they are built on, equilibrium and stability analysis, a seeded Monte
Carlo engine that cross-checks every formula, and batch experiment
drivers that write the CSV datasets behind the standard figures.
"""

from .analytic import (
    composition_weights,
    cooperator_payoff,
    defector_payoff,
    equilibrium_ratio,
    payoff_coefficients,
    stability_region,
)
from .binomial import binomial_pmf, binomial_row
from .experiments import (
    DEFAULT_REPLICATIONS,
    DEFAULT_SEED,
    FIGURE_PRESETS,
    SweepSpec,
    ValidationReport,
    ValidationRow,
    figures,
    format_value,
    group_average_retry_payoff,
    mark_original_cooperator_payoff,
    mark_original_defector_payoff,
    parse_config,
    run_sweep,
    validate,
    write_csv,
)
from .hierarchy import (
    DirectedGraph,
    TwoLevelStructure,
    build_two_level_graph,
    general_reaching_centrality,
    local_reaching_centrality,
    read_edge_list,
    two_level_hierarchy,
)
from .model import (
    GameParams,
    ModelVariant,
    PayoffCoefficients,
    Role,
    StabilityRegion,
)
from .simulate import (
    RETRY_ROUND_CAP,
    CoefficientEstimate,
    ContributionRegime,
    Estimate,
    Roster,
    RoundResult,
    SimulationError,
    derive_seed,
    estimate_equilibrium,
    estimate_equilibrium_with_se,
    estimate_payoff,
    form_group,
    member_payoffs,
    replicator_step,
    run_contribution,
    run_round,
    run_signaling,
)
from .smalln import (
    cooperator_payoff_n2,
    cooperator_payoff_n3,
    defector_payoff_n2,
    defector_payoff_n3,
)

__version__ = "0.1.0"

__all__ = [
    "CoefficientEstimate",
    "ContributionRegime",
    "DEFAULT_REPLICATIONS",
    "DEFAULT_SEED",
    "DirectedGraph",
    "Estimate",
    "FIGURE_PRESETS",
    "GameParams",
    "ModelVariant",
    "PayoffCoefficients",
    "RETRY_ROUND_CAP",
    "Role",
    "Roster",
    "RoundResult",
    "SimulationError",
    "StabilityRegion",
    "SweepSpec",
    "TwoLevelStructure",
    "ValidationReport",
    "ValidationRow",
    "binomial_pmf",
    "binomial_row",
    "build_two_level_graph",
    "composition_weights",
    "cooperator_payoff",
    "cooperator_payoff_n2",
    "cooperator_payoff_n3",
    "defector_payoff",
    "defector_payoff_n2",
    "defector_payoff_n3",
    "derive_seed",
    "equilibrium_ratio",
    "estimate_equilibrium",
    "estimate_equilibrium_with_se",
    "estimate_payoff",
    "figures",
    "form_group",
    "format_value",
    "general_reaching_centrality",
    "group_average_retry_payoff",
    "local_reaching_centrality",
    "mark_original_cooperator_payoff",
    "mark_original_defector_payoff",
    "member_payoffs",
    "parse_config",
    "payoff_coefficients",
    "read_edge_list",
    "replicator_step",
    "run_contribution",
    "run_round",
    "run_signaling",
    "run_sweep",
    "stability_region",
    "two_level_hierarchy",
    "validate",
    "write_csv",
    "__version__",
]
