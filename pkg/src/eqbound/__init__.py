"""Equilibrium quality bounds for games built on valid utility systems."""
from .bounds import (
    Analysis,
    BoundReport,
    Statement,
    brute_force_opt,
    check_lemma1,
    check_lemma2,
    check_thm1,
    check_thm2,
    check_thm3_thm4,
    check_thm5,
    check_thm6,
)
from .core import (
    EMPTY,
    ActionProfile,
    Game,
    Grouping,
    MixedStrategy,
    SocialGraph,
    StrategyProfile,
    action,
    concat,
    is_subsequence,
    marginal,
)
from .curvature import curvature_report, group_curvature, group_curvatures, total_curvature, verify_curvature_ordering
from .equilibria import (
    EquilibriumKind,
    best_response_dynamics,
    certify,
    enumerate_equilibria,
    is_group_nash,
    is_nash,
    is_social_aware_nash,
)
from .errors import *  # noqa: F401,F403
from .expectation import compose_union, expected_marginal, expected_private, expected_social
from .instances import coverage_game, generate_coverage, modular_game, payoff_table_game, table_game
from .spectrum import (
    Flavor,
    GeneratorConfig,
    SpectrumScenario,
    generate_scenario,
    interference,
    social_aware_condition,
    spectrum_game,
)
from .structure import (
    check_nondecreasing,
    check_submodular,
    check_validity_group,
    check_validity_private,
    check_validity_social,
)
