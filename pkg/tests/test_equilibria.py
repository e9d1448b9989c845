import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from eqbound.bounds import brute_force_opt
from eqbound.core import ActionProfile, Game, Grouping, MixedStrategy, SocialGraph, StrategyProfile
from eqbound.core import social_group_utility
from eqbound.equilibria import (
    EquilibriumKind,
    best_response_dynamics,
    certify,
    enumerate_equilibria,
    is_group_nash,
    is_nash,
    is_social_aware_nash,
)
from eqbound.errors import MissingGrouping, MissingSocialGraph, ResourceLimit
from eqbound.expectation import expected_private
from eqbound.instances import coverage_game, payoff_table_game
from eqbound.spectrum import Flavor, GeneratorConfig, SpectrumScenario, generate_scenario, spectrum_game

from conftest import coverage_games
from oracles import naive_nash_regret

P = ActionProfile


def pair_on_line(noise=(1e-3, 1e-3), ties=None, partition=None):
    return SpectrumScenario(
        positions=((0.0, 0.0), (1.0, 0.0)), delta=2.0, lam=2.0, powers=(1.0, 1.0),
        vacant=((1, 2), (1, 2)), noise=({1: noise[0], 2: noise[1]},) * 2, ties=ties, partition=partition,
    )


def test_single_user_argmax_is_nash():
    g = coverage_game([[{"a"}, {"a", "b"}]])
    S = P({0: {"a", "b"}})
    cert = is_nash(g, S)
    assert cert.valid and cert.max_regret == 0.0


def test_shared_channel_with_free_alternative_is_not_nash():
    g = spectrum_game(pair_on_line())
    cert = is_nash(g, P({0: {1}, 1: {1}}))
    assert not cert.valid
    assert cert.max_regret == pytest.approx(1.0, abs=1e-12)  # P d^{-λ} = 1


def test_dominant_actions():
    # user 0 prefers action 1, user 1 prefers action 0, regardless of the other
    payoffs = np.zeros((2, 2, 2))
    for a in range(2):
        for b in range(2):
            payoffs[a, b] = [1.0 if a == 1 else 0.0, 1.0 if b == 0 else 0.0]
    g = payoff_table_game([[{"x"}, {"y"}]] * 2, payoffs)
    found = enumerate_equilibria(g, "nash")
    assert [c.action_profile for c in found] == [P({0: {"y"}, 1: {"x"}})]
    assert is_nash(g, P({0: {"y"}, 1: {"x"}})).valid


def test_anti_coordination_equilibria():
    g = spectrum_game(pair_on_line())
    found = [c.action_profile for c in enumerate_equilibria(g, EquilibriumKind.NASH)]
    assert found == [P({0: {1}, 1: {2}}), P({0: {2}, 1: {1}})]


def test_matching_pennies_has_no_pure_equilibrium():
    payoffs = np.array([[[1, -1], [-1, 1]], [[-1, 1], [1, -1]]], dtype=float)
    g = payoff_table_game([[{"h"}, {"t"}]] * 2, payoffs)
    assert enumerate_equilibria(g, "nash") == []


@given(coverage_games(), st.data())
def test_zero_ties_social_equals_nash(g, data):
    g = g.with_structure(social_graph=SocialGraph.from_edges(g.n_users, []))
    X = data.draw(st.sampled_from(list(g.pure_profiles())))
    assert is_social_aware_nash(g, X).max_regret == is_nash(g, X).max_regret


def test_full_ties_optimum_is_social_aware():
    ties = SocialGraph.from_edges(2, [(0, 1, 1.0), (1, 0, 1.0)])
    g = spectrum_game(pair_on_line(noise=(1e-3, 5e-3), ties=ties), Flavor.SOCIAL)
    omega, _ = brute_force_opt(g)
    assert is_social_aware_nash(g, omega).valid


def test_social_certificate_matches_brute_force():
    sc = generate_scenario(11, 3, 2, GeneratorConfig(tie_prob=0.0))
    ties = SocialGraph.from_edges(3, [(0, 1, 0.7), (1, 0, 0.7)])
    sc = SpectrumScenario(sc.positions, sc.delta, sc.lam, sc.powers, sc.vacant, sc.noise, ties=ties)
    g = spectrum_game(sc, Flavor.SOCIAL)
    eta = lambda i, X: social_group_utility(g, i, X)  # noqa: E731
    for X in g.pure_profiles():
        assert is_social_aware_nash(g, X).max_regret == pytest.approx(naive_nash_regret(g, X, eta), abs=1e-15)


def test_social_needs_graph():
    with pytest.raises(MissingSocialGraph):
        is_social_aware_nash(coverage_game([[{"a"}]]), P({0: {"a"}}))


def test_whole_population_group_equals_optimum(line_cover):
    g = line_cover.with_structure(grouping=Grouping.whole(3))
    _, opt = brute_force_opt(g)
    for X in g.pure_profiles():
        assert is_group_nash(g, None, X).valid == (g.gamma(X) >= opt - 1e-9)


@given(coverage_games(max_users=3, private="marginal"), st.data())
def test_singleton_groups_equal_nash(g, data):
    X = data.draw(st.sampled_from(list(g.pure_profiles())))
    a = is_group_nash(g, Grouping.singletons(g.n_users), X)
    b = is_nash(g, X)
    assert a.max_regret == pytest.approx(b.max_regret, abs=1e-12)
    assert a.valid == b.valid


def test_group_certificate_joint_enumeration():
    sc = generate_scenario(5, 4, 2, GeneratorConfig(partition=(2, 2)))
    g = spectrum_game(sc, Flavor.GROUPED)
    blocks = g.grouping.blocks
    for X in g.pure_profiles():
        worst = -np.inf
        for k, b in enumerate(blocks):
            cur = sum(g.alpha(j, X) for j in b)
            for Y in g.pure_profiles(b):
                Z = X.update(Y)
                worst = max(worst, sum(g.alpha(j, Z) for j in b) - cur)
        assert is_group_nash(g, None, X).max_regret == pytest.approx(worst, abs=1e-15)
    with pytest.raises(MissingGrouping):
        is_group_nash(spectrum_game(sc, Flavor.PRIVATE).with_structure(grouping=None), None, X)


@st.composite
def mixed_profile(draw, g):
    strategies = {}
    for u, sp in enumerate(g.spaces):
        raw = np.array([draw(st.floats(0.01, 1.0)) for _ in sp])
        p = raw / raw.sum()
        p[-1] = 1.0 - p[:-1].sum()
        strategies[u] = MixedStrategy(sp, p.tolist())
    return StrategyProfile(strategies)


@given(coverage_games(max_users=3, detection=True), st.data())
def test_pure_deviations_suffice(g, data):
    S = data.draw(mixed_profile(g))
    cert = certify(g, "nash", S)
    rng = np.random.default_rng(data.draw(st.integers(0, 2**32 - 1)))
    for _ in range(100):
        i = int(rng.integers(g.n_users))
        q = rng.dirichlet(np.ones(len(g.spaces[i])))
        q[-1] = 1.0 - q[:-1].sum()
        dev = S.replace(i, MixedStrategy(g.spaces[i], np.clip(q, 0.0, 1.0).tolist()))
        gain = expected_private(g, i, dev) - expected_private(g, i, S)
        assert gain <= cert.max_regret + 1e-9


@given(coverage_games(max_users=3, private="equal_share"))
def test_enumeration_is_exactly_the_certified_set(g):
    found = {c.action_profile for c in enumerate_equilibria(g, "nash")}
    for X in g.pure_profiles():
        assert (X in found) == (naive_nash_regret(g, X, g.alpha) <= 1e-9)


def test_dynamics_from_equilibrium_is_fixed_point():
    g = spectrum_game(pair_on_line())
    start = P({0: {1}, 1: {2}})
    res = best_response_dynamics(g, "nash", start)
    assert res.converged and res.rounds == 1 and res.profile == start


def test_dynamics_decoupled_users():
    sc = SpectrumScenario(
        positions=((0.0, 0.0), (10.0, 0.0)), delta=1.0, lam=2.0, powers=(1.0, 1.0),
        vacant=((1, 2, 3), (1, 2)), noise=({1: 0.3, 2: 0.1, 3: 0.2}, {1: 0.05, 2: 0.4}),
    )
    g = spectrum_game(sc)
    res = best_response_dynamics(g, "nash", P({0: {1}, 1: {2}}))
    assert res.converged and res.history[1] == res.profile == P({0: {2}, 1: {1}})


def test_dynamics_line_instance_certified():
    sc = SpectrumScenario(
        positions=((0.0, 0.0), (0.6, 0.0), (1.2, 0.0)), delta=1.0, lam=2.0, powers=(1.0,) * 3,
        vacant=((1, 2),) * 3, noise=({1: 1e-3, 2: 2e-3},) * 3,
    )
    g = spectrum_game(sc)
    res = best_response_dynamics(g, "nash", P({0: {1}, 1: {1}, 2: {1}}))
    assert res.converged
    assert is_nash(g, res.profile).valid
    # user 0 leaves first, user 1 keeps the quieter channel 1, user 2 moves away from it
    assert res.profile == P({0: {2}, 1: {1}, 2: {2}})


def test_dynamics_cycle_reported():
    payoffs = np.array([[[1, -1], [-1, 1]], [[-1, 1], [1, -1]]], dtype=float)
    g = payoff_table_game([[{"h"}, {"t"}]] * 2, payoffs)
    res = best_response_dynamics(g, "nash", P({0: {"h"}, 1: {"h"}}), max_rounds=6)
    assert not res.converged and res.rounds == 6 and len(res.history) == 7
    assert res.to_json()["status"] == "Cycled"


def test_random_order_reproducible():
    g = spectrum_game(generate_scenario(2, 4, 3))
    start = g.profile([0] * 4)
    a = best_response_dynamics(g, "nash", start, order="random", seed=3)
    b = best_response_dynamics(g, "nash", start, order="random", seed=3)
    assert a == b and a.converged and is_nash(g, a.profile).valid


def test_symmetric_spectrum_dynamics_never_cycle():
    for seed in range(30):
        sc = generate_scenario(seed, 4, 3, GeneratorConfig(tie_prob=0.5))
        g = spectrum_game(sc)
        res = best_response_dynamics(g, "nash", g.profile([0] * 4))
        assert res.converged, seed


def test_enumeration_cap():
    g = coverage_game([[{"a"}, {"b"}, {"c"}]] * 3)
    with pytest.raises(ResourceLimit):
        enumerate_equilibria(g, "nash", cap=20)


def test_certify_accepts_mixed_and_pure():
    g = Game(spaces=[[{"h"}, {"t"}]] * 2,
             social=lambda X: 0.0,
             private=lambda i, X: (1.0 if X[0] == X[1] else -1.0) * (1 if i == 0 else -1) if len(X) == 2 else 0.0)
    half = StrategyProfile({u: MixedStrategy(g.spaces[u], [0.5, 0.5]) for u in range(2)})
    assert certify(g, "nash", half).max_regret == pytest.approx(0.0, abs=1e-15)
    assert not certify(g, "nash", P({0: {"h"}, 1: {"h"}})).valid
