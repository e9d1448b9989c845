import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from eqbound.bounds import brute_force_opt
from eqbound.core import ActionProfile, Game, Grouping
from eqbound.curvature import (
    curvature_report,
    group_curvature,
    group_curvatures,
    total_curvature,
    verify_curvature_ordering,
)
from eqbound.errors import NondecreasingViolated, ResourceLimit
from eqbound.expectation import compose_union, expected_marginal
from eqbound.instances import coverage_game, generate_coverage, modular_game
from eqbound.spectrum import generate_scenario, spectrum_game

from conftest import UNIVERSE, coverage_games
from oracles import naive_curvature

P = ActionProfile


@st.composite
def positive_singleton_games(draw, max_users=3):
    """Positive standalone values, signed pairwise interactions: the
    curvature ratio takes values on both sides of 1."""
    n = draw(st.integers(1, max_users))
    acts = st.frozensets(st.sampled_from(UNIVERSE[:3]), min_size=1, max_size=2)
    spaces = [draw(st.lists(acts, min_size=1, max_size=3, unique=True)) for _ in range(n)]
    v = [{e: draw(st.floats(0.5, 2.0)) for e in UNIVERSE[:3]} for _ in range(n)]
    w = {(i, j): draw(st.floats(-1.0, 1.0)) for i in range(n) for j in range(i + 1, n)}

    def social(X):
        terms = [v[i][e] for i, a in X.items() for e in a]
        terms += [w[i, j] * len(X[i] & X[j]) for (i, j) in w if i in X and j in X]
        return math.fsum(terms)

    return Game(spaces=spaces, social=social, private=lambda i, X: 0.0)


def ratio_via_expectation(game, omega, members, S):
    """Same ratio through the composition engine, as a second path."""
    St = game.pure_strategy(S)
    block = St.restrict(members)
    denom = expected_marginal(game, block, St.restrict(()))
    numer = expected_marginal(game, block, compose_union(omega, St.without(members)))
    return 1.0 - numer / denom


def test_modular_gamma_is_fully_curved_under_union_composition():
    # S = Ω makes the Ω ∪ S_{-i} marginal of σ_i vanish, whatever γ is
    g = modular_game([{"x": 1.0, "y": 2.0}, {"x": 3.0, "z": 1.0}], [[{"x"}, {"y"}], [{"x"}, {"z"}]])
    omega, _ = brute_force_opt(g)
    c = total_curvature(g, omega)
    assert c.value == 1.0
    assert c.profile == omega


def test_full_overlap_gives_one():
    g = coverage_game([[{"u"}], [{"u"}]])
    omega, _ = brute_force_opt(g)
    assert total_curvature(g, omega).value == 1.0


def test_three_user_weighted_coverage_against_naive(line_cover):
    omega, opt = brute_force_opt(line_cover)
    assert omega == P({0: {"a"}, 1: {"b"}, 2: {"a", "c"}}) and opt == 4.5
    c = total_curvature(line_cover, omega)
    assert c.value == naive_curvature(line_cover, omega, [(0,), (1,), (2,)]) == 1.0


@given(positive_singleton_games())
def test_total_curvature_matches_naive_double_loop(g):
    omega, _ = brute_force_opt(g)
    c = total_curvature(g, omega)
    assert c.value == pytest.approx(naive_curvature(g, omega, [(i,) for i in range(g.n_users)]), abs=1e-12)


@given(positive_singleton_games(), st.data())
def test_group_curvature_matches_naive_double_loop(g, data):
    sizes = []
    left = g.n_users
    while left:
        k = data.draw(st.integers(1, left))
        sizes.append(k)
        left -= k
    grouping = Grouping(tuple(sizes))
    omega, _ = brute_force_opt(g)
    for i, cur in enumerate(group_curvatures(g, grouping, omega)):
        assert cur.value == pytest.approx(naive_curvature(g, omega, [grouping.block(i)]), abs=1e-12)


@given(positive_singleton_games())
def test_argmax_reevaluates(g):
    omega, _ = brute_force_opt(g)
    c = total_curvature(g, omega)
    assert ratio_via_expectation(g, omega, (c.agent,), c.profile) == pytest.approx(c.value, abs=1e-12)


def test_group_curvature_whole_population():
    g = coverage_game([[{"a"}, {"b"}], [{"b"}, {"c"}]], {"a": 1.0, "b": 2.0, "c": 3.0})
    omega, _ = brute_force_opt(g)
    whole = group_curvature(g, Grouping.whole(2), 0, omega)
    expected = max(
        1 - (g.gamma(P({u: omega[u] | S[u] for u in S})) - g.gamma(omega)) / (g.gamma(S) - g.gamma(P()))
        for S in g.pure_profiles()
    )
    assert whole.value == expected


def test_singleton_groups_reproduce_total(line_cover):
    omega, _ = brute_force_opt(line_cover)
    per = group_curvatures(line_cover, Grouping.singletons(3), omega)
    assert max(c.value for c in per) == total_curvature(line_cover, omega).value


@given(coverage_games(max_users=4, detection=True))
def test_curvature_in_unit_interval_and_ordered(g):
    omega, _ = brute_force_opt(g)
    c = total_curvature(g, omega).value
    assert 0.0 <= c <= 1.0 + 1e-12
    sizes = (g.n_users,) if g.n_users < 2 else (1, g.n_users - 1)
    assert verify_curvature_ordering(g, Grouping(sizes), omega).holds


def test_identical_spaces_ordering():
    g = generate_coverage(3, 4, 3, identical_spaces=True)
    omega, _ = brute_force_opt(g)
    v = verify_curvature_ordering(g, Grouping((1, 3)), omega)
    assert v.holds
    assert v.per_group[1] <= v.per_group[0] + 1e-9 <= v.c + 2e-9


def test_negative_denominator_rejected():
    g = spectrum_game(generate_scenario(0, 2, 1))
    omega, _ = brute_force_opt(g)
    with pytest.raises(NondecreasingViolated):
        total_curvature(g, omega)


def test_zero_denominators_skipped():
    g = coverage_game([[{"z"}], [{"z"}]], {"z": 0.0})
    assert total_curvature(g, P({0: {"z"}, 1: {"z"}})).value == 0.0


def test_cap_and_report(line_cover):
    omega, _ = brute_force_opt(line_cover)
    with pytest.raises(ResourceLimit):
        total_curvature(line_cover, omega, cap=5)
    rep = curvature_report(line_cover, omega, Grouping((1, 2)))
    js = rep.to_json()
    assert js["c"] == 1.0 and len(js["per_group"]) == 2 and len(js["argmax"]) == 3
