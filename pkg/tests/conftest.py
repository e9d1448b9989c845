import math

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from eqbound.core import ActionProfile, Game
from eqbound.instances import coverage_game

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

UNIVERSE = list("abcde")


@st.composite
def coverage_games(draw, max_users=3, max_actions=3, detection=False, private=None):
    n = draw(st.integers(1, max_users))
    acts = st.frozensets(st.sampled_from(UNIVERSE), min_size=1, max_size=3)
    spaces = [draw(st.lists(acts, min_size=1, max_size=max_actions, unique=True)) for _ in range(n)]
    weights = {e: draw(st.floats(0.1, 3.0)) for e in UNIVERSE}
    q = draw(st.floats(0.2, 1.0)) if detection else 1.0
    rule = private or draw(st.sampled_from(["marginal", "equal_share"]))
    return coverage_game(spaces, weights, private=rule, detection=q)


@st.composite
def quadratic_games(draw, max_users=3, max_actions=3):
    """γ(X) = Σ_i Σ_{e∈x_i} v_ie + Σ_{i<j} w_ij |x_i ∩ x_j| with signed
    coefficients: neither monotone nor submodular in general."""
    n = draw(st.integers(1, max_users))
    acts = st.frozensets(st.sampled_from(UNIVERSE[:3]), min_size=1, max_size=2)
    spaces = [draw(st.lists(acts, min_size=1, max_size=max_actions, unique=True)) for _ in range(n)]
    v = [{e: draw(st.floats(-2, 2)) for e in UNIVERSE[:3]} for _ in range(n)]
    w = {(i, j): draw(st.floats(-2, 2)) for i in range(n) for j in range(i + 1, n)}

    def social(X: ActionProfile) -> float:
        terms = [v[i][e] for i, a in X.items() for e in a]
        terms += [w[i, j] * len(X[i] & X[j]) for (i, j) in w if i in X and j in X]
        return math.fsum(terms)

    def private(i: int, X: ActionProfile) -> float:
        return social(X) - social(X.without(i))

    return Game(spaces=spaces, social=social, private=private, name="quadratic")


@pytest.fixture
def line_cover():
    """Three users on a shared universe with overlapping options."""
    return coverage_game(
        [[{"a"}, {"b"}], [{"b"}, {"c"}], [{"a", "c"}, {"d"}]],
        {"a": 1.0, "b": 2.0, "c": 1.5, "d": 0.5},
    )


_CRITERIA: dict = {}


def record_criterion(number: int, part: str, ok: bool, detail: str) -> None:
    _CRITERIA.setdefault(number, []).append((part, ok, detail))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        parts = _CRITERIA[number]
        verdict = "PASS" if all(ok for _, ok, _ in parts) else "FAIL"
        detail = "; ".join(f"[{p}] {d} ({'ok' if ok else 'fails'})" if p else d for p, ok, d in parts)
        terminalreporter.write_line(f"criterion {number}: {verdict} - {detail}")
