"""Hand-buildable game families: weighted coverage, modular and table games."""
from __future__ import annotations

import itertools
import math
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .core import ActionProfile, Game, Grouping, SocialGraph
from .errors import InvalidParams, UndefinedProfile

PRIVATE_RULES = ("marginal", "equal_share")
GROUP_RULES = ("block_marginal", "block_sum")


def _counts(X: ActionProfile) -> dict:
    counts: dict = {}
    for _, acts in X.items():
        for e in acts:
            counts[e] = counts.get(e, 0) + 1
    return counts


def coverage_game(
    spaces: Sequence[Sequence[Iterable]],
    weights: Optional[Mapping] = None,
    private: str = "marginal",
    group: Optional[str] = None,
    social_graph: Optional[SocialGraph] = None,
    grouping: Optional[Grouping] = None,
    detection: float = 1.0,
    name: str = "coverage",
) -> Game:
    """γ(X) = Σ_e w_e (1 − (1 − q)^{n_e}), n_e = number of users covering e.

    With the default detection probability q = 1 this is plain weighted
    coverage. Acts are elements of a shared universe. ``private`` selects α_i:
    ``marginal`` gives γ(X) − γ(X_{-i}); ``equal_share`` splits each covered
    element's weight evenly among the users covering it. ``group`` selects
    the group utility: the block's joint marginal contribution or the sum of
    its members' α. The default pairs ``marginal`` with the joint marginal
    and ``equal_share`` with the sum, so a singleton block's utility is α_i
    and each pairing is valid.
    """
    if private not in PRIVATE_RULES:
        raise InvalidParams(f"unknown private rule {private!r}")
    if group is None:
        group = "block_marginal" if private == "marginal" else "block_sum"
    if group not in GROUP_RULES:
        raise InvalidParams(f"unknown group rule {group!r}")
    spaces = tuple(tuple(frozenset(a) for a in sp) for sp in spaces)
    universe = set().union(*(a for sp in spaces for a in sp))
    w = {e: 1.0 for e in universe} if weights is None else {e: float(v) for e, v in weights.items()}
    missing = universe - set(w)
    if missing:
        raise InvalidParams(f"no weight for elements {sorted(missing, key=repr)}")
    if not 0.0 < detection <= 1.0:
        raise InvalidParams("detection probability must lie in (0, 1]")
    miss = 1.0 - detection

    def value(e, n: int) -> float:
        return w[e] * (1.0 - miss**n)

    def social(X: ActionProfile) -> float:
        return math.fsum(value(e, n) for e, n in _counts(X).items())

    if private == "marginal":
        def alpha(i: int, X: ActionProfile) -> float:
            return social(X) - social(X.without(i))
    else:
        def alpha(i: int, X: ActionProfile) -> float:
            if i not in X:
                return 0.0
            counts = _counts(X)
            return math.fsum(value(e, counts[e]) / counts[e] for e in X[i])

    group_utility = None
    if group == "block_marginal":
        def group_utility(members: tuple, X: ActionProfile) -> float:
            return social(X) - social(X.without(members))

    return Game(
        spaces=spaces,
        social=social,
        private=alpha,
        social_graph=social_graph,
        grouping=grouping,
        group_utility=group_utility,
        name=name,
        meta={"family": "coverage", "weights": w, "private": private, "group": group, "detection": detection},
    )


def modular_game(values: Sequence[Mapping], spaces: Sequence[Sequence[Iterable]], name: str = "modular") -> Game:
    """γ(X) = Σ_i Σ_{a ∈ x_i} values[i][a]; α_i is user i's own term."""
    vals = [dict(v) for v in values]

    def own(i: int, X: ActionProfile) -> float:
        return math.fsum(vals[i][a] for a in X[i]) if i in X else 0.0

    def social(X: ActionProfile) -> float:
        return math.fsum(own(i, X) for i in X)

    return Game(spaces=spaces, social=social, private=own, name=name, meta={"family": "modular"})


def table_game(
    spaces: Sequence[Sequence[Iterable]],
    social: Mapping[ActionProfile, float],
    private: Mapping[ActionProfile, Sequence[float]],
    social_graph: Optional[SocialGraph] = None,
    grouping: Optional[Grouping] = None,
    name: str = "table",
) -> Game:
    """Explicit γ and α values per profile.

    Profiles missing from a table raise ``UndefinedProfile`` when queried, so
    a table must list every partial or union profile the requested analyses
    touch.
    """
    gtab = dict(social)
    atab = {k: tuple(float(x) for x in v) for k, v in private.items()}

    def gamma(X: ActionProfile) -> float:
        try:
            return float(gtab[X])
        except KeyError:
            raise UndefinedProfile(f"table has no social value for {X!r}") from None

    def alpha(i: int, X: ActionProfile) -> float:
        try:
            return atab[X][i]
        except KeyError:
            raise UndefinedProfile(f"table has no private values for {X!r}") from None

    return Game(
        spaces=spaces,
        social=gamma,
        private=alpha,
        social_graph=social_graph,
        grouping=grouping,
        name=name,
        meta={"family": "table"},
    )


def payoff_table_game(spaces: Sequence[Sequence[Iterable]], payoffs, social=None, name: str = "table") -> Game:
    """Table game from per-index payoffs: ``payoffs[idx]`` is the α-vector of
    the pure profile with action indices ``idx``. γ defaults to Σ α on complete
    profiles and to 0 on the empty profile."""
    spaces = tuple(tuple(frozenset(a) for a in sp) for sp in spaces)
    gtab, atab = {}, {}
    for idx in itertools.product(*(range(len(sp)) for sp in spaces)):
        X = ActionProfile((u, spaces[u][k]) for u, k in enumerate(idx))
        alpha = [float(v) for v in np.asarray(payoffs[idx], dtype=float)]
        atab[X] = alpha
        gtab[X] = math.fsum(alpha) if social is None else float(social[idx])
    gtab.setdefault(ActionProfile(), 0.0)
    return table_game(spaces, gtab, atab, name=name)


def generate_coverage(
    seed: int,
    n_users: int,
    n_actions: int,
    universe: int = 6,
    max_action_size: int = 3,
    identical_spaces: bool = False,
    private: str = "marginal",
    weight_range: tuple[float, float] = (0.5, 2.0),
    detection: float = 1.0,
) -> Game:
    """Seeded random weighted-coverage game; elements are the ints 0..universe-1."""
    if n_users < 1 or n_actions < 1 or universe < 1 or max_action_size < 1:
        raise InvalidParams("coverage generator parameters must be positive")
    rng = np.random.default_rng(seed)
    weights = {e: float(rng.uniform(*weight_range)) for e in range(universe)}

    def draw_space():
        space: list[frozenset] = []
        attempts = 0
        while len(space) < n_actions and attempts < 1000:
            attempts += 1
            size = int(rng.integers(1, min(max_action_size, universe) + 1))
            acts = frozenset(int(e) for e in rng.choice(universe, size=size, replace=False))
            if acts not in space:
                space.append(acts)
        return space

    if identical_spaces:
        shared = draw_space()
        spaces = [shared] * n_users
    else:
        spaces = [draw_space() for _ in range(n_users)]
    return coverage_game(spaces, weights, private=private, detection=detection, name=f"coverage-{seed}")
