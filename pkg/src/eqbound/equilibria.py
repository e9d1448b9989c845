"""Certification and search of Nash, social-aware Nash and group Nash equilibria.

Certifiers accept mixed profiles. Because an expected utility is affine in
each decider's own mixing weights, the best deviation is always pure, so
only pure (joint) deviations are enumerated. Search is over pure profiles.
"""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Sequence, Union

from .core import (
    TOL,
    ActionProfile,
    Game,
    Grouping,
    StrategyProfile,
    group_members_utility,
    max_outcomes,
    social_group_utility,
)
from .errors import ResourceLimit
from .expectation import expect


class EquilibriumKind(str, Enum):
    NASH = "nash"
    SOCIAL = "social"
    GROUP = "group"

    @property
    def label(self) -> str:
        return {"nash": "Nash", "social": "SocialAware", "group": "GroupNash"}[self.value]


def _kind(kind) -> EquilibriumKind:
    return kind if isinstance(kind, EquilibriumKind) else EquilibriumKind(str(kind).lower())


@dataclass(frozen=True)
class Deciders:
    """Who moves (single users or blocks) and what each of them maximises."""

    kind: EquilibriumKind
    members: tuple[tuple[int, ...], ...]
    utility: Callable[[int, ActionProfile], float]


def deciders(game: Game, kind, grouping: Optional[Grouping] = None) -> Deciders:
    kind = _kind(kind)
    singles = tuple((i,) for i in range(game.n_users))
    if kind is EquilibriumKind.NASH:
        return Deciders(kind, singles, game.alpha)
    if kind is EquilibriumKind.SOCIAL:
        game.require_social_graph()
        return Deciders(kind, singles, lambda i, X: social_group_utility(game, i, X))
    blocks = game.resolve_grouping(grouping).blocks
    return Deciders(kind, blocks, lambda k, X: group_members_utility(game, blocks[k], X))


@dataclass(frozen=True)
class EquilibriumCertificate:
    kind: EquilibriumKind
    profile: StrategyProfile
    max_regret: float
    tol: float = TOL
    best_deviation: Optional[tuple[int, ActionProfile]] = None

    @property
    def valid(self) -> bool:
        return self.max_regret <= self.tol

    def __bool__(self) -> bool:
        return self.valid

    @property
    def action_profile(self) -> ActionProfile:
        return self.profile.pure_profile()

    def to_json(self) -> dict:
        out = {"kind": self.kind.label, "valid": self.valid, "max_regret": self.max_regret}
        if self.profile.is_pure:
            out["profile"] = self.action_profile.to_json()
        return out


def _joint_actions(game: Game, members: Sequence[int]):
    for combo in itertools.product(*(game.spaces[u] for u in members)):
        yield ActionProfile(zip(members, combo))


def certify(game: Game, kind, S: Union[StrategyProfile, ActionProfile], tol: float = TOL,
            grouping: Optional[Grouping] = None, cap: Optional[int] = None) -> EquilibriumCertificate:
    """Largest gain any decider obtains from a unilateral pure (joint) deviation."""
    dec = deciders(game, kind, grouping)
    if isinstance(S, ActionProfile):
        S = game.pure_strategy(S)
    game.require_complete(S)
    worst, worst_dev = -math.inf, None
    for k, members in enumerate(dec.members):
        current = expect(lambda X: dec.utility(k, X), S, cap)
        rest = S.without(members)
        for joint in _joint_actions(game, members):
            dev = rest.update(StrategyProfile.from_pure(joint))
            gain = expect(lambda X: dec.utility(k, X), dev, cap) - current
            if gain > worst:
                worst, worst_dev = gain, (k, joint)
    return EquilibriumCertificate(dec.kind, S, worst, tol, worst_dev)


def is_nash(game: Game, S, tol: float = TOL, cap: Optional[int] = None) -> EquilibriumCertificate:
    return certify(game, EquilibriumKind.NASH, S, tol, cap=cap)


def is_social_aware_nash(game: Game, S, tol: float = TOL, cap: Optional[int] = None) -> EquilibriumCertificate:
    return certify(game, EquilibriumKind.SOCIAL, S, tol, cap=cap)


def is_group_nash(game: Game, grouping: Optional[Grouping], S, tol: float = TOL,
                  cap: Optional[int] = None) -> EquilibriumCertificate:
    return certify(game, EquilibriumKind.GROUP, S, tol, grouping, cap)


class _PureEvaluator:
    """Memoised decider utilities on pure profiles."""

    def __init__(self, game: Game, dec: Deciders):
        self.game = game
        self.dec = dec
        self.cache: dict = {}
        self.best: dict = {}

    def __call__(self, k: int, X: ActionProfile) -> float:
        key = (k, X)
        if key not in self.cache:
            self.cache[key] = self.dec.utility(k, X)
        return self.cache[key]

    def best_response(self, k: int, rest: ActionProfile) -> tuple[float, ActionProfile]:
        """Best value decider k can reach against ``rest``; depends on rest only."""
        key = (k, rest)
        if key not in self.best:
            top, arg = -math.inf, None
            for joint in _joint_actions(self.game, self.dec.members[k]):
                v = self(k, rest.update(joint))
                if v > top:
                    top, arg = v, joint
            self.best[key] = (top, arg)
        return self.best[key]

    def regret(self, X: ActionProfile) -> tuple[float, Optional[tuple[int, ActionProfile]]]:
        worst, worst_dev = -math.inf, None
        for k, members in enumerate(self.dec.members):
            top, arg = self.best_response(k, X.without(members))
            gain = top - self(k, X)
            if gain > worst:
                worst, worst_dev = gain, (k, arg)
        return worst, worst_dev


def enumerate_equilibria(game: Game, kind, tol: float = TOL, grouping: Optional[Grouping] = None,
                         cap: Optional[int] = None) -> list[EquilibriumCertificate]:
    """Every pure equilibrium of the requested kind, in lexicographic order.

    May be empty: pure equilibria need not exist.
    """
    cap = max_outcomes() if cap is None else cap
    dec = deciders(game, kind, grouping)
    work = game.n_profiles * sum(math.prod(game.n_actions[u] for u in m) for m in dec.members)
    if game.n_profiles > cap or work > cap:
        raise ResourceLimit(f"equilibrium enumeration needs {work} evaluations, above the cap {cap}")
    ev = _PureEvaluator(game, dec)
    found = []
    for X in game.pure_profiles():
        regret, dev = ev.regret(X)
        if regret <= tol:
            found.append(EquilibriumCertificate(dec.kind, game.pure_strategy(X), regret, tol, dev))
    return found


@dataclass(frozen=True)
class DynamicsResult:
    """Outcome of best-response dynamics.

    ``converged`` is True when a full pass changed nothing; ``rounds`` counts
    passes including that final one. ``history`` holds the profile after each
    pass, starting with the initial profile.
    """

    converged: bool
    profile: ActionProfile
    rounds: int
    history: tuple[ActionProfile, ...] = field(default=())

    def to_json(self) -> dict:
        return {
            "status": "Converged" if self.converged else "Cycled",
            "profile": self.profile.to_json(),
            "rounds": self.rounds,
            "history": [p.to_json() for p in self.history],
        }


def best_response_dynamics(game: Game, kind, start: ActionProfile, max_rounds: int = 100,
                           tol: float = TOL, grouping: Optional[Grouping] = None,
                           order: str = "round_robin", seed: int = 0) -> DynamicsResult:
    """Deciders take turns switching to a best (joint) response.

    A decider keeps its current action when no alternative beats it by more
    than ``tol``; otherwise it moves to the lowest-index maximiser.
    ``order="random"`` shuffles the turn order every pass with ``seed``.
    """
    dec = deciders(game, kind, grouping)
    game.require_complete(start)
    ev = _PureEvaluator(game, dec)
    rng = random.Random(seed)
    X = start
    history = [X]
    for rounds in range(1, max_rounds + 1):
        changed = False
        turn = list(range(len(dec.members)))
        if order == "random":
            rng.shuffle(turn)
        elif order != "round_robin":
            raise ValueError(f"unknown order {order!r}")
        for k in turn:
            members = dec.members[k]
            current = ev(k, X)
            best_joint, best_value = None, -math.inf
            for joint in _joint_actions(game, members):
                value = ev(k, X.update(joint))
                if value > best_value:
                    best_joint, best_value = joint, value
            if best_value > current + tol:
                X = X.update(best_joint)
                changed = True
        history.append(X)
        if not changed:
            return DynamicsResult(True, X, rounds, tuple(history))
    return DynamicsResult(False, X, max_rounds, tuple(history))
