"""Total curvature c and group curvature c_{k_i}, maximised over pure profiles."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

from .core import TOL, ActionProfile, Game, Grouping, max_outcomes
from .errors import NondecreasingViolated, ResourceLimit

ZERO_DENOMINATOR = 1e-12


@dataclass(frozen=True)
class Curvature:
    """A curvature value and the (agent, S) pair attaining it.

    ``agent`` is a user for total curvature and a group for group curvature;
    both are None when no profile had a nonzero ∅-marginal.
    """

    value: float
    agent: Optional[int] = None
    profile: Optional[ActionProfile] = None


@dataclass(frozen=True)
class CurvatureReport:
    c: float
    per_group: tuple[float, ...] = ()
    argmax_profiles: tuple[Curvature, ...] = field(default=())

    def to_json(self) -> dict:
        return {
            "c": self.c,
            "per_group": list(self.per_group),
            "argmax": [
                {"agent": a.agent, "profile": None if a.profile is None else a.profile.to_json()}
                for a in self.argmax_profiles
            ],
        }


class _UnionCache:
    """γ on pure profiles and their unions with Ω, memoised."""

    def __init__(self, game: Game, omega: ActionProfile):
        self.game = game
        self.omega = omega
        self.values: dict = {}

    def gamma(self, X: ActionProfile) -> float:
        if X not in self.values:
            self.values[X] = self.game.gamma(X)
        return self.values[X]

    def over_omega(self, S: ActionProfile) -> ActionProfile:
        """Ω ∪ S for a pure S: user j plays σ_j ∪ x_j if j is in S, else σ_j."""
        return ActionProfile((u, a | S[u]) if u in S else (u, a) for u, a in self.omega.entries)


def _ratio_term(cache: _UnionCache, members: Sequence[int], S: ActionProfile, tol: float):
    """1 − γ_{s}(Ω ∪ S_{-members}) / γ_{s}(∅), or None when the ∅-marginal is zero."""
    block = S.restrict(members)
    denom = cache.gamma(block) - cache.gamma(ActionProfile())
    if abs(denom) <= ZERO_DENOMINATOR:
        return None
    if denom < -tol:
        raise NondecreasingViolated(
            f"∅-marginal {denom!r} of users {tuple(members)} is negative; curvature needs a nondecreasing γ"
        )
    numer = cache.gamma(cache.over_omega(S)) - cache.gamma(cache.over_omega(S.without(members)))
    return 1.0 - numer / denom


def _maximise(game: Game, omega: ActionProfile, agents: Sequence[Sequence[int]], tol: float, cap) -> list[Curvature]:
    cap = max_outcomes() if cap is None else cap
    if game.n_profiles * len(agents) > cap:
        raise ResourceLimit(f"curvature search over {game.n_profiles} profiles exceeds the cap {cap}")
    game.require_complete(omega)
    cache = _UnionCache(game, omega)
    results = []
    for k, members in enumerate(agents):
        best = Curvature(0.0)
        for S in game.pure_profiles():
            value = _ratio_term(cache, members, S, tol)
            if value is not None and (best.profile is None or value > best.value):
                best = Curvature(value, k, S)
        results.append(best)
    return results


def total_curvature(game: Game, omega: ActionProfile, tol: float = TOL, cap: Optional[int] = None) -> Curvature:
    """c = max over users i and pure S with γ_{s_i}(∅) ≠ 0 of
    1 − γ_{s_i}(Ω ∪ S_{-i}) / γ_{s_i}(∅); 0 when nothing is admissible."""
    per_user = _maximise(game, omega, [(i,) for i in range(game.n_users)], tol, cap)
    best = Curvature(0.0)
    for item in per_user:
        if item.profile is not None and (best.profile is None or item.value > best.value):
            best = item
    return best


def group_curvature(
    game: Game,
    grouping: Optional[Grouping],
    i: int,
    omega: ActionProfile,
    tol: float = TOL,
    cap: Optional[int] = None,
) -> Curvature:
    grouping = game.resolve_grouping(grouping)
    result = _maximise(game, omega, [grouping.block(i)], tol, cap)[0]
    return result if result.profile is None else replace(result, agent=i)


def group_curvatures(
    game: Game, grouping: Optional[Grouping], omega: ActionProfile, tol: float = TOL, cap: Optional[int] = None
) -> list[Curvature]:
    grouping = game.resolve_grouping(grouping)
    return _maximise(game, omega, grouping.blocks, tol, cap)


def curvature_report(
    game: Game, omega: ActionProfile, grouping: Optional[Grouping] = None, tol: float = TOL, cap: Optional[int] = None
) -> CurvatureReport:
    total = total_curvature(game, omega, tol, cap)
    groups = group_curvatures(game, grouping, omega, tol, cap) if grouping is not None else []
    return CurvatureReport(total.value, tuple(g.value for g in groups), (total, *groups))


@dataclass(frozen=True)
class OrderingVerdict:
    holds: bool
    c: float
    per_group: tuple[float, ...]
    offending: Optional[tuple] = None

    def __bool__(self) -> bool:
        return self.holds


def verify_curvature_ordering(
    game: Game, grouping: Optional[Grouping], omega: ActionProfile, tol: float = TOL, cap: Optional[int] = None
) -> OrderingVerdict:
    """c_{k_i} ≤ c for every group; with identical action spaces also
    c_{k_i} ≤ c_{k_j} whenever k_i > k_j.

    ``offending`` is ("total", i) or ("size", i, j) for the first failure.
    """
    grouping = game.resolve_grouping(grouping)
    c = total_curvature(game, omega, tol, cap).value
    per_group = tuple(g.value for g in group_curvatures(game, grouping, omega, tol, cap))
    for i, ci in enumerate(per_group):
        if ci > c + tol:
            return OrderingVerdict(False, c, per_group, ("total", i))
    if game.identical_spaces:
        sizes = grouping.sizes
        for i, j in ((i, j) for i in range(len(sizes)) for j in range(len(sizes))):
            if sizes[i] > sizes[j] and per_group[i] > per_group[j] + tol:
                return OrderingVerdict(False, c, per_group, ("size", i, j))
    return OrderingVerdict(True, c, per_group)
