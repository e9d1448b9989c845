"""Exact expectations over product distributions of pure profiles.

Every expectation enumerates the full support product; there is no sampling.
Terms are ordered by descending |weight| and reduced with ``math.fsum`` so
results do not depend on platform summation order.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

from .core import ActionProfile, Game, StrategyProfile, max_outcomes
from .errors import DegenerateDistribution, IncompleteOmega, OverlappingUsers, ResourceLimit


@dataclass(frozen=True)
class ComposedProfile:
    """Ω ∪ S: users in the overlay play σ_j ∪ x_j with probability s_j(x_j),
    every other user plays σ_j."""

    base: ActionProfile
    overlay: StrategyProfile

    def distributions(self):
        out = []
        for user, sigma in self.base.entries:
            if user in self.overlay:
                out.append((user, [(sigma | a, p) for a, p in self.overlay[user].support]))
            else:
                out.append((user, [(sigma, 1.0)]))
        return out


Distribution = Union[StrategyProfile, ComposedProfile, ActionProfile]


def compose_union(omega: ActionProfile, s_part: StrategyProfile) -> ComposedProfile:
    if tuple(omega.users) != tuple(range(len(omega))):
        raise IncompleteOmega(f"Ω must assign every user 0..N-1, got users {omega.users}")
    extra = set(s_part.users) - set(omega.users)
    if extra:
        raise IncompleteOmega(f"overlay users {sorted(extra)} are not in Ω")
    return ComposedProfile(omega, s_part)


def _distributions(P: Distribution):
    if isinstance(P, ComposedProfile):
        return P.distributions()
    if isinstance(P, ActionProfile):
        return [(u, [(a, 1.0)]) for u, a in P.entries]
    out = []
    for u, s in P.entries:
        if abs(math.fsum(s.probs) - 1.0) > 1e-12 or min(s.probs) < -1e-12:
            raise DegenerateDistribution(f"user {u} has an invalid distribution")
        out.append((u, s.support))
    return out


def n_outcomes(P: Distribution) -> int:
    return math.prod(len(d) for _, d in _distributions(P))


def realizations(P: Distribution, cap: Optional[int] = None):
    """Yield (probability, pure profile) for every outcome in the support product."""
    dists = _distributions(P)
    cap = max_outcomes() if cap is None else cap
    size = math.prod(len(d) for _, d in dists)
    if size > cap:
        raise ResourceLimit(f"{size} outcomes exceed the enumeration cap {cap}")
    users = [u for u, _ in dists]
    for combo in itertools.product(*(d for _, d in dists)):
        weight = math.prod(p for _, p in combo)
        yield weight, ActionProfile(zip(users, (a for a, _ in combo)))


def expect(fn: Callable[[ActionProfile], float], P: Distribution, cap: Optional[int] = None) -> float:
    terms = [(w, float(fn(X))) for w, X in realizations(P, cap)]
    if len(terms) == 1 and terms[0][0] == 1.0:
        return terms[0][1]
    terms.sort(key=lambda t: -abs(t[0]))
    return math.fsum(w * v for w, v in terms)


def expected_social(game: Game, S: Distribution, cap: Optional[int] = None) -> float:
    """γ̄(S)."""
    return expect(game.gamma, S, cap)


def expected_private(game: Game, i: int, S: Distribution, cap: Optional[int] = None) -> float:
    """ᾱ_i(S)."""
    return expect(lambda X: game.alpha(i, X), S, cap)


def expected_social_composed(game: Game, C: ComposedProfile, cap: Optional[int] = None) -> float:
    return expect(game.gamma, C, cap)


def add_strategies(T: Distribution, W: StrategyProfile) -> Distribution:
    """T ⊕ W. On a composed T the added users are unioned onto Ω."""
    if isinstance(T, ComposedProfile):
        return ComposedProfile(T.base, T.overlay.concat(W))
    if isinstance(T, ActionProfile):
        T = StrategyProfile.from_pure(T)
    return T.concat(W)


def expected_marginal(game: Game, W: StrategyProfile, T: Distribution, cap: Optional[int] = None) -> float:
    """γ̄_W(T) = γ̄(T ⊕ W) − γ̄(T)."""
    if isinstance(W, ActionProfile):
        W = StrategyProfile.from_pure(W)
    if isinstance(T, ComposedProfile):
        common = set(W.users) & set(T.overlay.users)
        if common:
            raise OverlappingUsers(f"users {sorted(common)} already in the overlay")
    if len(W) == 0:
        return 0.0
    return expected_social(game, add_strategies(T, W), cap) - expected_social(game, T, cap)
