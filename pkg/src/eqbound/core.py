"""Users, actions, strategies, profiles and the game container.

User indices are 0-based. An action is a ``frozenset`` of acts; a profile
maps users to actions and is always kept sorted by user index.
"""
from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Iterator, Mapping, Optional, Sequence

from .errors import (
    DegenerateDistribution,
    IncompleteProfile,
    InvalidParams,
    MissingGrouping,
    MissingSocialGraph,
    OverlappingUsers,
)

TOL = 1e-9
SIMPLEX_TOL = 1e-12
DEFAULT_MAX_OUTCOMES = 10**7

Act = Hashable
Action = frozenset


def max_outcomes() -> int:
    """Enumeration cap, overridable through ``EQBOUND_MAX_OUTCOMES``."""
    raw = os.environ.get("EQBOUND_MAX_OUTCOMES")
    if raw is None:
        return DEFAULT_MAX_OUTCOMES
    return int(float(raw))


def action(*acts: Act) -> Action:
    return frozenset(acts)


def _pairs(data) -> Iterable[tuple[int, object]]:
    if isinstance(data, dict) or isinstance(data, Mapping):
        return data.items()
    return data


class ActionProfile:
    """Immutable assignment of act-sets to a subset of users."""

    __slots__ = ("_entries", "_map", "_hash")

    def __init__(self, entries: Mapping[int, Iterable[Act]] | Iterable[tuple[int, Iterable[Act]]] = ()):
        items = []
        seen = set()
        for user, acts in _pairs(entries):
            user = int(user)
            if user in seen:
                raise OverlappingUsers(f"user {user} appears twice")
            seen.add(user)
            items.append((user, frozenset(acts)))
        items.sort(key=lambda e: e[0])
        self._entries = tuple(items)
        self._map = dict(items)
        self._hash = hash(self._entries)

    @classmethod
    def _trusted(cls, items) -> "ActionProfile":
        """Skip validation: ``items`` are (int, frozenset) pairs sorted by distinct user."""
        obj = cls.__new__(cls)
        obj._entries = tuple(items)
        obj._map = dict(obj._entries)
        obj._hash = hash(obj._entries)
        return obj

    @property
    def entries(self) -> tuple[tuple[int, Action], ...]:
        return self._entries

    @property
    def users(self) -> tuple[int, ...]:
        return tuple(u for u, _ in self._entries)

    def items(self):
        return iter(self._entries)

    def __getitem__(self, user: int) -> Action:
        return self._map[user]

    def get(self, user: int, default=None):
        return self._map.get(user, default)

    def __contains__(self, user: object) -> bool:
        return user in self._map

    def __iter__(self) -> Iterator[int]:
        return (u for u, _ in self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ActionProfile):
            return NotImplemented
        return self._entries == other._entries

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        body = ", ".join(f"{u}: {set(sorted(a, key=repr)) or '{}'}" for u, a in self._entries)
        return f"ActionProfile({{{body}}})"

    def without(self, users: Iterable[int] | int) -> "ActionProfile":
        """Drop the given users (the X_{-i} / X^{-i} operation)."""
        drop = {users} if isinstance(users, int) else set(users)
        return ActionProfile._trusted([e for e in self._entries if e[0] not in drop])

    def restrict(self, users: Iterable[int]) -> "ActionProfile":
        keep = set(users)
        return ActionProfile._trusted([e for e in self._entries if e[0] in keep])

    def replace(self, user: int, acts: Iterable[Act]) -> "ActionProfile":
        """Return (X_{-user}, acts); inserts the user if absent."""
        d = dict(self._entries)
        d[user] = frozenset(acts)
        return ActionProfile(d)

    def update(self, other: "ActionProfile") -> "ActionProfile":
        d = dict(self._entries)
        d.update(other._entries)
        return ActionProfile._trusted(sorted(d.items(), key=lambda e: e[0]))

    def to_json(self) -> dict:
        return {str(u): sorted(a, key=repr) for u, a in self._entries}


EMPTY = ActionProfile()


def concat(Y: ActionProfile, Z: ActionProfile) -> ActionProfile:
    """Y ⊕ Z for profiles on disjoint users."""
    common = set(Y.users) & set(Z.users)
    if common:
        raise OverlappingUsers(f"users {sorted(common)} appear in both profiles")
    return ActionProfile(Y.entries + Z.entries)


def is_subsequence(Y: ActionProfile, X: ActionProfile) -> bool:
    return all(u in X and X[u] == a for u, a in Y.entries)


@dataclass(frozen=True)
class MixedStrategy:
    """Distribution over a list of actions (normally the user's whole space)."""

    actions: tuple[Action, ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "actions", tuple(frozenset(a) for a in self.actions))
        object.__setattr__(self, "probs", tuple(float(p) for p in self.probs))
        if len(self.actions) != len(self.probs) or not self.actions:
            raise DegenerateDistribution("actions and probs must be nonempty and of equal length")
        if any(not math.isfinite(p) or p < -SIMPLEX_TOL for p in self.probs):
            raise DegenerateDistribution(f"negative or non-finite probability in {self.probs}")
        if abs(math.fsum(self.probs) - 1.0) > SIMPLEX_TOL:
            raise DegenerateDistribution(f"probabilities sum to {math.fsum(self.probs)!r}")

    @classmethod
    def point(cls, acts: Iterable[Act]) -> "MixedStrategy":
        return cls((frozenset(acts),), (1.0,))

    @property
    def support(self) -> list[tuple[Action, float]]:
        return [(a, p) for a, p in zip(self.actions, self.probs) if p > 0.0]

    @property
    def is_pure(self) -> bool:
        return sum(1 for p in self.probs if p == 1.0) == 1

    def pure_action(self) -> Action:
        if not self.is_pure:
            raise ValueError("strategy is mixed")
        return self.actions[self.probs.index(1.0)]


class StrategyProfile:
    """Immutable per-user mixed strategies, sorted by user."""

    __slots__ = ("_entries", "_map")

    def __init__(self, entries: Mapping[int, MixedStrategy] | Iterable[tuple[int, MixedStrategy]] = ()):
        items = []
        seen = set()
        for user, strat in _pairs(entries):
            if user in seen:
                raise OverlappingUsers(f"user {user} appears twice")
            seen.add(user)
            if not isinstance(strat, MixedStrategy):
                raise TypeError(f"expected MixedStrategy for user {user}")
            items.append((int(user), strat))
        items.sort(key=lambda e: e[0])
        self._entries = tuple(items)
        self._map = dict(items)

    @classmethod
    def from_pure(cls, X: ActionProfile) -> "StrategyProfile":
        return cls([(u, MixedStrategy.point(a)) for u, a in X.entries])

    @property
    def entries(self):
        return self._entries

    @property
    def users(self) -> tuple[int, ...]:
        return tuple(u for u, _ in self._entries)

    def items(self):
        return iter(self._entries)

    def __getitem__(self, user: int) -> MixedStrategy:
        return self._map[user]

    def __contains__(self, user: object) -> bool:
        return user in self._map

    def __iter__(self):
        return (u for u, _ in self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, StrategyProfile):
            return NotImplemented
        return self._entries == other._entries

    def __hash__(self) -> int:
        return hash(self._entries)

    def __repr__(self) -> str:
        return f"StrategyProfile({dict(self._entries)!r})"

    @property
    def is_pure(self) -> bool:
        return all(s.is_pure for _, s in self._entries)

    def pure_profile(self) -> ActionProfile:
        return ActionProfile([(u, s.pure_action()) for u, s in self._entries])

    def without(self, users: Iterable[int] | int) -> "StrategyProfile":
        drop = {users} if isinstance(users, int) else set(users)
        return StrategyProfile([e for e in self._entries if e[0] not in drop])

    def restrict(self, users: Iterable[int]) -> "StrategyProfile":
        keep = set(users)
        return StrategyProfile([e for e in self._entries if e[0] in keep])

    def replace(self, user: int, strat: MixedStrategy) -> "StrategyProfile":
        d = dict(self._entries)
        d[user] = strat
        return StrategyProfile(d)

    def update(self, other: "StrategyProfile") -> "StrategyProfile":
        d = dict(self._entries)
        d.update(other._entries)
        return StrategyProfile(d)

    def concat(self, other: "StrategyProfile") -> "StrategyProfile":
        common = set(self.users) & set(other.users)
        if common:
            raise OverlappingUsers(f"users {sorted(common)} appear in both profiles")
        return StrategyProfile(self._entries + other._entries)


@dataclass(frozen=True)
class SocialGraph:
    """Weighted social ties; ``weights[i]`` maps each neighbour m of i to w_im."""

    weights: tuple[tuple[tuple[int, float], ...], ...]

    def __post_init__(self):
        norm = []
        for i, row in enumerate(self.weights):
            row = tuple(sorted((int(m), float(w)) for m, w in _pairs(row)))
            for m, w in row:
                if m == i:
                    raise InvalidParams(f"user {i} tied to itself")
                if not 0.0 <= w <= 1.0:
                    raise InvalidParams(f"tie weight w[{i}][{m}]={w} outside [0, 1]")
            norm.append(row)
        object.__setattr__(self, "weights", tuple(norm))

    @classmethod
    def from_edges(cls, n_users: int, edges: Iterable[tuple[int, int, float]]) -> "SocialGraph":
        rows: list[dict[int, float]] = [dict() for _ in range(n_users)]
        for i, m, w in edges:
            if not (0 <= i < n_users and 0 <= m < n_users):
                raise InvalidParams(f"tie ({i}, {m}) references unknown user")
            rows[i][m] = float(w)
        return cls(tuple(tuple(r.items()) for r in rows))

    @classmethod
    def empty(cls, n_users: int) -> "SocialGraph":
        return cls(tuple(() for _ in range(n_users)))

    @property
    def n_users(self) -> int:
        return len(self.weights)

    def neighbors(self, i: int) -> tuple[int, ...]:
        return tuple(m for m, _ in self.weights[i])

    def weight(self, i: int, m: int) -> float:
        for j, w in self.weights[i]:
            if j == m:
                return w
        return 0.0

    def edges(self) -> list[tuple[int, int, float]]:
        return [(i, m, w) for i, row in enumerate(self.weights) for m, w in row]

    def is_symmetric(self) -> bool:
        return all(
            m < self.n_users and any(j == i and wj == w for j, wj in self.weights[m])
            for i, m, w in self.edges()
        )

    def incoming_weight(self, j: int) -> float:
        """Σ_{i : j ∈ N_i} w_ij."""
        return math.fsum(w for i, m, w in self.edges() if m == j)


@dataclass(frozen=True)
class Grouping:
    """Contiguous partition of users 0..N-1 into blocks of the given sizes."""

    sizes: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(int(k) for k in self.sizes))
        if not self.sizes or any(k < 1 for k in self.sizes):
            raise InvalidParams(f"group sizes must be positive, got {self.sizes}")

    @classmethod
    def from_blocks(cls, blocks: Sequence[Sequence[int]]) -> "Grouping":
        expected = 0
        for block in blocks:
            if list(block) != list(range(expected, expected + len(block))) or not block:
                raise InvalidParams(f"groups must be contiguous runs of users, got {blocks}")
            expected += len(block)
        return cls(tuple(len(b) for b in blocks))

    @classmethod
    def singletons(cls, n_users: int) -> "Grouping":
        return cls((1,) * n_users)

    @classmethod
    def whole(cls, n_users: int) -> "Grouping":
        return cls((n_users,))

    @property
    def n_users(self) -> int:
        return sum(self.sizes)

    @property
    def n_groups(self) -> int:
        return len(self.sizes)

    @property
    def offsets(self) -> tuple[int, ...]:
        """m_i = Σ_{j<i} k_j."""
        return tuple(itertools.accumulate((0,) + self.sizes[:-1]))

    @property
    def blocks(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(range(m, m + k)) for m, k in zip(self.offsets, self.sizes))

    def block(self, i: int) -> tuple[int, ...]:
        return self.blocks[i]

    def group_of(self, user: int) -> int:
        for g, block in enumerate(self.blocks):
            if user in block:
                return g
        raise IndexError(user)

    @property
    def k_star(self) -> int:
        return min(self.sizes)


SocialOracle = Callable[[ActionProfile], float]
PrivateOracle = Callable[[int, ActionProfile], float]
GroupOracle = Callable[[tuple, ActionProfile], float]


@dataclass(frozen=True, eq=False)
class Game:
    """A utility system: feasible action spaces plus the γ and α_i oracles.

    ``social`` and ``private`` must accept any profile whose act-sets are
    subsets of the ground sets, including unions of feasible actions.
    ``group_utility`` optionally overrides the block-sum group utility; it
    receives the tuple of block members and the profile.
    """

    spaces: tuple[tuple[Action, ...], ...]
    social: SocialOracle
    private: PrivateOracle
    ground_sets: Optional[tuple[frozenset, ...]] = None
    order_invariant: bool = True
    social_graph: Optional[SocialGraph] = None
    grouping: Optional[Grouping] = None
    group_utility: Optional[GroupOracle] = None
    name: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        spaces = tuple(tuple(frozenset(a) for a in sp) for sp in self.spaces)
        object.__setattr__(self, "spaces", spaces)
        if not spaces:
            raise InvalidParams("a game needs at least one user")
        for i, sp in enumerate(spaces):
            if not sp:
                raise InvalidParams(f"user {i} has an empty action space")
            if len(set(sp)) != len(sp):
                raise InvalidParams(f"user {i} lists a duplicate action")
        if self.ground_sets is None:
            object.__setattr__(self, "ground_sets", tuple(frozenset().union(*sp) for sp in spaces))
        else:
            gs = tuple(frozenset(g) for g in self.ground_sets)
            object.__setattr__(self, "ground_sets", gs)
            for i, sp in enumerate(spaces):
                if not all(a <= gs[i] for a in sp):
                    raise InvalidParams(f"user {i} has an action outside its ground set")
        if self.social_graph is not None and self.social_graph.n_users != self.n_users:
            raise InvalidParams("social graph size does not match the number of users")
        if self.grouping is not None and self.grouping.n_users != self.n_users:
            raise InvalidParams("grouping does not cover exactly the users of the game")

    @property
    def n_users(self) -> int:
        return len(self.spaces)

    @property
    def n_actions(self) -> tuple[int, ...]:
        return tuple(len(sp) for sp in self.spaces)

    @property
    def n_profiles(self) -> int:
        return math.prod(self.n_actions)

    @property
    def identical_spaces(self) -> bool:
        return all(sp == self.spaces[0] for sp in self.spaces)

    def gamma(self, X: ActionProfile) -> float:
        return float(self.social(X))

    def alpha(self, i: int, X: ActionProfile) -> float:
        return float(self.private(i, X))

    def action_index(self, user: int, acts: Iterable[Act]) -> int:
        return self.spaces[user].index(frozenset(acts))

    def profile(self, indices: Sequence[int], users: Optional[Sequence[int]] = None) -> ActionProfile:
        """Build a pure profile from per-user action indices."""
        users = range(self.n_users) if users is None else users
        return ActionProfile([(u, self.spaces[u][k]) for u, k in zip(users, indices)])

    def indices(self, X: ActionProfile) -> tuple[int, ...]:
        return tuple(self.action_index(u, a) for u, a in X.entries)

    def pure_profiles(self, users: Optional[Sequence[int]] = None) -> Iterator[ActionProfile]:
        """All pure profiles over ``users`` (default: everyone), lexicographic by index."""
        users = tuple(range(self.n_users)) if users is None else tuple(users)
        for combo in itertools.product(*(range(len(self.spaces[u])) for u in users)):
            yield self.profile(combo, users)

    def pure_strategy(self, X: ActionProfile) -> StrategyProfile:
        """Point-mass strategy profile over each user's full action list."""
        out = []
        for u, a in X.entries:
            probs = [0.0] * len(self.spaces[u])
            probs[self.action_index(u, a)] = 1.0
            out.append((u, MixedStrategy(self.spaces[u], probs)))
        return StrategyProfile(out)

    def require_complete(self, X) -> None:
        if tuple(X.users) != tuple(range(self.n_users)):
            raise IncompleteProfile(f"profile covers users {X.users}, expected all {self.n_users}")

    def require_social_graph(self) -> SocialGraph:
        if self.social_graph is None:
            raise MissingSocialGraph("game has no social graph")
        return self.social_graph

    def resolve_grouping(self, grouping: Optional[Grouping] = None) -> Grouping:
        grouping = grouping if grouping is not None else self.grouping
        if grouping is None:
            raise MissingGrouping("game has no grouping")
        if grouping.n_users != self.n_users:
            raise InvalidParams("grouping does not cover exactly the users of the game")
        return grouping

    def with_structure(self, *, social_graph=..., grouping=..., group_utility=...) -> "Game":
        """Copy with a different social graph / grouping (``...`` keeps the current one)."""
        return Game(
            spaces=self.spaces,
            social=self.social,
            private=self.private,
            ground_sets=self.ground_sets,
            order_invariant=self.order_invariant,
            social_graph=self.social_graph if social_graph is ... else social_graph,
            grouping=self.grouping if grouping is ... else grouping,
            group_utility=self.group_utility if group_utility is ... else group_utility,
            name=self.name,
            meta=dict(self.meta),
        )


def marginal(game: Game, Z: ActionProfile, Y: ActionProfile) -> float:
    """γ_Z(Y) = γ(Y ⊕ Z) − γ(Y)."""
    return game.gamma(concat(Y, Z)) - game.gamma(Y)


def social_group_utility(game: Game, i: int, X: ActionProfile) -> float:
    """η_i = α_i + Σ_m w_im α_m over the social graph."""
    graph = game.require_social_graph()
    game.require_complete(X)
    terms = [game.alpha(i, X)]
    terms += [w * game.alpha(m, X) for m, w in graph.weights[i]]
    return math.fsum(terms)


def group_members_utility(game: Game, members: tuple[int, ...], X: ActionProfile) -> float:
    if game.group_utility is not None:
        return float(game.group_utility(members, X))
    return math.fsum(game.alpha(j, X) for j in members)


def block_utility(game: Game, i: int, X: ActionProfile, grouping: Optional[Grouping] = None) -> float:
    """Group utility of block ``i``: the sum of its members' private utilities
    unless the game overrides it."""
    grouping = game.resolve_grouping(grouping)
    game.require_complete(X)
    return group_members_utility(game, grouping.block(i), X)
