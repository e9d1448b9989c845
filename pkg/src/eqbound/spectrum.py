"""Database-assisted spectrum access games.

Each user picks one vacant channel; co-channel users within distance δ
interfere. Acts are channel numbers, so the feasible actions of user i are
the singletons {c} for c in its vacant set. Act-sets with several channels
(produced by Ω ∪ S compositions) are scored per channel: every channel the
user holds collects its own noise plus interference from each in-range user
holding that same channel.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .core import TOL, ActionProfile, Game, Grouping, SocialGraph
from .errors import (
    AsymmetricTies,
    EmptyChannelSet,
    IncompleteProfile,
    InvalidParams,
    MissingGrouping,
    MissingSocialGraph,
    UnequalPowers,
)


@dataclass(frozen=True, eq=False)
class SpectrumScenario:
    positions: tuple[tuple[float, float], ...]
    delta: float
    lam: float
    powers: tuple[float, ...]
    vacant: tuple[tuple[int, ...], ...]
    noise: tuple[dict, ...]
    ties: Optional[SocialGraph] = None
    partition: Optional[Grouping] = None
    distances: Optional[tuple[tuple[float, ...], ...]] = None
    n_channels: Optional[int] = None

    def __post_init__(self):
        n = len(self.vacant)
        object.__setattr__(self, "positions", tuple(tuple(float(v) for v in p) for p in self.positions))
        object.__setattr__(self, "powers", tuple(float(p) for p in self.powers))
        object.__setattr__(self, "vacant", tuple(tuple(sorted(int(c) for c in m)) for m in self.vacant))
        object.__setattr__(self, "noise", tuple({int(c): float(w) for c, w in dict(row).items()} for row in self.noise))
        if n < 1:
            raise InvalidParams("a scenario needs at least one user")
        if self.delta <= 0 or self.lam <= 0:
            raise InvalidParams("delta and lambda must be positive")
        if len(self.powers) != n or len(self.noise) != n:
            raise InvalidParams("powers, vacant and noise must have one entry per user")
        if any(p <= 0 for p in self.powers):
            raise InvalidParams("transmission powers must be positive")
        for i, m in enumerate(self.vacant):
            if not m:
                raise InvalidParams(f"user {i} has no vacant channel")
            for c in m:
                if c not in self.noise[i]:
                    raise InvalidParams(f"missing noise for user {i} on channel {c}")
                if self.noise[i][c] < 0:
                    raise InvalidParams("noise must be nonnegative")
        if self.distances is not None:
            d = tuple(tuple(float(v) for v in row) for row in self.distances)
            object.__setattr__(self, "distances", d)
            if len(d) != n or any(len(row) != n for row in d):
                raise InvalidParams("distance matrix must be N x N")
        elif len(self.positions) != n:
            raise InvalidParams("positions must have one entry per user")
        dist = self.distance_matrix()
        for i in range(n):
            for m in range(n):
                if m != i and not dist[i, m] > 0:
                    raise InvalidParams(f"users {i} and {m} coincide")
        if self.ties is not None and self.ties.n_users != n:
            raise InvalidParams("ties must cover every user")
        if self.partition is not None and self.partition.n_users != n:
            raise InvalidParams("partition must cover every user")

    @property
    def n_users(self) -> int:
        return len(self.vacant)

    def distance_matrix(self) -> np.ndarray:
        if self.distances is not None:
            return np.array(self.distances, dtype=float)
        pts = np.array(self.positions, dtype=float)
        return np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(axis=-1))

    def gain(self, m: int, i: int) -> float:
        """P_m d_mi^{-λ}: interference m inflicts on i when they share a channel."""
        return self.powers[m] * float(self.distance_matrix()[m, i]) ** (-self.lam)


def interference_neighbors(sc: SpectrumScenario, i: int) -> frozenset[int]:
    """N_i^p = {m ≠ i : d_mi ≤ δ} (the boundary counts as interfering)."""
    d = sc.distance_matrix()
    return frozenset(m for m in range(sc.n_users) if m != i and d[m, i] <= sc.delta)


class _Model:
    """Precomputed neighbour sets and pairwise gains for fast evaluation."""

    def __init__(self, sc: SpectrumScenario):
        self.sc = sc
        d = sc.distance_matrix()
        n = sc.n_users
        self.neighbors = [sorted(interference_neighbors(sc, i)) for i in range(n)]
        self.gain = [
            [sc.powers[m] * float(d[m, i]) ** (-sc.lam) if m != i else 0.0 for m in range(n)] for i in range(n)
        ]

    def interference(self, i: int, A: ActionProfile) -> float:
        channels = A[i]
        terms = []
        for c in sorted(channels):
            terms.append(self.sc.noise[i][c])
            for m in self.neighbors[i]:
                if m in A and c in A[m]:
                    terms.append(self.gain[i][m])
        return math.fsum(terms)

    def alpha(self, i: int, A: ActionProfile) -> float:
        return -self.interference(i, A) if i in A else 0.0

    def total(self, A: ActionProfile) -> float:
        return math.fsum(self.alpha(i, A) for i in A)


def interference(sc: SpectrumScenario, i: int, A: ActionProfile) -> float:
    """I_i(A); with several channels the per-channel terms are added."""
    if i not in A or not A[i]:
        raise EmptyChannelSet(f"user {i} holds no channel")
    return _Model(sc).interference(i, A)


class Flavor(str, Enum):
    PRIVATE = "private"
    SOCIAL = "social"
    GROUPED = "grouped"


def scaling_factor(graph: SocialGraph) -> float:
    """p = min_j (1 + Σ_{i : j ∈ N_i^s} w_ij)."""
    return min(1.0 + graph.incoming_weight(j) for j in range(graph.n_users))


def spectrum_game(sc: SpectrumScenario, flavor: Flavor | str = Flavor.PRIVATE) -> Game:
    """α_i = −I_i; γ = Σ α_i, scaled by p for the social-aware flavour."""
    flavor = Flavor(flavor)
    model = _Model(sc)
    spaces = tuple(tuple(frozenset([c]) for c in m) for m in sc.vacant)
    ground = tuple(frozenset(m) for m in sc.vacant)

    def private(i: int, A: ActionProfile) -> float:
        return model.alpha(i, A)

    social = model.total
    graph, grouping = None, None
    meta = {"family": "spectrum", "flavor": flavor.value}
    if flavor is Flavor.SOCIAL:
        if sc.ties is None:
            raise MissingSocialGraph("social-aware flavour needs ties")
        graph = sc.ties
        p = scaling_factor(graph)
        meta["p"] = p

        def social(A: ActionProfile, _p=p) -> float:
            return _p * model.total(A)

    elif flavor is Flavor.GROUPED:
        if sc.partition is None:
            raise MissingGrouping("grouped flavour needs a partition")
        grouping = sc.partition
    else:
        graph, grouping = sc.ties, sc.partition
    return Game(
        spaces=spaces,
        social=social,
        private=private,
        ground_sets=ground,
        social_graph=graph,
        grouping=grouping,
        name=f"spectrum-{flavor.value}",
        meta=meta,
    )


@dataclass(frozen=True)
class ConditionResult:
    holds: bool
    slack: float
    lhs: float
    rhs: float

    def __bool__(self) -> bool:
        return self.holds


def social_aware_condition(sc: SpectrumScenario, A: ActionProfile, i: int, tol: float = TOL) -> ConditionResult:
    """Sufficient condition for η_i ≥ γ_{a_i}(A_{-i}) under equal powers and
    symmetric ties:

        Σ_n w_in α_n(A) ≥ (min_j Σ_m w_jm) α_i(A) − p Σ_{m ∈ N_i^p} P d_mi^{-λ} 1{a_i = a_m}
    """
    if sc.ties is None:
        raise MissingSocialGraph("condition needs ties")
    if not sc.ties.is_symmetric():
        raise AsymmetricTies("ties must satisfy w_nm = w_mn")
    if len(set(sc.powers)) != 1:
        raise UnequalPowers("condition assumes every user transmits at the same power")
    if tuple(A.users) != tuple(range(sc.n_users)):
        raise IncompleteProfile("condition needs a complete profile")
    model = _Model(sc)
    graph = sc.ties
    p = scaling_factor(graph)
    min_out = min(math.fsum(w for _, w in graph.weights[j]) for j in range(sc.n_users))
    lhs = math.fsum(w * model.alpha(n, A) for n, w in graph.weights[i])
    shared = math.fsum(model.gain[i][m] for m in model.neighbors[i] if A[i] & A[m])
    rhs = min_out * model.alpha(i, A) - p * shared
    slack = lhs - rhs
    return ConditionResult(slack >= -tol, slack, lhs, rhs)


@dataclass(frozen=True)
class GeneratorConfig:
    """Ranges the scenario generator samples from (uniformly)."""

    side: float = 100.0
    delta: tuple[float, float] = (30.0, 60.0)
    lam: tuple[float, float] = (2.0, 4.0)
    power: tuple[float, float] = (1.0, 1.0)
    noise: tuple[float, float] = (0.0, 1e-3)
    vacancy: float = 0.7
    tie_prob: float = 0.0
    equal_powers: bool = True
    partition: Optional[tuple[int, ...]] = None

    def validate(self) -> None:
        for name in ("delta", "lam", "power", "noise"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise InvalidParams(f"{name} range is empty")
        if self.side <= 0 or self.delta[0] <= 0 or self.lam[0] <= 0 or self.power[0] <= 0 or self.noise[0] < 0:
            raise InvalidParams("generator ranges must be positive (noise nonnegative)")
        if not 0 <= self.vacancy <= 1 or not 0 <= self.tie_prob <= 1:
            raise InvalidParams("probabilities must lie in [0, 1]")


def generate_scenario(seed: int, n_users: int, n_channels: int,
                      config: GeneratorConfig = GeneratorConfig()) -> SpectrumScenario:
    """Deterministic scenario: the same arguments always give the same numbers."""
    if n_users < 1 or n_channels < 1:
        raise InvalidParams("need at least one user and one channel")
    if seed < 0 or seed >= 2**64:
        raise InvalidParams("seed must be a 64-bit unsigned integer")
    config.validate()
    rng = np.random.default_rng(seed)
    positions = rng.uniform(0.0, config.side, size=(n_users, 2))
    delta = float(rng.uniform(*config.delta))
    lam = float(rng.uniform(*config.lam))
    if config.equal_powers:
        powers = [float(rng.uniform(*config.power))] * n_users
    else:
        powers = [float(v) for v in rng.uniform(*config.power, size=n_users)]
    vacant = []
    for _ in range(n_users):
        mask = rng.random(n_channels) < config.vacancy
        if not mask.any():
            mask[rng.integers(n_channels)] = True
        vacant.append(tuple(int(c) + 1 for c in np.flatnonzero(mask)))
    noise = [{c: float(rng.uniform(*config.noise)) for c in m} for m in vacant]
    ties = None
    if config.tie_prob > 0:
        edges = []
        for i in range(n_users):
            for m in range(i + 1, n_users):
                if rng.random() < config.tie_prob:
                    w = float(rng.uniform(0.0, 1.0))
                    edges += [(i, m, w), (m, i, w)]
        ties = SocialGraph.from_edges(n_users, edges)
    partition = None
    if config.partition is not None:
        partition = Grouping(config.partition)
        if partition.n_users != n_users:
            raise InvalidParams("partition sizes must sum to the number of users")
    return SpectrumScenario(
        positions=tuple(map(tuple, positions)),
        delta=delta,
        lam=lam,
        powers=tuple(powers),
        vacant=tuple(vacant),
        noise=tuple(noise),
        ties=ties,
        partition=partition,
        n_channels=n_channels,
    )
