"""Exhaustive structural checks: monotonicity, submodularity and validity.

Monotonicity and submodularity are checked on a dense table of γ over all
partial profiles (each user absent or playing one option), with the
comparisons vectorised through numpy index arithmetic.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np

from .core import TOL, Action, ActionProfile, Game, Grouping, group_members_utility, max_outcomes, social_group_utility
from .errors import InvalidParams, ResourceLimit


class WitnessKind(str, Enum):
    MONOTONICITY = "Monotonicity"
    SUBMODULARITY = "Submodularity"
    ASSUMPTION1 = "Assumption1"
    ASSUMPTION2 = "Assumption2"
    ASSUMPTION3 = "Assumption3"
    ASSUMPTION4 = "Assumption4"
    ASSUMPTION5 = "Assumption5"
    ASSUMPTION6 = "Assumption6"


@dataclass(frozen=True)
class Witness:
    """A recorded violation; ``lhs < rhs - tol`` always holds.

    ``profiles`` is (Y, X) for monotonicity, (Y, X, Z) for submodularity and
    (X,) for the validity assumptions. ``agent`` is the user or group the
    violated per-agent inequality refers to.
    """

    kind: WitnessKind
    profiles: tuple[ActionProfile, ...]
    lhs: float
    rhs: float
    agent: Optional[int] = None

    def to_json(self) -> dict:
        return {
            "kind": self.kind.value,
            "profiles": [p.to_json() for p in self.profiles],
            "lhs": self.lhs,
            "rhs": self.rhs,
            "agent": self.agent,
        }


@dataclass(frozen=True)
class Verdict:
    holds: bool
    witness: Optional[Witness] = None

    def __bool__(self) -> bool:
        return self.holds

    def to_json(self) -> dict:
        return {"holds": self.holds, "witness": None if self.witness is None else self.witness.to_json()}


def pairwise_unions(space: Sequence[Action]) -> list[Action]:
    """Feasible actions followed by every new union of two of them."""
    out = list(space)
    seen = set(out)
    for a, b in itertools.combinations(space, 2):
        u = a | b
        if u not in seen:
            seen.add(u)
            out.append(u)
    return out


class _Lattice:
    """γ over every partial profile drawn from per-user option lists.

    Code 0 means the user is absent, code k means option k-1.
    """

    def __init__(self, game: Game, options: Sequence[Sequence[Action]], cap: int):
        self.game = game
        self.options = [list(o) for o in options]
        self.radix = [len(o) + 1 for o in self.options]
        size = math.prod(self.radix)
        if size > cap:
            raise ResourceLimit(f"{size} partial profiles exceed the enumeration cap {cap}")
        self.strides = [math.prod(self.radix[:i]) for i in range(len(self.radix))]
        table = np.empty(size, dtype=float)
        # user 0 varies fastest to match the stride layout
        for flat, codes in enumerate(itertools.product(*(range(r) for r in reversed(self.radix)))):
            table[flat] = game.gamma(self.profile(codes[::-1]))
        self.gamma = table

    def profile(self, codes: Sequence[int]) -> ActionProfile:
        return ActionProfile((u, self.options[u][c - 1]) for u, c in enumerate(codes) if c)


def _combine(per_user: list[np.ndarray], strides: list[int]) -> np.ndarray:
    """Flat lattice index for every joint state; last user varies fastest."""
    acc = np.zeros(1, dtype=np.int64)
    for codes, stride in zip(per_user, strides):
        acc = (acc[:, None] + codes[None, :] * stride).ravel()
    return acc


def _key(codes: Sequence[int]) -> tuple:
    users = tuple(u for u, c in enumerate(codes) if c)
    return (len(users), users, tuple(c for c in codes if c))


def _least(candidates: np.ndarray, shape: tuple[int, ...], decode: Callable) -> tuple:
    best = None
    for flat in candidates:
        states = np.unravel_index(int(flat), shape)
        item = decode(states)
        if best is None or item[0] < best[0]:
            best = item
    return best


def _require_order_invariant(game: Game) -> None:
    # subsequences are enumerated by user, so play order must not matter
    if not game.order_invariant:
        raise InvalidParams("structure checks support order-invariant utilities only")


def check_nondecreasing(game: Game, tol: float = TOL, cap: Optional[int] = None) -> Verdict:
    """γ(Y) ≤ γ(X) + tol for every pure X over feasible actions and every Y ⊆ X."""
    _require_order_invariant(game)
    cap = max_outcomes() if cap is None else cap
    lat = _Lattice(game, game.spaces, cap)
    ys, xs, sizes = [], [], []
    for n in game.n_actions:
        a = np.arange(1, n + 1)
        # states: absent | in X only (a) | in both (a)
        ys.append(np.concatenate([[0], np.zeros(n, dtype=int), a]))
        xs.append(np.concatenate([[0], a, a]))
        sizes.append(1 + 2 * n)
    if math.prod(sizes) > cap:
        raise ResourceLimit(f"{math.prod(sizes)} (Y, X) pairs exceed the enumeration cap {cap}")
    iy = _combine(ys, lat.strides)
    ix = _combine(xs, lat.strides)
    g = lat.gamma
    bad = np.flatnonzero(g[iy] > g[ix] + tol)
    if bad.size == 0:
        return Verdict(True)
    size_x = _combine([(x > 0).astype(np.int64) for x in xs], [1] * len(xs))[bad]
    bad = bad[size_x == size_x.min()]

    def decode(states):
        yc = [int(ys[u][s]) for u, s in enumerate(states)]
        xc = [int(xs[u][s]) for u, s in enumerate(states)]
        return (_key(xc) + _key(yc), yc, xc)

    _, yc, xc = _least(bad, tuple(sizes), decode)
    Y, X = lat.profile(yc), lat.profile(xc)
    return Verdict(False, Witness(WitnessKind.MONOTONICITY, (Y, X), game.gamma(X), game.gamma(Y)))


def check_submodular(game: Game, tol: float = TOL, cap: Optional[int] = None) -> Verdict:
    """γ_Z(Y) ≥ γ_Z(X) − tol for Y ⊆ X pure and Z on users outside X.

    Z may also use unions of two feasible actions, the act-sets that Ω ∪ S
    compositions produce.
    """
    _require_order_invariant(game)
    cap = max_outcomes() if cap is None else cap
    extended = [pairwise_unions(sp) for sp in game.spaces]
    lat = _Lattice(game, extended, cap)
    ys, xs, yzs, xzs, sizes = [], [], [], [], []
    for n, ext in zip(game.n_actions, extended):
        a = np.arange(1, n + 1)
        e = np.arange(1, len(ext) + 1)
        zn, ze = np.zeros(n, dtype=int), np.zeros(len(ext), dtype=int)
        # states: absent | X only (a) | Y and X (a) | Z (e)
        ys.append(np.concatenate([[0], zn, a, ze]))
        xs.append(np.concatenate([[0], a, a, ze]))
        yzs.append(np.concatenate([[0], zn, a, e]))
        xzs.append(np.concatenate([[0], a, a, e]))
        sizes.append(1 + 2 * n + len(ext))
    if math.prod(sizes) > cap:
        raise ResourceLimit(f"{math.prod(sizes)} (Y, X, Z) triples exceed the enumeration cap {cap}")
    g = lat.gamma
    iy, ix = _combine(ys, lat.strides), _combine(xs, lat.strides)
    iyz, ixz = _combine(yzs, lat.strides), _combine(xzs, lat.strides)
    lhs = g[iyz] - g[iy]
    rhs = g[ixz] - g[ix]
    bad = np.flatnonzero(lhs < rhs - tol)
    if bad.size == 0:
        return Verdict(True)
    size_x = _combine([(x > 0).astype(np.int64) for x in xs], [1] * len(xs))[bad]
    bad = bad[size_x == size_x.min()]

    def decode(states):
        yc = [int(ys[u][s]) for u, s in enumerate(states)]
        xc = [int(xs[u][s]) for u, s in enumerate(states)]
        zc = [int(yzs[u][s]) - int(ys[u][s]) for u, s in enumerate(states)]
        return (_key(xc) + _key(yc) + _key(zc), yc, xc, zc)

    _, yc, xc, zc = _least(bad, tuple(sizes), decode)
    Y, X, Z = lat.profile(yc), lat.profile(xc), lat.profile(zc)
    YZ, XZ = Y.update(Z), X.update(Z)
    witness = Witness(
        WitnessKind.SUBMODULARITY,
        (Y, X, Z),
        game.gamma(YZ) - game.gamma(Y),
        game.gamma(XZ) - game.gamma(X),
    )
    return Verdict(False, witness)


def _check_validity(
    game: Game,
    agents: Sequence[tuple[int, ...]],
    utility: Callable[[int, ActionProfile], float],
    kinds: tuple[WitnessKind, WitnessKind],
    tol: float,
    cap: Optional[int],
) -> Verdict:
    cap = max_outcomes() if cap is None else cap
    if game.n_profiles > cap:
        raise ResourceLimit(f"{game.n_profiles} profiles exceed the enumeration cap {cap}")
    for X in game.pure_profiles():
        g = game.gamma(X)
        values = []
        for k, members in enumerate(agents):
            value = utility(k, X)
            loss = g - game.gamma(X.without(members))
            if value < loss - tol:
                return Verdict(False, Witness(kinds[0], (X,), value, loss, k))
            values.append(value)
        total = math.fsum(values)
        if g < total - tol:
            return Verdict(False, Witness(kinds[1], (X,), g, total))
    return Verdict(True)


def check_validity_private(game: Game, tol: float = TOL, cap: Optional[int] = None) -> Verdict:
    """α_i(X) ≥ γ_{x_i}(X_{-i}) and Σ_i α_i(X) ≤ γ(X) on every complete pure X."""
    agents = [(i,) for i in range(game.n_users)]
    kinds = (WitnessKind.ASSUMPTION1, WitnessKind.ASSUMPTION2)
    return _check_validity(game, agents, game.alpha, kinds, tol, cap)


def check_validity_social(game: Game, tol: float = TOL, cap: Optional[int] = None) -> Verdict:
    """Same conditions with the social group utilities η_i."""
    game.require_social_graph()
    agents = [(i,) for i in range(game.n_users)]
    kinds = (WitnessKind.ASSUMPTION3, WitnessKind.ASSUMPTION4)
    return _check_validity(game, agents, lambda i, X: social_group_utility(game, i, X), kinds, tol, cap)


def check_validity_group(
    game: Game, tol: float = TOL, cap: Optional[int] = None, grouping: Optional[Grouping] = None
) -> Verdict:
    """η_i(X) ≥ γ_{x^i}(X^{-i}) per block and Σ_i η_i(X) ≤ γ(X)."""
    grouping = game.resolve_grouping(grouping)
    blocks = grouping.blocks
    kinds = (WitnessKind.ASSUMPTION5, WitnessKind.ASSUMPTION6)
    return _check_validity(
        game, blocks, lambda k, X: group_members_utility(game, blocks[k], X), kinds, tol, cap
    )
