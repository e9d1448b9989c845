"""Brute-force optimum and signed-margin checks of the equilibrium bounds.

Every report is oriented so that ``margin = lhs - rhs >= -tol`` means the
inequality holds; ``lhs`` is always the side claimed to be larger.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Optional, Sequence, Union

from .core import TOL, ActionProfile, Game, Grouping, StrategyProfile, max_outcomes
from .curvature import Curvature, group_curvatures, total_curvature
from .equilibria import EquilibriumKind, certify
from .errors import HypothesisUnverified, ResourceLimit
from .expectation import compose_union, expected_marginal, expected_social
from .structure import (
    Verdict,
    check_nondecreasing,
    check_submodular,
    check_validity_group,
    check_validity_private,
    check_validity_social,
)


class Statement(str, Enum):
    THM1 = "Thm1"
    THM2 = "Thm2"
    THM3 = "Thm3"
    THM4 = "Thm4"
    THM5 = "Thm5"
    THM6 = "Thm6"
    THM6_STAR = "Thm6Star"
    LEM1 = "Lem1"
    LEM2 = "Lem2"


@dataclass(frozen=True)
class BoundReport:
    statement: Statement
    lhs: float
    rhs: float
    hypotheses: dict = field(default_factory=dict)
    inputs: dict = field(default_factory=dict)
    tol: float = TOL

    @property
    def margin(self) -> float:
        return self.lhs - self.rhs

    @property
    def verified(self) -> bool:
        """True when every premise of the statement was checked and holds."""
        return all(self.hypotheses.values())

    @property
    def violated(self) -> bool:
        """A verified statement with a negative margin contradicts a proof."""
        return self.verified and not math.isnan(self.margin) and self.margin < -self.tol

    def to_json(self) -> dict:
        def num(x):
            return None if x is None or math.isnan(x) else x

        return {
            "statement": self.statement.value,
            "lhs": num(self.lhs),
            "rhs": num(self.rhs),
            "margin": num(self.margin),
            "status": "checked" if self.verified else "hypotheses not met",
            "hypotheses": dict(self.hypotheses),
            "inputs": self.inputs,
        }


def brute_force_opt(game: Game, cap: Optional[int] = None) -> tuple[ActionProfile, float]:
    """Lexicographically least pure profile maximising γ, and its value."""
    cap = max_outcomes() if cap is None else cap
    if game.n_profiles > cap:
        raise ResourceLimit(f"{game.n_profiles} profiles exceed the enumeration cap {cap}")
    best, best_value = None, -math.inf
    for X in game.pure_profiles():
        value = game.gamma(X)
        if value > best_value:
            best, best_value = X, value
    return best, best_value


class Analysis:
    """Lazily computed, cached structural facts about one game."""

    def __init__(self, game: Game, tol: float = TOL, cap: Optional[int] = None,
                 grouping: Optional[Grouping] = None, _shared: Optional[dict] = None):
        self.game = game
        self.tol = tol
        self.cap = cap
        self.grouping = grouping if grouping is not None else game.grouping
        self._shared = {} if _shared is None else _shared

    def regrouped(self, grouping: Optional[Grouping]) -> "Analysis":
        """Same game under another grouping; grouping-free results are shared."""
        return Analysis(self.game, self.tol, self.cap, grouping, self._shared)

    def _memo(self, name: str, compute):
        if name not in self._shared:
            self._shared[name] = compute()
        return self._shared[name]

    @property
    def nondecreasing(self) -> Verdict:
        return self._memo("nondecreasing", lambda: check_nondecreasing(self.game, self.tol, self.cap))

    @property
    def submodular(self) -> Verdict:
        return self._memo("submodular", lambda: check_submodular(self.game, self.tol, self.cap))

    @property
    def valid_private(self) -> Verdict:
        return self._memo("valid_private", lambda: check_validity_private(self.game, self.tol, self.cap))

    @property
    def valid_social(self) -> Optional[Verdict]:
        if self.game.social_graph is None:
            return None
        return self._memo("valid_social", lambda: check_validity_social(self.game, self.tol, self.cap))

    @cached_property
    def valid_group(self) -> Optional[Verdict]:
        if self.grouping is None:
            return None
        return check_validity_group(self.game, self.tol, self.cap, self.grouping)

    @property
    def optimum(self) -> tuple[ActionProfile, float]:
        return self._memo("optimum", lambda: brute_force_opt(self.game, self.cap))

    @property
    def omega(self) -> ActionProfile:
        return self.optimum[0]

    @property
    def opt(self) -> float:
        return self.optimum[1]

    @property
    def monotone_submodular(self) -> bool:
        return bool(self.nondecreasing) and bool(self.submodular)

    @property
    def curvature(self) -> Optional[Curvature]:
        """Total curvature, or None when γ is not nondecreasing and submodular."""
        if not self.monotone_submodular:
            return None
        return self._memo("curvature", lambda: total_curvature(self.game, self.omega, self.tol, self.cap))

    @cached_property
    def group_curvature(self) -> Optional[list[Curvature]]:
        if self.grouping is None or not self.monotone_submodular:
            return None
        return group_curvatures(self.game, self.grouping, self.omega, self.tol, self.cap)


def _as_strategy(game: Game, S: Union[StrategyProfile, ActionProfile]) -> StrategyProfile:
    return game.pure_strategy(S) if isinstance(S, ActionProfile) else S


def _gate(report: BoundReport, strict: bool) -> BoundReport:
    if strict and not report.verified:
        failed = sorted(k for k, v in report.hypotheses.items() if not v)
        raise HypothesisUnverified(f"{report.statement.value}: unverified premises {failed}")
    return report


def _inputs(game: Game, S: StrategyProfile, omega: ActionProfile, **extra) -> dict:
    out = {"omega": omega.to_json()}
    if S.is_pure:
        out["S"] = S.pure_profile().to_json()
    else:
        out["S"] = {str(u): list(s.probs) for u, s in S.entries}
    out.update(extra)
    return out


def half_bound_rhs(game: Game, S: StrategyProfile, omega: ActionProfile, opt: float,
                   blocks: Sequence[Sequence[int]], cap: Optional[int] = None) -> float:
    """½(γ̄(Ω) + Σ_b γ̄_{s^b}(Ω ∪ S^{-b})) over the given blocks of users."""
    terms = [
        expected_marginal(game, S.restrict(b), compose_union(omega, S.without(b)), cap)
        for b in blocks
    ]
    return 0.5 * (opt + math.fsum(terms))


def _half_report(statement, analysis, S, blocks, hypotheses, strict, **extra) -> BoundReport:
    game = analysis.game
    lhs = expected_social(game, S, analysis.cap)
    rhs = half_bound_rhs(game, S, analysis.omega, analysis.opt, blocks, analysis.cap)
    report = BoundReport(statement, lhs, rhs, hypotheses, _inputs(game, S, analysis.omega, **extra), analysis.tol)
    return _gate(report, strict)


def _curvature_report(statement, analysis, S, c, hypotheses, strict, **extra) -> BoundReport:
    game = analysis.game
    lhs = expected_social(game, S, analysis.cap)
    rhs = math.nan if c is None else analysis.opt / (1.0 + c)
    hypotheses = dict(hypotheses, curvature_defined=c is not None)
    report = BoundReport(statement, lhs, rhs, hypotheses,
                         _inputs(game, S, analysis.omega, c=c, **extra), analysis.tol)
    return _gate(report, strict)


def _analysis(game: Game, analysis: Optional[Analysis], grouping: Optional[Grouping] = None) -> Analysis:
    if analysis is None:
        return Analysis(game, grouping=grouping)
    if grouping is not None and analysis.grouping != grouping:
        return analysis.regrouped(grouping)
    return analysis


def check_thm1(game: Game, S, analysis: Optional[Analysis] = None, strict: bool = True) -> BoundReport:
    """γ̄(S) ≥ ½(γ̄(Ω) + Σ_i γ̄_{s_i}(S_{-i} ∪ Ω)) for a Nash equilibrium S."""
    a = _analysis(game, analysis)
    S = _as_strategy(game, S)
    hyp = {
        "nash": certify(game, EquilibriumKind.NASH, S, a.tol, cap=a.cap).valid,
        "valid_private": bool(a.valid_private),
        "submodular": bool(a.submodular),
    }
    return _half_report(Statement.THM1, a, S, [(i,) for i in range(game.n_users)], hyp, strict)


def check_thm2(game: Game, S, c: Optional[float] = None, analysis: Optional[Analysis] = None,
               strict: bool = True) -> BoundReport:
    """γ̄(S) ≥ γ̄(Ω)/(1+c)."""
    a = _analysis(game, analysis)
    S = _as_strategy(game, S)
    if c is None and a.curvature is not None:
        c = a.curvature.value
    hyp = {
        "nash": certify(game, EquilibriumKind.NASH, S, a.tol, cap=a.cap).valid,
        "valid_private": bool(a.valid_private),
        "nondecreasing": bool(a.nondecreasing),
        "submodular": bool(a.submodular),
    }
    return _curvature_report(Statement.THM2, a, S, c, hyp, strict)


def check_thm3_thm4(game: Game, S, c: Optional[float] = None, analysis: Optional[Analysis] = None,
                    strict: bool = True) -> tuple[BoundReport, BoundReport]:
    """The Thm1/Thm2 inequalities, gated on social-aware equilibrium and the
    validity of (γ, {η_i})."""
    a = _analysis(game, analysis)
    S = _as_strategy(game, S)
    if c is None and a.curvature is not None:
        c = a.curvature.value
    base = {
        "social_aware_nash": certify(game, EquilibriumKind.SOCIAL, S, a.tol, cap=a.cap).valid,
        "valid_social": bool(a.valid_social),
        "submodular": bool(a.submodular),
    }
    thm3 = _half_report(Statement.THM3, a, S, [(i,) for i in range(game.n_users)], base, False)
    thm4 = _curvature_report(Statement.THM4, a, S, c, dict(base, nondecreasing=bool(a.nondecreasing)), False)
    return _gate(thm3, strict), _gate(thm4, strict)


def check_thm5(game: Game, grouping: Optional[Grouping], S, analysis: Optional[Analysis] = None,
               strict: bool = True) -> BoundReport:
    """γ̄(S) ≥ ½(γ̄(Ω) + Σ_i γ̄_{s^i}(Ω ∪ S^{-i})) for a group Nash equilibrium S."""
    grouping = game.resolve_grouping(grouping)
    a = _analysis(game, analysis, grouping)
    S = _as_strategy(game, S)
    hyp = {
        "group_nash": certify(game, EquilibriumKind.GROUP, S, a.tol, grouping, a.cap).valid,
        "valid_group": bool(a.valid_group),
        "submodular": bool(a.submodular),
    }
    return _half_report(Statement.THM5, a, S, grouping.blocks, hyp, strict, groups=list(grouping.sizes))


def check_thm6(game: Game, grouping: Optional[Grouping], S, per_group_c: Optional[Sequence[float]] = None,
               analysis: Optional[Analysis] = None, strict: bool = True) -> list[BoundReport]:
    """γ̄(S) ≥ γ̄(Ω)/(1 + max_i c_{k_i}); with identical action spaces also the
    k* = min_i k_i form, reported as Thm6Star."""
    grouping = game.resolve_grouping(grouping)
    a = _analysis(game, analysis, grouping)
    S = _as_strategy(game, S)
    if per_group_c is None and a.group_curvature is not None:
        per_group_c = [g.value for g in a.group_curvature]
    hyp = {
        "group_nash": certify(game, EquilibriumKind.GROUP, S, a.tol, grouping, a.cap).valid,
        "valid_group": bool(a.valid_group),
        "nondecreasing": bool(a.nondecreasing),
        "submodular": bool(a.submodular),
    }
    c_max = None if per_group_c is None else max(per_group_c)
    reports = [_curvature_report(Statement.THM6, a, S, c_max, hyp, False, groups=list(grouping.sizes))]
    if game.identical_spaces:
        c_star = None
        if per_group_c is not None:
            # several groups may share the smallest size; use the largest of their curvatures
            c_star = max(c for c, k in zip(per_group_c, grouping.sizes) if k == grouping.k_star)
        reports.append(_curvature_report(Statement.THM6_STAR, a, S, c_star, dict(hyp, identical_spaces=True),
                                         False, groups=list(grouping.sizes), k_star=grouping.k_star))
    return [_gate(r, strict) for r in reports]


def check_lemma1(game: Game, grouping: Optional[Grouping], S, omega: Optional[ActionProfile] = None,
                 analysis: Optional[Analysis] = None, strict: bool = True) -> BoundReport:
    """γ̄(S) + Σ_{σ^i≠s^i} γ̄_{σ^i}(S^{-i}) − Σ_{s^i≠σ^i} γ̄_{s^i}(S^{(i-1)} ∪ Ω) ≥ γ̄(Ω).

    Block i counts as "in Ω∖S" (and "in S∖Ω") exactly when s^i ≠ σ^i.
    """
    grouping = game.resolve_grouping(grouping)
    a = _analysis(game, analysis, grouping)
    X = S.pure_profile() if isinstance(S, StrategyProfile) else S
    game.require_complete(X)
    omega = a.omega if omega is None else omega
    S = game.pure_strategy(X)
    Om = game.pure_strategy(omega)
    gained, lost = [], []
    for i, block in enumerate(grouping.blocks):
        if X.restrict(block) == omega.restrict(block):
            continue
        gained.append(expected_marginal(game, Om.restrict(block), S.without(block), a.cap))
        earlier = [u for b in grouping.blocks[:i] for u in b]
        lost.append(expected_marginal(game, S.restrict(block), compose_union(omega, S.restrict(earlier)), a.cap))
    lhs = expected_social(game, S, a.cap) + math.fsum(gained) - math.fsum(lost)
    rhs = expected_social(game, Om, a.cap)
    hyp = {"submodular": bool(a.submodular)}
    report = BoundReport(Statement.LEM1, lhs, rhs, hyp,
                         _inputs(game, S, omega, groups=list(grouping.sizes)), a.tol)
    return _gate(report, strict)


def check_lemma2(game: Game, grouping: Optional[Grouping], S, analysis: Optional[Analysis] = None,
                 strict: bool = True) -> BoundReport:
    """Σ_i γ̄_{s^i}(∅) ≥ γ̄(S)."""
    grouping = game.resolve_grouping(grouping)
    a = _analysis(game, analysis, grouping)
    S = _as_strategy(game, S)
    empty = StrategyProfile()
    lhs = math.fsum(expected_marginal(game, S.restrict(b), empty, a.cap) for b in grouping.blocks)
    rhs = expected_social(game, S, a.cap)
    hyp = {"submodular": bool(a.submodular)}
    report = BoundReport(Statement.LEM2, lhs, rhs, hyp,
                         _inputs(game, S, a.omega, groups=list(grouping.sizes)), a.tol)
    return _gate(report, strict)
