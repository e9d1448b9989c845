"""End-to-end runs that the command line wraps: structure checks, equilibrium
search, bound reports and sweep rows. Every function returns plain JSON-able data."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Optional, Sequence

from .bounds import (
    Analysis,
    BoundReport,
    check_lemma1,
    check_lemma2,
    check_thm1,
    check_thm2,
    check_thm3_thm4,
    check_thm5,
    check_thm6,
)
from .core import ActionProfile, Game, Grouping
from .curvature import group_curvatures
from .equilibria import EquilibriumKind, best_response_dynamics, certify, enumerate_equilibria
from .errors import InvalidParams, ResourceLimit
from .expectation import expected_social
from .instances import generate_coverage
from .scenario import Scenario
from .spectrum import Flavor, GeneratorConfig, generate_scenario, social_aware_condition, spectrum_game


def _grouping_for(sc: Scenario, kind: EquilibriumKind, game: Game) -> Grouping:
    if kind is EquilibriumKind.GROUP:
        return sc.grouping
    return Grouping.singletons(game.n_users)


def run_check(sc: Scenario) -> dict:
    game = sc.game_for(EquilibriumKind.NASH)
    a = Analysis(game, sc.tolerance)
    out = {
        "digest": sc.digest,
        "nondecreasing": a.nondecreasing.to_json(),
        "submodular": a.submodular.to_json(),
        "valid_private": a.valid_private.to_json(),
    }
    if sc.ties is not None:
        social = Analysis(sc.game_for(EquilibriumKind.SOCIAL), sc.tolerance)
        out["valid_social"] = social.valid_social.to_json()
        if sc.spectrum is not None:
            out["social_aware_condition"] = condition_summary(sc, game)
    if sc.grouping is not None:
        grouped = Analysis(sc.game_for(EquilibriumKind.GROUP), sc.tolerance)
        out["valid_group"] = grouped.valid_group.to_json()
    return out


def condition_summary(sc: Scenario, game: Game) -> Optional[bool]:
    """Whether the sufficient social-aware condition holds for every user on
    every pure profile; None when it does not apply (unequal powers or
    asymmetric ties)."""
    spec = sc.spectrum
    if len(set(spec.powers)) != 1 or not spec.ties.is_symmetric():
        return None
    return all(
        social_aware_condition(spec, X, i, sc.tolerance).holds
        for X in game.pure_profiles()
        for i in range(game.n_users)
    )


def parse_start(game: Game, text: Optional[str]) -> ActionProfile:
    """"0,2,1" gives each user's action index; default is everyone's first action."""
    if text is None:
        return game.profile([0] * game.n_users)
    try:
        idx = [int(v) for v in text.split(",")]
    except ValueError:
        raise InvalidParams(f"start must be comma-separated action indices, got {text!r}") from None
    if len(idx) != game.n_users or any(not 0 <= k < n for k, n in zip(idx, game.n_actions)):
        raise InvalidParams(f"start {text!r} does not name one feasible action per user")
    return game.profile(idx)


def run_solve(sc: Scenario, kind, mode: str = "enumerate", start: Optional[str] = None,
              max_rounds: int = 100, order: str = "round_robin", seed: int = 0) -> dict:
    kind = EquilibriumKind(kind)
    game = sc.game_for(kind)
    grouping = sc.grouping if kind is EquilibriumKind.GROUP else None
    out = {"digest": sc.digest, "kind": kind.label, "mode": mode}
    if mode == "enumerate":
        found = enumerate_equilibria(game, kind, sc.tolerance, grouping)
        out["equilibria"] = [dict(c.to_json(), value=game.gamma(c.action_profile)) for c in found]
        return out
    result = best_response_dynamics(game, kind, parse_start(game, start), max_rounds, sc.tolerance, grouping,
                                     order=order, seed=seed)
    cert = certify(game, kind, result.profile, sc.tolerance, grouping)
    out["dynamics"] = result.to_json()
    out["certificate"] = cert.to_json()
    return out


def _reports_for(kind: EquilibriumKind, game: Game, grouping: Grouping, S: ActionProfile,
                 a: Analysis, ga: Optional[Analysis]) -> list[BoundReport]:
    if kind is EquilibriumKind.NASH:
        reports = [check_thm1(game, S, a, strict=False), check_thm2(game, S, analysis=a, strict=False)]
    elif kind is EquilibriumKind.SOCIAL:
        reports = list(check_thm3_thm4(game, S, analysis=a, strict=False))
    else:
        reports = [check_thm5(game, grouping, S, ga, strict=False),
                   *check_thm6(game, grouping, S, analysis=ga, strict=False)]
    lem_a = ga if ga is not None else a.regrouped(grouping)
    reports.append(check_lemma1(game, grouping, S, analysis=lem_a, strict=False))
    reports.append(check_lemma2(game, grouping, S, analysis=lem_a, strict=False))
    return reports


def analyse_kind(sc: Scenario, kind: EquilibriumKind) -> tuple[dict, list[dict]]:
    game = sc.game_for(kind)
    grouping = _grouping_for(sc, kind, game)
    a = Analysis(game, sc.tolerance)
    ga = a.regrouped(grouping) if kind is EquilibriumKind.GROUP else None
    structure = {"nondecreasing": a.nondecreasing.holds, "submodular": a.submodular.holds}
    if kind is EquilibriumKind.NASH:
        structure["valid_private"] = a.valid_private.holds
    elif kind is EquilibriumKind.SOCIAL:
        structure["valid_social"] = a.valid_social.holds
    else:
        structure["valid_group"] = ga.valid_group.holds
    curvature = {"c": None if a.curvature is None else a.curvature.value}
    if ga is not None:
        curvature["per_group"] = None if ga.group_curvature is None else [g.value for g in ga.group_curvature]
    found = enumerate_equilibria(game, kind, sc.tolerance, grouping if ga is not None else None)
    equilibria, violations = [], []
    for cert in found:
        S = cert.action_profile
        reports = _reports_for(kind, game, grouping, S, a, ga)
        equilibria.append({
            "profile": S.to_json(),
            "value": game.gamma(S),
            "max_regret": cert.max_regret,
            "reports": [r.to_json() for r in reports],
        })
        violations += [
            {"kind": kind.label, "statement": r.statement.value, "profile": S.to_json(), "margin": r.margin}
            for r in reports if r.violated
        ]
    block = {
        "structure": structure,
        "omega": a.omega.to_json(),
        "opt": a.opt,
        "curvature": curvature,
        "equilibria": equilibria,
    }
    if kind is EquilibriumKind.GROUP:
        block["groups"] = [list(b) for b in grouping.blocks]
    if kind is EquilibriumKind.SOCIAL and "p" in game.meta:
        block["p"] = game.meta["p"]
    return block, violations


def run_bounds(sc: Scenario, kinds: Optional[Sequence] = None, timing: bool = True) -> dict:
    t0 = time.perf_counter()
    kinds = sc.available_kinds() if kinds is None else [EquilibriumKind(k) for k in kinds]
    out = {"digest": sc.digest, "scenario": sc.kind, "tolerance": sc.tolerance, "analyses": {}}
    violations = []
    for kind in kinds:
        block, bad = analyse_kind(sc, kind)
        out["analyses"][kind.label] = block
        violations += bad
    out["violations"] = violations
    if timing:
        out["wall_time"] = time.perf_counter() - t0
    return out


# ---------------------------------------------------------------- sweeps

SWEEP_HEADER = (
    "family", "seed", "partition", "status", "n_users", "identical_spaces", "opt",
    "nash_count", "nash_min_value", "group_count", "group_min_value",
    "c", "max_group_c", "c_kstar",
    "rhs_thm1", "rhs_thm2", "rhs_thm5", "rhs_thm6", "rhs_thm6star",
    "margin_thm1", "margin_thm2", "margin_thm5", "margin_thm6", "margin_thm6star",
    "margin_lem1", "margin_lem2",
)
"""Columns of ``eqbound sweep``.

``rhs_*`` and ``margin_*`` are minima over the certified equilibria of the
relevant kind, taken only over reports whose hypotheses verified; they are
blank when no such report exists. Lemma columns cover every Nash and group
equilibrium. ``status`` is ``ok`` or ``skipped`` (enumeration cap reached).
"""


@dataclass(frozen=True)
class SweepConfig:
    family: str = "spectrum"
    users: int = 4
    channels: int = 3
    actions: int = 3
    identical: bool = False
    detection: float = 1.0
    tie_prob: float = 0.0
    universe: int = 6

    def validate(self) -> None:
        if self.family not in ("spectrum", "coverage"):
            raise InvalidParams(f"unknown family {self.family!r}")
        if self.users < 1 or self.channels < 1 or self.actions < 1:
            raise InvalidParams("users, channels and actions must be positive")


def sweep_game(cfg: SweepConfig, seed: int, partition: Grouping) -> Game:
    if cfg.family == "spectrum":
        # full vacancy gives every user the same channel list
        gen = GeneratorConfig(partition=partition.sizes, tie_prob=cfg.tie_prob,
                              vacancy=1.0 if cfg.identical else GeneratorConfig.vacancy)
        return spectrum_game(generate_scenario(seed, cfg.users, cfg.channels, gen), Flavor.GROUPED)
    game = generate_coverage(seed, cfg.users, cfg.actions, universe=cfg.universe,
                             identical_spaces=cfg.identical, detection=cfg.detection)
    return game.with_structure(grouping=partition)


def _min(values) -> Optional[float]:
    values = [v for v in values if v is not None and not math.isnan(v)]
    return min(values) if values else None


def sweep_row(cfg: SweepConfig, seed: int, partition: Grouping, tol: float = 1e-9) -> dict:
    row = {k: None for k in SWEEP_HEADER}
    row.update(family=cfg.family, seed=seed, partition=" ".join(map(str, partition.sizes)), status="ok")
    try:
        game = sweep_game(cfg, seed, partition)
        a = Analysis(game, tol)
        ga = a.regrouped(partition)
        nash = enumerate_equilibria(game, EquilibriumKind.NASH, tol)
        group = enumerate_equilibria(game, EquilibriumKind.GROUP, tol, partition)
        singles = a.regrouped(Grouping.singletons(game.n_users))
        stats: dict = {k: [] for k in SWEEP_HEADER if k.startswith(("rhs_", "margin_"))}

        def record(name: str, report: BoundReport) -> None:
            if report.verified and not math.isnan(report.rhs):
                if name in ("thm1", "thm2", "thm5", "thm6", "thm6star"):
                    stats["rhs_" + name].append(report.rhs)
                stats["margin_" + name].append(report.margin)

        for cert in nash:
            S = cert.action_profile
            record("thm1", check_thm1(game, S, a, strict=False))
            record("thm2", check_thm2(game, S, analysis=a, strict=False))
            record("lem1", check_lemma1(game, singles.grouping, S, analysis=singles, strict=False))
            record("lem2", check_lemma2(game, singles.grouping, S, analysis=singles, strict=False))
        for cert in group:
            S = cert.action_profile
            record("thm5", check_thm5(game, partition, S, ga, strict=False))
            for r in check_thm6(game, partition, S, analysis=ga, strict=False):
                record("thm6star" if r.statement.value == "Thm6Star" else "thm6", r)
            record("lem1", check_lemma1(game, partition, S, analysis=ga, strict=False))
            record("lem2", check_lemma2(game, partition, S, analysis=ga, strict=False))
        per_group = None
        if a.monotone_submodular:
            per_group = [g.value for g in group_curvatures(game, partition, a.omega, tol)]
        row.update(
            n_users=game.n_users,
            identical_spaces=game.identical_spaces,
            opt=a.opt,
            nash_count=len(nash),
            nash_min_value=_min(expected_social(game, c.profile) for c in nash),
            group_count=len(group),
            group_min_value=_min(expected_social(game, c.profile) for c in group),
            c=None if a.curvature is None else a.curvature.value,
            max_group_c=None if per_group is None else max(per_group),
            c_kstar=None if per_group is None else max(
                c for c, k in zip(per_group, partition.sizes) if k == partition.k_star),
        )
        for key, vals in stats.items():
            row[key] = _min(vals)
    except ResourceLimit:
        row["status"] = "skipped"
    return row


def parse_seeds(text: str) -> range:
    """"a..b" is the inclusive range a..b (empty when b < a); a lone integer is one seed."""
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            return range(int(lo), int(hi) + 1)
        return range(int(text), int(text) + 1)
    except ValueError:
        raise InvalidParams(f"seeds must look like 'a..b', got {text!r}") from None


def parse_partitions(text: Optional[str], n_users: int) -> list[Grouping]:
    """Semicolon-separated group-size lists, e.g. "1,1,1,1;2,2;4"."""
    if not text:
        return [Grouping.singletons(n_users)]
    out = []
    for part in text.split(";"):
        try:
            sizes = tuple(int(v) for v in part.split(","))
        except ValueError:
            raise InvalidParams(f"bad partition {part!r}") from None
        if any(k < 1 for k in sizes) or sum(sizes) != n_users:
            raise InvalidParams(f"partition {part!r} must be positive sizes summing to {n_users}")
        out.append(Grouping(sizes))
    return out
