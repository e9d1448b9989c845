"""Acceptance criteria 1-8, each at its stated tolerance.

Every test records a one-line verdict; the terminal summary prints one
PASS/FAIL line per criterion (see ``conftest.pytest_terminal_summary``).
Known failures are strict xfails whose analysis lives in the decisions
ledger: they must keep failing, and the suite notices if they stop.
"""
import collections
import math
import time

import numpy as np
import pytest

from eqbound import scenario
from eqbound.bounds import Analysis, brute_force_opt, check_lemma1, check_lemma2, check_thm1, check_thm5
from eqbound.cli import main
from eqbound.core import ActionProfile, Game, Grouping
from eqbound.corpus import CorpusConfig, coverage_corpus, coverage_instance, spectrum_corpus
from eqbound.curvature import group_curvatures, total_curvature, verify_curvature_ordering
from eqbound.equilibria import enumerate_equilibria, is_group_nash, is_nash
from eqbound.instances import generate_coverage
from eqbound.pipeline import run_bounds
from eqbound.spectrum import Flavor, SpectrumScenario, social_aware_condition, spectrum_game
from eqbound.structure import check_nondecreasing, check_submodular, check_validity_group, check_validity_private
from eqbound.structure import check_validity_social

from conftest import record_criterion
from oracles import naive_curvature, naive_opt

TOL = 1e-9
EXACT = 1e-12
CFG = CorpusConfig()
SEED7_DIGEST = "71b4895be1794930b5f9a11be518ad4753887adb440f82aca24369bd88970c26"


@pytest.fixture(scope="session")
def spectrum_instances():
    return list(spectrum_corpus(CFG))


@pytest.fixture(scope="session")
def coverage_instances():
    return list(coverage_corpus(CFG))


@pytest.fixture(scope="session")
def margin_runs(spectrum_instances, coverage_instances):
    t0 = time.perf_counter()
    runs = {
        "spectrum": [run_bounds(i.scenario, timing=False) for i in spectrum_instances],
        "coverage": [run_bounds(i.scenario, timing=False) for i in coverage_instances],
    }
    return runs, time.perf_counter() - t0


def tally(reports):
    checked, negative, worst = collections.Counter(), collections.Counter(), math.inf
    for rep in reports:
        for kind, block in rep["analyses"].items():
            for eq in block["equilibria"]:
                for r in eq["reports"]:
                    if r["status"] != "checked" or r["statement"].startswith("Lem"):
                        continue
                    checked[r["statement"]] += 1
                    worst = min(worst, r["margin"])
                    if r["margin"] < -TOL:
                        negative[r["statement"]] += 1
    return checked, negative, worst


# ---------------------------------------------------------------- 1

def test_criterion_1_monotone_coverage(margin_runs):
    runs, elapsed = margin_runs
    checked, negative, worst = tally(runs["coverage"])
    ok = (len(runs["coverage"]) >= 50 and not negative and elapsed < 300
          and all(checked[s] > 0 for s in ("Thm1", "Thm2", "Thm3", "Thm4", "Thm5", "Thm6", "Thm6Star")))
    record_criterion(1, "coverage", ok,
                     f"{len(runs['coverage'])} games, {sum(checked.values())} checked reports, "
                     f"min margin {worst:.3g}, corpus time {elapsed:.0f}s")
    assert ok, (checked, negative)


@pytest.mark.xfail(strict=True, reason="half bound fails whenever OPT < 0 under union composition; see ledger")
def test_criterion_1_spectrum(margin_runs):
    runs, elapsed = margin_runs
    checked, negative, worst = tally(runs["spectrum"])
    ok = len(runs["spectrum"]) >= 200 and not negative and elapsed < 300
    detail = ", ".join(f"{s} {negative[s]}/{checked[s]}" for s in sorted(checked))
    record_criterion(1, "spectrum", ok, f"{len(runs['spectrum'])} scenarios, negative margins: {detail}")
    assert ok


# ---------------------------------------------------------------- 2

def test_criterion_2_validity(spectrum_instances):
    private = group = social_checked = 0
    failures = []
    for inst in spectrum_instances:
        sc = inst.spectrum
        private += check_validity_private(spectrum_game(sc, Flavor.PRIVATE)).holds
        group += check_validity_group(spectrum_game(sc, Flavor.GROUPED)).holds
        if sc.ties is None:
            continue
        social = spectrum_game(sc, Flavor.SOCIAL)
        if all(social_aware_condition(sc, X, i).holds for X in social.pure_profiles() for i in range(sc.n_users)):
            social_checked += 1
            if not check_validity_social(social).holds:
                failures.append(inst.seed)
    n = len(spectrum_instances)
    ok = private == group == n and not failures and social_checked > 0
    record_criterion(2, "", ok, f"private {private}/{n}, group {group}/{n}, "
                                f"social valid on {social_checked - len(failures)}/{social_checked} where the condition holds")
    assert ok, failures


# ---------------------------------------------------------------- 3

def test_criterion_3_structure(spectrum_instances):
    sub = mono_false = positive = 0
    for inst in spectrum_instances:
        g = spectrum_game(inst.spectrum)
        sub += check_submodular(g).holds
        if any(v > 0 for w in inst.spectrum.noise for v in w.values()):
            positive += 1
            mono_false += not check_nondecreasing(g).holds
    # control: no noise and nobody in range leaves γ identically zero
    quiet = SpectrumScenario(positions=((0.0, 0.0), (50.0, 0.0)), delta=1.0, lam=2.0, powers=(1.0, 1.0),
                             vacant=((1, 2),) * 2, noise=({1: 0.0, 2: 0.0},) * 2)
    control = check_nondecreasing(spectrum_game(quiet)).holds
    n = len(spectrum_instances)
    ok = sub == n and mono_false == positive and positive > 0 and control
    record_criterion(3, "", ok, f"submodular {sub}/{n}, not nondecreasing {mono_false}/{positive} with positive noise")
    assert ok


# ---------------------------------------------------------------- 4

def test_criterion_4_curvature_ordering(coverage_instances):
    violations, instances, values = [], 0, collections.Counter()
    for inst in coverage_instances:
        g = inst.scenario.game_for("nash")
        omega, _ = brute_force_opt(g)
        v = verify_curvature_ordering(g, inst.grouping, omega, TOL)
        instances += 1
        values.update(round(x, 6) for x in v.per_group)
        if not v.holds:
            violations.append(("corpus", inst.seed, v.offending))
    for seed in range(50):
        g = generate_coverage(seed, 4, 3, identical_spaces=True)
        omega, _ = brute_force_opt(g)
        instances += 1
        pairs = []
        for sizes in ((1, 1, 1, 1), (1, 3), (2, 2), (4,)):
            grouping = Grouping(sizes)
            v = verify_curvature_ordering(g, grouping, omega, TOL)
            if not v.holds:
                violations.append(("identical", seed, sizes, v.offending))
            pairs += list(zip(sizes, v.per_group))
        violations += [("sweep", seed, a, b) for a in pairs for b in pairs if a[0] > b[0] and a[1] > b[1] + TOL]
    ok = not violations and instances >= 50
    record_criterion(4, "", ok, f"{instances} instances, {len(violations)} violations; "
                                f"group curvature values seen: {sorted(values)}")
    assert ok, violations[:5]


# ---------------------------------------------------------------- 5

def test_criterion_5_degenerate_partitions(spectrum_instances, coverage_instances):
    worst_cert = worst_thm = 0.0
    whole_checked, mismatches = 0, []
    for inst in spectrum_instances[:60] + coverage_instances[:30]:
        g = inst.scenario.game_for("nash")
        singles = Grouping.singletons(g.n_users)
        a = Analysis(g)
        for X in g.pure_profiles():
            gap = abs(is_group_nash(g, singles, X).max_regret - is_nash(g, X).max_regret)
            worst_cert = max(worst_cert, gap)
        sg = g.with_structure(grouping=singles)
        for cert in enumerate_equilibria(g, "nash"):
            t1 = check_thm1(g, cert.action_profile, a, strict=False)
            t5 = check_thm5(sg, singles, cert.action_profile, a.regrouped(singles), strict=False)
            worst_thm = max(worst_thm, abs(t1.lhs - t5.lhs), abs(t1.rhs - t5.rhs))
        whole = Grouping.whole(g.n_users)
        wg = inst.scenario.game_for("group") if inst.family == "spectrum" else g
        wg = wg.with_structure(grouping=whole)
        _, opt = brute_force_opt(wg)
        found = enumerate_equilibria(wg, "group", grouping=whole)
        whole_checked += 1
        if not found or any(abs(wg.gamma(c.action_profile) - opt) > EXACT for c in found):
            mismatches.append((inst.family, inst.seed))
    ok = worst_cert <= EXACT and worst_thm <= EXACT and not mismatches
    record_criterion(5, "", ok, f"singleton regret gap {worst_cert:.1e}, Thm1/Thm5 gap {worst_thm:.1e}; "
                                f"l=1 equilibria at OPT on {whole_checked - len(mismatches)}/{whole_checked}")
    assert ok, mismatches


# ---------------------------------------------------------------- 6

def signed_interaction_game(seed: int) -> Game:
    """Positive standalone values with signed pairwise overlaps: curvature
    ratios land on both sides of 1, so the comparison is not vacuous."""
    rng = np.random.default_rng([seed, 6])
    n = 2 + seed % 2
    acts = [frozenset(s) for s in ("a", "b", "c", "ab", "bc")]
    spaces = [[acts[k] for k in rng.choice(len(acts), size=3, replace=False)] for _ in range(n)]
    v = [{e: float(rng.uniform(0.5, 2.0)) for e in "abc"} for _ in range(n)]
    w = {(i, j): float(rng.uniform(-1.0, 1.0)) for i in range(n) for j in range(i + 1, n)}

    def social(X):
        terms = [v[i][e] for i, a in X.items() for e in a]
        terms += [w[i, j] * len(X[i] & X[j]) for (i, j) in w if i in X and j in X]
        return math.fsum(terms)

    return Game(spaces=spaces, social=social, private=lambda i, X: 0.0, name=f"signed-{seed}")


def test_criterion_6_oracle_equivalence(coverage_instances):
    games = [inst.scenario.game_for("nash") for inst in coverage_instances[:20]]
    games += [signed_interaction_game(s) for s in range(20)]
    worst_opt = worst_c = 0.0
    profile_mismatch = 0
    distinct = set()
    for g in games:
        omega, opt = brute_force_opt(g)
        n_omega, n_opt = naive_opt(g)
        worst_opt = max(worst_opt, abs(opt - n_opt))
        profile_mismatch += omega != n_omega
        c = total_curvature(g, omega).value
        worst_c = max(worst_c, abs(c - naive_curvature(g, omega, [(i,) for i in range(g.n_users)])))
        if g.n_users > 1:
            grouping = Grouping((1, g.n_users - 1))
            for k, cur in enumerate(group_curvatures(g, grouping, omega)):
                worst_c = max(worst_c, abs(cur.value - naive_curvature(g, omega, [grouping.block(k)])))
        distinct.add(round(c, 9))
    ok = len(games) >= 20 and worst_opt <= EXACT and worst_c <= EXACT and not profile_mismatch
    record_criterion(6, "", ok, f"{len(games)} games, max |ΔOPT| {worst_opt:.1e}, max |Δc| {worst_c:.1e}, "
                                f"{len(distinct)} distinct curvature values")
    assert ok


# ---------------------------------------------------------------- 7

def lemma_draws(instances, per_instance, grouped):
    """(instance, grouping, S) triples: the instance grouping, or singletons."""
    out = []
    for inst in instances:
        g = inst.scenario.game_for("nash")
        rng = np.random.default_rng([inst.seed, 7, int(grouped)])
        grouping = inst.grouping if grouped else Grouping.singletons(g.n_users)
        a = Analysis(g, grouping=grouping)
        for _ in range(per_instance):
            X = ActionProfile({u: sp[int(rng.integers(len(sp)))] for u, sp in enumerate(g.spaces)})
            out.append((g, grouping, X, a))
    return out


def lemma_margins(draws):
    lem1 = [check_lemma1(g, grp, X, analysis=a, strict=False).margin for g, grp, X, a in draws]
    lem2 = [check_lemma2(g, grp, X, analysis=a, strict=False).margin for g, grp, X, a in draws]
    return lem1, lem2


def test_criterion_7_lemmas(spectrum_instances, coverage_instances):
    draws = lemma_draws(coverage_instances, 10, True) + lemma_draws(coverage_instances, 5, False)
    draws += lemma_draws(spectrum_instances, 5, False)
    spectrum_grouped = lemma_draws(spectrum_instances, 5, True)
    lem1, lem2 = lemma_margins(draws)
    _, lem2_grouped = lemma_margins(spectrum_grouped)
    lem2 += lem2_grouped
    bad1 = sum(m < -TOL for m in lem1)
    bad2 = sum(m < -TOL for m in lem2)
    ok = len(draws) >= 1000 and bad1 == 0 and bad2 == 0
    record_criterion(7, "lemma 2 everywhere; lemma 1 on coverage and singleton spectrum", ok,
                     f"lemma 1 negative {bad1}/{len(lem1)}, lemma 2 negative {bad2}/{len(lem2)}")
    assert ok


@pytest.mark.xfail(strict=True, reason="partially agreeing groups need monotone γ; see ledger")
def test_criterion_7_lemma1_grouped_spectrum(spectrum_instances):
    draws = lemma_draws(spectrum_instances, 5, True)
    lem1, _ = lemma_margins(draws)
    bad = sum(m < -TOL for m in lem1)
    record_criterion(7, "lemma 1 on grouped spectrum", bad == 0, f"negative {bad}/{len(lem1)}, min {min(lem1):.3g}")
    assert bad == 0


# ---------------------------------------------------------------- 8

def test_criterion_8_determinism(tmp_path, capsys):
    digests, same = [], True
    for run in ("a", "b"):
        path = tmp_path / f"gen-{run}.json"
        assert main(["gen", "--seed", "7", "--users", "4", "--channels", "3", "--out", str(path)]) == 0
        digests.append(capsys.readouterr().out.strip())
    same &= (tmp_path / "gen-a.json").read_bytes() == (tmp_path / "gen-b.json").read_bytes()
    cov = tmp_path / "cov.json"
    cov.write_text(scenario.dumps(coverage_instance(4).scenario.document), encoding="utf-8")
    for src in (tmp_path / "gen-a.json", cov):
        outs = []
        for run in ("a", "b"):
            out = tmp_path / f"{src.stem}-bounds-{run}.json"
            main(["bounds", str(src), "--no-timing", "--out", str(out)])
            outs.append(out.read_bytes())
        same &= outs[0] == outs[1]
    ok = same and digests == [SEED7_DIGEST] * 2
    record_criterion(8, "", ok, f"gen digest {digests[0][:16]}..., gen and bounds byte-identical: {same}")
    assert ok
