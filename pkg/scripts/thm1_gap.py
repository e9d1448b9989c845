"""Where the half bound breaks on spectrum games.

Under union composition the ``Ω ∪ S_{-i}`` marginal of s_i vanishes when
S = Ω, so the bound at the optimum reads OPT ≥ OPT/2, false once OPT < 0
(interference utilities are negative). This script counts, over seeded
spectrum scenarios, Nash equilibria with a negative Thm1 margin, how many
of them sit at Ω, and whether the intermediate inequality

    2γ(S) ≥ OPT + Σ_{s_i=σ_i} γ_{s_i}(S_{-i}) + Σ_{s_i≠σ_i} γ_{s_i}(Ω ∪ S^{(i-1)})

ever fails. It never does: the loss happens in the last step, which swaps
γ_{s_i}(S_{-i}) for γ_{s_i}(Ω ∪ S_{-i}) and is only sound for nondecreasing γ.
"""
import argparse
import math

from eqbound.bounds import Analysis, check_thm1
from eqbound.corpus import CorpusConfig, spectrum_instance
from eqbound.equilibria import enumerate_equilibria
from eqbound.expectation import compose_union, expected_marginal


def chain_rhs(game, S, a):
    St = game.pure_strategy(S)
    terms = []
    for i in range(game.n_users):
        if S[i] == a.omega[i]:
            terms.append(game.gamma(S) - game.gamma(S.without(i)))
        else:
            terms.append(expected_marginal(game, St.restrict([i]), compose_union(a.omega, St.restrict(range(i)))))
    return a.opt + math.fsum(terms)


def main(argv=None):
    ap = argparse.ArgumentParser(description="Thm1 failures on spectrum games")
    ap.add_argument("--seeds", type=int, default=200)
    ap.add_argument("--tol", type=float, default=1e-9)
    args = ap.parse_args(argv)

    cfg = CorpusConfig()
    total = violated = at_omega = chain_fail = negative_opt = 0
    for seed in range(args.seeds):
        game = spectrum_instance(seed, cfg).scenario.game_for("nash")
        a = Analysis(game, args.tol)
        negative_opt += a.opt < 0
        for cert in enumerate_equilibria(game, "nash", args.tol):
            S = cert.action_profile
            total += 1
            if check_thm1(game, S, a, strict=False).violated:
                violated += 1
                at_omega += S == a.omega
            chain_fail += 2 * game.gamma(S) < chain_rhs(game, S, a) - args.tol
    print(f"scenarios {args.seeds} (OPT < 0 on {negative_opt})")
    print(f"Nash equilibria {total}: Thm1 margin negative on {violated}, of which at Ω {at_omega}")
    print(f"intermediate inequality fails on {chain_fail}")


if __name__ == "__main__":
    main()
