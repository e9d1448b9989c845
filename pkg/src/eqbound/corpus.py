"""Seeded instance families shared by the acceptance suite and the scripts."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from .core import Grouping, SocialGraph
from .instances import generate_coverage
from .scenario import Scenario, coverage_document, from_document, spectrum_document
from .spectrum import GeneratorConfig, SpectrumScenario, generate_scenario


def split_users(n: int, style: int) -> tuple[int, ...]:
    """0: singletons, 1: two halves (larger first), 2: one group."""
    if style == 0 or n == 1:
        return (1,) * n
    if style == 1:
        return (n - n // 2, n // 2)
    return (n,)


@dataclass(frozen=True)
class CorpusConfig:
    spectrum_seeds: int = 200
    coverage_seeds: int = 60
    max_users: int = 5
    max_channels: int = 3
    max_actions: int = 4
    tie_prob: float = 0.5
    tie_weight: float = 0.3


@dataclass(frozen=True)
class Instance:
    family: str
    seed: int
    scenario: Scenario
    spectrum: Optional[SpectrumScenario] = None

    @property
    def grouping(self) -> Grouping:
        return self.scenario.grouping


def spectrum_instance(seed: int, cfg: CorpusConfig = CorpusConfig()) -> Instance:
    n = 2 + seed % (cfg.max_users - 1)
    m = 1 + (seed // (cfg.max_users - 1)) % cfg.max_channels
    gen = GeneratorConfig(tie_prob=cfg.tie_prob, partition=split_users(n, seed % 3))
    sc = generate_scenario(seed, n, m, gen)
    return Instance("spectrum", seed, from_document(spectrum_document(sc)), sc)


def _coverage_ties(seed: int, n: int, prob: float, weight: float) -> SocialGraph:
    rng = np.random.default_rng([seed, 1])
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < prob:
                edges += [(i, j, weight), (j, i, weight)]
    return SocialGraph.from_edges(n, edges)


def coverage_instance(seed: int, cfg: CorpusConfig = CorpusConfig()) -> Instance:
    n = 2 + seed % (cfg.max_users - 1)
    k = 2 + (seed // (cfg.max_users - 1)) % (cfg.max_actions - 1)
    game = generate_coverage(
        seed, n, k,
        identical_spaces=seed % 3 == 0,
        private=("marginal", "equal_share")[seed % 2],
        detection=(1.0, 0.6)[(seed // 2) % 2],
    )
    game = game.with_structure(
        social_graph=_coverage_ties(seed, n, cfg.tie_prob, cfg.tie_weight),
        grouping=Grouping(split_users(n, seed % 3)),
    )
    return Instance("coverage", seed, from_document(coverage_document(game)))


def spectrum_corpus(cfg: CorpusConfig = CorpusConfig()) -> Iterator[Instance]:
    return (spectrum_instance(s, cfg) for s in range(cfg.spectrum_seeds))


def coverage_corpus(cfg: CorpusConfig = CorpusConfig()) -> Iterator[Instance]:
    return (coverage_instance(s, cfg) for s in range(cfg.coverage_seeds))
