"""Scenario files: strict JSON documents that describe one game.

Top level::

    {"kind": "spectrum" | "coverage" | "table", "version": 1, "payload": {...},
     "ties": [[i, m, w], ...], "groups": [[0, 1], [2]], "tolerance": 1e-9}

``ties`` and ``groups`` are optional; users are numbered from 0.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import jsonschema

from .core import TOL, ActionProfile, Game, Grouping, SocialGraph
from .equilibria import EquilibriumKind
from .errors import InvalidParams, MissingGrouping, MissingSocialGraph, ParseError
from .instances import GROUP_RULES, PRIVATE_RULES, coverage_game, table_game
from .spectrum import Flavor, SpectrumScenario, spectrum_game

_number = {"type": "number"}
_act = {"type": ["integer", "string"]}
_acts = {"type": "array", "items": _act}
_spaces = {"type": "array", "minItems": 1, "items": {"type": "array", "minItems": 1, "items": _acts}}

_SPECTRUM = {
    "type": "object",
    "additionalProperties": False,
    "required": ["delta", "lambda", "powers", "vacant", "noise"],
    "properties": {
        "positions": {"type": "array", "items": {"type": "array", "items": _number, "minItems": 2, "maxItems": 2}},
        "distances": {"type": "array", "items": {"type": "array", "items": _number}},
        "delta": _number,
        "lambda": _number,
        "powers": {"type": "array", "items": _number},
        "vacant": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
        "noise": {"type": "array", "items": {"type": "array", "items": _number}},
        "n_channels": {"type": "integer"},
    },
}

_COVERAGE = {
    "type": "object",
    "additionalProperties": False,
    "required": ["actions"],
    "properties": {
        "actions": _spaces,
        "weights": {"type": "array", "items": {"type": "array", "prefixItems": [_act, _number],
                                               "minItems": 2, "maxItems": 2}},
        "private": {"enum": list(PRIVATE_RULES)},
        "group": {"enum": list(GROUP_RULES)},
        "detection": _number,
    },
}

_TABLE = {
    "type": "object",
    "additionalProperties": False,
    "required": ["actions", "entries"],
    "properties": {
        "actions": _spaces,
        "entries": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["profile"],
                "properties": {
                    "profile": {"type": "array", "items": {"anyOf": [_acts, {"type": "null"}]}},
                    "social": _number,
                    "private": {"type": "array", "items": _number},
                },
            },
        },
    },
}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["kind", "version", "payload"],
    "properties": {
        "kind": {"enum": ["spectrum", "coverage", "table"]},
        "version": {"const": 1},
        "payload": {"type": "object"},
        "ties": {"type": "array", "items": {"type": "array", "prefixItems": [{"type": "integer"}, {"type": "integer"},
                                                                            _number], "minItems": 3, "maxItems": 3}},
        "groups": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}, "minItems": 1}},
        "tolerance": {"type": "number", "exclusiveMinimum": 0},
    },
}

PAYLOAD_SCHEMAS = {"spectrum": _SPECTRUM, "coverage": _COVERAGE, "table": _TABLE}


def canonical_json(doc) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False, allow_nan=False)


def digest(doc) -> str:
    return hashlib.sha256(canonical_json(doc).encode("utf-8")).hexdigest()


def dumps(doc) -> str:
    """Pretty, deterministic serialisation used for every file we write."""
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


@dataclass(frozen=True, eq=False)
class Scenario:
    """A parsed scenario file; ``game_for`` builds the game a given
    equilibrium notion is analysed on."""

    kind: str
    document: dict
    tolerance: float
    ties: Optional[SocialGraph]
    grouping: Optional[Grouping]
    spectrum: Optional[SpectrumScenario] = None
    base_game: Optional[Game] = None

    @property
    def digest(self) -> str:
        return digest(self.document)

    @property
    def n_users(self) -> int:
        return self.game_for(EquilibriumKind.NASH).n_users

    def game_for(self, kind: Union[EquilibriumKind, str] = EquilibriumKind.NASH) -> Game:
        kind = EquilibriumKind(kind)
        if kind is EquilibriumKind.SOCIAL and self.ties is None:
            raise MissingSocialGraph("scenario has no ties")
        if kind is EquilibriumKind.GROUP and self.grouping is None:
            raise MissingGrouping("scenario has no groups")
        if self.spectrum is not None:
            flavor = {EquilibriumKind.NASH: Flavor.PRIVATE, EquilibriumKind.SOCIAL: Flavor.SOCIAL,
                      EquilibriumKind.GROUP: Flavor.GROUPED}[kind]
            return spectrum_game(self.spectrum, flavor)
        return self.base_game

    def available_kinds(self) -> list[EquilibriumKind]:
        kinds = [EquilibriumKind.NASH]
        if self.ties is not None:
            kinds.append(EquilibriumKind.SOCIAL)
        if self.grouping is not None:
            kinds.append(EquilibriumKind.GROUP)
        return kinds


def _spaces(raw) -> tuple:
    return tuple(tuple(frozenset(a) for a in sp) for sp in raw)


def _profile(raw, n_users: int) -> ActionProfile:
    if len(raw) != n_users:
        raise ParseError(f"table profile {raw} must list one entry (or null) per user")
    return ActionProfile((u, a) for u, a in enumerate(raw) if a is not None)


def from_document(doc: dict) -> Scenario:
    try:
        jsonschema.validate(doc, SCHEMA)
        jsonschema.validate(doc["payload"], PAYLOAD_SCHEMAS[doc["kind"]])
    except jsonschema.ValidationError as exc:
        raise ParseError(f"invalid scenario: {exc.message} at {list(exc.absolute_path)}") from None
    kind = doc["kind"]
    payload = doc["payload"]
    try:
        if kind == "spectrum":
            n_users = len(payload["vacant"])
        else:
            n_users = len(payload["actions"])
        ties = None
        if "ties" in doc:
            ties = SocialGraph.from_edges(n_users, [tuple(t) for t in doc["ties"]])
        grouping = Grouping.from_blocks(doc["groups"]) if "groups" in doc else None
        if grouping is not None and grouping.n_users != n_users:
            raise ParseError("groups must cover every user exactly once")
        tol = float(doc.get("tolerance", TOL))
        if kind == "spectrum":
            noise = payload["noise"]
            if len(noise) != n_users or any(len(w) != len(m) for w, m in zip(noise, payload["vacant"])):
                raise ParseError("noise must list one value per vacant channel of each user")
            sc = SpectrumScenario(
                positions=tuple(tuple(p) for p in payload.get("positions", ())),
                delta=payload["delta"],
                lam=payload["lambda"],
                powers=tuple(payload["powers"]),
                vacant=tuple(tuple(m) for m in payload["vacant"]),
                noise=tuple(dict(zip(m, w)) for m, w in zip(payload["vacant"], noise)),
                ties=ties,
                partition=grouping,
                distances=payload.get("distances"),
                n_channels=payload.get("n_channels"),
            )
            return Scenario(kind, doc, tol, ties, grouping, spectrum=sc)
        if kind == "coverage":
            weights = {e: w for e, w in payload["weights"]} if "weights" in payload else None
            game = coverage_game(
                _spaces(payload["actions"]),
                weights,
                private=payload.get("private", "marginal"),
                group=payload.get("group"),
                social_graph=ties,
                grouping=grouping,
                detection=float(payload.get("detection", 1.0)),
            )
            return Scenario(kind, doc, tol, ties, grouping, base_game=game)
        spaces = _spaces(payload["actions"])
        gtab, atab = {}, {}
        for entry in payload["entries"]:
            X = _profile(entry["profile"], n_users)
            if "social" in entry:
                gtab[X] = entry["social"]
            if "private" in entry:
                if len(entry["private"]) != n_users:
                    raise ParseError("table private values must list one number per user")
                atab[X] = entry["private"]
        game = table_game(spaces, gtab, atab, social_graph=ties, grouping=grouping)
        return Scenario(kind, doc, tol, ties, grouping, base_game=game)
    except InvalidParams as exc:
        raise ParseError(str(exc)) from None


def loads(text: str) -> Scenario:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ParseError("scenario must be a JSON object")
    return from_document(doc)


def load(path: Union[str, Path]) -> Scenario:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None
    return loads(text)


def spectrum_document(sc: SpectrumScenario, tolerance: float = TOL) -> dict:
    payload = {
        "delta": sc.delta,
        "lambda": sc.lam,
        "powers": list(sc.powers),
        "vacant": [list(m) for m in sc.vacant],
        "noise": [[sc.noise[i][c] for c in m] for i, m in enumerate(sc.vacant)],
    }
    if sc.distances is not None:
        payload["distances"] = [list(r) for r in sc.distances]
    else:
        payload["positions"] = [list(p) for p in sc.positions]
    if sc.n_channels is not None:
        payload["n_channels"] = sc.n_channels
    doc = {"kind": "spectrum", "version": 1, "payload": payload, "tolerance": tolerance}
    if sc.ties is not None:
        doc["ties"] = [[i, m, w] for i, m, w in sc.ties.edges()]
    if sc.partition is not None:
        doc["groups"] = [list(b) for b in sc.partition.blocks]
    return doc


def coverage_document(game: Game, tolerance: float = TOL) -> dict:
    meta = game.meta
    if meta.get("family") != "coverage":
        raise InvalidParams("not a coverage game")
    payload = {
        "actions": [[sorted(a) for a in sp] for sp in game.spaces],
        "weights": [[e, w] for e, w in sorted(meta["weights"].items())],
        "private": meta["private"],
        "group": meta["group"],
        "detection": meta["detection"],
    }
    doc = {"kind": "coverage", "version": 1, "payload": payload, "tolerance": tolerance}
    if game.social_graph is not None:
        doc["ties"] = [[i, m, w] for i, m, w in game.social_graph.edges()]
    if game.grouping is not None:
        doc["groups"] = [list(b) for b in game.grouping.blocks]
    return doc
