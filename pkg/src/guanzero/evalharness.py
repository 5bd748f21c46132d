"""Paired-deck tournaments with seat swapping.

A match plays n mini games with the side under test ("team A agents") in
seats 0 and 2, then (with swap on) replays the identical decks with the
teams exchanged. A mini game is won by the banker's team. Behavior rates
are accumulated per agent side across both seatings.
"""

from __future__ import annotations

import hashlib
import json
import os
import random
from dataclasses import dataclass, field

from . import cards, engine
from .agents import Agent
from .behavior import BehaviorCounters

DECK_FILE_VERSION = 1


def gen_decks(n: int, seed: int, path: str) -> None:
    """Write n seeded random decks; same (n, seed) gives identical bytes."""
    if n < 1:
        raise ValueError("need at least one deck")
    rng = random.Random(seed)
    decks = []
    for _ in range(n):
        ids = list(range(cards.NUM_CARDS))
        rng.shuffle(ids)
        decks.append({"permutation": ids, "leader": 0})
    payload = {"version": DECK_FILE_VERSION, "seed": seed, "n": n,
               "decks": decks}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, separators=(",", ":"))


def load_decks(path: str) -> list[cards.Deal]:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("version") != DECK_FILE_VERSION:
        raise ValueError(f"unsupported deck file version: {payload.get('version')}")
    return [cards.deal_from_permutation(d["permutation"], d["leader"])
            for d in payload["decks"]]


def file_sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()[:16]


@dataclass
class MatchConfig:
    team_a: str
    team_b: str
    deck_file: str
    n_games: int = 1000
    swap: bool = True
    level: int = cards.FACE_2
    seed: int = 0
    max_steps: int = 2000


@dataclass
class MatchReport:
    config: dict
    wr_as_team_a: float
    wr_as_team_b: float | None
    rates: dict
    per_game: list[dict] = field(default_factory=list)
    valid: bool = True
    error: str | None = None

    def to_json(self) -> dict:
        return {"config": self.config, "wr_as_team_a": self.wr_as_team_a,
                "wr_as_team_b": self.wr_as_team_b, "rates": self.rates,
                "valid": self.valid, "error": self.error,
                "per_game": self.per_game}


def play_mini_game(agents_by_seat: list[Agent], deal: cards.Deal, level: int,
                   rng: random.Random,
                   counters_by_seat: list[BehaviorCounters] | None = None,
                   replay: list | None = None,
                   max_steps: int = 2000) -> engine.MiniGameState:
    """One mini game under the given per-seat policies."""
    state = engine.new_mini_game(deal, level)
    steps = 0
    while state.phase is engine.Phase.PLAY:
        seat = state.current
        legal = engine.legal_actions(state)
        action = agents_by_seat[seat].choose(state, seat, legal, rng)
        if counters_by_seat is not None:
            counters_by_seat[seat].record_decision(state, seat, action)
        if replay is not None:
            from .replaylog import action_to_json

            replay.append({"seat": seat, "action": action_to_json(action)})
        state = engine.apply(state, action)
        steps += 1
        if steps > max_steps:
            raise RuntimeError("mini game exceeded the step limit")
    return state


def _seat_agents(team_a: list[Agent], team_b: list[Agent],
                 swapped: bool) -> list[Agent]:
    if not swapped:
        return [team_a[0], team_b[0], team_a[1], team_b[1]]
    return [team_b[0], team_a[0], team_b[1], team_a[1]]


def run_match(config: MatchConfig, agent_a_factory, agent_b_factory,
              collect_per_game: bool = True) -> MatchReport:
    """Play the match; factories build one Agent per team member."""
    decks = load_decks(config.deck_file)
    if len(decks) < config.n_games:
        raise ValueError(f"deck file holds {len(decks)} decks, "
                         f"need {config.n_games}")
    decks = decks[:config.n_games]
    team_a = [agent_a_factory(), agent_a_factory()]
    team_b = [agent_b_factory(), agent_b_factory()]
    counters = {"team_a": BehaviorCounters(), "team_b": BehaviorCounters()}
    per_game: list[dict] = []
    wins = {False: 0, True: 0}  # keyed by swapped
    seatings = [False, True] if config.swap else [False]
    echo = {"team_a": config.team_a, "team_b": config.team_b,
            "n_games": config.n_games, "swap": config.swap,
            "level": config.level, "seed": config.seed,
            "deck_file": config.deck_file,
            "deck_sha256": file_sha256(config.deck_file)}
    try:
        for swapped in seatings:
            agents = _seat_agents(team_a, team_b, swapped)
            a_seats = (1, 3) if swapped else (0, 2)
            for k, deal in enumerate(decks):
                rng = random.Random(config.seed * 1_000_003 + k * 2 + int(swapped))
                seat_counters = [BehaviorCounters() for _ in range(4)]
                final = play_mini_game(agents, deal, config.level, rng,
                                       seat_counters,
                                       max_steps=config.max_steps)
                banker = final.finished_order[0]
                a_won = banker in a_seats
                wins[swapped] += 1 if a_won else 0
                for s in range(4):
                    side = "team_a" if s in a_seats else "team_b"
                    counters[side].merge(seat_counters[s])
                if collect_per_game:
                    per_game.append({
                        "deck": k,
                        "seating": "swapped" if swapped else "normal",
                        "winner": "team_a" if a_won else "team_b",
                        "standings": list(final.finished_order)})
    except Exception as exc:  # agent failure: flag the partial report
        return MatchReport(echo, wins[False] / max(1, config.n_games),
                           wins[True] / max(1, config.n_games)
                           if config.swap else None,
                           _rates(counters), per_game, valid=False,
                           error=f"{type(exc).__name__}: {exc}")
    return MatchReport(
        echo,
        wins[False] / config.n_games,
        wins[True] / config.n_games if config.swap else None,
        _rates(counters), per_game)


def _rates(counters: dict[str, BehaviorCounters]) -> dict:
    out = {}
    for side, c in counters.items():
        out[side] = {
            b: {"opportunities": c.opportunities[b],
                "executions": c.executions[b],
                "rate": (c.rate(b) if c.opportunities[b] else None)}
            for b in c.opportunities}
    return out


def behavior_report(report: MatchReport) -> dict:
    """Cooperating/dwarfing/assisting rates per side from a finished match."""
    return report.rates


def write_report(report: MatchReport, path: str) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report.to_json(), fh, indent=2, sort_keys=True)
