"""Replay logs: JSON lines, one action per line, enough to re-derive states.

Line schema: {"game": int, "mini": int, "seat": int, "action": "pass" |
{"type": int, "rank": int, "card_ids": [int, ...]}}. Verification replays
the log through the engine and fails on the first illegal action.
"""

from __future__ import annotations

import json
from typing import IO, Iterable

from . import engine
from .combos import Combo, ComboType, PlayOrPass, classify


def action_to_json(action: PlayOrPass):
    if action is None:
        return "pass"
    return {"type": int(action.type), "rank": action.rank,
            "card_ids": list(action.cards)}


def action_from_json(obj, level: int) -> PlayOrPass:
    if obj == "pass":
        return None
    cards_ = tuple(sorted(obj["card_ids"]))
    for c in classify(cards_, level):
        if int(c.type) == obj["type"] and c.rank == obj["rank"]:
            return c
    return Combo(ComboType(obj["type"]), obj["rank"], cards_)


def write_lines(fh: IO[str], entries: Iterable[dict]) -> None:
    for e in entries:
        fh.write(json.dumps(e, sort_keys=True) + "\n")


class ReplayDivergence(ValueError):
    def __init__(self, index: int, message: str):
        super().__init__(f"replay diverges at line {index}: {message}")
        self.index = index


def verify_mini_game(lines: list[dict], deal, level: int,
                     expect_finished: list[int] | None = None
                     ) -> engine.MiniGameState:
    """Re-simulate one mini game's log; every action must be legal in turn."""
    state = engine.new_mini_game(deal, level)
    for i, entry in enumerate(lines):
        if state.phase is not engine.Phase.PLAY:
            raise ReplayDivergence(i, "actions continue after the game ended")
        if entry["seat"] != state.current:
            raise ReplayDivergence(
                i, f"seat {entry['seat']} acted out of turn "
                   f"(expected {state.current})")
        action = action_from_json(entry["action"], level)
        try:
            state = engine.apply(state, action)
        except engine.IllegalActionError as exc:
            raise ReplayDivergence(i, str(exc)) from exc
    if state.phase is not engine.Phase.DONE:
        raise ReplayDivergence(len(lines), "log ends before the game does")
    if expect_finished is not None and list(state.finished_order) != expect_finished:
        raise ReplayDivergence(len(lines), "final standings do not match log")
    return state
