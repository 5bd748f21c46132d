"""Fixed-width binary feature vectors for states and actions.

Flat state layout (1075 entries), from the acting seat's perspective:

    [0:108)      own hand
    [108:216)    union of the other three hands
    [216:648)    most recent action of each seat, self first then clockwise
                 (4 x 108; a pass or no action yet is a zero block)
    [648:972)    cards already played by each other seat, clockwise (3 x 108)
    [972:1053)   remaining-card one-hots of each other seat (3 x 27;
                 n cards -> slot n-1, a finished seat is all zeros)
    [1053:1066)  current level card one-hot (13)
    [1066:1069)  cooperating status
    [1069:1072)  dwarfing status
    [1072:1075)  assisting status

History: the most recent 20 actions (passes included as zero blocks), oldest
first, grouped four per timestep into a 5 x 432 array, zero-padded at the old
end. Actions encode as 108-entry card vectors; Pass is all zeros.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import behavior, engine
from .cards import NUM_CARDS
from .combos import Combo, PlayOrPass

FLAT_SIZE = 1075
HISTORY_STEPS = 5
HISTORY_WIDTH = 4 * NUM_CARDS  # 432
ACTION_SIZE = NUM_CARDS
INPUT_SIZES = (FLAT_SIZE, HISTORY_STEPS * HISTORY_WIDTH, ACTION_SIZE)

_FLAG_SLICES = {
    behavior.COOPERATING: slice(1066, 1069),
    behavior.DWARFING: slice(1069, 1072),
    behavior.ASSISTING: slice(1072, 1075),
}


@dataclass(frozen=True)
class StateFeatures:
    flat: np.ndarray     # (1075,) float32 in {0, 1}
    history: np.ndarray  # (5, 432) float32 in {0, 1}


def encode_cards(card_ids: Iterable[int], out: np.ndarray | None = None) -> np.ndarray:
    """108-entry multi-hot card vector."""
    v = out if out is not None else np.zeros(NUM_CARDS, dtype=np.float32)
    for c in card_ids:
        v[c] = 1.0
    return v


def encode_action(action: PlayOrPass) -> np.ndarray:
    """Physical cards of the action; Pass encodes as the zero vector."""
    v = np.zeros(ACTION_SIZE, dtype=np.float32)
    if action is not None:
        encode_cards(action.cards, v)
    return v


def encode_count(n: int, out: np.ndarray | None = None) -> np.ndarray:
    """27-slot one-hot of a remaining-card count; 0 maps to all zeros."""
    if not 0 <= n <= 27:
        raise ValueError(f"remaining-card count out of range: {n}")
    v = out if out is not None else np.zeros(27, dtype=np.float32)
    if n > 0:
        v[n - 1] = 1.0
    return v


def encode_level(level: int, out: np.ndarray | None = None) -> np.ndarray:
    v = out if out is not None else np.zeros(13, dtype=np.float32)
    v[level] = 1.0
    return v


def encode_history(history: tuple[tuple[int, PlayOrPass], ...]) -> np.ndarray:
    """(5, 432) block of the most recent 20 actions, oldest first."""
    out = np.zeros((HISTORY_STEPS, HISTORY_WIDTH), dtype=np.float32)
    recent = history[-20:]
    offset = 20 - len(recent)
    flat = out.reshape(20, NUM_CARDS)
    for i, (_, action) in enumerate(recent):
        if action is not None:
            encode_cards(action.cards, flat[offset + i])
    return out


def _played_by_seat(state: engine.MiniGameState) -> list[set[int]]:
    played: list[set[int]] = [set() for _ in range(4)]
    for seat, action in state.history:
        if action is not None:
            played[seat].update(action.cards)
    return played


def _last_plays(state: engine.MiniGameState) -> list[PlayOrPass]:
    last: list[PlayOrPass] = [None] * 4
    seen = set()
    for seat, action in reversed(state.history):
        if seat not in seen:
            seen.add(seat)
            last[seat] = action
            if len(seen) == 4:
                break
    return last


def encode_state_base(state: engine.MiniGameState, seat: int) -> StateFeatures:
    """Everything except the three behavior-status one-hots (left as zeros)."""
    flat = np.zeros(FLAT_SIZE, dtype=np.float32)
    encode_cards(state.hands[seat], flat[0:108])
    others: set[int] = set()
    for s in range(4):
        if s != seat:
            others |= state.hands[s]
    encode_cards(others, flat[108:216])
    last = _last_plays(state)
    for k in range(4):
        a = last[(seat + k) % 4]
        if a is not None:
            encode_cards(a.cards, flat[216 + k * 108:216 + (k + 1) * 108])
    played = _played_by_seat(state)
    for k in range(3):
        s = (seat + 1 + k) % 4
        encode_cards(played[s], flat[648 + k * 108:648 + (k + 1) * 108])
        encode_count(len(state.hands[s]), flat[972 + k * 27:972 + (k + 1) * 27])
    encode_level(state.acting_level, flat[1053:1066])
    return StateFeatures(flat, encode_history(state.history))


def set_behavior_flags(flat: np.ndarray, coop, dwarf, assist) -> None:
    flat[_FLAG_SLICES[behavior.COOPERATING]] = coop
    flat[_FLAG_SLICES[behavior.DWARFING]] = dwarf
    flat[_FLAG_SLICES[behavior.ASSISTING]] = assist


def encode_state(state: engine.MiniGameState, seat: int, candidate: PlayOrPass,
                 leads: list[Combo] | None = None,
                 use_behavior_flags: bool = True) -> StateFeatures:
    """All flat features plus history for one (state, candidate) pair.

    With use_behavior_flags off (the ablation) the nine status entries stay
    zero regardless of the state.
    """
    f = encode_state_base(state, seat)
    if use_behavior_flags:
        coop, dwarf, assist = behavior.statuses(state, seat, candidate, leads)
        set_behavior_flags(f.flat, coop, dwarf, assist)
    return f
