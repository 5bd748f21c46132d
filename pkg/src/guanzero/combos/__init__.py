"""Playable combinations: classification, the trump relation, and legal moves.

The enumeration kernel lives in ``_gen.py``; the build compiles a Cython twin
of that file (``_gen_c``) which is preferred at import time, with the
interpreted module as fallback. ``KERNEL_BACKEND`` reports which one is live.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum
from typing import Iterable

from . import _gen as _gen_py

try:
    from . import _gen_c as _kernel  # type: ignore[attr-defined]
    KERNEL_BACKEND = "compiled"
except ImportError:
    _kernel = _gen_py
    KERNEL_BACKEND = "pure-python"


class ComboType(IntEnum):
    SINGLE = _gen_py.SINGLE
    PAIR = _gen_py.PAIR
    TRIPLE = _gen_py.TRIPLE
    PLATE = _gen_py.PLATE
    TUBE = _gen_py.TUBE
    FULL_HOUSE = _gen_py.FULL_HOUSE
    STRAIGHT = _gen_py.STRAIGHT
    BOMB = _gen_py.BOMB
    STRAIGHT_FLUSH = _gen_py.STRAIGHT_FLUSH
    JOKER_BOMB = _gen_py.JOKER_BOMB


@dataclass(frozen=True, order=True)
class Combo:
    """One declared play: type, rank key, physical cards, wild assignment."""

    type: ComboType
    rank: int
    cards: tuple[int, ...]  # sorted physical card ids
    wild_targets: tuple[tuple[int, int, int], ...] = field(default=(), compare=False)

    @property
    def size(self) -> int:
        return len(self.cards)

    def key(self) -> tuple[int, int, tuple[int, ...]]:
        """Action identity: distinct keys are distinct engine actions."""
        return (int(self.type), self.rank, self.cards)


# Pass is represented as None wherever a PlayOrPass is expected.
PlayOrPass = Combo | None

PASS: PlayOrPass = None


def _wrap(raw: Iterable[tuple]) -> list[Combo]:
    return [Combo(ComboType(t), r, c, wt) for t, r, c, wt in raw]


def classify(cards: Iterable[int], level: int) -> list[Combo]:
    """Every valid reading of exactly these physical cards (may be empty)."""
    return _wrap(_kernel.classify(tuple(cards), level))


def legal_leads(hand: Iterable[int], level: int) -> list[Combo]:
    """All distinct combos formable from the hand; never empty for a non-empty hand."""
    return _wrap(_kernel.generate_leads(tuple(hand), level))


def legal_follows(hand: Iterable[int], last: Combo, level: int) -> list[Combo]:
    """All distinct combos from the hand that beat the table combo."""
    raw = _kernel.generate_follows(tuple(hand), level, int(last.type),
                                   last.rank, last.size)
    return _wrap(raw)


def bomb_tier(combo: Combo) -> int:
    """Ladder position (-1 for non-bombs); see _gen.bomb_tier."""
    return _gen_py.bomb_tier(int(combo.type), combo.size)


def beats(a: Combo, b: Combo, level: int) -> bool:
    """True iff a may legally be played over b."""
    ta = bomb_tier(a)
    tb = bomb_tier(b)
    if tb >= 0:
        if ta < tb:
            return False
        if ta > tb:
            return True
        return a.rank > b.rank and a.type != ComboType.JOKER_BOMB
    if ta >= 0:
        return True
    return a.type == b.type and a.rank > b.rank
