"""Cooperating, dwarfing, and assisting: opportunity detection, per-action
status vectors, and rate accounting.

Each status is a three-bit one-hot over (cannot, chooses-to, refuses-to).
The opportunity part depends only on (state, seat); which of the latter two
bits fires depends on the candidate action.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import engine
from .combos import Combo, ComboType, PlayOrPass, legal_follows, legal_leads

CANNOT = (1, 0, 0)
CHOOSES = (0, 1, 0)
REFUSES = (0, 0, 1)

COOPERATING, DWARFING, ASSISTING = "cooperating", "dwarfing", "assisting"

# Highest declared rank per combo type (rank keys are level-lifted already):
# singles and pairs top out at the red joker, sequences at their max window.
_TOP_RANK = {
    ComboType.SINGLE: 15,
    ComboType.PAIR: 15,
    ComboType.TRIPLE: 13,
    ComboType.FULL_HOUSE: 13,
    ComboType.STRAIGHT: 10,
    ComboType.STRAIGHT_FLUSH: 10,
    ComboType.TUBE: 12,
    ComboType.PLATE: 13,
    ComboType.BOMB: 13,
}


def is_top_ranked(combo: Combo) -> bool:
    """No same-type, same-size combination in a full double deck beats this."""
    if combo.type is ComboType.JOKER_BOMB:
        return True
    return combo.rank >= _TOP_RANK[combo.type]


def cooperation_opportunity(state: engine.MiniGameState, seat: int,
                            has_beating: bool | None = None) -> bool:
    """Teammate's play is live on the table, happened within the last two
    actions with any opponent in between passing, and the seat can beat it.

    `has_beating` short-circuits the legal-move check when the caller has
    already enumerated the seat's legal follows.
    """
    if state.table is None:
        return False
    combo, owner = state.table
    if owner != engine.teammate(seat):
        return False
    recent = state.history[-2:]
    if not any(s == owner and a is not None for s, a in recent):
        return False
    if has_beating is not None:
        return has_beating
    return bool(legal_follows(state.hands[seat], combo, state.acting_level))


def cooperation_status(state: engine.MiniGameState, seat: int,
                       candidate: PlayOrPass,
                       opportunity: bool | None = None):
    if opportunity is None:
        opportunity = cooperation_opportunity(state, seat)
    if not opportunity:
        return CANNOT
    return CHOOSES if candidate is None else REFUSES


def _live_opponent_min(state: engine.MiniGameState, seat: int) -> int | None:
    """Smallest live opponent hand size; None when both opponents finished."""
    sizes = [len(state.hands[(seat + k) % 4]) for k in (1, 3)]
    sizes = [n for n in sizes if n > 0]
    return min(sizes) if sizes else None


def dwarfing_opportunity(state: engine.MiniGameState, seat: int,
                         leads: list[Combo] | None = None) -> bool:
    if state.table is not None or state.current != seat:
        return False
    m = _live_opponent_min(state, seat)
    if m is None:
        return False
    if leads is None:
        leads = legal_leads(state.hands[seat], state.acting_level)
    return any(c.size > m for c in leads)


def dwarfing_executes(state: engine.MiniGameState, seat: int,
                      candidate: PlayOrPass) -> bool:
    if candidate is None:
        return False
    m = _live_opponent_min(state, seat)
    return m is not None and candidate.size > m


def dwarfing_status(state: engine.MiniGameState, seat: int,
                    candidate: PlayOrPass,
                    opportunity: bool | None = None,
                    leads: list[Combo] | None = None):
    if opportunity is None:
        opportunity = dwarfing_opportunity(state, seat, leads)
    if not opportunity:
        return CANNOT
    return CHOOSES if dwarfing_executes(state, seat, candidate) else REFUSES


def _assisting_qualifies(state: engine.MiniGameState, seat: int,
                         combo: Combo) -> bool:
    mate = len(state.hands[engine.teammate(seat)])
    return mate > 0 and combo.size < mate and not is_top_ranked(combo)


def assisting_opportunity(state: engine.MiniGameState, seat: int,
                          leads: list[Combo] | None = None) -> bool:
    if state.table is not None or state.current != seat:
        return False
    if len(state.hands[engine.teammate(seat)]) == 0:
        return False
    if leads is None:
        leads = legal_leads(state.hands[seat], state.acting_level)
    return any(_assisting_qualifies(state, seat, c) for c in leads)


def assisting_status(state: engine.MiniGameState, seat: int,
                     candidate: PlayOrPass,
                     opportunity: bool | None = None,
                     leads: list[Combo] | None = None):
    if opportunity is None:
        opportunity = assisting_opportunity(state, seat, leads)
    if not opportunity:
        return CANNOT
    if candidate is not None and _assisting_qualifies(state, seat, candidate):
        return CHOOSES
    return REFUSES


def statuses(state: engine.MiniGameState, seat: int, candidate: PlayOrPass,
             leads: list[Combo] | None = None):
    """(cooperating, dwarfing, assisting) status vectors for one candidate."""
    return (cooperation_status(state, seat, candidate),
            dwarfing_status(state, seat, candidate, leads=leads),
            assisting_status(state, seat, candidate, leads=leads))


@dataclass
class BehaviorCounters:
    """Opportunity/execution tallies for the three behaviors."""

    opportunities: dict[str, int] = field(
        default_factory=lambda: {COOPERATING: 0, DWARFING: 0, ASSISTING: 0})
    executions: dict[str, int] = field(
        default_factory=lambda: {COOPERATING: 0, DWARFING: 0, ASSISTING: 0})

    def record(self, behavior: str, opportunity: bool, executed: bool) -> None:
        if opportunity:
            self.opportunities[behavior] += 1
            if executed:
                self.executions[behavior] += 1

    def record_decision(self, state: engine.MiniGameState, seat: int,
                        chosen: PlayOrPass,
                        leads: list[Combo] | None = None) -> None:
        """Tally all three behaviors for one chosen action."""
        coop = cooperation_status(state, seat, chosen)
        self.record(COOPERATING, coop != CANNOT, coop == CHOOSES)
        dwarf = dwarfing_status(state, seat, chosen, leads=leads)
        self.record(DWARFING, dwarf != CANNOT, dwarf == CHOOSES)
        assist = assisting_status(state, seat, chosen, leads=leads)
        self.record(ASSISTING, assist != CANNOT, assist == CHOOSES)

    def merge(self, other: "BehaviorCounters") -> None:
        for k in self.opportunities:
            self.opportunities[k] += other.opportunities[k]
            self.executions[k] += other.executions[k]

    def rate(self, behavior: str) -> float:
        return rate(self.opportunities[behavior], self.executions[behavior])

    def rates(self) -> dict[str, float | None]:
        return {b: (self.rate(b) if self.opportunities[b] else None)
                for b in self.opportunities}


def rate(opportunities: int, executions: int) -> float:
    """executions / opportunities; undefined (raises) with no opportunities."""
    if opportunities <= 0:
        raise ZeroDivisionError("behavior rate undefined without opportunities")
    if executions > opportunities:
        raise ValueError("executions exceed opportunities")
    return executions / opportunities
