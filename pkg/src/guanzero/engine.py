"""Authoritative game state machines for mini games and full games.

A mini game runs one 108-card deal until three seats have emptied their
hands. Seats 0 and 2 form one team, 1 and 3 the other. All transitions are
pure: apply() returns a new state and never mutates its input.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum

from . import cards
from .combos import Combo, PlayOrPass, beats, legal_follows, legal_leads

BANKER, FOLLOWER, THIRD, DWELLER = "banker", "follower", "third", "dweller"
STANDING_ORDER = (BANKER, FOLLOWER, THIRD, DWELLER)

LEVEL_ACE = cards.FACE_A


class Phase(Enum):
    PLAY = "play"
    DONE = "done"


class IllegalActionError(ValueError):
    pass


def teammate(seat: int) -> int:
    return (seat + 2) % 4


def team_of(seat: int) -> int:
    return seat % 2


@dataclass(frozen=True)
class MiniGameState:
    """Full state of one mini game."""

    hands: tuple[frozenset[int], ...]
    acting_level: int
    current: int
    table: tuple[Combo, int] | None = None  # (combo, owner seat)
    consecutive_passes: int = 0
    history: tuple[tuple[int, PlayOrPass], ...] = ()
    finished_order: tuple[int, ...] = ()
    phase: Phase = Phase.PLAY

    def is_leading(self) -> bool:
        return self.table is None

    def live(self, seat: int) -> bool:
        return len(self.hands[seat]) > 0

    def standings(self) -> dict[int, str]:
        """Seat -> standing name; only valid once the game is done."""
        if self.phase is not Phase.DONE:
            raise ValueError("mini game not finished")
        return {seat: STANDING_ORDER[i] for i, seat in enumerate(self.finished_order)}


def new_mini_game(deal: cards.Deal, acting_level: int) -> MiniGameState:
    return MiniGameState(hands=tuple(deal.hands), acting_level=acting_level,
                         current=deal.leader)


def legal_actions(state: MiniGameState) -> list[PlayOrPass]:
    """Legal plays for the seat to act; Pass (None) only when following."""
    if state.phase is not Phase.PLAY:
        raise IllegalActionError("mini game is finished")
    hand = state.hands[state.current]
    if state.table is None:
        return list(legal_leads(hand, state.acting_level))
    follows: list[PlayOrPass] = [None]
    follows.extend(legal_follows(hand, state.table[0], state.acting_level))
    return follows


def apply(state: MiniGameState, action: PlayOrPass) -> MiniGameState:
    """Apply a play or pass; raises IllegalActionError on an illegal action."""
    if state.phase is not Phase.PLAY:
        raise IllegalActionError("mini game is finished")
    seat = state.current
    hand = state.hands[seat]
    history = state.history + ((seat, action),)

    if action is None:
        if state.table is None:
            raise IllegalActionError("cannot pass when leading")
        hands = state.hands
        finished = state.finished_order
        table = state.table
        passes = state.consecutive_passes + 1
    else:
        if not set(action.cards) <= hand:
            raise IllegalActionError("play uses cards not in hand")
        if state.table is not None and not beats(action, state.table[0],
                                                 state.acting_level):
            raise IllegalActionError("play does not beat the table combo")
        if classify_contains(action, state.acting_level) is False:
            raise IllegalActionError("not a valid combination")
        new_hand = hand - set(action.cards)
        hands = tuple(new_hand if s == seat else h
                      for s, h in enumerate(state.hands))
        finished = state.finished_order
        if not new_hand:
            finished = finished + (seat,)
        table = (action, seat)
        passes = 0

    if len(finished) == 3:
        last = next(s for s in range(4) if s not in finished)
        return replace(state, hands=hands, table=None, consecutive_passes=0,
                       history=history, finished_order=finished + (last,),
                       current=seat, phase=Phase.DONE)

    nxt, trick_over = _advance(seat, table, hands)
    if trick_over:
        table = None
        passes = 0
    return replace(state, hands=hands, table=table, consecutive_passes=passes,
                   history=history, finished_order=finished, current=nxt)


def _advance(cur: int, table, hands) -> tuple[int, bool]:
    """Next seat to act and whether the trick just ended."""
    owner = table[1] if table is not None else cur
    for k in range(1, 5):
        cand = (cur + k) % 4
        if cand == owner:
            if hands[owner]:
                return owner, True
            start = teammate(owner)
            for j in range(4):
                s = (start + j) % 4
                if hands[s]:
                    return s, True
            raise AssertionError("no live seat to take the lead")
        if hands[cand]:
            return cand, False
    raise AssertionError("rotation found no actor")


def classify_contains(action: Combo, level: int) -> bool:
    """Whether the declared (type, rank) is a valid reading of the cards."""
    from .combos import classify

    return any(c.type == action.type and c.rank == action.rank
               for c in classify(action.cards, level))


def settle(finished_order: tuple[int, ...]) -> tuple[int, int]:
    """(winning team, level upgrade) from the finish order.

    Upgrade is 3/2/1 when the banker's teammate finished second/third/last.
    """
    banker = finished_order[0]
    pos = finished_order.index(teammate(banker))
    return team_of(banker), 4 - pos


def score(level_diff: int) -> tuple[int, int]:
    """(winner points, loser points) from the level-card rank difference."""
    if not 0 <= level_diff <= 14:
        raise ValueError(f"level difference out of range: {level_diff}")
    return 14 + level_diff, 14 - level_diff


@dataclass(frozen=True)
class TributeRecord:
    donations: tuple[tuple[int, int, int], ...]  # (from, to, card id)
    returns: tuple[tuple[int, int, int], ...]
    denied: bool
    leader: int


def _best_tribute_card(hand: frozenset[int], level: int) -> int:
    """Highest-ranked non-wild card; wilds never count as highest."""
    pool = [c for c in hand if not cards.is_wild(c, level)]
    if not pool:  # 27-card hand holding both wilds always has non-wilds
        pool = list(hand)
    return max(pool, key=lambda c: (cards.single_rank_ordinal(cards.ID_RANK[c], level), c))


def _return_card(hand: frozenset[int], level: int) -> int:
    """Lowest-ordinal card of face rank <= 10, preferring non-wild."""
    ok = [c for c in hand if cards.ID_RANK[c] <= cards.FACE_10]
    pool = ok if ok else list(hand)
    return min(pool, key=lambda c: (cards.is_wild(c, level),
                                    cards.single_rank_ordinal(cards.ID_RANK[c], level), c))


def _clockwise_distance(src: int, dst: int) -> int:
    return (dst - src) % 4


def tribute(prev_standings: dict[int, str], hands: tuple[frozenset[int], ...],
            level: int) -> tuple[TributeRecord, tuple[frozenset[int], ...]]:
    """Run the pre-game tribute exchange; returns the record and new hands.

    `level` is the acting level of the new mini game (it defines wilds and
    the rank order used to pick cards). Denied when the losing side holds
    both red jokers; then the previous banker leads and no cards move.
    """
    seat_of = {v: k for k, v in prev_standings.items()}
    banker = seat_of[BANKER]
    follower = seat_of[FOLLOWER]
    dweller = seat_of[DWELLER]
    third = seat_of[THIRD]
    double = team_of(third) == team_of(dweller)

    rj = {53, 107}  # the two red jokers
    losers = {dweller, third} if double else {dweller}
    held = set().union(*(hands[s] for s in losers))
    if rj <= held:
        return TributeRecord((), (), True, banker), hands

    new_hands = list(hands)
    donations = []
    returns = []
    if double:
        card_d = _best_tribute_card(hands[dweller], level)
        card_t = _best_tribute_card(hands[third], level)
        ord_d = cards.single_rank_ordinal(cards.ID_RANK[card_d], level)
        ord_t = cards.single_rank_ordinal(cards.ID_RANK[card_t], level)
        if ord_d > ord_t:
            pairs = [(dweller, banker, card_d), (third, follower, card_t)]
        elif ord_t > ord_d:
            pairs = [(third, banker, card_t), (dweller, follower, card_d)]
        else:
            # Equal ranks: each donor targets the recipient farthest clockwise.
            far_d = max((banker, follower),
                        key=lambda s: _clockwise_distance(dweller, s))
            other = follower if far_d == banker else banker
            pairs = [(dweller, far_d, card_d), (third, other, card_t)]
    else:
        pairs = [(dweller, banker, _best_tribute_card(hands[dweller], level))]

    for src, dst, card in pairs:
        new_hands[src] = new_hands[src] - {card}
        new_hands[dst] = new_hands[dst] | {card}
        donations.append((src, dst, card))
    for src, dst, _ in pairs:
        back = _return_card(new_hands[dst], level)
        new_hands[dst] = new_hands[dst] - {back}
        new_hands[src] = new_hands[src] | {back}
        returns.append((dst, src, back))

    leader = next(src for src, dst, _ in pairs if dst == banker)
    return (TributeRecord(tuple(donations), tuple(returns), False, leader),
            tuple(new_hands))


@dataclass(frozen=True)
class MiniResult:
    finished_order: tuple[int, ...]
    winning_team: int
    upgrade: int

    def standings(self) -> dict[int, str]:
        return {seat: STANDING_ORDER[i]
                for i, seat in enumerate(self.finished_order)}


def mini_result(state: MiniGameState) -> MiniResult:
    team, up = settle(state.finished_order)
    return MiniResult(state.finished_order, team, up)


@dataclass(frozen=True)
class GameState:
    """Full-game progress across mini games."""

    levels: tuple[int, int] = (cards.FACE_2, cards.FACE_2)
    mini_games_played: int = 0
    previous: MiniResult | None = None
    over: bool = False
    winner: int | None = None


def advance_game(game: GameState, result: MiniResult) -> GameState:
    """Fold one mini-game result into the full-game state."""
    team = result.winning_team
    at_stake = game.levels[team] == LEVEL_ACE
    over = at_stake and result.upgrade >= 2  # teammate did not finish last
    new_level = min(game.levels[team] + result.upgrade, LEVEL_ACE)
    levels = tuple(new_level if t == team else lv
                   for t, lv in enumerate(game.levels))
    return GameState(levels=levels, mini_games_played=game.mini_games_played + 1,
                     previous=result, over=over,
                     winner=team if over else None)
