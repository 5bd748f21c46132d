"""Card identities, the 108-slot index layout, rank order under a level card, and dealing.

Two standard decks plus four jokers give 108 physical cards. Each card gets a
unique id in [0, 107]:

    id = deck * 54 + suit * 13 + face        (non-jokers)
    id = deck * 54 + 52 + (0 for black joker, 1 for red joker)

with suits ordered Spades, Hearts, Clubs, Diamonds and faces 2..A mapped to
0..12. Deck 0 occupies ids 0..53, deck 1 ids 54..107.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable

# Faces 2..A as 0..12; jokers are ranks too.
FACE_2, FACE_3, FACE_4, FACE_5, FACE_6, FACE_7, FACE_8 = range(7)
FACE_9, FACE_10, FACE_J, FACE_Q, FACE_K, FACE_A = range(7, 13)
BLACK_JOKER = 13
RED_JOKER = 14

NUM_FACES = 13
NUM_RANKS = 15
NUM_CARDS = 108
HAND_SIZE = 27

SPADES, HEARTS, CLUBS, DIAMONDS = range(4)
NO_SUIT = 4

RANK_NAMES = ["2", "3", "4", "5", "6", "7", "8", "9", "10", "J", "Q", "K", "A", "BJ", "RJ"]
SUIT_NAMES = ["S", "H", "C", "D", ""]


@dataclass(frozen=True)
class Card:
    deck: int  # 0 or 1
    suit: int  # SPADES..DIAMONDS, or NO_SUIT for jokers
    rank: int  # 0..14

    def __str__(self) -> str:
        return f"{RANK_NAMES[self.rank]}{SUIT_NAMES[self.suit]}'{self.deck}"


def card_index(card: Card) -> int:
    """Unique id in [0, 107] under the canonical layout."""
    if card.rank >= BLACK_JOKER:
        if card.suit != NO_SUIT:
            raise ValueError(f"joker with a suit: {card}")
        return card.deck * 54 + 52 + (card.rank - BLACK_JOKER)
    if not (0 <= card.suit <= DIAMONDS and 0 <= card.rank < NUM_FACES and card.deck in (0, 1)):
        raise ValueError(f"invalid card: {card}")
    return card.deck * 54 + card.suit * 13 + card.rank


def index_card(card_id: int) -> Card:
    """Inverse of card_index."""
    if not 0 <= card_id < NUM_CARDS:
        raise ValueError(f"card id out of range: {card_id}")
    deck, slot = divmod(card_id, 54)
    if slot >= 52:
        return Card(deck, NO_SUIT, BLACK_JOKER + (slot - 52))
    suit, face = divmod(slot, 13)
    return Card(deck, suit, face)


ALL_CARDS = tuple(index_card(i) for i in range(NUM_CARDS))
ID_SUIT = tuple(c.suit for c in ALL_CARDS)
ID_RANK = tuple(c.rank for c in ALL_CARDS)
ID_DECK = tuple(c.deck for c in ALL_CARDS)


def card_name(card_id: int) -> str:
    c = ALL_CARDS[card_id]
    return f"{RANK_NAMES[c.rank]}{SUIT_NAMES[c.suit]}"


def is_wild_card(card: Card, level: int) -> bool:
    """Hearts of the level face are the two wild cards."""
    return card.suit == HEARTS and card.rank == level


def is_wild(card_id: int, level: int) -> bool:
    return ID_SUIT[card_id] == HEARTS and ID_RANK[card_id] == level


def wild_ids(level: int) -> tuple[int, int]:
    return (13 + level, 67 + level)


def single_rank_ordinal(rank: int, level: int) -> int:
    """Strict total-order key: faces 2..A, then the level face above A, then jokers.

    Level (0 <= level <= 12) is a face, never a joker.
    """
    if rank == RED_JOKER:
        return 15
    if rank == BLACK_JOKER:
        return 14
    if rank == level:
        return 13
    return rank


@dataclass(frozen=True)
class Deal:
    """Four disjoint 27-card hands covering all 108 ids, plus the opening seat."""

    hands: tuple[frozenset[int], frozenset[int], frozenset[int], frozenset[int]]
    leader: int = 0

    def permutation(self) -> list[int]:
        """Flat 108-id list, hand by hand in seat order, each hand sorted."""
        out: list[int] = []
        for h in self.hands:
            out.extend(sorted(h))
        return out


def deal_from_permutation(perm: Iterable[int], leader: int = 0) -> Deal:
    ids = list(perm)
    if sorted(ids) != list(range(NUM_CARDS)):
        raise ValueError("permutation must contain each id 0..107 exactly once")
    hands = tuple(frozenset(ids[i * HAND_SIZE:(i + 1) * HAND_SIZE]) for i in range(4))
    return Deal(hands, leader)


def deal(seed: int, leader: int = 0) -> Deal:
    """Seeded uniform shuffle of the 108 ids, split into four 27-card hands."""
    ids = list(range(NUM_CARDS))
    random.Random(seed).shuffle(ids)
    return deal_from_permutation(ids, leader)
