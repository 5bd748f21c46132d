import pytest

from guanzero import cards

_SUITS = {"S": cards.SPADES, "H": cards.HEARTS,
          "C": cards.CLUBS, "D": cards.DIAMONDS}


def cid(name: str, deck: int = 0) -> int:
    """Card id from a short name like '5H', '10D', 'AS', 'BJ', 'RJ'."""
    if name == "BJ":
        return deck * 54 + 52
    if name == "RJ":
        return deck * 54 + 53
    rank = cards.RANK_NAMES.index(name[:-1])
    return cards.card_index(cards.Card(deck, _SUITS[name[-1]], rank))


def cids(spec: str) -> tuple[int, ...]:
    """Ids for a space-separated list; repeated names use the second deck."""
    used: set[int] = set()
    out = []
    for tok in spec.split():
        c = cid(tok, 0)
        if c in used:
            c = cid(tok, 1)
        if c in used:
            raise ValueError(f"more than two copies of {tok}")
        used.add(c)
        out.append(c)
    return tuple(sorted(out))


@pytest.fixture
def deal11():
    return cards.deal(11)
