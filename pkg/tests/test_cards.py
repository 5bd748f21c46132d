import pytest

from guanzero import cards

from conftest import cid


def test_index_layout_anchors():
    assert cards.card_index(cards.Card(0, cards.SPADES, cards.FACE_2)) == 0
    assert cards.card_index(cards.Card(0, cards.DIAMONDS, cards.FACE_A)) == 51
    assert cards.card_index(cards.Card(0, cards.NO_SUIT, cards.BLACK_JOKER)) == 52
    assert cards.card_index(cards.Card(0, cards.NO_SUIT, cards.RED_JOKER)) == 53
    assert cards.card_index(cards.Card(1, cards.SPADES, cards.FACE_2)) == 54
    assert cards.card_index(cards.Card(1, cards.NO_SUIT, cards.RED_JOKER)) == 107


def test_index_roundtrip_all_108():
    for i in range(cards.NUM_CARDS):
        assert cards.card_index(cards.index_card(i)) == i


def test_invalid_cards_rejected():
    with pytest.raises(ValueError):
        cards.card_index(cards.Card(0, cards.SPADES, cards.RED_JOKER))
    with pytest.raises(ValueError):
        cards.card_index(cards.Card(2, cards.SPADES, cards.FACE_2))
    with pytest.raises(ValueError):
        cards.index_card(108)


def test_wilds_are_hearts_of_level():
    level = cards.FACE_5
    w0, w1 = cards.wild_ids(level)
    assert w0 == cid("5H", 0) and w1 == cid("5H", 1)
    assert cards.is_wild(w0, level) and cards.is_wild(w1, level)
    assert not cards.is_wild(cid("5S"), level)
    assert not cards.is_wild(cid("6H"), level)
    assert not cards.is_wild(cid("RJ"), level)


def test_single_rank_order():
    level = cards.FACE_5
    ord_ = lambda r: cards.single_rank_ordinal(r, level)
    assert ord_(cards.RED_JOKER) > ord_(cards.BLACK_JOKER)
    assert ord_(cards.BLACK_JOKER) > ord_(level)
    assert ord_(level) > ord_(cards.FACE_A)
    # Non-level faces keep their natural 2..A order.
    faces = [f for f in range(cards.NUM_FACES) if f != level]
    assert [ord_(f) for f in faces] == sorted(ord_(f) for f in faces)


def test_deal_partitions_the_deck():
    d = cards.deal(7)
    assert all(len(h) == cards.HAND_SIZE for h in d.hands)
    assert frozenset().union(*d.hands) == frozenset(range(cards.NUM_CARDS))
    assert d.leader == 0


def test_deal_is_seeded():
    assert cards.deal(3) == cards.deal(3)
    assert cards.deal(3) != cards.deal(4)


def test_permutation_roundtrip():
    d = cards.deal(9, leader=2)
    assert cards.deal_from_permutation(d.permutation(), 2) == d


def test_bad_permutation_rejected():
    with pytest.raises(ValueError):
        cards.deal_from_permutation(list(range(107)) + [0])
