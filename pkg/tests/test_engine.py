import random

import pytest

from guanzero import cards, engine
from guanzero.combos import classify

from conftest import cid, cids

L2 = cards.FACE_2


def play_out(seed, level=L2):
    """Random playout to completion; returns (final state, plays)."""
    rng = random.Random(seed)
    state = engine.new_mini_game(cards.deal(seed), level)
    plays = []
    while state.phase is engine.Phase.PLAY:
        legal = engine.legal_actions(state)
        action = legal[rng.randrange(len(legal))]
        plays.append((state.current, action))
        state = engine.apply(state, action)
    return state, plays


def test_teammates_and_teams():
    assert [engine.teammate(s) for s in range(4)] == [2, 3, 0, 1]
    assert [engine.team_of(s) for s in range(4)] == [0, 1, 0, 1]


@pytest.mark.parametrize("order,upgrade", [
    ((0, 2, 1, 3), 3),  # banker, follower
    ((0, 1, 2, 3), 2),  # banker, third
    ((0, 1, 3, 2), 1),  # banker, dweller
    ((3, 1, 0, 2), 3),
    ((2, 1, 0, 3), 2),
])
def test_settle_upgrades(order, upgrade):
    team, got = engine.settle(order)
    assert team == engine.team_of(order[0])
    assert got == upgrade


@pytest.mark.parametrize("diff", range(15))
def test_score_all_columns(diff):
    assert engine.score(diff) == (14 + diff, 14 - diff)


def test_score_rejects_out_of_range():
    with pytest.raises(ValueError):
        engine.score(15)
    with pytest.raises(ValueError):
        engine.score(-1)


@pytest.mark.parametrize("seed", range(10))
def test_playout_conserves_cards(seed):
    final, plays = play_out(seed)
    played = [c for _, a in plays if a is not None for c in a.cards]
    assert len(played) == len(set(played))
    assert sorted(final.finished_order) == [0, 1, 2, 3]
    leftovers = set().union(*final.hands)
    assert set(played) | leftovers == set(range(cards.NUM_CARDS))
    # Everyone but the dweller emptied their hand.
    dweller = final.finished_order[3]
    assert all(not final.hands[s] for s in range(4) if s != dweller)


def test_cannot_pass_when_leading():
    state = engine.new_mini_game(cards.deal(1), L2)
    assert None not in engine.legal_actions(state)
    with pytest.raises(engine.IllegalActionError):
        engine.apply(state, None)


def test_rejects_cards_not_in_hand():
    state = engine.new_mini_game(cards.deal(1), L2)
    other = next(iter(state.hands[(state.current + 1) % 4]))
    combo = classify((other,), L2)[0]
    with pytest.raises(engine.IllegalActionError):
        engine.apply(state, combo)


def test_rejects_non_beating_play():
    deal = cards.deal_from_permutation(list(range(108)))
    state = engine.new_mini_game(deal, L2)
    high = classify(cids("AS"), L2)[0]
    state = engine.apply(state, high)
    low = classify(cids("3H"), L2)[0]  # seat 1 holds hearts in the identity deal
    with pytest.raises(engine.IllegalActionError):
        engine.apply(state, low)


def test_trick_win_returns_lead_to_owner():
    state = engine.new_mini_game(cards.deal(2), L2)
    lead = engine.legal_actions(state)[0]
    owner = state.current
    state = engine.apply(state, lead)
    for _ in range(3):
        state = engine.apply(state, None)
    assert state.current == owner
    assert state.is_leading()


def test_borrowing_the_wind():
    # Seat 0 goes out on an unbeaten single; the lead passes to seat 2.
    hands = (
        frozenset(cids("AS")),
        frozenset(cids("3S 4S 5S 6S 7S 8S")),
        frozenset(cids("3C 4C 5C 6C 7C 8C")),
        frozenset(cids("3D 4D 5D 6D 7D 8D")),
    )
    state = engine.MiniGameState(hands=hands, acting_level=L2, current=0)
    state = engine.apply(state, classify(cids("AS"), L2)[0])
    assert state.finished_order == (0,)
    for _ in range(3):
        state = engine.apply(state, None)
    assert state.current == 2
    assert state.is_leading()


def test_wind_skips_finished_teammate():
    # Both of team 0 are out; the wind falls to the next live seat clockwise
    # from the finisher's teammate.
    hands = (
        frozenset(cids("AS")),
        frozenset(cids("3S 4S 5S")),
        frozenset(),
        frozenset(cids("3D 4D 5D")),
    )
    state = engine.MiniGameState(hands=hands, acting_level=L2, current=0,
                                 finished_order=(2,))
    state = engine.apply(state, classify(cids("AS"), L2)[0])
    state = engine.apply(state, None)  # seat 1
    state = engine.apply(state, None)  # seat 3
    assert state.current == 3  # teammate (2) is out; next live is seat 3
    assert state.is_leading()


def test_standings_only_when_done():
    state = engine.new_mini_game(cards.deal(1), L2)
    with pytest.raises(ValueError):
        state.standings()
    final, _ = play_out(4)
    standings = final.standings()
    assert sorted(standings.values()) == sorted(
        ["banker", "follower", "third", "dweller"])


# --- tribute -----------------------------------------------------------------

def standings_for(order):
    names = ["banker", "follower", "third", "dweller"]
    return {seat: names[i] for i, seat in enumerate(order)}


def pad(hand, avoid, n=8):
    """Top a crafted hand up to n cards with low spare diamonds/clubs."""
    hand = set(hand)
    spare = [c for c in range(cards.NUM_CARDS)
             if c not in hand and c not in avoid
             and cards.ID_RANK[c] <= cards.FACE_4 and cards.ID_SUIT[c] >= 2]
    hand.update(spare[:n - len(hand)])
    return frozenset(hand)


def test_single_tribute_best_card_and_low_return():
    level = cards.FACE_5
    order = (0, 1, 2, 3)  # third is the banker's teammate: single tribute
    dweller_hand = frozenset(cids("KS QH 9C 3D 4D 2C 2D 3C"))
    used = set(dweller_hand)
    hands = tuple(pad(set(), used, 8) if s != 3 else dweller_hand
                  for s in range(4))
    # Give the banker a known low card to return.
    hands = tuple(h | frozenset({cid("6D", 1)}) if s == 0 else h
                  for s, h in enumerate(hands))
    rec, new_hands = engine.tribute(standings_for(order), hands, level)
    assert not rec.denied
    assert rec.donations == ((3, 0, cids("KS")[0]),)
    ((src, dst, back),) = rec.returns
    assert (src, dst) == (0, 3)
    assert cards.ID_RANK[back] <= cards.FACE_10
    assert rec.leader == 3
    assert sum(len(h) for h in new_hands) == sum(len(h) for h in hands)


def test_tribute_never_donates_a_wild():
    level = cards.FACE_5
    order = (0, 1, 2, 3)
    wild = cards.wild_ids(level)[0]
    dweller_hand = frozenset((wild,) + cids("KS 9C 3D 4D 2C 2D 3C"))
    hands = tuple(pad(set(), set(dweller_hand), 8) if s != 3 else dweller_hand
                  for s in range(4))
    rec, _ = engine.tribute(standings_for(order), hands, level)
    assert rec.donations[0][2] == cids("KS")[0]  # KS, not the higher wild


def test_tribute_denied_when_losers_hold_both_red_jokers():
    level = cards.FACE_8
    order = (0, 1, 2, 3)
    dweller_hand = frozenset(cids("RJ RJ KS 9C 3D 4D 2C 2D"))
    hands = tuple(pad(set(), set(dweller_hand), 8) if s != 3 else dweller_hand
                  for s in range(4))
    rec, new_hands = engine.tribute(standings_for(order), hands, level)
    assert rec.denied
    assert rec.donations == () and rec.returns == ()
    assert rec.leader == 0  # previous banker keeps the lead
    assert new_hands == hands


def test_double_tribute_higher_card_to_banker():
    level = cards.FACE_8
    order = (0, 2, 3, 1)  # team 1 pays double tribute
    h1 = frozenset(cids("KS 9C 3D 4D 2C 2D 3C 4C"))  # third: best K
    h3 = frozenset(cids("AS 9D 3S 4S 2S 5D 5C 6C"))  # dweller: best A
    used = set(h1) | set(h3)
    hands = (pad(set(), used, 8), h1, pad({cid("7D", 1)}, used, 8), h3)
    rec, _ = engine.tribute(standings_for(order), hands, level)
    gifts = {src: (dst, card) for src, dst, card in rec.donations}
    assert gifts[3] == (0, cids("AS")[0])  # higher card goes to the banker
    assert gifts[1][0] == 2
    assert rec.leader == 3


def test_double_tribute_tie_breaks_clockwise_farthest():
    level = cards.FACE_8
    order = (0, 2, 3, 1)  # banker 0, follower 2, third 3, dweller 1
    h1 = frozenset(cids("KS 9C 3D 4D 2C 2D 3C 4C"))
    h3 = frozenset((cid("KS", 1),) + cids("9D 3S 4S 2S 5D 5C 6C"))
    used = set(h1) | set(h3)
    hands = (pad(set(), used, 8), h1, pad(set(), used, 8), h3)
    rec, _ = engine.tribute(standings_for(order), hands, level)
    gifts = {src: dst for src, dst, _ in rec.donations}
    # Dweller is seat 1: clockwise distance 1->0 is 3, 1->2 is 1.
    assert gifts[1] == 0
    assert gifts[3] == 2
    assert rec.leader == 1


def test_double_tribute_denial_checks_both_losers():
    level = cards.FACE_8
    order = (0, 2, 3, 1)
    h1 = frozenset(cids("RJ KS 9C 3D 4D 2C 2D 3C"))
    h3 = frozenset((cid("RJ", 1),) + cids("9D 3S 4S 2S 5D 5C 6C"))
    used = set(h1) | set(h3)
    hands = (pad(set(), used, 8), h1, pad(set(), used, 8), h3)
    rec, _ = engine.tribute(standings_for(order), hands, level)
    assert rec.denied and rec.leader == 0


def test_mini_result_and_game_progression():
    final, _ = play_out(6)
    result = engine.mini_result(final)
    team, upgrade = engine.settle(final.finished_order)
    assert result.winning_team == team and result.upgrade == upgrade

    game = engine.GameState()
    game2 = engine.advance_game(game, result)
    assert game2.levels[team] == min(cards.FACE_A, upgrade)
    assert game2.levels[1 - team] == 0
