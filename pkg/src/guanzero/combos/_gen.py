"""Enumeration kernel for playable combinations.

Everything here works on plain ints and tuples so the module can be compiled
with Cython as-is (the package build produces a compiled twin of this file;
see combos/__init__ for backend selection).

A combo is the tuple (ctype, rank, cards, wild_targets) where

    ctype        one of the type codes below
    rank         declared-rank key (see below)
    cards        sorted tuple of physical card ids
    wild_targets sorted tuple of (wild_card_id, suit, face) substitutions

Rank keys: Single/Pair/Triple/FullHouse/Bomb use the level-lifted ordinal
(faces 0..12, level face -> 13, black joker -> 14, red joker -> 15; a full
house is keyed by its triple). Straight/StraightFlush/Tube/Plate use the face
value of the lowest card with ace-low sequences keyed 1, so level cards count
only at face value inside sequences. The joker bomb has no rank (0).

Two wild cards (hearts of the level face) may each substitute for any
non-joker (suit, face). Distinct physical card sets are distinct combos; for
one (cards, ctype, rank) triple only one canonical wild assignment is kept.
"""

from itertools import combinations

SINGLE = 0
PAIR = 1
TRIPLE = 2
PLATE = 3
TUBE = 4
FULL_HOUSE = 5
STRAIGHT = 6
BOMB = 7
STRAIGHT_FLUSH = 8
JOKER_BOMB = 9

TYPE_SIZES = {SINGLE: 1, PAIR: 2, TRIPLE: 3, PLATE: 6, TUBE: 6,
              FULL_HOUSE: 5, STRAIGHT: 5, STRAIGHT_FLUSH: 5, JOKER_BOMB: 4}

# Straight/tube/plate windows as (faces, rank); ace-low first with rank 1.
_STRAIGHT_WINDOWS = [((12, 0, 1, 2, 3), 1)] + [
    (tuple(range(f, f + 5)), f + 2) for f in range(9)]
_TUBE_WINDOWS = [((12, 0, 1), 1)] + [
    (tuple(range(f, f + 3)), f + 2) for f in range(11)]
_PLATE_WINDOWS = [((12, 0), 1)] + [
    (tuple(range(f, f + 2)), f + 2) for f in range(12)]


def lift(face, level):
    """Level-lifted ordinal of a face (0..12 -> 0..13)."""
    return 13 if face == level else face


def bomb_tier(ctype, size):
    """Position in the bomb ladder; -1 for non-bomb combos.

    Bomb(4) < Bomb(5) < StraightFlush < Bomb(6) < ... < Bomb(10) < JokerBomb.
    """
    if ctype == BOMB:
        return size - 4 if size <= 5 else size - 3
    if ctype == STRAIGHT_FLUSH:
        return 2
    if ctype == JOKER_BOMB:
        return 8
    return -1


def split_hand(hand, level):
    """Group a hand into (by_face, by_suit_face, wilds, black_jokers, red_jokers)."""
    by_face = [[] for _ in range(13)]
    by_sf = [[[] for _ in range(13)] for _ in range(4)]
    wilds = []
    bjs = []
    rjs = []
    for c in sorted(hand):
        slot = c % 54
        if slot >= 52:
            (bjs if slot == 52 else rjs).append(c)
            continue
        suit = slot // 13
        face = slot % 13
        if suit == 1 and face == level:
            wilds.append(c)
        else:
            by_face[face].append(c)
            by_sf[suit][face].append(c)
    return by_face, by_sf, wilds, bjs, rjs


def _groups(nats, face, k, wilds, tsuit):
    """All ways to take k cards of one face from naturals plus wild substitutes.

    Yields (cards, wild_targets, leftover_wilds).
    """
    out = []
    top = min(len(wilds), k)
    for j in range(top + 1):
        if len(nats) < k - j:
            continue
        for nsel in combinations(nats, k - j):
            for wsel in combinations(wilds, j):
                wt = tuple((w, tsuit, face) for w in wsel)
                rest = tuple(w for w in wilds if w not in wsel)
                out.append((nsel + wsel, wt, rest))
    return out


def _multi_groups(by_face, faces, k, wilds, tsuit):
    """k cards of each face in `faces`, sharing the wild budget."""
    out = []
    stack = [(0, (), (), tuple(wilds))]
    while stack:
        i, cards, wt, avail = stack.pop()
        if i == len(faces):
            out.append((cards, wt))
            continue
        for gc, gw, rest in _groups(by_face[faces[i]], faces[i], k, avail, tsuit):
            stack.append((i + 1, cards + gc, wt + gw, rest))
    return out


def _runs(pools, faces, wilds, suit_of_slot):
    """One card per face: naturals from per-slot pools or any unused wild."""
    out = []

    def rec(i, avail, cards, wt):
        if i == len(faces):
            out.append((tuple(cards), tuple(wt)))
            return
        for c in pools[i]:
            cards.append(c)
            rec(i + 1, avail, cards, wt)
            cards.pop()
        for wi in range(len(avail)):
            w = avail[wi]
            cards.append(w)
            wt.append((w, suit_of_slot, faces[i]))
            rec(i + 1, avail[:wi] + avail[wi + 1:], cards, wt)
            cards.pop()
            wt.pop()

    rec(0, tuple(wilds), [], [])
    return out


class _Sink:
    """Collects combos, deduplicating on (ctype, rank, cards)."""

    def __init__(self):
        self.seen = {}

    def add(self, ctype, rank, cards, wt):
        key = (ctype, rank, tuple(sorted(cards)))
        prev = self.seen.get(key)
        wt = tuple(sorted(wt))
        if prev is None or wt < prev:
            self.seen[key] = wt

    def result(self):
        return sorted((k[0], k[1], k[2], wt) for k, wt in self.seen.items())


def _gen_singles(sink, by_face, wilds, bjs, rjs, level):
    for f in range(13):
        for c in by_face[f]:
            sink.add(SINGLE, lift(f, level), (c,), ())
    for c in bjs:
        sink.add(SINGLE, 14, (c,), ())
    for c in rjs:
        sink.add(SINGLE, 15, (c,), ())
    for w in wilds:
        for f in range(13):
            sink.add(SINGLE, lift(f, level), (w,), ((w, 0, f),))


def _gen_rank_groups(sink, ctype, k, by_face, wilds, level):
    for f in range(13):
        for cards, wt, _ in _groups(by_face[f], f, k, wilds, 0):
            if len(cards) == k:
                sink.add(ctype, lift(f, level), cards, wt)


def _gen_joker_pairs(sink, bjs, rjs):
    if len(bjs) == 2:
        sink.add(PAIR, 14, tuple(bjs), ())
    if len(rjs) == 2:
        sink.add(PAIR, 15, tuple(rjs), ())


def _gen_full_houses(sink, by_face, wilds, bjs, rjs, level):
    joker_pairs = []
    if len(bjs) == 2:
        joker_pairs.append(tuple(bjs))
    if len(rjs) == 2:
        joker_pairs.append(tuple(rjs))
    for f in range(13):
        rank = lift(f, level)
        for tcards, twt, rest in _groups(by_face[f], f, 3, wilds, 0):
            if len(tcards) != 3:
                continue
            for g in range(13):
                if g == f:
                    continue
                for pcards, pwt, _ in _groups(by_face[g], g, 2, rest, 0):
                    if len(pcards) == 2:
                        sink.add(FULL_HOUSE, rank, tcards + pcards, twt + pwt)
            for jp in joker_pairs:
                sink.add(FULL_HOUSE, rank, tcards + jp, twt)


def _gen_straights(sink, by_face, wilds):
    for faces, rank in _STRAIGHT_WINDOWS:
        pools = [by_face[f] for f in faces]
        for cards, wt in _runs(pools, faces, wilds, 0):
            sink.add(STRAIGHT, rank, cards, wt)


def _gen_straight_flushes(sink, by_sf, wilds):
    for suit in range(4):
        rows = by_sf[suit]
        for faces, rank in _STRAIGHT_WINDOWS:
            pools = [rows[f] for f in faces]
            for cards, wt in _runs(pools, faces, wilds, suit):
                sink.add(STRAIGHT_FLUSH, rank, cards, wt)


def _gen_tubes(sink, by_face, wilds):
    for faces, rank in _TUBE_WINDOWS:
        for cards, wt in _multi_groups(by_face, faces, 2, wilds, 0):
            sink.add(TUBE, rank, cards, wt)


def _gen_plates(sink, by_face, wilds):
    for faces, rank in _PLATE_WINDOWS:
        for cards, wt in _multi_groups(by_face, faces, 3, wilds, 0):
            sink.add(PLATE, rank, cards, wt)


def _gen_bombs(sink, by_face, wilds, level, min_tier, min_rank):
    """Bomb-ladder combos (plain bombs only) above (min_tier, min_rank)."""
    for f in range(13):
        rank = lift(f, level)
        pool = len(by_face[f]) + len(wilds)
        for size in range(4, min(pool, 10) + 1):
            t = bomb_tier(BOMB, size)
            if t < min_tier or (t == min_tier and rank <= min_rank):
                continue
            for cards, wt, _ in _groups(by_face[f], f, size, wilds, 0):
                if len(cards) == size:
                    sink.add(BOMB, rank, cards, wt)


def _gen_joker_bomb(sink, bjs, rjs):
    if len(bjs) == 2 and len(rjs) == 2:
        sink.add(JOKER_BOMB, 0, tuple(bjs) + tuple(rjs), ())


def generate_leads(hand, level):
    """Every distinct combo formable from the hand."""
    by_face, by_sf, wilds, bjs, rjs = split_hand(hand, level)
    sink = _Sink()
    _gen_singles(sink, by_face, wilds, bjs, rjs, level)
    _gen_rank_groups(sink, PAIR, 2, by_face, wilds, level)
    _gen_joker_pairs(sink, bjs, rjs)
    _gen_rank_groups(sink, TRIPLE, 3, by_face, wilds, level)
    _gen_full_houses(sink, by_face, wilds, bjs, rjs, level)
    _gen_straights(sink, by_face, wilds)
    _gen_straight_flushes(sink, by_sf, wilds)
    _gen_tubes(sink, by_face, wilds)
    _gen_plates(sink, by_face, wilds)
    _gen_bombs(sink, by_face, wilds, level, 0, -1)
    _gen_joker_bomb(sink, bjs, rjs)
    return sink.result()


def generate_follows(hand, level, last_type, last_rank, last_size):
    """Every distinct combo from the hand that beats the given table combo."""
    if last_type == JOKER_BOMB:
        return []
    by_face, by_sf, wilds, bjs, rjs = split_hand(hand, level)
    sink = _Sink()
    last_tier = bomb_tier(last_type, last_size)
    if last_tier < 0:
        # Same-type answers with a strictly higher rank.
        tmp = _Sink()
        if last_type == SINGLE:
            _gen_singles(tmp, by_face, wilds, bjs, rjs, level)
        elif last_type == PAIR:
            _gen_rank_groups(tmp, PAIR, 2, by_face, wilds, level)
            _gen_joker_pairs(tmp, bjs, rjs)
        elif last_type == TRIPLE:
            _gen_rank_groups(tmp, TRIPLE, 3, by_face, wilds, level)
        elif last_type == FULL_HOUSE:
            _gen_full_houses(tmp, by_face, wilds, bjs, rjs, level)
        elif last_type == STRAIGHT:
            _gen_straights(tmp, by_face, wilds)
        elif last_type == TUBE:
            _gen_tubes(tmp, by_face, wilds)
        elif last_type == PLATE:
            _gen_plates(tmp, by_face, wilds)
        for ctype, rank, cards, wt in tmp.result():
            if rank > last_rank:
                sink.add(ctype, rank, cards, wt)
        _gen_bombs(sink, by_face, wilds, level, 0, -1)
        _gen_straight_flushes(sink, by_sf, wilds)
        _gen_joker_bomb(sink, bjs, rjs)
        return sink.result()
    # Table holds a bomb-ladder combo: answer strictly above it in the ladder.
    _gen_bombs(sink, by_face, wilds, level, last_tier, last_rank)
    sf_tier = bomb_tier(STRAIGHT_FLUSH, 5)
    if last_tier < sf_tier:
        _gen_straight_flushes(sink, by_sf, wilds)
    elif last_tier == sf_tier:
        tmp = _Sink()
        _gen_straight_flushes(tmp, by_sf, wilds)
        for ctype, rank, cards, wt in tmp.result():
            if rank > last_rank:
                sink.add(ctype, rank, cards, wt)
    _gen_joker_bomb(sink, bjs, rjs)
    return sink.result()


def _consecutive_rank(faces):
    """Sequence rank of sorted distinct faces, ace-low as 1; -1 if broken."""
    m = len(faces)
    if faces[-1] == 12 and faces[0] == 0 and faces[:-1] == tuple(range(m - 1)):
        return 1
    for i in range(m - 1):
        if faces[i + 1] != faces[i] + 1:
            return -1
    return faces[0] + 2


def _match_exact(suits, faces, nbj, nrj, level):
    """All (ctype, rank) readings of an exact (suit, face) multiset plus jokers."""
    n = len(faces) + nbj + nrj
    out = []
    if n == 1:
        if nrj:
            out.append((SINGLE, 15))
        elif nbj:
            out.append((SINGLE, 14))
        else:
            out.append((SINGLE, lift(faces[0], level)))
        return out
    if nbj or nrj:
        if n == 2 and nbj == 2:
            out.append((PAIR, 14))
        elif n == 2 and nrj == 2:
            out.append((PAIR, 15))
        elif n == 4 and nbj == 2 and nrj == 2:
            out.append((JOKER_BOMB, 0))
        elif n == 5 and (nbj == 2 or nrj == 2) and len(faces) == 3 \
                and faces[0] == faces[1] == faces[2]:
            out.append((FULL_HOUSE, lift(faces[0], level)))
        return out
    fs = sorted(faces)
    if fs[0] == fs[-1]:
        if n == 2:
            out.append((PAIR, lift(fs[0], level)))
        elif n == 3:
            out.append((TRIPLE, lift(fs[0], level)))
        elif 4 <= n <= 10:
            out.append((BOMB, lift(fs[0], level)))
        return out
    counts = {}
    for f in fs:
        counts[f] = counts.get(f, 0) + 1
    distinct = tuple(sorted(counts))
    sizes = sorted(counts.values())
    if n == 5:
        if sizes == [2, 3]:
            tri = distinct[0] if counts[distinct[0]] == 3 else distinct[1]
            out.append((FULL_HOUSE, lift(tri, level)))
        elif sizes == [1, 1, 1, 1, 1]:
            r = _consecutive_rank(distinct)
            if r > 0:
                out.append((STRAIGHT, r))
                if len(set(suits)) == 1:
                    out.append((STRAIGHT_FLUSH, r))
    elif n == 6:
        if sizes == [2, 2, 2]:
            r = _consecutive_rank(distinct)
            if r > 0:
                out.append((TUBE, r))
        elif sizes == [3, 3]:
            r = _consecutive_rank(distinct)
            if r > 0:
                out.append((PLATE, r))
    return out


_ALL_TARGETS = tuple((s, f) for s in range(4) for f in range(13))


def classify(cards, level):
    """All (ctype, rank, wild_targets) readings of exactly these physical cards.

    Brute force over wild target assignments; independent of the typed
    generators above and used as their oracle.
    """
    cards = tuple(sorted(cards))
    if not 1 <= len(cards) <= 10:
        return []
    wilds = []
    suits = []
    faces = []
    nbj = 0
    nrj = 0
    for c in cards:
        slot = c % 54
        if slot == 52:
            nbj += 1
        elif slot == 53:
            nrj += 1
        else:
            suit = slot // 13
            face = slot % 13
            if suit == 1 and face == level:
                wilds.append(c)
            else:
                suits.append(suit)
                faces.append(face)
    if len(wilds) == 0:
        assignments = [()]
    elif len(wilds) == 1:
        assignments = [(t,) for t in _ALL_TARGETS]
    else:
        assignments = [(a, b) for a in _ALL_TARGETS for b in _ALL_TARGETS if a <= b]
    best = {}
    for assign in assignments:
        asuits = suits + [t[0] for t in assign]
        afaces = faces + [t[1] for t in assign]
        wt = tuple(sorted((w, t[0], t[1]) for w, t in zip(wilds, assign)))
        for ctype, rank in _match_exact(asuits, afaces, nbj, nrj, level):
            key = (ctype, rank)
            if key not in best or wt < best[key]:
                best[key] = wt
    return sorted((k[0], k[1], cards, wt) for k, wt in best.items())
