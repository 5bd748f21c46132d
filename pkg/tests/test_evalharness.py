import json
import random

import pytest

from guanzero import cards, engine, evalharness
from guanzero.agents import Agent, RandomAgent, RuleAgent
from guanzero.behavior import BehaviorCounters
from guanzero.evalharness import MatchConfig, gen_decks, load_decks, run_match


@pytest.fixture
def deck_file(tmp_path):
    path = str(tmp_path / "decks.json")
    gen_decks(30, 5, path)
    return path


def test_gen_decks_deterministic_bytes(tmp_path):
    a, b = str(tmp_path / "a.json"), str(tmp_path / "b.json")
    gen_decks(20, 5, a)
    gen_decks(20, 5, b)
    assert open(a, "rb").read() == open(b, "rb").read()
    gen_decks(20, 6, str(tmp_path / "c.json"))
    assert open(a, "rb").read() != open(tmp_path / "c.json", "rb").read()


def test_load_decks_roundtrip(deck_file):
    decks = load_decks(deck_file)
    assert len(decks) == 30
    for d in decks:
        assert frozenset().union(*d.hands) == frozenset(range(108))


def test_load_decks_rejects_bad_version(tmp_path, deck_file):
    payload = json.load(open(deck_file))
    payload["version"] = 99
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(payload))
    with pytest.raises(ValueError):
        load_decks(str(bad))


def test_gen_decks_rejects_nonpositive(tmp_path):
    with pytest.raises(ValueError):
        gen_decks(0, 1, str(tmp_path / "x.json"))


def test_match_needs_enough_decks(deck_file):
    cfg = MatchConfig("rule", "rule", deck_file, n_games=31)
    with pytest.raises(ValueError):
        run_match(cfg, RuleAgent, RuleAgent)


def test_identical_agents_symmetry(deck_file):
    cfg = MatchConfig("rule", "rule", deck_file, n_games=30, seed=3)
    rep = run_match(cfg, RuleAgent, RuleAgent)
    assert rep.valid
    assert rep.wr_as_team_a + rep.wr_as_team_b == 1.0


def test_match_report_contents(deck_file):
    cfg = MatchConfig("rule", "random", deck_file, n_games=10, seed=1)
    rep = run_match(cfg, RuleAgent, RandomAgent)
    assert rep.valid and rep.error is None
    assert len(rep.per_game) == 20  # both seatings
    assert rep.config["deck_sha256"] == evalharness.file_sha256(deck_file)
    for side in ("team_a", "team_b"):
        assert set(rep.rates[side]) == {"cooperating", "dwarfing", "assisting"}
    payload = rep.to_json()
    assert payload["wr_as_team_a"] == rep.wr_as_team_a


def test_match_is_reproducible(deck_file):
    cfg = MatchConfig("random", "random", deck_file, n_games=15, seed=8)
    r1 = run_match(cfg, RandomAgent, RandomAgent)
    r2 = run_match(cfg, RandomAgent, RandomAgent)
    assert r1.per_game == r2.per_game
    assert r1.wr_as_team_a + r1.wr_as_team_b == 1.0  # same seeds per seating


def test_no_swap_mode(deck_file):
    cfg = MatchConfig("rule", "random", deck_file, n_games=10, swap=False)
    rep = run_match(cfg, RuleAgent, RandomAgent)
    assert rep.wr_as_team_b is None
    assert len(rep.per_game) == 10


class ExplodingAgent(Agent):
    name = "boom"

    def __init__(self):
        self.n = 0

    def choose(self, state, seat, legal, rng):
        self.n += 1
        if self.n > 30:
            raise RuntimeError("agent crashed")
        return legal[0] if legal[0] is not None else legal[-1]


def test_agent_failure_flags_partial_report(deck_file):
    cfg = MatchConfig("boom", "random", deck_file, n_games=10)
    rep = run_match(cfg, ExplodingAgent, RandomAgent)
    assert not rep.valid
    assert "agent crashed" in rep.error


def test_play_mini_game_counters_and_replay():
    deal = cards.deal(4)
    counters = [BehaviorCounters() for _ in range(4)]
    replay = []
    final = evalharness.play_mini_game([RuleAgent() for _ in range(4)], deal,
                                       cards.FACE_2, random.Random(1),
                                       counters, replay)
    assert final.phase is engine.Phase.DONE
    assert len(replay) == len(final.history)
    assert sum(c.opportunities["cooperating"] for c in counters) >= 0
    assert all(e["seat"] == s for e, (s, _) in zip(replay, final.history))


def test_write_report(tmp_path, deck_file):
    cfg = MatchConfig("rule", "random", deck_file, n_games=5)
    rep = run_match(cfg, RuleAgent, RandomAgent)
    out = tmp_path / "report.json"
    evalharness.write_report(rep, str(out))
    loaded = json.loads(out.read_text())
    assert loaded["wr_as_team_a"] == rep.wr_as_team_a
