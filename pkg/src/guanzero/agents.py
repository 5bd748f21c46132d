"""Decision policies: random, scripted rule-based, value-network greedy, human.

Every agent implements choose(state, seat, legal, rng) -> PlayOrPass and must
return an element of `legal`.
"""

from __future__ import annotations

import os
import re
from typing import Sequence

import numpy as np

from . import behavior, engine, features, valuenet
from .combos import Combo, PlayOrPass, bomb_tier

POSITIONS = ("p1", "p2", "p3", "p4")


def action_sort_key(action: PlayOrPass) -> bytes:
    """Lexicographic key of the 108-entry action encoding (Pass is lowest)."""
    return features.encode_action(action).astype(np.uint8).tobytes()


class Agent:
    name = "agent"

    def choose(self, state: engine.MiniGameState, seat: int,
               legal: Sequence[PlayOrPass], rng) -> PlayOrPass:
        raise NotImplementedError


class RandomAgent(Agent):
    """Uniform over all legal actions, Pass included."""

    name = "random"

    def choose(self, state, seat, legal, rng):
        return legal[rng.randrange(len(legal))]


class RuleAgent(Agent):
    """Deterministic heuristic; an honest scripted opponent, not a champion.

    Following: the cheapest same-type answer; bombs only when nothing else
    beats the table and its owner is an opponent holding five or fewer cards.
    Leading: the lowest-ranked non-bomb combo of the largest size.
    """

    name = "rule"

    def choose(self, state, seat, legal, rng):
        if state.is_leading():
            plain = [c for c in legal if bomb_tier(c) < 0]
            pool = plain if plain else list(legal)
            max_size = max(c.size for c in pool)
            return min((c for c in pool if c.size == max_size),
                       key=lambda c: (c.rank, c.cards))
        combos = [c for c in legal if c is not None]
        if not combos:
            return None
        plain = [c for c in combos if bomb_tier(c) < 0]
        if plain:
            return min(plain, key=lambda c: (c.rank, c.cards))
        owner = state.table[1]
        if owner != engine.teammate(seat) and len(state.hands[owner]) <= 5:
            return min(combos, key=lambda c: (bomb_tier(c), c.rank, c.cards))
        return None


def evaluate_q(params: valuenet.NetParams, state: engine.MiniGameState,
               seat: int, legal: Sequence[PlayOrPass],
               use_behavior_flags: bool = True) -> np.ndarray:
    """Q estimate for every legal candidate, batched through one forward pass."""
    base = features.encode_state_base(state, seat)
    m = len(legal)
    flat = np.repeat(base.flat[None, :], m, axis=0)
    if use_behavior_flags:
        leads = None
        if state.is_leading():
            leads = [c for c in legal if c is not None]
        has_beating = any(a is not None for a in legal) if not state.is_leading() else None
        coop_opp = behavior.cooperation_opportunity(state, seat, has_beating)
        dwarf_opp = behavior.dwarfing_opportunity(state, seat, leads)
        assist_opp = behavior.assisting_opportunity(state, seat, leads)
        for j, cand in enumerate(legal):
            features.set_behavior_flags(
                flat[j],
                behavior.cooperation_status(state, seat, cand, coop_opp),
                behavior.dwarfing_status(state, seat, cand, dwarf_opp),
                behavior.assisting_status(state, seat, cand, assist_opp))
    hist = np.broadcast_to(base.history, (m,) + base.history.shape)
    action = np.stack([features.encode_action(a) for a in legal])
    batch = valuenet.Batch(flat, np.ascontiguousarray(hist), action,
                           np.zeros(m, dtype=np.float32))
    return valuenet.forward(params, batch)


def greedy_pick(legal: Sequence[PlayOrPass], q: np.ndarray) -> PlayOrPass:
    """Argmax with deterministic tie-break on the lowest action encoding."""
    best = float(np.max(q))
    ties = [a for a, v in zip(legal, q) if v >= best]
    return min(ties, key=action_sort_key)


class DMCAgent(Agent):
    """Greedy argmax over the per-position value networks."""

    def __init__(self, params_by_seat: Sequence[valuenet.NetParams],
                 use_behavior_flags: bool = True, name: str = "dmc"):
        if len(params_by_seat) != 4:
            raise ValueError("need one parameter set per seat position")
        self.params_by_seat = list(params_by_seat)
        self.use_behavior_flags = use_behavior_flags
        self.name = name

    def choose(self, state, seat, legal, rng):
        q = evaluate_q(self.params_by_seat[seat], state, seat, legal,
                       self.use_behavior_flags)
        return greedy_pick(legal, q)


def find_latest_checkpoints(ckpt_dir: str) -> dict[str, str]:
    """Map position -> newest checkpoint path under {position}_{frames}.ckpt."""
    best: dict[str, tuple[int, str]] = {}
    pat = re.compile(r"^(p[1-4])_(\d+)\.ckpt$")
    for fn in os.listdir(ckpt_dir):
        m = pat.match(fn)
        if m:
            pos, frames = m.group(1), int(m.group(2))
            if pos not in best or frames > best[pos][0]:
                best[pos] = (frames, os.path.join(ckpt_dir, fn))
    return {pos: path for pos, (_, path) in best.items()}


def load_dmc_agent(ckpt_dir: str, use_behavior_flags: bool = True,
                   name: str = "dmc") -> DMCAgent:
    found = find_latest_checkpoints(ckpt_dir)
    missing = [p for p in POSITIONS if p not in found]
    if missing:
        raise FileNotFoundError(
            f"no checkpoint for position(s) {missing} in {ckpt_dir}")
    params = [valuenet.load(found[p]) for p in POSITIONS]
    return DMCAgent(params, use_behavior_flags, name)


class HumanAgent(Agent):
    """Interactive terminal player; prompts with indexed legal actions."""

    name = "human"

    def choose(self, state, seat, legal, rng):
        from .cli import render_state, render_action  # cycle-free at call time

        print(render_state(state, seat))
        for i, a in enumerate(legal):
            print(f"  [{i}] {render_action(a)}")
        while True:
            try:
                raw = input(f"seat {seat} action index> ").strip()
            except EOFError:
                raise KeyboardInterrupt("input closed")
            if raw.lower() == "pass" and None in legal:
                return None
            if raw.isdigit() and int(raw) < len(legal):
                return legal[int(raw)]
            print(f"enter an index 0..{len(legal) - 1}")


def agent_from_spec(spec: str) -> Agent:
    """Parse CLI agent specs: random | rule | dmc:DIR | dmc-noflags:DIR | human."""
    if spec == "random":
        return RandomAgent()
    if spec == "rule":
        return RuleAgent()
    if spec == "human":
        return HumanAgent()
    if spec.startswith("dmc:"):
        return load_dmc_agent(spec[4:], use_behavior_flags=True, name="dmc")
    if spec.startswith("dmc-noflags:"):
        return load_dmc_agent(spec[12:], use_behavior_flags=False,
                              name="dmc-noflags")
    raise ValueError(f"unknown agent spec: {spec!r}")
