"""Deep Monte-Carlo self-play training.

Actors play epsilon-greedy mini games against themselves using parameter
snapshots, one value network per seat position. Episode returns (+u for the
winning team, -u for the losers, u = the level upgrade earned) are regressed
by a single learner that periodically republishes snapshots.

With actor_count == 1 the loop is fully interleaved and deterministic; with
more actors, episode generation moves to threads feeding a bounded queue
(producers block when it fills, keeping the sample stream unbiased).
"""

from __future__ import annotations

import hashlib
import json
import os
import queue
import random
import threading
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import cards, engine, features, valuenet
from .agents import POSITIONS, evaluate_q, greedy_pick
from .behavior import BehaviorCounters
from .combos import PlayOrPass


@dataclass
class TrainerConfig:
    epsilon: float = 0.01
    batch_size: int = 32
    lr: float = 1e-4
    momentum: float = 0.9
    sync_interval: int = 10        # episodes between snapshot publications
    buffer_capacity: int = 50_000  # transitions per position
    actor_count: int = 1
    seed: int = 0
    hidden: int = valuenet.DEFAULT_HIDDEN
    width: int = valuenet.DEFAULT_WIDTH
    level: int = cards.FACE_2      # acting level for mini-game episodes
    use_behavior_flags: bool = True
    full_game: bool = False        # full games with tribute instead of minis
    frame_budget: int = 200_000
    checkpoint_interval: int = 50_000
    metrics_interval: int = 100    # learner steps between metric lines
    out_dir: str = "runs"
    run_id: str = "run"

    def config_hash(self) -> str:
        blob = json.dumps(asdict(self), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:12]


@dataclass
class Transition:
    """One (state, action, return) record; features stored as binary uint8."""

    flat: np.ndarray
    history: np.ndarray
    action: np.ndarray
    position: int
    g: float = 0.0


def _to_batch(transitions: list[Transition]) -> valuenet.Batch:
    return valuenet.Batch(
        np.stack([t.flat for t in transitions]).astype(np.float32),
        np.stack([t.history for t in transitions]).astype(np.float32),
        np.stack([t.action for t in transitions]).astype(np.float32),
        np.array([t.g for t in transitions], dtype=np.float32))


def _choose(snapshot: valuenet.NetParams, state: engine.MiniGameState,
            seat: int, legal, rng: random.Random, epsilon: float,
            use_flags: bool) -> PlayOrPass:
    if rng.random() < epsilon:
        return legal[rng.randrange(len(legal))]
    q = evaluate_q(snapshot, state, seat, legal, use_flags)
    return greedy_pick(legal, q)


def _play_out(snapshots, state: engine.MiniGameState, rng: random.Random,
              epsilon: float, use_flags: bool,
              counters: list[BehaviorCounters] | None):
    """Play one mini game to completion; returns (final state, transitions)."""
    recorded: list[Transition] = []
    while state.phase is engine.Phase.PLAY:
        seat = state.current
        legal = engine.legal_actions(state)
        chosen = _choose(snapshots[seat], state, seat, legal, rng, epsilon,
                         use_flags)
        feats = features.encode_state(state, seat, chosen,
                                      use_behavior_flags=use_flags)
        recorded.append(Transition(
            feats.flat.astype(np.uint8),
            feats.history.astype(np.uint8),
            features.encode_action(chosen).astype(np.uint8),
            seat))
        if counters is not None:
            counters[seat].record_decision(state, seat, chosen)
        state = engine.apply(state, chosen)
    return state, recorded


def _stamp(recorded: list[Transition], result: engine.MiniResult) -> None:
    for t in recorded:
        sign = 1.0 if engine.team_of(t.position) == result.winning_team else -1.0
        t.g = sign * result.upgrade


def run_episode(snapshots, level: int, rng: random.Random,
                epsilon: float = 0.01, use_behavior_flags: bool = True,
                deal: cards.Deal | None = None,
                counters: list[BehaviorCounters] | None = None
                ) -> list[list[Transition]]:
    """One self-play mini game; returns transitions grouped by position."""
    if deal is None:
        deal = cards.deal(rng.getrandbits(63))
    state = engine.new_mini_game(deal, level)
    state, recorded = _play_out(snapshots, state, rng, epsilon,
                                use_behavior_flags, counters)
    _stamp(recorded, engine.mini_result(state))
    grouped: list[list[Transition]] = [[], [], [], []]
    for t in recorded:
        grouped[t.position].append(t)
    return grouped


def run_full_game_episode(snapshots, rng: random.Random,
                          epsilon: float = 0.01,
                          use_behavior_flags: bool = True,
                          counters: list[BehaviorCounters] | None = None,
                          max_minis: int = 50) -> list[list[Transition]]:
    """One full game (tribute, evolving levels); per-mini return stamping."""
    game = engine.GameState()
    grouped: list[list[Transition]] = [[], [], [], []]
    leader = 0
    while not game.over and game.mini_games_played < max_minis:
        deal = cards.deal(rng.getrandbits(63), leader)
        hands = deal.hands
        if game.previous is not None:
            record, hands = engine.tribute(game.previous.standings(), hands,
                                           game.levels[engine.team_of(leader)])
            leader = record.leader
        acting_level = game.levels[engine.team_of(leader)]
        state = engine.MiniGameState(hands=tuple(hands),
                                     acting_level=acting_level,
                                     current=leader)
        state, recorded = _play_out(snapshots, state, rng, epsilon,
                                    use_behavior_flags, counters)
        result = engine.mini_result(state)
        _stamp(recorded, result)
        for t in recorded:
            grouped[t.position].append(t)
        game = engine.advance_game(game, result)
        leader = result.finished_order[0]
    return grouped


class MetricsWriter:
    """Append-only JSON lines; crashed runs keep partial data."""

    def __init__(self, path):
        self.path = path
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        self._fh = open(path, "a", encoding="utf-8")

    def write(self, record: dict) -> None:
        self._fh.write(json.dumps(record, sort_keys=True) + "\n")
        self._fh.flush()

    def close(self) -> None:
        self._fh.close()


class Trainer:
    def __init__(self, config: TrainerConfig,
                 resume_from: str | None = None):
        self.config = config
        self.run_dir = os.path.join(config.out_dir, config.run_id)
        os.makedirs(self.run_dir, exist_ok=True)
        self.globals: list[valuenet.NetParams] = []
        self.frames = 0
        self.episodes = 0
        if resume_from:
            self._resume(resume_from)
        else:
            for i in range(4):
                self.globals.append(valuenet.init(config.seed + i,
                                                  config.hidden, config.width))
        self.optimizers = [valuenet.MomentumSGD(config.lr, config.momentum)
                           for _ in range(4)]
        self.counters = [BehaviorCounters() for _ in range(4)]
        self.metrics = MetricsWriter(os.path.join(self.run_dir, "metrics.jsonl"))
        self._t0 = time.time()
        self._last_checkpoint = self.frames

    def _resume(self, ckpt_dir: str) -> None:
        from .agents import find_latest_checkpoints

        found = find_latest_checkpoints(ckpt_dir)
        if len(found) != 4:
            raise FileNotFoundError(f"need 4 position checkpoints in {ckpt_dir}")
        self.globals = [valuenet.load(found[p]) for p in POSITIONS]
        frames = []
        for p in POSITIONS:
            side = found[p].replace(".ckpt", ".json")
            if os.path.exists(side):
                with open(side, encoding="utf-8") as fh:
                    frames.append(json.load(fh).get("frames", 0))
        self.frames = max(frames, default=0)

    def publish(self) -> list[valuenet.NetParams]:
        """A consistent copy of all four global networks."""
        return [p.copy() for p in self.globals]

    def checkpoint(self) -> None:
        wall = time.time() - self._t0
        for i, pos in enumerate(POSITIONS):
            path = os.path.join(self.run_dir, f"{pos}_{self.frames}.ckpt")
            tmp = path + ".tmp"
            valuenet.save(self.globals[i], tmp)
            os.replace(tmp, path)
            sidecar = {
                "frames": self.frames,
                "wall_s": round(wall, 3),
                "config_hash": self.config.config_hash(),
                "use_behavior_flags": self.config.use_behavior_flags,
                "episodes": self.episodes,
            }
            with open(path.replace(".ckpt", ".json"), "w", encoding="utf-8") as fh:
                json.dump(sidecar, fh, sort_keys=True)
        self._last_checkpoint = self.frames

    def learner_step(self, position: int,
                     transitions: list[Transition]) -> float:
        """One gradient step for one position network; returns the mse."""
        batch = _to_batch(transitions)
        mse, grads = valuenet.loss_and_grads(self.globals[position], batch)
        self.optimizers[position].step(self.globals[position], grads)
        self.frames += len(transitions)
        return mse

    def _emit_metrics(self, position: int, mse: float) -> None:
        rates = BehaviorCounters()
        for c in self.counters:
            rates.merge(c)
        r = rates.rates()
        # No wall-clock field: metrics files must be byte-identical across
        # reruns with the same seed (wall time lives in checkpoint sidecars).
        self.metrics.write({
            "frames": self.frames,
            "position": POSITIONS[position],
            "mse": round(mse, 6),
            "episodes": self.episodes,
            "coop_rate": r["cooperating"],
            "dwarf_rate": r["dwarfing"],
            "assist_rate": r["assisting"],
        })

    def train(self) -> dict:
        cfg = self.config
        if cfg.actor_count <= 1:
            self._train_interleaved()
        else:
            self._train_threaded()
        self.checkpoint()
        self.metrics.close()
        rates = BehaviorCounters()
        for c in self.counters:
            rates.merge(c)
        return {"frames": self.frames, "episodes": self.episodes,
                "rates": rates.rates(), "run_dir": self.run_dir}

    def _run_one_episode(self, snapshots, rng) -> list[list[Transition]]:
        cfg = self.config
        if cfg.full_game:
            return run_full_game_episode(snapshots, rng, cfg.epsilon,
                                         cfg.use_behavior_flags, self.counters)
        return run_episode(snapshots, cfg.level, rng, cfg.epsilon,
                           cfg.use_behavior_flags, counters=self.counters)

    def _train_interleaved(self) -> None:
        cfg = self.config
        rng = random.Random(cfg.seed)
        snapshots = self.publish()
        buffers: list[list[Transition]] = [[], [], [], []]
        steps = 0
        while self.frames < cfg.frame_budget:
            grouped = self._run_one_episode(snapshots, rng)
            self.episodes += 1
            for pos in range(4):
                buffers[pos].extend(grouped[pos])
                if len(buffers[pos]) > cfg.buffer_capacity:
                    raise RuntimeError("position buffer overflow")
            for pos in range(4):
                while len(buffers[pos]) >= cfg.batch_size:
                    chunk = buffers[pos][:cfg.batch_size]
                    del buffers[pos][:cfg.batch_size]
                    mse = self.learner_step(pos, chunk)
                    steps += 1
                    if steps % cfg.metrics_interval == 0:
                        self._emit_metrics(pos, mse)
            if self.episodes % cfg.sync_interval == 0:
                snapshots = self.publish()
            if self.frames - self._last_checkpoint >= cfg.checkpoint_interval:
                self.checkpoint()

    def _train_threaded(self) -> None:
        cfg = self.config
        stop = threading.Event()
        q: queue.Queue = queue.Queue(maxsize=cfg.buffer_capacity)
        lock = threading.Lock()
        published = {"snapshots": self.publish(), "episodes": 0}

        def actor(idx: int) -> None:
            rng = random.Random(cfg.seed * 10_007 + idx)
            while not stop.is_set():
                with lock:
                    snapshots = published["snapshots"]
                grouped = self._run_one_episode(snapshots, rng)
                for pos in range(4):
                    for t in grouped[pos]:
                        while not stop.is_set():
                            try:
                                q.put((pos, t), timeout=0.5)
                                break
                            except queue.Full:
                                continue
                with lock:
                    published["episodes"] += 1
                    self.episodes = published["episodes"]

        threads = [threading.Thread(target=actor, args=(i,), daemon=True)
                   for i in range(cfg.actor_count)]
        for t in threads:
            t.start()
        buffers: list[list[Transition]] = [[], [], [], []]
        steps = 0
        last_sync = 0
        try:
            while self.frames < cfg.frame_budget:
                try:
                    pos, tr = q.get(timeout=1.0)
                except queue.Empty:
                    continue
                buffers[pos].append(tr)
                if len(buffers[pos]) >= cfg.batch_size:
                    chunk = buffers[pos][:cfg.batch_size]
                    del buffers[pos][:cfg.batch_size]
                    mse = self.learner_step(pos, chunk)
                    steps += 1
                    if steps % cfg.metrics_interval == 0:
                        self._emit_metrics(pos, mse)
                with lock:
                    eps = published["episodes"]
                    if eps - last_sync >= cfg.sync_interval:
                        published["snapshots"] = self.publish()
                        last_sync = eps
                if self.frames - self._last_checkpoint >= cfg.checkpoint_interval:
                    self.checkpoint()
        finally:
            stop.set()
            for t in threads:
                t.join(timeout=5.0)


def train(config: TrainerConfig, resume_from: str | None = None) -> dict:
    return Trainer(config, resume_from).train()
