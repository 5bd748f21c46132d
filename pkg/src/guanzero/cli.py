"""Command-line entry point: deck generation, training, evaluation,
interactive play, and replay verification.

Exit codes: 0 success, 2 usage (argparse), 3 I/O failure, 4 validation
failure. GUANZERO_THREADS caps worker parallelism for training.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time
from dataclasses import fields

from . import cards, engine, evalharness, trainer
from .agents import HumanAgent, agent_from_spec
from .behavior import statuses
from .combos import PlayOrPass
from .replaylog import ReplayDivergence, verify_mini_game

EXIT_OK = 0
EXIT_IO = 3
EXIT_INVALID = 4

TYPE_NAMES = ["single", "pair", "triple", "plate", "tube", "full-house",
              "straight", "bomb", "straight-flush", "joker-bomb"]


def render_action(action: PlayOrPass) -> str:
    if action is None:
        return "pass"
    names = " ".join(cards.card_name(c) for c in action.cards)
    return f"{TYPE_NAMES[int(action.type)]} (rank {action.rank}): {names}"


def render_state(state: engine.MiniGameState, seat: int) -> str:
    lines = [f"--- level card: {cards.RANK_NAMES[state.acting_level]} ---"]
    for s in range(4):
        mark = "*" if s == state.current else " "
        own = sorted(state.hands[s],
                     key=lambda c: cards.single_rank_ordinal(
                         cards.ID_RANK[c], state.acting_level))
        shown = (" ".join(cards.card_name(c) for c in own)
                 if s == seat else f"{len(own)} cards")
        lines.append(f"{mark}seat {s}: {shown}")
    if state.table is not None:
        combo, owner = state.table
        lines.append(f"table (seat {owner}): {render_action(combo)}")
    else:
        lines.append("table: empty (you lead)")
    return "\n".join(lines)


def read_config(path: str) -> dict:
    """Flat key = value config file; '#' starts a comment."""
    out: dict = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            key, val = (part.strip() for part in line.split("=", 1))
            val = val.strip("\"'")
            if val.lower() in ("true", "false"):
                out[key] = val.lower() == "true"
            else:
                try:
                    out[key] = int(val)
                except ValueError:
                    try:
                        out[key] = float(val)
                    except ValueError:
                        out[key] = val
    return out


def build_trainer_config(args) -> trainer.TrainerConfig:
    values: dict = {}
    if args.config:
        file_vals = read_config(args.config)
        known = {f.name for f in fields(trainer.TrainerConfig)}
        unknown = set(file_vals) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        values.update(file_vals)
    if args.frames is not None:
        values["frame_budget"] = args.frames
    if args.out_dir is not None:
        values["out_dir"] = args.out_dir
    if args.run_id is not None:
        values["run_id"] = args.run_id
    if args.seed is not None:
        values["seed"] = args.seed
    if args.actors is not None:
        values["actor_count"] = args.actors
    if args.no_behavior_flags:
        values["use_behavior_flags"] = False
    cap = os.environ.get("GUANZERO_THREADS")
    if cap:
        values["actor_count"] = min(values.get("actor_count", 1), int(cap))
    return trainer.TrainerConfig(**values)


def cmd_gen_decks(args) -> int:
    evalharness.gen_decks(args.n, args.seed, args.out)
    print(f"wrote {args.n} decks to {args.out}")
    return EXIT_OK


def cmd_train(args) -> int:
    cfg = build_trainer_config(args)
    summary = trainer.train(cfg, resume_from=args.resume)
    print(json.dumps(summary, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_eval(args) -> int:
    cfg = evalharness.MatchConfig(
        team_a=args.team_a, team_b=args.team_b, deck_file=args.decks,
        n_games=args.games, swap=args.swap, level=args.level, seed=args.seed)
    report = evalharness.run_match(cfg, lambda: agent_from_spec(args.team_a),
                                   lambda: agent_from_spec(args.team_b))
    if args.report:
        evalharness.write_report(report, args.report)
    wr_b = "n/a" if report.wr_as_team_b is None else f"{report.wr_as_team_b:.3f}"
    print(f"WR as team A: {report.wr_as_team_a:.3f}   WR as team B: {wr_b}")
    if not report.valid:
        print(f"match aborted: {report.error}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


def cmd_play(args) -> int:
    seats: list = []
    human_seat = args.seat
    for s in range(4):
        seats.append(HumanAgent() if s == human_seat
                     else agent_from_spec(args.opponents))
    deal = cards.deal(args.seed if args.seed is not None
                      else random.randrange(1 << 31))
    rng = random.Random(0)
    replay: list = []
    try:
        final = evalharness.play_mini_game(seats, deal, args.level, rng,
                                           replay=replay)
    except KeyboardInterrupt:
        print("\naborted")
        return EXIT_OK
    standings = final.standings()
    print("game over; standings:")
    for seat, name in sorted(standings.items()):
        print(f"  seat {seat}: {name}")
    if args.log:
        _append_replay(args.log, deal, args.level, replay, final)
        print(f"replay appended to {args.log}")
    return EXIT_OK


def _append_replay(path: str, deal: cards.Deal, level: int,
                   entries: list[dict], final: engine.MiniGameState,
                   game: int = 0, mini: int = 0) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "a", encoding="utf-8") as fh:
        meta = {"meta": {"version": 1, "level": level,
                         "permutation": deal.permutation(),
                         "leader": deal.leader,
                         "finished_order": list(final.finished_order),
                         "written_at": time.strftime("%Y-%m-%dT%H:%M:%S")}}
        fh.write(json.dumps(meta, sort_keys=True) + "\n")
        for e in entries:
            fh.write(json.dumps({"game": game, "mini": mini, **e},
                                sort_keys=True) + "\n")


def cmd_replay(args) -> int:
    with open(args.log, encoding="utf-8") as fh:
        lines = [json.loads(line) for line in fh if line.strip()]
    if not lines or "meta" not in lines[0]:
        print("replay log missing meta header", file=sys.stderr)
        return EXIT_INVALID
    meta = lines[0]["meta"]
    deal = cards.deal_from_permutation(meta["permutation"], meta["leader"])
    try:
        final = verify_mini_game(lines[1:], deal, meta["level"],
                                 expect_finished=meta.get("finished_order"))
    except ReplayDivergence as exc:
        print(f"FAIL: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if args.behavior:
        _print_behavior_dump(lines[1:], deal, meta["level"])
    print(f"OK: {len(lines) - 1} actions verified; "
          f"standings {list(final.finished_order)}")
    return EXIT_OK


def _print_behavior_dump(entries: list[dict], deal: cards.Deal,
                         level: int) -> None:
    from .replaylog import action_from_json

    state = engine.new_mini_game(deal, level)
    for i, e in enumerate(entries):
        action = action_from_json(e["action"], level)
        coop, dwarf, assist = statuses(state, state.current, action)
        print(f"{i:4d} seat {state.current} coop={list(coop)} "
              f"dwarf={list(dwarf)} assist={list(assist)} "
              f"{render_action(action)}")
        state = engine.apply(state, action)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="guanzero")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-decks", help="write a deck file")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(fn=cmd_gen_decks)

    t = sub.add_parser("train", help="run deep Monte-Carlo training")
    t.add_argument("--config")
    t.add_argument("--frames", type=int)
    t.add_argument("--out-dir")
    t.add_argument("--run-id")
    t.add_argument("--seed", type=int)
    t.add_argument("--actors", type=int)
    t.add_argument("--resume")
    t.add_argument("--no-behavior-flags", action="store_true")
    t.set_defaults(fn=cmd_train)

    e = sub.add_parser("eval", help="paired-deck match between two agents")
    e.add_argument("--team-a", required=True)
    e.add_argument("--team-b", required=True)
    e.add_argument("--decks", required=True)
    e.add_argument("--games", type=int, default=1000)
    e.add_argument("--swap", action=argparse.BooleanOptionalAction, default=True)
    e.add_argument("--level", type=int, default=cards.FACE_2)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--report")
    e.set_defaults(fn=cmd_eval)

    h = sub.add_parser("play", help="interactive mini game in the terminal")
    h.add_argument("--opponents", default="rule")
    h.add_argument("--seat", type=int, default=0, choices=range(4))
    h.add_argument("--seed", type=int)
    h.add_argument("--level", type=int, default=cards.FACE_2)
    h.add_argument("--log", default="replays/play.jsonl")
    h.set_defaults(fn=cmd_play)

    r = sub.add_parser("replay", help="verify a replay log")
    r.add_argument("--log", required=True)
    r.add_argument("--check", action="store_true", default=True)
    r.add_argument("--behavior", action="store_true",
                   help="print per-decision behavior statuses")
    r.set_defaults(fn=cmd_replay)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
