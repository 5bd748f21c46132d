import glob
import hashlib
import json
import os

import pytest

from guanzero import trainer, valuenet
from guanzero.trainer import TrainerConfig


def tiny_config(out_dir, **overrides):
    base = dict(frame_budget=1200, checkpoint_interval=600,
                metrics_interval=10, seed=5, hidden=16, width=32,
                out_dir=out_dir, run_id="t")
    base.update(overrides)
    return TrainerConfig(**base)


def sha(path):
    return hashlib.sha256(open(path, "rb").read()).hexdigest()


def test_config_hash_tracks_content(tmp_path):
    a = tiny_config(str(tmp_path))
    b = tiny_config(str(tmp_path))
    c = tiny_config(str(tmp_path), seed=6)
    assert a.config_hash() == b.config_hash() != c.config_hash()


def test_tiny_run_artifacts(tmp_path):
    cfg = tiny_config(str(tmp_path))
    summary = trainer.train(cfg)
    run_dir = summary["run_dir"]
    assert summary["frames"] >= cfg.frame_budget
    ckpts = glob.glob(os.path.join(run_dir, "p*_*.ckpt"))
    assert len(ckpts) >= 8  # at least two snapshots of all four positions
    for path in ckpts:
        p = valuenet.load(path)
        assert p.hidden == 16 and p.width == 32
        sidecar = json.load(open(path[:-5] + ".json"))
        assert sidecar["config_hash"] == cfg.config_hash()
        assert sidecar["frames"] == int(path.rsplit("_", 1)[1][:-5])
    metrics = [json.loads(line)
               for line in open(os.path.join(run_dir, "metrics.jsonl"))]
    assert metrics and all("mse" in m and "frames" in m for m in metrics)
    # Frame counts never decrease within the metrics stream.
    frames = [m["frames"] for m in metrics]
    assert frames == sorted(frames)


def test_determinism_byte_identical(tmp_path):
    s1 = trainer.train(tiny_config(str(tmp_path / "a")))
    s2 = trainer.train(tiny_config(str(tmp_path / "b")))
    m1 = os.path.join(s1["run_dir"], "metrics.jsonl")
    m2 = os.path.join(s2["run_dir"], "metrics.jsonl")
    assert sha(m1) == sha(m2)
    c1 = sorted(glob.glob(os.path.join(s1["run_dir"], "*.ckpt")))
    c2 = sorted(glob.glob(os.path.join(s2["run_dir"], "*.ckpt")))
    assert [os.path.basename(p) for p in c1] == [os.path.basename(p) for p in c2]
    assert all(sha(x) == sha(y) for x, y in zip(c1, c2))


def test_seed_changes_results(tmp_path):
    s1 = trainer.train(tiny_config(str(tmp_path / "a")))
    s2 = trainer.train(tiny_config(str(tmp_path / "b"), seed=6))
    c1 = sorted(glob.glob(os.path.join(s1["run_dir"], "*.ckpt")))
    c2 = sorted(glob.glob(os.path.join(s2["run_dir"], "*.ckpt")))
    assert any(sha(x) != sha(y) for x, y in zip(c1, c2))


def test_resume_continues_past_budget(tmp_path):
    cfg = tiny_config(str(tmp_path))
    s1 = trainer.train(cfg)
    cfg2 = tiny_config(str(tmp_path), frame_budget=2400, run_id="t2")
    s2 = trainer.train(cfg2, resume_from=s1["run_dir"])
    assert s2["frames"] >= 2400


def test_ablation_flag_changes_training(tmp_path):
    s1 = trainer.train(tiny_config(str(tmp_path / "a")))
    s2 = trainer.train(tiny_config(str(tmp_path / "b"),
                                   use_behavior_flags=False))
    c1 = sorted(glob.glob(os.path.join(s1["run_dir"], "*.ckpt")))
    c2 = sorted(glob.glob(os.path.join(s2["run_dir"], "*.ckpt")))
    assert any(sha(x) != sha(y) for x, y in zip(c1, c2))


def test_threaded_actors_smoke(tmp_path):
    cfg = tiny_config(str(tmp_path), actor_count=2, frame_budget=800)
    summary = trainer.train(cfg)
    assert summary["frames"] >= 800
    assert glob.glob(os.path.join(summary["run_dir"], "p*_*.ckpt"))


def test_full_game_episodes_run(tmp_path):
    cfg = tiny_config(str(tmp_path), full_game=True, frame_budget=600)
    summary = trainer.train(cfg)
    assert summary["frames"] >= 600
