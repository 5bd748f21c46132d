import numpy as np
import pytest

from guanzero import valuenet
from guanzero.valuenet import Batch


def make_batch(seed, n=4, binary=True, dtype=np.float64):
    rng = np.random.default_rng(seed)
    draw = (lambda shape: rng.integers(0, 2, shape).astype(dtype)) if binary \
        else (lambda shape: rng.normal(size=shape).astype(dtype))
    return Batch(flat=draw((n, 1075)), history=draw((n, 5, 432)),
                 action=draw((n, 108)), target=rng.normal(size=n).astype(dtype))


def grad_check(p, batch, coords_per_layer=4, delta=1e-4, rtol=1e-3, seed=0):
    """Central finite differences for sampled coordinates of every array.

    A failing coordinate is retried at a smaller step before it counts: a
    ReLU kink inside the perturbation interval breaks the finite-difference
    estimate without the analytic gradient being wrong, and shrinking delta
    moves the kink outside the interval. Real gradient bugs fail at every
    step size.
    """
    _, grads = valuenet.loss_and_grads(p, batch)
    rng = np.random.default_rng(seed)
    bad = []
    for name, arr in p.arrays.items():
        flat = arr.reshape(-1)
        g = grads[name].reshape(-1)
        idxs = rng.choice(flat.size, size=min(coords_per_layer, flat.size),
                          replace=False)
        for i in idxs:
            for d in (delta, delta * 1e-2):
                orig = flat[i]
                flat[i] = orig + d
                up, _ = valuenet.loss_and_grads(p, batch)
                flat[i] = orig - d
                dn, _ = valuenet.loss_and_grads(p, batch)
                flat[i] = orig
                num = (up - dn) / (2 * d)
                if abs(num - g[i]) <= rtol * max(abs(num), abs(g[i]), 1e-8):
                    break
            else:
                bad.append((name, int(i), float(num), float(g[i])))
    return bad


def test_layer_shapes_contract():
    shapes = dict(valuenet.layer_shapes(128, 512))
    assert shapes["lstm.Wx"] == (432, 512)
    assert shapes["lstm.Wh"] == (128, 512)
    assert shapes["lstm.b"] == (512,)
    assert shapes["dense0.W"] == (128 + 1075 + 108, 512)
    for l in range(1, 5):
        assert shapes[f"dense{l}.W"] == (512, 512)
    assert shapes["dense5.W"] == (512, 1)
    assert valuenet.dense_input_size(128) == 1311


def test_init_is_seeded_and_bounded():
    a = valuenet.init(3, hidden=8, width=16)
    b = valuenet.init(3, hidden=8, width=16)
    c = valuenet.init(4, hidden=8, width=16)
    assert a.checksum() == b.checksum() != c.checksum()
    bound = 1.0 / np.sqrt(432 + 8)
    assert np.abs(a.arrays["lstm.Wx"]).max() <= bound
    # ReLU stack is He-scaled; the linear head keeps the 1/sqrt(fan_in) bound.
    w1 = a.arrays["dense1.W"]
    assert np.abs(w1).max() <= np.sqrt(6.0 / 16)
    assert np.abs(w1).max() > 1.0 / np.sqrt(16)  # wider than the plain bound
    assert np.abs(a.arrays["dense5.W"]).max() <= 1.0 / np.sqrt(16)


def test_forward_shape_and_dtype():
    p = valuenet.init(0, hidden=8, width=16)
    q = valuenet.forward(p, make_batch(1, n=6, dtype=np.float32))
    assert q.shape == (6,) and q.dtype == np.float32


def test_gradient_check_small_net():
    p = valuenet.init(0, hidden=6, width=10, dtype=np.float64)
    batch = make_batch(2, n=3)
    bad = grad_check(p, batch)
    assert not bad, f"gradient mismatches: {bad}"


def test_gradients_nonzero_everywhere():
    p = valuenet.init(1, hidden=6, width=10, dtype=np.float64)
    _, grads = valuenet.loss_and_grads(p, make_batch(3, n=8))
    for name, g in grads.items():
        assert np.abs(g).max() > 0, f"dead gradient for {name}"


def test_loss_rejects_non_finite_input():
    p = valuenet.init(0, hidden=6, width=10, dtype=np.float64)
    batch = make_batch(4, n=2)
    batch.flat[0, 0] = np.nan
    with pytest.raises(ValueError):
        valuenet.loss_and_grads(p, batch)


def test_overfit_small_batch():
    p = valuenet.init(0, hidden=8, width=32, dtype=np.float64)
    batch = make_batch(5, n=4)
    opt = valuenet.MomentumSGD(lr=1e-3, momentum=0.9)
    mse = np.inf
    for step in range(3000):
        mse, grads = valuenet.loss_and_grads(p, batch)
        if mse < 1e-8:
            break
        opt.step(p, grads)
    assert mse < 1e-8


def test_momentum_changes_trajectory():
    batch = make_batch(6, n=4)
    p1 = valuenet.init(0, hidden=6, width=10, dtype=np.float64)
    p2 = p1.copy()
    o1 = valuenet.MomentumSGD(lr=1e-3, momentum=0.0)
    o2 = valuenet.MomentumSGD(lr=1e-3, momentum=0.9)
    for _ in range(5):
        _, g = valuenet.loss_and_grads(p1, batch)
        o1.step(p1, g)
        _, g = valuenet.loss_and_grads(p2, batch)
        o2.step(p2, g)
    assert p1.checksum() != p2.checksum()


def test_checkpoint_roundtrip(tmp_path):
    p = valuenet.init(7, hidden=8, width=16)
    path = tmp_path / "net.ckpt"
    valuenet.save(p, path)
    q = valuenet.load(path)
    assert q.hidden == 8 and q.width == 16 and q.dtype == p.dtype
    for name in p.arrays:
        np.testing.assert_array_equal(p.arrays[name], q.arrays[name])
    # Saving identical params twice gives identical bytes.
    path2 = tmp_path / "net2.ckpt"
    valuenet.save(p, path2)
    assert path.read_bytes() == path2.read_bytes()


def test_checkpoint_rejects_corruption(tmp_path):
    p = valuenet.init(7, hidden=8, width=16)
    path = tmp_path / "net.ckpt"
    valuenet.save(p, path)
    blob = path.read_bytes()

    truncated = tmp_path / "trunc.ckpt"
    truncated.write_bytes(blob[:-17])
    with pytest.raises(valuenet.CheckpointError):
        valuenet.load(truncated)

    bad_magic = tmp_path / "magic.ckpt"
    bad_magic.write_bytes(b"XXXX" + blob[4:])
    with pytest.raises(valuenet.CheckpointError):
        valuenet.load(bad_magic)

    trailing = tmp_path / "trail.ckpt"
    trailing.write_bytes(blob + b"\0")
    with pytest.raises(valuenet.CheckpointError):
        valuenet.load(trailing)
