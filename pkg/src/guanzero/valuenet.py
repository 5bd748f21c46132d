"""Q(s, a) estimator: an LSTM over the action history followed by six dense
ReLU layers (linear output), with exact analytic gradients and momentum SGD.

The implementation is plain numpy with hand-written backpropagation so that
gradients can be validated against finite differences in double precision.
"""

from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import dataclass, field

import numpy as np

from .features import ACTION_SIZE, FLAT_SIZE, HISTORY_STEPS, HISTORY_WIDTH

DEFAULT_HIDDEN = 128
DEFAULT_WIDTH = 512
NUM_DENSE = 6

_MAGIC = b"GZN1"
CHECKPOINT_VERSION = 1


class CheckpointError(ValueError):
    pass


@dataclass
class NetParams:
    """All weights, keyed by name; see param_names for the canonical order."""

    hidden: int
    width: int
    arrays: dict[str, np.ndarray]

    @property
    def dtype(self) -> np.dtype:
        return self.arrays["lstm.Wx"].dtype

    def copy(self) -> "NetParams":
        return NetParams(self.hidden, self.width,
                         {k: v.copy() for k, v in self.arrays.items()})

    def astype(self, dtype) -> "NetParams":
        return NetParams(self.hidden, self.width,
                         {k: v.astype(dtype) for k, v in self.arrays.items()})

    def checksum(self) -> str:
        h = hashlib.sha256()
        for name in param_names(self.hidden, self.width):
            h.update(np.ascontiguousarray(self.arrays[name]).tobytes())
        return h.hexdigest()[:16]


@dataclass
class Batch:
    flat: np.ndarray     # (n, 1075)
    history: np.ndarray  # (n, 5, 432)
    action: np.ndarray   # (n, 108)
    target: np.ndarray   # (n,)

    def __len__(self) -> int:
        return self.flat.shape[0]


def dense_input_size(hidden: int) -> int:
    return hidden + FLAT_SIZE + ACTION_SIZE


def layer_shapes(hidden: int, width: int) -> list[tuple[str, tuple[int, ...]]]:
    shapes: list[tuple[str, tuple[int, ...]]] = [
        ("lstm.Wx", (HISTORY_WIDTH, 4 * hidden)),
        ("lstm.Wh", (hidden, 4 * hidden)),
        ("lstm.b", (4 * hidden,)),
    ]
    sizes = [dense_input_size(hidden)] + [width] * (NUM_DENSE - 1) + [1]
    for i in range(NUM_DENSE):
        shapes.append((f"dense{i}.W", (sizes[i], sizes[i + 1])))
        shapes.append((f"dense{i}.b", (sizes[i + 1],)))
    return shapes


def param_names(hidden: int, width: int) -> list[str]:
    return [name for name, _ in layer_shapes(hidden, width)]


def init(seed: int, hidden: int = DEFAULT_HIDDEN, width: int = DEFAULT_WIDTH,
         dtype=np.float32) -> NetParams:
    """Scaled-uniform init, per-layer fan-in.

    The ReLU stack uses He-scaled bounds U(+-sqrt(6/fan_in)), which keeps
    activation variance roughly constant through the five hidden layers; a
    plain 1/sqrt(fan_in) bound shrinks the signal ~6x per ReLU layer, leaving
    the output nearly input-independent and training stalled. The recurrent
    cell and the linear output layer keep the conventional 1/sqrt(fan_in)
    bound (sigmoid/tanh gates and the scalar head do not stack).
    """
    rng = np.random.default_rng(seed)
    arrays: dict[str, np.ndarray] = {}
    relu_layers = tuple(f"dense{i}" for i in range(NUM_DENSE - 1))
    for name, shape in layer_shapes(hidden, width):
        if name.startswith("lstm"):
            fan_in = HISTORY_WIDTH + hidden
        else:
            fan_in = shape[0] if len(shape) == 2 else _dense_fan_in(name, hidden, width)
        if name.startswith(relu_layers):
            bound = np.sqrt(6.0 / fan_in)
        else:
            bound = 1.0 / np.sqrt(fan_in)
        arrays[name] = rng.uniform(-bound, bound, size=shape).astype(dtype)
    return NetParams(hidden, width, arrays)


def _dense_fan_in(bias_name: str, hidden: int, width: int) -> int:
    idx = int(bias_name[5])
    return dense_input_size(hidden) if idx == 0 else width


def _sigmoid(x: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-x))


def _lstm_forward(p: NetParams, history: np.ndarray, keep: bool):
    """Run the recurrent cell over the 5 timesteps; returns (h_final, cache)."""
    n = history.shape[0]
    hdim = p.hidden
    dtype = history.dtype
    wx, wh, b = p.arrays["lstm.Wx"], p.arrays["lstm.Wh"], p.arrays["lstm.b"]
    h = np.zeros((n, hdim), dtype=dtype)
    c = np.zeros((n, hdim), dtype=dtype)
    cache = []
    for t in range(HISTORY_STEPS):
        x = history[:, t, :]
        z = x @ wx + h @ wh + b
        i = _sigmoid(z[:, :hdim])
        f = _sigmoid(z[:, hdim:2 * hdim])
        g = np.tanh(z[:, 2 * hdim:3 * hdim])
        o = _sigmoid(z[:, 3 * hdim:])
        c_new = f * c + i * g
        tc = np.tanh(c_new)
        h_new = o * tc
        if keep:
            cache.append((x, h, c, i, f, g, o, tc))
        h, c = h_new, c_new
    return h, cache


def _dense_forward(p: NetParams, x0: np.ndarray, keep: bool):
    x = x0
    cache = []
    for l in range(NUM_DENSE):
        w, b = p.arrays[f"dense{l}.W"], p.arrays[f"dense{l}.b"]
        z = x @ w + b
        if l < NUM_DENSE - 1:
            a = np.maximum(z, 0.0)
        else:
            a = z
        if keep:
            cache.append((x, z))
        x = a
    return x[:, 0], cache


def forward(p: NetParams, batch: Batch) -> np.ndarray:
    """Q estimates, one per sample."""
    dtype = p.dtype
    h, _ = _lstm_forward(p, batch.history.astype(dtype, copy=False), keep=False)
    x0 = np.concatenate([h, batch.flat.astype(dtype, copy=False),
                         batch.action.astype(dtype, copy=False)], axis=1)
    q, _ = _dense_forward(p, x0, keep=False)
    return q


def loss_and_grads(p: NetParams, batch: Batch) -> tuple[float, dict[str, np.ndarray]]:
    """Mean squared error against the targets, and its exact gradient."""
    dtype = p.dtype
    n = len(batch)
    hist = batch.history.astype(dtype, copy=False)
    flat = batch.flat.astype(dtype, copy=False)
    act = batch.action.astype(dtype, copy=False)
    target = batch.target.astype(dtype, copy=False)
    if not (np.isfinite(hist).all() and np.isfinite(flat).all()
            and np.isfinite(act).all() and np.isfinite(target).all()):
        raise ValueError("non-finite entries in training batch")

    h, lstm_cache = _lstm_forward(p, hist, keep=True)
    x0 = np.concatenate([h, flat, act], axis=1)
    q, dense_cache = _dense_forward(p, x0, keep=True)

    err = q - target
    mse = float(np.mean(err * err))
    grads = {k: np.zeros_like(v) for k, v in p.arrays.items()}

    # Dense layers, last to first.
    dx = (2.0 / n) * err[:, None]  # gradient w.r.t. the final activation
    for l in range(NUM_DENSE - 1, -1, -1):
        x_in, z = dense_cache[l]
        dz = dx if l == NUM_DENSE - 1 else dx * (z > 0)
        grads[f"dense{l}.W"] += x_in.T @ dz
        grads[f"dense{l}.b"] += dz.sum(axis=0)
        dx = dz @ p.arrays[f"dense{l}.W"].T

    # Split the gradient at the concatenation; only the LSTM part continues.
    hdim = p.hidden
    dh = dx[:, :hdim]

    wx, wh = p.arrays["lstm.Wx"], p.arrays["lstm.Wh"]
    dc = np.zeros_like(dh)
    for t in range(HISTORY_STEPS - 1, -1, -1):
        x, h_prev, c_prev, i, f, g, o, tc = lstm_cache[t]
        do = dh * tc
        dct = dc + dh * o * (1.0 - tc * tc)
        di = dct * g
        df = dct * c_prev
        dg = dct * i
        dc = dct * f
        dz = np.concatenate([di * i * (1.0 - i),
                             df * f * (1.0 - f),
                             dg * (1.0 - g * g),
                             do * o * (1.0 - o)], axis=1)
        grads["lstm.Wx"] += x.T @ dz
        grads["lstm.Wh"] += h_prev.T @ dz
        grads["lstm.b"] += dz.sum(axis=0)
        dh = dz @ wh.T
    return mse, grads


@dataclass
class MomentumSGD:
    """Plain SGD with momentum-accumulated velocity."""

    lr: float = 1e-4
    momentum: float = 0.9
    velocity: dict[str, np.ndarray] = field(default_factory=dict)

    def step(self, p: NetParams, grads: dict[str, np.ndarray]) -> None:
        for name, g in grads.items():
            v = self.velocity.get(name)
            if v is None:
                v = np.zeros_like(g)
            v = self.momentum * v + g
            if not np.isfinite(v).all():
                raise FloatingPointError(f"non-finite update for {name}")
            self.velocity[name] = v
            p.arrays[name] -= self.lr * v


def sgd_step(p: NetParams, grads: dict[str, np.ndarray], lr: float,
             momentum: float = 0.0,
             velocity: dict[str, np.ndarray] | None = None) -> dict[str, np.ndarray]:
    """One in-place update; returns the velocity state for chaining."""
    opt = MomentumSGD(lr, momentum, velocity if velocity is not None else {})
    opt.step(p, grads)
    return opt.velocity


def save(p: NetParams, path) -> None:
    """Versioned binary checkpoint: magic, JSON header, raw little-endian arrays."""
    names = param_names(p.hidden, p.width)
    header = {
        "version": CHECKPOINT_VERSION,
        "hidden": p.hidden,
        "width": p.width,
        "dtype": np.dtype(p.dtype).str.lstrip("<>|"),
        "arrays": [[n, list(p.arrays[n].shape)] for n in names],
    }
    blob = json.dumps(header).encode()
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        for n in names:
            arr = np.ascontiguousarray(p.arrays[n])
            fh.write(arr.astype(arr.dtype.newbyteorder("<")).tobytes())


def load(path) -> NetParams:
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:4] != _MAGIC:
        raise CheckpointError("not a checkpoint file (bad magic)")
    (hlen,) = struct.unpack("<I", data[4:8])
    try:
        header = json.loads(data[8:8 + hlen])
    except ValueError as exc:
        raise CheckpointError(f"corrupt checkpoint header: {exc}") from exc
    if header.get("version") != CHECKPOINT_VERSION:
        raise CheckpointError(f"unsupported checkpoint version: {header.get('version')}")
    dtype = np.dtype(header["dtype"]).newbyteorder("<")
    hidden, width = header["hidden"], header["width"]
    expected = {n: tuple(s) for n, s in layer_shapes(hidden, width)}
    offset = 8 + hlen
    arrays: dict[str, np.ndarray] = {}
    for name, shape in header["arrays"]:
        shape = tuple(shape)
        if expected.get(name) != shape:
            raise CheckpointError(f"shape mismatch for {name}: {shape}")
        nbytes = int(np.prod(shape)) * dtype.itemsize
        chunk = data[offset:offset + nbytes]
        if len(chunk) != nbytes:
            raise CheckpointError("truncated checkpoint file")
        arrays[name] = np.frombuffer(chunk, dtype=dtype).reshape(shape).astype(
            dtype.newbyteorder("="))
        offset += nbytes
    if offset != len(data):
        raise CheckpointError("trailing bytes in checkpoint file")
    if set(arrays) != set(expected):
        raise CheckpointError("checkpoint is missing parameter arrays")
    return NetParams(hidden, width, arrays)
