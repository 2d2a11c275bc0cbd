"""Two-layer LSTM language model written directly in numpy.

Layout: embedding -> LSTM -> LSTM -> dense (ReLU) -> softmax over the
vocabulary. The model reads a fixed-width window of previous tokens
(left-padded with a start symbol) and predicts the next one; training
backpropagates through the whole window.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from clonelog.corpus import START, LsdSequence, Vocabulary

logger = logging.getLogger(__name__)


class DivergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class LmHyperparams:
    hidden: int = 500
    dense: int = 250
    embed: int = 128
    dropout: float = 0.10
    epochs: int = 200
    batch_size: int = 64
    learning_rate: float = 0.01
    optimizer: str = "adam"
    clip_norm: float = 5.0
    plateau_patience: int = 3
    window: int = 1
    seed: int = 0
    desk_scale: bool = False

    def __post_init__(self):
        for name in ("hidden", "dense", "embed", "epochs", "batch_size", "window"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if not 0 <= self.dropout < 1:
            raise ValueError("dropout must lie in [0, 1)")
        if self.learning_rate <= 0 or self.clip_norm <= 0:
            raise ValueError("learning rate and clip norm must be positive")
        if self.optimizer not in ("adam", "sgd"):
            raise ValueError(f"unknown optimizer {self.optimizer!r}")

    @classmethod
    def paper(cls, **overrides) -> "LmHyperparams":
        return replace(cls(), **overrides)

    @classmethod
    def desk(cls, **overrides) -> "LmHyperparams":
        return replace(cls(hidden=64, dense=32, embed=32, epochs=50, desk_scale=True), **overrides)

    def to_dict(self) -> dict:
        return asdict(self)


PROFILES = {"paper": LmHyperparams.paper, "desk": LmHyperparams.desk}

PARAM_NAMES = ("embedding", "lstm1_w", "lstm1_b", "lstm2_w", "lstm2_b", "dense_w", "dense_b", "out_w", "out_b")


def _sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def init_params(vocab_size: int, hp: LmHyperparams, rng: np.random.Generator) -> dict[str, np.ndarray]:
    def glorot(fan_in, fan_out, shape):
        s = np.sqrt(6.0 / (fan_in + fan_out))
        return rng.uniform(-s, s, size=shape)

    H, D, E = hp.hidden, hp.dense, hp.embed
    p = {
        # one extra row for the start symbol, which is never an output
        "embedding": rng.uniform(-0.05, 0.05, size=(vocab_size + 1, E)),
        "lstm1_w": glorot(E + H, 4 * H, (E + H, 4 * H)),
        "lstm1_b": np.zeros(4 * H),
        "lstm2_w": glorot(2 * H, 4 * H, (2 * H, 4 * H)),
        "lstm2_b": np.zeros(4 * H),
        "dense_w": glorot(H, D, (H, D)),
        "dense_b": np.zeros(D),
        "out_w": glorot(D, vocab_size, (D, vocab_size)),
        "out_b": np.zeros(vocab_size),
    }
    # forget gates start open
    p["lstm1_b"][H : 2 * H] = 1.0
    p["lstm2_b"][H : 2 * H] = 1.0
    return p


def _lstm_forward(xs: np.ndarray, w: np.ndarray, b: np.ndarray):
    """xs: (T, B, In) -> hs (T, B, H) plus cache for the backward pass."""
    T, B, _ = xs.shape
    H = b.shape[0] // 4
    h = np.zeros((B, H))
    c = np.zeros((B, H))
    hs = np.empty((T, B, H))
    cache = []
    for t in range(T):
        inp = np.concatenate([xs[t], h], axis=1)
        z = inp @ w + b
        i = _sigmoid(z[:, :H])
        f = _sigmoid(z[:, H : 2 * H])
        o = _sigmoid(z[:, 2 * H : 3 * H])
        g = np.tanh(z[:, 3 * H :])
        c_prev = c
        c = f * c_prev + i * g
        tc = np.tanh(c)
        h = o * tc
        hs[t] = h
        cache.append((inp, i, f, o, g, c_prev, tc))
    return hs, cache


def _lstm_backward(dhs: np.ndarray, cache, w: np.ndarray):
    T, B, H = dhs.shape
    n_in = w.shape[0] - H
    dw = np.zeros_like(w)
    db = np.zeros(w.shape[1])
    dxs = np.empty((T, B, n_in))
    dh_next = np.zeros((B, H))
    dc_next = np.zeros((B, H))
    for t in reversed(range(T)):
        inp, i, f, o, g, c_prev, tc = cache[t]
        dh = dhs[t] + dh_next
        do = dh * tc
        dc = dc_next + dh * o * (1.0 - tc * tc)
        di = dc * g
        dg = dc * i
        df = dc * c_prev
        dc_next = dc * f
        dz = np.concatenate([di * i * (1 - i), df * f * (1 - f), do * o * (1 - o), dg * (1 - g * g)], axis=1)
        dw += inp.T @ dz
        db += dz.sum(axis=0)
        dinp = dz @ w.T
        dxs[t] = dinp[:, :n_in]
        dh_next = dinp[:, n_in:]
    return dxs, dw, db


def forward_backward(
    params: dict[str, np.ndarray],
    x: np.ndarray,
    y: np.ndarray | None,
    masks: tuple[np.ndarray, np.ndarray] | None = None,
):
    """Mean cross-entropy of predicting ``y`` from windows ``x`` (B, T) and its gradients.

    With ``y`` None only the output distributions are returned.
    """
    B, T = x.shape
    xs = params["embedding"][x.T]  # (T, B, E)
    h1, cache1 = _lstm_forward(xs, params["lstm1_w"], params["lstm1_b"])
    m1, m2 = masks if masks is not None else (None, None)
    h1d = h1 * m1 if m1 is not None else h1
    h2, cache2 = _lstm_forward(h1d, params["lstm2_w"], params["lstm2_b"])
    last = h2[-1] * m2 if m2 is not None else h2[-1]
    a = last @ params["dense_w"] + params["dense_b"]
    r = np.maximum(a, 0.0)
    logits = r @ params["out_w"] + params["out_b"]
    logits -= logits.max(axis=1, keepdims=True)
    e = np.exp(logits)
    probs = e / e.sum(axis=1, keepdims=True)
    if y is None:
        return probs
    loss = -np.mean(np.log(probs[np.arange(B), y]))

    g = {}
    dlogits = probs.copy()
    dlogits[np.arange(B), y] -= 1.0
    dlogits /= B
    g["out_w"] = r.T @ dlogits
    g["out_b"] = dlogits.sum(axis=0)
    da = (dlogits @ params["out_w"].T) * (a > 0)
    g["dense_w"] = last.T @ da
    g["dense_b"] = da.sum(axis=0)
    dlast = da @ params["dense_w"].T
    if m2 is not None:
        dlast = dlast * m2
    dh2 = np.zeros_like(h2)
    dh2[-1] = dlast
    dh1d, g["lstm2_w"], g["lstm2_b"] = _lstm_backward(dh2, cache2, params["lstm2_w"])
    dh1 = dh1d * m1 if m1 is not None else dh1d
    dxs, g["lstm1_w"], g["lstm1_b"] = _lstm_backward(dh1, cache1, params["lstm1_w"])
    demb = np.zeros_like(params["embedding"])
    np.add.at(demb, x.T.reshape(-1), dxs.reshape(-1, dxs.shape[2]))
    g["embedding"] = demb
    return loss, g


class RecurrentModel:
    kind = "lstm"

    def __init__(self, vocab: Vocabulary, hp: LmHyperparams, params: dict[str, np.ndarray]):
        self.vocab = vocab
        self.hp = hp
        self.params = params
        self.loss_curve: list[float] = []

    @property
    def tokens(self) -> list[str]:
        return self.vocab.tokens

    @property
    def window(self) -> int:
        return self.hp.window

    @property
    def start_index(self) -> int:
        return self.vocab.size

    def encode_context(self, context: Sequence[str], width: int | None = None) -> list[int]:
        width = width or self.hp.window
        ids = [self.start_index if t == START else self.vocab.lookup(t) for t in context][-width:]
        return [self.start_index] * (width - len(ids)) + ids

    def next_token_distribution(self, context: Sequence[str]) -> np.ndarray:
        x = np.array([self.encode_context(context)])
        return forward_backward(self.params, x, None)[0]


def training_windows(train: Iterable[LsdSequence], vocab: Vocabulary, width: int) -> tuple[np.ndarray, np.ndarray]:
    start = vocab.size
    xs, ys = [], []
    for seq in train:
        if seq.is_empty:
            continue
        ids = [start] * width + [vocab.lookup(t) for t in seq.tokens]
        for pos in range(width, len(ids)):
            xs.append(ids[pos - width : pos])
            ys.append(ids[pos])
    return np.array(xs, dtype=np.int64).reshape(-1, width), np.array(ys, dtype=np.int64)


def _dropout_masks(rng, hp: LmHyperparams, batch: int):
    if hp.dropout == 0:
        return None
    keep = 1.0 - hp.dropout
    m1 = (rng.random((batch, hp.hidden)) < keep) / keep
    m2 = (rng.random((batch, hp.hidden)) < keep) / keep
    return m1, m2


class _Adam:
    def __init__(self, params, beta1=0.9, beta2=0.999, eps=1e-8):
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}
        self.beta1, self.beta2, self.eps = beta1, beta2, eps
        self.t = 0

    def step(self, params, grads, lr):
        self.t += 1
        c1 = 1 - self.beta1**self.t
        c2 = 1 - self.beta2**self.t
        for k, g in grads.items():
            self.m[k] = self.beta1 * self.m[k] + (1 - self.beta1) * g
            self.v[k] = self.beta2 * self.v[k] + (1 - self.beta2) * g * g
            params[k] -= lr * (self.m[k] / c1) / (np.sqrt(self.v[k] / c2) + self.eps)


def train_recurrent(train: Iterable[LsdSequence], vocab: Vocabulary, hp: LmHyperparams) -> RecurrentModel:
    """Minibatch training with gradient-norm clipping; the rate halves when the epoch loss plateaus."""
    x, y = training_windows(train, vocab, hp.window)
    if len(y) == 0:
        raise ValueError("recurrent model training set is empty")
    rng = np.random.default_rng(hp.seed)
    params = init_params(vocab.size, hp, rng)
    model = RecurrentModel(vocab, hp, params)
    adam = _Adam(params) if hp.optimizer == "adam" else None
    lr = hp.learning_rate
    best = np.inf
    stale = 0
    for epoch in range(hp.epochs):
        order = rng.permutation(len(y))
        total = 0.0
        for lo in range(0, len(y), hp.batch_size):
            idx = order[lo : lo + hp.batch_size]
            masks = _dropout_masks(rng, hp, len(idx))
            loss, grads = forward_backward(params, x[idx], y[idx], masks)
            if not np.isfinite(loss):
                raise DivergenceError(f"loss became non-finite at epoch {epoch + 1}")
            norm = np.sqrt(sum(float(np.sum(g * g)) for g in grads.values()))
            scale = min(1.0, hp.clip_norm / (norm + 1e-12))
            if scale < 1.0:
                grads = {name: g * scale for name, g in grads.items()}
            if adam is not None:
                adam.step(params, grads, lr)
            else:
                for name, g in grads.items():
                    params[name] -= lr * g
            total += loss * len(idx)
        epoch_loss = total / len(y)
        model.loss_curve.append(epoch_loss)
        if epoch_loss < best - 1e-6:
            best, stale = epoch_loss, 0
        else:
            stale += 1
            if stale >= hp.plateau_patience:
                lr *= 0.5
                stale = 0
                logger.debug("epoch %d: halving learning rate to %g", epoch + 1, lr)
    return model
