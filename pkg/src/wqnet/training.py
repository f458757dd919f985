"""Losses, the Adam optimizer, and the minibatch loop with early stopping."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .data import Dataset, stratified_split
from .errors import (
    BadProbabilityRow,
    CodeOutOfRange,
    Empty,
    EmptyDataset,
    LengthMismatch,
    ShapeMismatch,
)
from .neuralnet import (
    Mode,
    NetworkGraph,
    ParamStore,
    backward,
    forward,
)


# --- losses -------------------------------------------------------------------

def mse_loss(predicted: np.ndarray, actual: np.ndarray) -> tuple[float, np.ndarray]:
    """Mean squared error and its gradient 2(predicted-actual)/n."""
    p = np.asarray(predicted, dtype=np.float64).reshape(-1)
    a = np.asarray(actual, dtype=np.float64).reshape(-1)
    if p.size != a.size:
        raise LengthMismatch(f"predicted has {p.size} values, actual has {a.size}")
    if p.size == 0:
        raise Empty("mse_loss needs at least one value")
    diff = p - a
    loss = float(np.mean(diff * diff))
    return loss, 2.0 * diff / p.size


def cross_entropy_loss(probabilities: np.ndarray, class_codes: np.ndarray) -> tuple[float, np.ndarray]:
    """Mean negative log-likelihood over softmax rows.

    Returns the gradient at the LOGITS, (p - onehot)/n, i.e. the fused
    softmax + cross-entropy form that stays finite even for confident
    mistakes.
    """
    p = np.atleast_2d(np.asarray(probabilities, dtype=np.float64))
    codes = np.asarray(class_codes).reshape(-1).astype(np.int64)
    if p.shape[0] != codes.size:
        raise LengthMismatch(f"{p.shape[0]} probability rows, {codes.size} codes")
    n, k = p.shape
    row_sums = p.sum(axis=1)
    for i in range(n):
        if np.any(p[i] < 0) or not np.isfinite(row_sums[i]) or abs(row_sums[i] - 1.0) > 1e-9:
            raise BadProbabilityRow(i, f"entries sum to {row_sums[i]!r}")
    if np.any(codes < 0) or np.any(codes >= k):
        raise CodeOutOfRange(f"class codes must lie in [0, {k})")
    picked = p[np.arange(n), codes]
    loss = float(np.mean(-np.log(np.maximum(picked, np.finfo(np.float64).tiny))))
    grad = p.copy()
    grad[np.arange(n), codes] -= 1.0
    return loss, grad / n


# --- Adam ----------------------------------------------------------------------

@dataclass(frozen=True)
class AdamConfig:
    learning_rate: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8

    def __post_init__(self):
        if self.learning_rate <= 0 or self.epsilon <= 0:
            raise ValueError("learning_rate and epsilon must be > 0")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise ValueError("betas must lie in [0, 1)")


class AdamState:
    """First/second moment tensors mirroring a ParamStore, plus step count."""

    def __init__(self, params: ParamStore):
        self.m = {nid: {n: np.zeros_like(t) for n, t in ts.items()} for nid, ts in params.params.items()}
        self.v = {nid: {n: np.zeros_like(t) for n, t in ts.items()} for nid, ts in params.params.items()}
        self.t = 0


def adam_step(params: ParamStore, state: AdamState, config: AdamConfig) -> None:
    """One bias-corrected Adam update, in place, from params.grads."""
    state.t += 1
    b1, b2 = config.beta1, config.beta2
    bias1 = 1.0 - b1 ** state.t
    bias2 = 1.0 - b2 ** state.t
    for nid, name, tensor in params.named_tensors():
        g = params.grads[nid][name]
        if g.shape != tensor.shape:
            raise ShapeMismatch(nid, f"gradient {g.shape} != parameter {tensor.shape}")
        m = state.m[nid][name]
        v = state.v[nid][name]
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * g * g
        tensor -= config.learning_rate * (m / bias1) / (np.sqrt(v / bias2) + config.epsilon)


# --- training loop --------------------------------------------------------------

class LossKind:
    MSE = "mse"
    CROSS_ENTROPY = "cross_entropy"


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 50
    batch_size: int = 32
    patience: int = 15
    validation_fraction: float = 0.2
    shuffle_seed: int = 42
    smote: bool = False
    loss: str = LossKind.MSE

    def __post_init__(self):
        if self.epochs < 0 or self.batch_size < 1 or self.patience < 1:
            raise ValueError("epochs >= 0, batch_size >= 1, patience >= 1 required")
        if not 0.0 < self.validation_fraction < 1.0:
            raise ValueError("validation_fraction must be in (0, 1)")


@dataclass
class TrainHistory:
    """Per-epoch losses; epochs are numbered from 1 and best_epoch is 1-based
    (0 when no epoch ran)."""

    train_loss: list[float] = field(default_factory=list)
    validation_loss: list[float] = field(default_factory=list)
    best_epoch: int = 0
    stopped_early: bool = False

    @property
    def epochs_run(self) -> int:
        return len(self.train_loss)


def history_to_csv(history: TrainHistory, path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "train_loss", "val_loss"])
        for i, (tr, va) in enumerate(zip(history.train_loss, history.validation_loss), start=1):
            writer.writerow([i, repr(tr), repr(va)])


def _batch_seed(shuffle_seed: int, epoch: int, batch_index: int) -> int:
    # stable dropout-mask seed per (run, epoch, batch)
    return (shuffle_seed * 2654435761 + epoch * 1000003 + batch_index) % (2 ** 63)


def _evaluate_loss(graph, params, features, targets, loss_kind) -> float:
    out, _ = forward(graph, params, features, Mode.INFER)
    if loss_kind == LossKind.CROSS_ENTROPY:
        loss, _ = cross_entropy_loss(out, targets)
    else:
        loss, _ = mse_loss(out, targets)
    return loss


def train(
    graph: NetworkGraph,
    params: ParamStore,
    train_set: Dataset,
    config: TrainConfig,
    adam: AdamConfig = AdamConfig(),
) -> tuple[ParamStore, TrainHistory]:
    """Minibatch Adam training with validation-based early stopping.

    A validation slice of ``validation_fraction`` is carved from the given
    set (stratified for classification) using shuffle_seed. Training stops
    once validation loss fails to improve for ``patience`` consecutive
    epochs, and the parameters from the best epoch are returned.
    """
    if train_set.n == 0:
        raise EmptyDataset("cannot train on an empty dataset")
    if train_set.d != graph.input_dim:
        raise ShapeMismatch("input", f"dataset has d={train_set.d}, graph wants {graph.input_dim}")

    fit_part, val_part = stratified_split(train_set, config.validation_fraction, config.shuffle_seed)

    history = TrainHistory()
    best_params = params.copy()
    best_val = np.inf
    state = AdamState(params)
    is_ce = config.loss == LossKind.CROSS_ENTROPY

    since_improvement = 0
    for epoch in range(1, config.epochs + 1):
        rng = np.random.Generator(np.random.PCG64(config.shuffle_seed + epoch))
        order = rng.permutation(fit_part.n)
        epoch_loss = 0.0
        for bi, start in enumerate(range(0, fit_part.n, config.batch_size)):
            idx = order[start:start + config.batch_size]
            xb = fit_part.features[idx]
            yb = fit_part.targets[idx]
            out, cache = forward(graph, params, xb, Mode.TRAIN, _batch_seed(config.shuffle_seed, epoch, bi))
            if is_ce:
                loss, dlogits = cross_entropy_loss(out, yb)
                backward(graph, params, cache, dlogits, at_output_preactivation=True)
            else:
                loss, dflat = mse_loss(out, yb)
                backward(graph, params, cache, dflat.reshape(out.shape))
            adam_step(params, state, adam)
            epoch_loss += loss * idx.size
        history.train_loss.append(epoch_loss / fit_part.n)

        val_loss = _evaluate_loss(graph, params, val_part.features, val_part.targets, config.loss)
        history.validation_loss.append(val_loss)
        if val_loss < best_val:
            best_val = val_loss
            best_params = params.copy()
            history.best_epoch = epoch
            since_improvement = 0
        else:
            since_improvement += 1
            if since_improvement >= config.patience:
                history.stopped_early = True
                break

    return best_params, history
