"""Two-layer graph convolution network with hand-derived gradients.

The model computes

    H = S @ relu(S @ X @ W1 + b1)          (penultimate embeddings)
    logits = H @ W2 + b2

for a convolution operator ``S``.  Training minimizes masked mean softmax
cross-entropy with explicit backpropagation (no autograd) and a full-batch
Adam or SGD loop.  Everything is deterministic given the seed.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .datasets import DatasetBundle
from .errors import ValidationError
from .operators import ConvParams, SparseOperator, build_operator


@dataclass
class GCNModel:
    W1: np.ndarray
    b1: np.ndarray
    W2: np.ndarray
    b2: np.ndarray

    @property
    def hidden_dim(self) -> int:
        return self.W1.shape[1]

    def copy(self) -> "GCNModel":
        return GCNModel(self.W1.copy(), self.b1.copy(), self.W2.copy(), self.b2.copy())

    def parameters(self) -> dict[str, np.ndarray]:
        return {"W1": self.W1, "b1": self.b1, "W2": self.W2, "b2": self.b2}


@dataclass(frozen=True)
class TrainConfig:
    lr: float = 0.02
    epochs: int = 200
    hidden_dim: int = 32
    seed: int = 0
    weight_decay: float = 0.0
    optimizer: str = "adam"
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8

    def __post_init__(self):
        if self.lr <= 0 or self.epochs < 1 or self.hidden_dim < 1:
            raise ValidationError("lr, epochs, and hidden_dim must be positive")
        if self.optimizer not in ("adam", "sgd"):
            raise ValidationError("optimizer must be 'adam' or 'sgd'")
        if self.weight_decay < 0:
            raise ValidationError("weight_decay must be non-negative")


@dataclass
class TrainResult:
    model: GCNModel
    test_accuracy: float
    train_losses: np.ndarray
    embeddings: np.ndarray
    logits: np.ndarray


def _glorot(rng: np.random.Generator, fan_in: int, fan_out: int) -> np.ndarray:
    bound = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-bound, bound, size=(fan_in, fan_out))


def init_model(num_features: int, hidden_dim: int, num_classes: int,
               seed: int) -> GCNModel:
    """Glorot-uniform weights, zero biases."""
    if min(num_features, hidden_dim, num_classes) < 1:
        raise ValidationError("all model dimensions must be positive")
    rng = np.random.default_rng(seed)
    return GCNModel(
        W1=_glorot(rng, num_features, hidden_dim),
        b1=np.zeros(hidden_dim),
        W2=_glorot(rng, hidden_dim, num_classes),
        b2=np.zeros(num_classes),
    )


def forward(model: GCNModel, op: SparseOperator,
            features: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(logits, embeddings)`` for the two-layer model."""
    pre = op.apply(features @ model.W1) + model.b1
    hidden = np.maximum(pre, 0.0)
    embeddings = op.apply(hidden)
    logits = embeddings @ model.W2 + model.b2
    return logits, embeddings


def _log_softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))


def loss_and_grads(model: GCNModel, op: SparseOperator, features: np.ndarray,
                   labels: np.ndarray, mask: np.ndarray,
                   weight_decay: float = 0.0):
    """Masked mean cross-entropy and its exact gradients.

    ``mask`` is either an array of node ids or a boolean mask over all
    nodes.  Returns ``(loss, grads)`` with ``grads`` keyed like
    ``model.parameters()``.
    """
    mask = np.asarray(mask)
    if mask.dtype == np.bool_:
        mask = np.flatnonzero(mask)
    mask = mask.astype(np.int64, copy=False)
    if mask.size == 0:
        raise ValidationError("loss mask must contain at least one node")
    n = features.shape[0]
    if mask.min() < 0 or mask.max() >= n:
        raise ValidationError("mask id outside the node range")
    if np.unique(mask).size != mask.size:
        raise ValidationError("loss mask contains duplicate node ids")

    xw = features @ model.W1
    pre = op.apply(xw) + model.b1
    hidden = np.maximum(pre, 0.0)
    embeddings = op.apply(hidden)
    logits = embeddings @ model.W2 + model.b2

    log_probs = _log_softmax(logits[mask])
    picked = log_probs[np.arange(mask.size), labels[mask]]
    loss = float(-picked.mean())

    dlogits = np.zeros_like(logits)
    probs = np.exp(log_probs)
    probs[np.arange(mask.size), labels[mask]] -= 1.0
    dlogits[mask] = probs / mask.size

    grad_W2 = embeddings.T @ dlogits
    grad_b2 = dlogits.sum(axis=0)
    d_embeddings = dlogits @ model.W2.T
    d_hidden = op.apply_transpose(d_embeddings)
    d_pre = d_hidden * (pre > 0.0)
    grad_b1 = d_pre.sum(axis=0)
    grad_W1 = features.T @ op.apply_transpose(d_pre)
    if weight_decay:
        grad_W1 = grad_W1 + weight_decay * model.W1
        grad_W2 = grad_W2 + weight_decay * model.W2
        loss += 0.5 * weight_decay * (float(np.sum(model.W1 ** 2))
                                      + float(np.sum(model.W2 ** 2)))
    grads = {"W1": grad_W1, "b1": grad_b1, "W2": grad_W2, "b2": grad_b2}
    return loss, grads


class _Adam:
    def __init__(self, params: dict[str, np.ndarray], cfg: TrainConfig):
        self.cfg = cfg
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}
        self.t = 0

    def step(self, params: dict[str, np.ndarray], grads: dict[str, np.ndarray]):
        self.t += 1
        b1, b2 = self.cfg.adam_beta1, self.cfg.adam_beta2
        for key, p in params.items():
            g = grads[key]
            self.m[key] = b1 * self.m[key] + (1 - b1) * g
            self.v[key] = b2 * self.v[key] + (1 - b2) * g * g
            m_hat = self.m[key] / (1 - b1 ** self.t)
            v_hat = self.v[key] / (1 - b2 ** self.t)
            p -= self.cfg.lr * m_hat / (np.sqrt(v_hat) + self.cfg.adam_eps)


def accuracy(logits: np.ndarray, labels: np.ndarray, ids: np.ndarray) -> float:
    """Fraction of ``ids`` whose argmax class matches the label.

    Ties pick the lowest class index (numpy argmax convention).
    """
    ids = np.asarray(ids, dtype=np.int64)
    if ids.size == 0:
        raise ValidationError("accuracy over an empty id set is undefined")
    preds = np.argmax(logits[ids], axis=1)
    return float(np.mean(preds == labels[ids]))


def train(bundle: DatasetBundle, params: ConvParams, cfg: TrainConfig) -> TrainResult:
    """Full-batch training for a fixed number of epochs.

    Requires ``bundle.split``.  The returned embeddings and logits come from
    the final model.
    """
    if bundle.split is None:
        raise ValidationError("bundle has no train/test split")
    op = build_operator(bundle.graph, params)
    model = init_model(bundle.features.shape[1], cfg.hidden_dim,
                       bundle.num_classes, cfg.seed)
    parameters = model.parameters()
    optimizer = _Adam(parameters, cfg) if cfg.optimizer == "adam" else None
    losses = np.empty(cfg.epochs)
    train_ids = bundle.split.train_ids
    for epoch in range(cfg.epochs):
        loss, grads = loss_and_grads(model, op, bundle.features, bundle.labels,
                                     train_ids, cfg.weight_decay)
        losses[epoch] = loss
        if optimizer is not None:
            optimizer.step(parameters, grads)
        else:
            for key, p in parameters.items():
                p -= cfg.lr * grads[key]
    logits, embeddings = forward(model, op, bundle.features)
    test_acc = accuracy(logits, bundle.labels, bundle.split.test_ids)
    return TrainResult(model, test_acc, losses, embeddings, logits)
