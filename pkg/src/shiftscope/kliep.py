"""Density-ratio estimation network trained with the KLIEP objective.

The model maps an embedding z through one rectified hidden layer to d, then a
softplus head turns the scalar pre-activation into a strictly positive ratio
r = ln(exp(W d + b) + 1).  Low r marks a test instance as unlikely under the
training distribution.  Training minimizes

    L = mean(r over test) - mean(ln r over train)

by minibatch SGD with exact analytic gradients.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.special import expit
from sklearn.base import BaseEstimator

from .data import AnalysisStore, LatentSpace
from .errors import DimensionMismatch, DivergedLoss, EmptySplit, NonPositiveRatio
from .validation import as_matrix, check_dim, check_fitted

# Smallest positive normal float64: softplus underflows to exactly 0.0 for
# pre-activations below about -745, which would break the r > 0 contract.
_TINY = np.finfo(np.float64).tiny


def softplus(x):
    """Numerically stable ln(exp(x) + 1), floored to stay strictly positive."""
    return np.maximum(np.logaddexp(0.0, x), _TINY)


@dataclass(frozen=True)
class TrainConfig:
    """SGD hyperparameters; defaults follow the study recipe."""

    epochs: int = 10
    learning_rate: float = 0.01
    batch_size: int = 64
    seed: int = 0

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")


def kliep_loss(ratios_test, ratios_train) -> float:
    """L = mean(ratios over test) - mean(ln ratios over train)."""
    r_te = np.asarray(ratios_test, dtype=np.float64)
    r_tr = np.asarray(ratios_train, dtype=np.float64)
    if r_te.size == 0 or r_tr.size == 0:
        raise EmptySplit("both ratio lists must be non-empty")
    if np.any(r_te <= 0) or np.any(r_tr <= 0):
        raise NonPositiveRatio("ratios must be strictly positive")
    return float(np.mean(r_te) - np.mean(np.log(r_tr)))


def forward_pass(W1, b1, W, b, Z):
    """Run the two layers over rows of Z.

    Returns ``(D, A, R)``: rectified hidden activations, head pre-activations,
    and ratios, vectorized over the batch.
    """
    H = Z @ W1.T + b1
    D = np.maximum(H, 0.0)
    A = D @ W.T.ravel() + b
    R = softplus(A)
    return D, A, R


def kliep_gradient(W1, b1, W, b, train_batch, test_batch):
    """Exact analytic gradient of the loss over one paired batch.

    Returns ``(gW1, gb1, gW, gb)`` matching the parameter shapes.
    """
    Zt = np.asarray(train_batch, dtype=np.float64)
    Ze = np.asarray(test_batch, dtype=np.float64)
    if Zt.size == 0 or Ze.size == 0:
        raise EmptySplit("gradient needs non-empty train and test batches")

    w_row = W.ravel()

    def _head_grads(Z, sign_scale):
        # sign_scale(A, R) -> dL/dA per point
        H = Z @ W1.T + b1
        D = np.maximum(H, 0.0)
        A = D @ w_row + b
        R = softplus(A)
        g_a = sign_scale(A, R)
        gW = g_a @ D
        gb = float(np.sum(g_a))
        g_h = np.outer(g_a, w_row) * (H > 0.0)
        gW1 = g_h.T @ Z
        gb1 = np.sum(g_h, axis=0)
        return gW1, gb1, gW, gb

    n_te = Ze.shape[0]
    n_tr = Zt.shape[0]
    te = _head_grads(Ze, lambda A, R: expit(A) / n_te)
    tr = _head_grads(Zt, lambda A, R: -expit(A) / (R * n_tr))
    gW1 = te[0] + tr[0]
    gb1 = te[1] + tr[1]
    gW = (te[2] + tr[2]).reshape(1, -1)
    gb = te[3] + tr[3]
    return gW1, gb1, gW, gb


class KliepDensityRatio(BaseEstimator):
    """Two-layer density-ratio network with a softplus head.

    Parameters
    ----------
    hidden_dim : int, width of the rectified hidden layer.
    epochs, learning_rate, batch_size : SGD schedule (defaults 10 / 0.01 / 64).
    seed : int, drives initialization and minibatch shuffling; identical
        (data, params, seed) yields bit-identical fitted parameters.

    Attributes (after fit)
    ----------
    W1_, b1_ : hidden layer weights (hidden_dim x input_dim) and bias.
    W_, b_ : ratio head weights (1 x hidden_dim) and scalar bias.
    history_ : per-epoch loss evaluated on the full train/test sets.
    input_dim_ : dimensionality of the ingested embeddings.
    """

    def __init__(self, hidden_dim=32, epochs=10, learning_rate=0.01,
                 batch_size=64, seed=0):
        self.hidden_dim = hidden_dim
        self.epochs = epochs
        self.learning_rate = learning_rate
        self.batch_size = batch_size
        self.seed = seed

    # -- training -----------------------------------------------------------

    def fit(self, X_train, X_test):
        """Fit on embeddings of the train split vs. the test split."""
        config = TrainConfig(self.epochs, self.learning_rate,
                             self.batch_size, self.seed)
        Zt = as_matrix(X_train, "X_train")
        Ze = as_matrix(X_test, "X_test")
        if Zt.shape[0] == 0 or Ze.shape[0] == 0:
            raise EmptySplit("both splits must be non-empty to train")
        if Zt.shape[1] != Ze.shape[1]:
            raise DimensionMismatch(
                f"train dim {Zt.shape[1]} != test dim {Ze.shape[1]}"
            )
        input_dim = Zt.shape[1]
        hidden = int(self.hidden_dim)

        # RNG consumption order is part of the determinism contract:
        # W1 init, then W init, then per-epoch train shuffle, test shuffle.
        rng = np.random.default_rng(config.seed)
        limit1 = 1.0 / np.sqrt(input_dim)
        limit2 = 1.0 / np.sqrt(hidden)
        W1 = rng.uniform(-limit1, limit1, size=(hidden, input_dim))
        b1 = np.zeros(hidden)
        W = rng.uniform(-limit2, limit2, size=(1, hidden))
        b = 0.0

        bs = config.batch_size
        n_tr, n_te = Zt.shape[0], Ze.shape[0]
        lr = config.learning_rate
        history = []
        for _ in range(config.epochs):
            order_tr = rng.permutation(n_tr)
            order_te = rng.permutation(n_te)
            tr_batches = [order_tr[i:i + bs] for i in range(0, n_tr, bs)]
            te_batches = [order_te[i:i + bs] for i in range(0, n_te, bs)]
            # Visit every batch of the larger split once per epoch; the
            # smaller split's batches wrap so each step stays paired.
            steps = max(len(tr_batches), len(te_batches))
            for step in range(steps):
                tb = tr_batches[step % len(tr_batches)]
                eb = te_batches[step % len(te_batches)]
                gW1, gb1, gW, gb = kliep_gradient(W1, b1, W, b, Zt[tb], Ze[eb])
                W1 -= lr * gW1
                b1 -= lr * gb1
                W -= lr * gW
                b -= lr * gb
            _, _, r_tr = forward_pass(W1, b1, W, b, Zt)
            _, _, r_te = forward_pass(W1, b1, W, b, Ze)
            loss = kliep_loss(r_te, r_tr)
            params_finite = all(
                np.all(np.isfinite(p)) for p in (W1, b1, W, np.asarray(b))
            )
            if not np.isfinite(loss) or not params_finite:
                raise DivergedLoss(
                    f"non-finite loss or parameters after epoch {len(history) + 1}"
                )
            history.append(loss)

        self.input_dim_ = input_dim
        self.W1_ = W1
        self.b1_ = b1
        self.W_ = W
        self.b_ = float(b)
        self.history_ = history
        return self

    # -- inference ----------------------------------------------------------

    def forward(self, X):
        """Return ``(D, r)`` for rows of X: hidden activations and ratios."""
        check_fitted(self, "W1_")
        Z = as_matrix(X)
        check_dim(Z, self.input_dim_)
        D, _, R = forward_pass(self.W1_, self.b1_, self.W_, self.b_, Z)
        return D, R

    def transform(self, X):
        """Hidden representation d for each row (the derived latent space)."""
        return self.forward(X)[0]

    def predict_ratio(self, X):
        """Density ratio r for each row; strictly positive."""
        return self.forward(X)[1]

    def head_preactivation(self, X):
        """W d + b per row; ranks instances identically to the ratio."""
        check_fitted(self, "W1_")
        Z = as_matrix(X)
        check_dim(Z, self.input_dim_)
        _, A, _ = forward_pass(self.W1_, self.b1_, self.W_, self.b_, Z)
        return A


def train_dre(store: AnalysisStore, space_name: str,
              config: TrainConfig | None = None, hidden_dim: int = 32):
    """Train the ratio model on a store's named space.

    Returns ``(model, history, dre_space)`` where the "dre" space holds the
    hidden representation of every instance in manifest order.
    """
    config = config or TrainConfig()
    store.require_both_splits()
    space = store.space(space_name)
    vectors = space.vectors.astype(np.float64)
    model = KliepDensityRatio(
        hidden_dim=hidden_dim,
        epochs=config.epochs,
        learning_rate=config.learning_rate,
        batch_size=config.batch_size,
        seed=config.seed,
    )
    model.fit(vectors[store.train_indices], vectors[store.test_indices])
    dre_space = dre_latent(model, space)
    return model, model.history_, dre_space


def dre_latent(model: KliepDensityRatio, space: LatentSpace) -> LatentSpace:
    """Hidden activations of every instance, as a new "dre" latent space."""
    check_fitted(model, "W1_")
    if space.dim != model.input_dim_:
        raise DimensionMismatch(
            f"space dim {space.dim} != model input dim {model.input_dim_}"
        )
    hidden = model.transform(space.vectors.astype(np.float64))
    return LatentSpace("dre", hidden.astype(np.float32))


# -- persistence -------------------------------------------------------------

def save_model(model: KliepDensityRatio, path) -> None:
    """Serialize a fitted model to JSON (matrices row-major)."""
    check_fitted(model, "W1_")
    payload = {
        "input_dim": model.input_dim_,
        "hidden_dim": int(model.hidden_dim),
        "seed": int(model.seed),
        "W1": model.W1_.tolist(),
        "b1": model.b1_.tolist(),
        "W": model.W_.tolist(),
        "b": model.b_,
        "config": {
            "epochs": int(model.epochs),
            "learning_rate": float(model.learning_rate),
            "batch_size": int(model.batch_size),
        },
        "history": model.history_,
    }
    Path(path).write_text(json.dumps(payload) + "\n", encoding="utf-8")


def load_model(path) -> KliepDensityRatio:
    """Rebuild a fitted model; forward outputs match the saved model exactly."""
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    config = payload["config"]
    model = KliepDensityRatio(
        hidden_dim=payload["hidden_dim"],
        epochs=config["epochs"],
        learning_rate=config["learning_rate"],
        batch_size=config["batch_size"],
        seed=payload["seed"],
    )
    model.input_dim_ = payload["input_dim"]
    model.W1_ = np.array(payload["W1"], dtype=np.float64)
    model.b1_ = np.array(payload["b1"], dtype=np.float64)
    model.W_ = np.array(payload["W"], dtype=np.float64)
    model.b_ = float(payload["b"])
    model.history_ = list(payload["history"])
    return model
