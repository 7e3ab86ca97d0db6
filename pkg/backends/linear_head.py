import json
import logging
import os
from dataclasses import asdict, dataclass
from typing import Any, List, Optional, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)

BINARY = "binary"
SOFTMAX = "softmax"


class ModelMissing(FileNotFoundError):
    """Raised when a required model file is absent."""


class FingerprintMismatch(ValueError):
    """Raised when a model's feature order differs from the one the code expects."""


class DegenerateData(ValueError):
    """Raised when training data has too few samples or classes."""


@dataclass(frozen=True)
class HeadHyperParams:
    learning_rate: float = 0.1
    epochs: int = 500
    l2: float = 1e-4
    standardize: bool = True
    shuffle: bool = True


@dataclass
class HeadModel:
    """
    Cabeza lineal: logística (binary) o softmax.
    Para binary, weights es un vector y bias un escalar;
    para softmax, weights es K x D y bias tiene K entradas.
    """

    kind: str
    labels: List[Any]
    weights: Any
    bias: Any
    feature_order: List[str]
    seed: int = 0
    feature_mean: Optional[List[float]] = None
    feature_scale: Optional[List[float]] = None

    # ===============================
    # INFERENCE
    # ===============================

    @property
    def input_dim(self) -> int:
        return len(self.feature_order)

    def _prepare(self, vector: Sequence[float]) -> np.ndarray:
        x = np.asarray(vector, dtype=float)
        if x.shape[-1] != self.input_dim:
            raise ValueError(f"Expected {self.input_dim} features, got {x.shape[-1]}")
        if self.feature_mean is not None:
            x = (x - np.asarray(self.feature_mean)) / np.asarray(self.feature_scale)
        return x

    def logits(self, vector: Sequence[float]):
        x = self._prepare(vector)
        if self.kind == BINARY:
            return float(x @ np.asarray(self.weights, dtype=float) + float(self.bias))
        return np.asarray(self.weights, dtype=float) @ x + np.asarray(self.bias, dtype=float)

    def predict_proba(self, vector: Sequence[float]):
        """binary -> probabilidad de la clase positiva; softmax -> lista por etiqueta."""
        z = self.logits(vector)
        if self.kind == BINARY:
            return float(_sigmoid(np.asarray(z)))
        return [float(p) for p in _softmax(z[None, :])[0]]

    # ===============================
    # PERSISTENCE
    # ===============================

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, data: dict, expected_order: Optional[List[str]] = None) -> "HeadModel":
        model = cls(
            kind=data["kind"],
            labels=list(data["labels"]),
            weights=data["weights"],
            bias=data["bias"],
            feature_order=list(data["feature_order"]),
            seed=data.get("seed", 0),
            feature_mean=data.get("feature_mean"),
            feature_scale=data.get("feature_scale"),
        )
        if expected_order is not None and model.feature_order != list(expected_order):
            raise FingerprintMismatch(
                f"Model feature order ({model.input_dim} features) does not match the expected "
                f"order ({len(expected_order)} features)"
            )
        return model

    def save(self, path: str) -> str:
        write_json(self.to_json(), path)
        return path

    @classmethod
    def load(cls, path: str, expected_order: Optional[List[str]] = None) -> "HeadModel":
        return cls.from_json(read_json(path), expected_order)


# -----------------------------
# JSON helpers
# -----------------------------

def write_json(data: Any, path: str) -> None:
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=2, ensure_ascii=False)
        f.write("\n")


def read_json(path: str) -> Any:
    if not path or not os.path.isfile(path):
        raise ModelMissing(f"Model file not found: {path}")
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


# -----------------------------
# Training
# -----------------------------

def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-z))


def _softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def _standardization(X: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    mean = X.mean(axis=0)
    scale = X.std(axis=0)
    scale[scale == 0] = 1.0
    return mean, scale


def train_head(
    samples: Sequence[Tuple[Sequence[float], Any]],
    hparams: Optional[HeadHyperParams] = None,
    seed: int = 0,
    feature_order: Optional[List[str]] = None,
    kind: str = BINARY,
    labels: Optional[List[Any]] = None,
    history: Optional[List[float]] = None,
) -> HeadModel:
    """
    Regresión logística (binary, etiquetas 0/1) o softmax (etiquetas dadas en `labels`)
    por descenso de gradiente en lote completo, con inicialización a cero.
    Si se pasa `history`, se añade la pérdida regularizada de cada época.
    """
    hparams = hparams or HeadHyperParams()

    if len(samples) < 2:
        raise DegenerateData(f"Need at least 2 samples, got {len(samples)}")

    if kind == BINARY:
        labels = [0, 1]
        y_raw = [int(bool(label)) for _, label in samples]
    else:
        if not labels:
            raise ValueError("softmax heads need an explicit label list")
        index = {label: i for i, label in enumerate(labels)}
        unknown = {label for _, label in samples if label not in index}
        if unknown:
            raise ValueError(f"Unknown labels in training data: {sorted(map(str, unknown))}")
        y_raw = [index[label] for _, label in samples]

    present = set(y_raw)
    if len(present) < len(labels):
        missing = [labels[i] for i in range(len(labels)) if i not in present]
        raise DegenerateData(f"Training data lacks classes: {missing}")

    X = np.asarray([list(v) for v, _ in samples], dtype=float)
    y = np.asarray(y_raw, dtype=int)
    n, d = X.shape

    if feature_order is None:
        feature_order = [f"f{i}" for i in range(d)]
    if len(feature_order) != d:
        raise ValueError(f"feature_order has {len(feature_order)} names for {d} features")

    if hparams.shuffle:
        order = np.random.default_rng(seed).permutation(n)
        X, y = X[order], y[order]

    mean = scale = None
    if hparams.standardize:
        mean, scale = _standardization(X)
        X = (X - mean) / scale

    if kind == BINARY:
        weights, bias = _fit_logistic(X, y, hparams, history)
        weights_out, bias_out = [float(w) for w in weights], float(bias)
    else:
        W, b = _fit_softmax(X, y, len(labels), hparams, history)
        weights_out = [[float(w) for w in row] for row in W]
        bias_out = [float(v) for v in b]

    logger.info(f"Trained {kind} head on {n} samples x {d} features")

    return HeadModel(
        kind=kind,
        labels=list(labels),
        weights=weights_out,
        bias=bias_out,
        feature_order=list(feature_order),
        seed=seed,
        feature_mean=[float(v) for v in mean] if mean is not None else None,
        feature_scale=[float(v) for v in scale] if scale is not None else None,
    )


def _fit_logistic(X, y, hparams: HeadHyperParams, history):
    n, d = X.shape
    w = np.zeros(d)
    b = 0.0
    eps = 1e-12

    for _ in range(hparams.epochs):
        p = _sigmoid(X @ w + b)
        if history is not None:
            ce = -np.mean(y * np.log(p + eps) + (1 - y) * np.log(1 - p + eps))
            history.append(float(ce + 0.5 * hparams.l2 * np.dot(w, w)))

        error = p - y
        grad_w = X.T @ error / n + hparams.l2 * w
        grad_b = error.mean()
        w = w - hparams.learning_rate * grad_w
        b = b - hparams.learning_rate * grad_b

    return w, b


def _fit_softmax(X, y, k: int, hparams: HeadHyperParams, history):
    n, d = X.shape
    W = np.zeros((k, d))
    b = np.zeros(k)
    Y = np.eye(k)[y]
    eps = 1e-12

    for _ in range(hparams.epochs):
        P = _softmax(X @ W.T + b)
        if history is not None:
            ce = -np.mean(np.sum(Y * np.log(P + eps), axis=1))
            history.append(float(ce + 0.5 * hparams.l2 * np.sum(W * W)))

        error = P - Y
        grad_W = error.T @ X / n + hparams.l2 * W
        grad_b = error.mean(axis=0)
        W = W - hparams.learning_rate * grad_W
        b = b - hparams.learning_rate * grad_b

    return W, b
