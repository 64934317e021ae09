"""Sentiment scoring backends.

Two trainable baselines (multinomial naive Bayes and softmax regression)
over binary subword unigram/bigram features, plus an out-of-process
adapter for externally hosted models (see :mod:`absa.adapter`).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol, Sequence, runtime_checkable

import numpy as np

from absa.labels import SENTIMENTS, Sentiment
from absa.subword import SubwordVocab, encode
from absa.textprep import normalize

SIMPLEX_TOL = 1e-9


class BackendError(RuntimeError):
    """A scorer backend failed; the message names the backend."""


class TrainingDivergedError(RuntimeError):
    pass


@dataclass(frozen=True)
class Logits:
    z_neg: float
    z_neu: float
    z_pos: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in self.as_tuple()):
            raise ValueError(f"non-finite logits {self.as_tuple()}")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.z_neg, self.z_neu, self.z_pos)


@dataclass(frozen=True)
class SentimentScores:
    p_neg: float
    p_neu: float
    p_pos: float

    def __post_init__(self):
        vals = self.as_tuple()
        if any(not (0.0 <= v <= 1.0) for v in vals):
            raise ValueError(f"probabilities outside [0, 1]: {vals}")
        if abs(math.fsum(vals) - 1.0) > SIMPLEX_TOL:
            raise ValueError(f"probabilities do not sum to 1: {vals}")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.p_neg, self.p_neu, self.p_pos)

    def as_array(self) -> np.ndarray:
        return np.array(self.as_tuple())

    def __getitem__(self, cls: "Sentiment | int") -> float:
        i = cls.index if isinstance(cls, Sentiment) else int(cls)
        return self.as_tuple()[i]

    @property
    def label(self) -> Sentiment:
        # first maximum wins, so ties resolve Negative < Neutral < Positive
        vals = self.as_tuple()
        return Sentiment.from_index(vals.index(max(vals)))

    @property
    def confidence(self) -> float:
        return max(self.as_tuple())

    @classmethod
    def from_array(cls, arr) -> "SentimentScores":
        a = [float(x) for x in arr]
        s = math.fsum(a)
        if s != 1.0:
            a = [x / s for x in a]
        return cls(*a)


def softmax(logits: "Logits | Sequence[float]") -> SentimentScores:
    """Numerically stable class softmax; ``-inf`` logits get probability 0."""
    z = logits.as_tuple() if isinstance(logits, Logits) else tuple(float(v) for v in logits)
    m = max(z)
    if not math.isfinite(m):
        raise ValueError(f"softmax needs at least one finite logit, got {z}")
    ex = [math.exp(v - m) if v != -math.inf else 0.0 for v in z]
    s = math.fsum(ex)
    return SentimentScores(*(v / s for v in ex))


@runtime_checkable
class ScorerBackend(Protocol):
    name: str

    def score(self, text: str) -> SentimentScores: ...


def score(backend: ScorerBackend, text: str) -> SentimentScores:
    try:
        return backend.score(text)
    except BackendError:
        raise
    except Exception as exc:
        raise BackendError(f"backend {backend.name!r} failed: {exc}") from exc


# -- features ---------------------------------------------------------------


def subword_features(vocab: SubwordVocab, text: str) -> set[str]:
    """Binary unigram and adjacent-bigram features over subword pieces."""
    toks = encode(vocab, normalize(text)).tokens
    feats = set()
    prev = None
    for t in toks:
        if vocab.is_special(t):
            prev = None
            continue
        feats.add("u:" + t)
        if prev is not None:
            feats.add("b:" + prev + " " + t)
        prev = t
    return feats


def _labelled(dataset) -> list:
    return [r for r in dataset if r.gold_sentiment is not None]


def _check_classes(reviews, require_all: bool):
    present = {r.gold_sentiment for r in reviews}
    if not reviews:
        raise ValueError("training set has no labelled reviews")
    missing = [s.value for s in SENTIMENTS if s not in present]
    if missing and require_all:
        raise ValueError(f"training set is missing class(es): {', '.join(missing)}")


# -- naive Bayes -------------------------------------------------------------


@dataclass(eq=False)
class NBModel:
    vocab: SubwordVocab
    features: dict[str, int]
    log_prior: np.ndarray
    log_likelihood: np.ndarray  # (3, n_features)
    alpha: float
    name: str = "nb"

    def log_posterior(self, text: str) -> np.ndarray:
        idx = [self.features[f] for f in subword_features(self.vocab, text) if f in self.features]
        lp = self.log_prior.copy()
        if idx:
            lp = lp + self.log_likelihood[:, sorted(idx)].sum(axis=1)
        return lp

    def score(self, text: str) -> SentimentScores:
        return softmax(self.log_posterior(text))


def train_nb(
    train, vocab: SubwordVocab, alpha: float = 1.0, require_all_classes: bool = True
) -> NBModel:
    """Multinomial naive Bayes over feature-presence counts.

    Classes absent from ``train`` (allowed only with
    ``require_all_classes=False``) get a zero prior.
    """
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    reviews = _labelled(train)
    _check_classes(reviews, require_all_classes)

    docs = [(subword_features(vocab, r.raw_text), r.gold_sentiment.index) for r in reviews]
    names = sorted(set().union(*(d for d, _ in docs)))
    index = {f: i for i, f in enumerate(names)}
    counts = np.zeros((3, len(names)))
    class_n = np.zeros(3)
    for feats, y in docs:
        class_n[y] += 1
        for f in feats:
            counts[y, index[f]] += 1

    with np.errstate(divide="ignore"):
        log_prior = np.log(class_n / class_n.sum())
    denom = counts.sum(axis=1, keepdims=True) + alpha * len(names)
    log_lik = np.log((counts + alpha) / denom)
    return NBModel(vocab, index, log_prior, log_lik, alpha)


# -- softmax regression ------------------------------------------------------


def loss_and_grad(W: np.ndarray, b: np.ndarray, X: np.ndarray, Y: np.ndarray, l2: float):
    """Mean cross-entropy plus ``l2 * ||W||^2`` and its gradient.

    ``W`` is (n_features, 3), ``b`` (3,), ``X`` (n, n_features), ``Y`` one-hot (n, 3).
    """
    Z = X @ W + b
    Z = Z - Z.max(axis=1, keepdims=True)
    logsum = np.log(np.exp(Z).sum(axis=1, keepdims=True))
    logP = Z - logsum
    n = X.shape[0]
    loss = -(Y * logP).sum() / n + l2 * float((W * W).sum())
    G = (np.exp(logP) - Y) / n
    return loss, X.T @ G + 2 * l2 * W, G.sum(axis=0)


@dataclass(eq=False)
class LinearModel:
    vocab: SubwordVocab
    features: dict[str, int]
    W: np.ndarray
    b: np.ndarray
    history: list = field(default_factory=list)
    name: str = "linear"

    def logits(self, text: str) -> np.ndarray:
        idx = [self.features[f] for f in subword_features(self.vocab, text) if f in self.features]
        z = self.b.copy()
        if idx:
            z = z + self.W[sorted(idx)].sum(axis=0)
        return z

    def score(self, text: str) -> SentimentScores:
        return softmax(self.logits(text))


def _design(reviews, vocab, index=None):
    feats = [subword_features(vocab, r.raw_text) for r in reviews]
    if index is None:
        index = {f: i for i, f in enumerate(sorted(set().union(*feats)))}
    X = np.zeros((len(reviews), len(index)))
    for row, fs in enumerate(feats):
        for f in fs:
            j = index.get(f)
            if j is not None:
                X[row, j] = 1.0
    return X, index


def train_linear(
    train,
    vocab: SubwordVocab,
    lr: float = 0.5,
    epochs: int = 30,
    l2: float = 1e-4,
    seed: int = 0,
    batch_size: int = 32,
) -> LinearModel:
    """Softmax regression fitted by seeded mini-batch gradient descent.

    ``history`` holds the full-data objective before training and after
    each epoch.
    """
    if not lr > 0:
        raise ValueError("lr must be positive")
    if epochs < 1:
        raise ValueError("epochs must be >= 1")
    reviews = _labelled(train)
    _check_classes(reviews, True)
    X, index = _design(reviews, vocab)
    Y = np.zeros((len(reviews), 3))
    Y[np.arange(len(reviews)), [r.gold_sentiment.index for r in reviews]] = 1.0

    W = np.zeros((X.shape[1], 3))
    b = np.zeros(3)
    rng = np.random.default_rng(seed)
    history = [loss_and_grad(W, b, X, Y, l2)[0]]
    for epoch in range(epochs):
        order = rng.permutation(len(reviews))
        # overflow is caught below as a non-finite loss
        with np.errstate(over="ignore", invalid="ignore"):
            for start in range(0, len(order), batch_size):
                sel = order[start : start + batch_size]
                _, gW, gb = loss_and_grad(W, b, X[sel], Y[sel], l2)
                W -= lr * gW
                b -= lr * gb
            loss = loss_and_grad(W, b, X, Y, l2)[0]
        if not math.isfinite(loss):
            raise TrainingDivergedError(
                f"loss became {loss} at epoch {epoch + 1}; lower lr (now {lr})"
            )
        history.append(loss)
    return LinearModel(vocab, index, W, b, history)


# -- persistence -------------------------------------------------------------


def save_model(model: "NBModel | LinearModel", path: "str | Path") -> None:
    """JSON dump of a baseline; the tokenizer is stored separately."""
    feats = sorted(model.features, key=model.features.get)
    if isinstance(model, NBModel):
        payload = {
            "kind": "nb",
            "alpha": model.alpha,
            "features": feats,
            "log_prior": [float(v) if math.isfinite(v) else None for v in model.log_prior],
            "log_likelihood": model.log_likelihood.T.tolist(),
        }
    else:
        payload = {
            "kind": "linear",
            "features": feats,
            "W": model.W.tolist(),
            "b": model.b.tolist(),
            "history": model.history,
        }
    Path(path).write_text(json.dumps(payload, ensure_ascii=False), encoding="utf-8")


def load_model(path: "str | Path", vocab: SubwordVocab) -> "NBModel | LinearModel":
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    index = {f: i for i, f in enumerate(payload["features"])}
    if payload["kind"] == "nb":
        prior = np.array([-math.inf if v is None else v for v in payload["log_prior"]])
        lik = np.array(payload["log_likelihood"]).reshape(len(index), 3).T
        return NBModel(vocab, index, prior, lik, payload["alpha"])
    if payload["kind"] == "linear":
        W = np.array(payload["W"]).reshape(len(index), 3)
        return LinearModel(vocab, index, W, np.array(payload["b"]), payload.get("history", []))
    raise ValueError(f"{path}: unknown model kind {payload['kind']!r}")


def majority_accuracy(dataset) -> float:
    labels = [r.gold_sentiment for r in _labelled(dataset)]
    if not labels:
        return 0.0
    return max(labels.count(s) for s in SENTIMENTS) / len(labels)


def accuracy(backend: ScorerBackend, dataset) -> float:
    reviews = _labelled(dataset)
    hits = sum(score(backend, r.raw_text).label == r.gold_sentiment for r in reviews)
    return hits / len(reviews) if reviews else 0.0


def external_score(endpoint, text: str) -> SentimentScores:
    """One-shot call to an out-of-process scorer (see :mod:`absa.adapter`)."""
    from absa.adapter import AdapterConfig, ExternalScorer

    cfg = endpoint if isinstance(endpoint, AdapterConfig) else AdapterConfig.parse(endpoint)
    with ExternalScorer(cfg) as scorer:
        return scorer.score(text)


__all__ = [
    "BackendError",
    "LinearModel",
    "Logits",
    "NBModel",
    "ScorerBackend",
    "SentimentScores",
    "TrainingDivergedError",
    "accuracy",
    "external_score",
    "load_model",
    "loss_and_grad",
    "majority_accuracy",
    "save_model",
    "score",
    "softmax",
    "subword_features",
    "train_linear",
    "train_nb",
]
