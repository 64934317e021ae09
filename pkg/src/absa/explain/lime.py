"""Local surrogate explanations over subword tokens."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from absa.explain._core import (
    Attribution,
    ExplainError,
    evaluate_masks,
    target_name,
    tokenize_for_explanation,
    value_function,
    word_groups,
)


@dataclass(frozen=True)
class LimeExplanation:
    target_class: "str | None"
    attributions: tuple[Attribution, ...]
    intercept: float
    fidelity_r2: float
    n_samples: int
    seed: int
    kernel_width: float
    tokens: tuple[str, ...] = ()
    coefficients: tuple[float, ...] = field(default=(), repr=False)
    fx: float = math.nan

    def weights(self) -> dict[int, float]:
        return {a.position: a.weight for a in self.attributions}

    def to_dict(self) -> dict:
        return {
            "method": "lime",
            "target_class": self.target_class,
            "tokens": [
                {"token": t, "position": i, "weight": w}
                for i, (t, w) in enumerate(zip(self.tokens, self.coefficients))
            ],
            "top": [a.to_dict() for a in self.attributions],
            "words": word_groups(self.tokens, self.coefficients),
            "intercept": self.intercept,
            "fx": self.fx,
            "fidelity_r2": self.fidelity_r2,
            "seed": self.seed,
            "n_samples": self.n_samples,
            "kernel_width": self.kernel_width,
        }


def sample_keep_vectors(m: int, n_samples: int, seed: int) -> np.ndarray:
    """Row 0 is all ones; row i >= 1 comes from its own stream ``(seed, i)``."""
    Z = np.ones((n_samples, m), dtype=np.int8)
    for i in range(1, n_samples):
        rng = np.random.default_rng([seed, i])
        Z[i] = rng.random(m) < 0.5
    return Z


def proximity(Z: np.ndarray, kernel_width: float) -> np.ndarray:
    """exp(-d^2 / sigma^2) with d the fraction of masked tokens."""
    m = Z.shape[1]
    d = 1.0 - Z.sum(axis=1) / m
    return np.exp(-(d**2) / kernel_width**2)


def weighted_ridge(Z: np.ndarray, y: np.ndarray, w: np.ndarray, ridge: float):
    """Minimize sum w (y - b - Z c)^2 + ridge |c|^2; the intercept is not penalized."""
    X = np.hstack([np.ones((Z.shape[0], 1)), Z.astype(float)])
    P = np.eye(X.shape[1]) * ridge
    P[0, 0] = 0.0
    A = X.T @ (w[:, None] * X) + P
    rhs = X.T @ (w * y)
    try:
        beta = np.linalg.solve(A, rhs)
    except np.linalg.LinAlgError:
        beta = np.linalg.lstsq(A, rhs, rcond=None)[0]
    return beta[0], beta[1:]


def weighted_r2(y, yhat, w) -> float:
    ybar = np.sum(w * y) / np.sum(w)
    ss_tot = float(np.sum(w * (y - ybar) ** 2))
    ss_res = float(np.sum(w * (y - yhat) ** 2))
    # a constant target leaves only rounding noise in ss_tot
    tiny = 1e-20 * (float(np.sum(w * y**2)) + 1e-300)
    if ss_tot <= tiny:
        return 1.0 if ss_res <= tiny else 0.0
    return float(min(max(1.0 - ss_res / ss_tot, 0.0), 1.0))


def lime_explain(
    scorer,
    text: str,
    target_class=None,
    *,
    vocab,
    n_samples: int = 1000,
    seed: int = 0,
    kernel_width: float = 0.25,
    top_k: int = 10,
    ridge: float = 1e-3,
    exhaustive: bool = False,
    workers: int = 1,
) -> LimeExplanation:
    """Fit a proximity-weighted ridge surrogate to the target-class probability.

    Each sampled keep-vector keeps every token with probability 1/2; the
    unperturbed text is always the first sample. ``exhaustive=True``
    enumerates all 2**M vectors instead (small M only).
    """
    tokens = tokenize_for_explanation(vocab, text)
    m = len(tokens)
    if m == 0:
        raise ExplainError("nothing to explain: text has no tokens")
    if exhaustive:
        if m > 16:
            raise ExplainError(f"exhaustive LIME needs M <= 16, got {m}")
        Z = np.array(list(itertools.product([1, 0], repeat=m)), dtype=np.int8)
        n_samples = Z.shape[0]
    else:
        if n_samples < m + 2:
            raise ExplainError(f"n_samples must be at least M + 2 = {m + 2}")
        Z = sample_keep_vectors(m, n_samples, seed)

    f = value_function(scorer, target_class)
    y = evaluate_masks(f, tokens, Z, workers)
    w = proximity(Z, kernel_width)
    intercept, coef = weighted_ridge(Z, y, w, ridge)
    yhat = intercept + Z @ coef
    r2 = weighted_r2(y, yhat, w)

    order = sorted(range(m), key=lambda i: (-abs(coef[i]), i))[:top_k]
    attributions = tuple(Attribution(tokens.tokens[i], i, float(coef[i])) for i in order)
    return LimeExplanation(
        target_class=target_name(target_class),
        attributions=attributions,
        intercept=float(intercept),
        fidelity_r2=r2,
        n_samples=int(n_samples),
        seed=seed,
        kernel_width=kernel_width,
        tokens=tokens.tokens,
        coefficients=tuple(float(c) for c in coef),
        fx=float(y[0]),
    )
