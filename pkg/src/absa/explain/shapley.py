"""Shapley attributions over subword tokens with mask-piece perturbation.

The game is v(S) = f(text with every token outside S masked). The
baseline f(all masked) is ``base_value`` and efficiency gives
``base_value + sum(phi) == f(x)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

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

MAX_EXACT_TOKENS = 12


@dataclass(frozen=True)
class ShapExplanation:
    target_class: "str | None"
    base_value: float
    fx: float
    phi: tuple[float, ...]
    additivity_residual: float
    method: str  # "exact" or "kernel"
    tokens: tuple[str, ...] = ()
    n_samples: Optional[int] = None
    seed: Optional[int] = None
    n_evaluations: int = field(default=0, compare=False)

    @property
    def attributions(self) -> tuple[Attribution, ...]:
        return tuple(Attribution(t, i, p) for i, (t, p) in enumerate(zip(self.tokens, self.phi)))

    def to_dict(self) -> dict:
        return {
            "method": f"shap-{self.method}",
            "target_class": self.target_class,
            "tokens": [a.to_dict() for a in self.attributions],
            "words": word_groups(self.tokens, self.phi),
            "base_value": self.base_value,
            "fx": self.fx,
            "additivity_residual": self.additivity_residual,
            "seed": self.seed,
            "n_samples": self.n_samples,
        }


def _all_masks(m: int) -> np.ndarray:
    ids = np.arange(1 << m)
    return ((ids[:, None] >> np.arange(m)) & 1).astype(np.int8)


def shapley_from_table(values: np.ndarray, m: int) -> np.ndarray:
    """Exact Shapley values from ``values[mask]`` for every bitmask.

    phi_i = sum over S without i of |S|!(M-|S|-1)!/M! * (v(S+i) - v(S)).
    """
    ids = np.arange(1 << m)
    sizes = np.array([bin(i).count("1") for i in ids])
    weight = np.array(
        [math.factorial(s) * math.factorial(m - s - 1) / math.factorial(m) for s in range(m)]
    )
    phi = np.zeros(m)
    for i in range(m):
        without = ids[(ids >> i) & 1 == 0]
        gains = values[without | (1 << i)] - values[without]
        phi[i] = math.fsum(weight[sizes[without]] * gains)
    return phi


def shap_exact(
    scorer,
    text: str,
    target_class=None,
    *,
    vocab,
    max_tokens: int = MAX_EXACT_TOKENS,
    workers: int = 1,
) -> ShapExplanation:
    """Enumerate all 2**M coalitions. Refuses M > ``max_tokens``."""
    tokens = tokenize_for_explanation(vocab, text)
    m = len(tokens)
    if m == 0:
        raise ExplainError("nothing to explain: text has no tokens")
    if m > max_tokens:
        raise ExplainError(
            f"text has {m} tokens; exact Shapley enumeration is limited to "
            f"{max_tokens}; use shap-kernel (shap_kernel) instead"
        )
    f = value_function(scorer, target_class)
    masks = _all_masks(m)
    values = evaluate_masks(f, tokens, masks, workers)
    phi = shapley_from_table(values, m)
    base, fx = float(values[0]), float(values[-1])
    resid = base + math.fsum(phi) - fx
    return ShapExplanation(
        target_name(target_class), base, fx, tuple(float(p) for p in phi), resid, "exact",
        tokens.tokens, n_evaluations=len(masks),
    )


def kernel_size_distribution(m: int) -> np.ndarray:
    """P(size = s) for s = 1..M-1, proportional to C(M,s) * kernel(s).

    With kernel(s) = (M-1) / (C(M,s) s (M-s)) this is proportional to
    1 / (s (M-s)).
    """
    s = np.arange(1, m)
    p = (m - 1) / (s * (m - s))
    return p / p.sum()


def sample_coalitions(m: int, n_samples: int, seed: int) -> np.ndarray:
    """Row i is drawn from its own stream ``(seed, i)``: a size from the
    Shapley-kernel size distribution, then a uniform subset of that size."""
    probs = kernel_size_distribution(m)
    sizes = np.arange(1, m)
    Z = np.zeros((n_samples, m), dtype=np.int8)
    for i in range(n_samples):
        rng = np.random.default_rng([seed, i])
        s = rng.choice(sizes, p=probs)
        Z[i, rng.choice(m, size=s, replace=False)] = 1
    return Z


def constrained_kernel_fit(Z: np.ndarray, y: np.ndarray, base: float, fx: float) -> np.ndarray:
    """Least squares of ``y - base`` on ``Z`` subject to ``sum(phi) = fx - base``.

    The constraint is eliminated by substituting the last coefficient, so
    it holds exactly (up to float rounding) whatever the sample.
    """
    delta = fx - base
    m = Z.shape[1]
    Zf = Z.astype(float)
    A = Zf[:, :-1] - Zf[:, [-1]]
    b = (y - base) - Zf[:, -1] * delta
    head = np.linalg.lstsq(A, b, rcond=None)[0]
    return np.append(head, delta - math.fsum(head)) if m > 1 else np.array([delta])


def shap_kernel(
    scorer,
    text: str,
    target_class=None,
    *,
    vocab,
    n_samples: int = 4000,
    seed: int = 0,
    workers: int = 1,
) -> ShapExplanation:
    """Kernel SHAP with coalitions sampled from the Shapley kernel."""
    tokens = tokenize_for_explanation(vocab, text)
    m = len(tokens)
    if m < 2:
        raise ExplainError(f"kernel Shapley needs at least 2 tokens, got {m}; use shap_exact")
    if n_samples < 2 * m:
        raise ExplainError(f"n_samples must be at least 2M = {2 * m}")
    f = value_function(scorer, target_class)
    ends = np.array([np.zeros(m), np.ones(m)], dtype=np.int8)
    base, fx = evaluate_masks(f, tokens, ends, workers)
    Z = sample_coalitions(m, n_samples, seed)
    y = evaluate_masks(f, tokens, Z, workers)
    phi = constrained_kernel_fit(Z, y, float(base), float(fx))
    resid = float(base) + math.fsum(phi) - float(fx)
    return ShapExplanation(
        target_name(target_class), float(base), float(fx), tuple(float(p) for p in phi),
        resid, "kernel", tokens.tokens, n_samples, seed, n_evaluations=n_samples + 2,
    )
