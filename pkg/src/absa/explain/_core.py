from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from absa.labels import Sentiment
from absa.subword import MARKER, MASK, SubwordVocab, TokenizedText, encode, join_pieces
from absa.textprep import normalize


class ExplainError(ValueError):
    pass


@dataclass(frozen=True)
class Attribution:
    token: str
    position: int
    weight: float

    def to_dict(self) -> dict:
        return {"token": self.token, "position": self.position, "weight": self.weight}


def perturb(tokens: TokenizedText | Sequence[str], keep) -> str:
    """Replace tokens with ``keep == 0`` by the mask piece and join.

    A masked word-initial piece keeps its boundary marker so the word
    structure (and therefore the token count) survives re-encoding.
    """
    toks = tokens.tokens if isinstance(tokens, TokenizedText) else tuple(tokens)
    keep = np.asarray(keep).astype(bool).ravel()
    if keep.shape[0] != len(toks):
        raise ExplainError(f"keep vector has length {keep.shape[0]}, expected {len(toks)}")
    out = []
    for t, k in zip(toks, keep):
        if k:
            out.append(t)
        else:
            out.append(MARKER + MASK if t.startswith(MARKER) else MASK)
    return join_pieces(out)


def tokenize_for_explanation(vocab: SubwordVocab, text: str) -> TokenizedText:
    return encode(vocab, normalize(text))


def value_function(scorer, target: "Sentiment | int | None") -> Callable[[str], float]:
    """Wrap a backend or callable into ``text -> probability of target``.

    Callables may return a :class:`SentimentScores`, a length-3 sequence,
    or a bare float (taken as the target probability already).
    """
    fn = scorer.score if hasattr(scorer, "score") else scorer
    idx = None if target is None else (target.index if isinstance(target, Sentiment) else int(target))

    def f(text: str) -> float:
        out = fn(text)
        if isinstance(out, (float, int, np.floating)):
            return float(out)
        if hasattr(out, "as_tuple"):
            out = out.as_tuple()
        if idx is None:
            raise ExplainError("target_class is required for multi-class scorers")
        return float(out[idx])

    return f


def evaluate_masks(
    f: Callable[[str], float], tokens: TokenizedText, masks: np.ndarray, workers: int = 1
) -> np.ndarray:
    """Evaluate ``f`` on each perturbed text; duplicates are scored once.

    Results are placed by position, so the output does not depend on
    ``workers``.
    """
    texts = [perturb(tokens, m) for m in masks]
    uniq = sorted(set(texts))
    if workers > 1 and len(uniq) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            vals = list(pool.map(f, uniq))
    else:
        vals = [f(t) for t in uniq]
    lookup = dict(zip(uniq, vals))
    return np.array([lookup[t] for t in texts], dtype=float)


def word_groups(tokens: Sequence[str], weights: Sequence[float]) -> list[dict]:
    """Sum subword attributions per whitespace word."""
    groups: list[dict] = []
    for pos, (t, w) in enumerate(zip(tokens, weights)):
        if t.startswith(MARKER) or not groups:
            groups.append({"word": t.removeprefix(MARKER), "positions": [pos], "weight": float(w)})
        else:
            groups[-1]["word"] += t
            groups[-1]["positions"].append(pos)
            groups[-1]["weight"] += float(w)
    return groups


def target_name(target) -> "str | None":
    if target is None:
        return None
    if isinstance(target, Sentiment):
        return target.value
    return Sentiment.from_index(int(target)).value
