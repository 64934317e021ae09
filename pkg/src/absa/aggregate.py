"""Relevance-weighted fusion of clause sentiment and polarity banding.

Each clause carries a class distribution (the softmax of the backend's
logits, after lexicon correction) and the relevance of the aspect it was
assigned to. An aspect's fused distribution is the relevance-weighted
mean of its clauses' distributions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from absa.aspect import AspectScores
from absa.classify import SentimentScores
from absa.labels import NAMED_ASPECTS, SENTIMENTS, AspectLabel, Sentiment
from absa.textprep import Clause

NEUTRAL_LOW = 0.40
NEUTRAL_HIGH = 0.60


@dataclass(frozen=True)
class ClauseSentiment:
    clause: Clause
    scores: SentimentScores
    aspect: AspectLabel
    relevance: float
    aspect_scores: Optional[AspectScores] = None
    lexicon_score: float = 0.0

    @property
    def confidence(self) -> float:
        return self.scores.confidence


@dataclass(frozen=True)
class AspectAggregate:
    aspect: AspectLabel
    scores: SentimentScores
    polarity_index: float
    label: Sentiment
    lean: Optional[Sentiment]
    support: int


def fuse(distributions: Sequence[SentimentScores], weights: Sequence[float]) -> SentimentScores:
    """Weighted mean of distributions; falls back to equal weights if all are 0."""
    if not distributions:
        raise ValueError("nothing to fuse")
    w = [float(x) for x in weights]
    if any(x < 0 or not math.isfinite(x) for x in w):
        raise ValueError(f"weights must be finite and non-negative: {w}")
    if len(distributions) == 1:
        return distributions[0]
    total = math.fsum(w)
    if total == 0:
        w = [1.0] * len(w)
        total = float(len(w))
    comps = [
        math.fsum(wi * d.as_tuple()[k] for wi, d in zip(w, distributions)) / total
        for k in range(3)
    ]
    # clip rounding drift so the triple stays inside the simplex
    s = math.fsum(comps)
    return SentimentScores(*(min(max(c / s, 0.0), 1.0) for c in comps))


def polarity_index(scores: SentimentScores) -> float:
    return scores.p_pos + 0.5 * scores.p_neu


def label_from_index(
    index: float, low: float = NEUTRAL_LOW, high: float = NEUTRAL_HIGH
) -> tuple[Sentiment, Optional[Sentiment]]:
    """Map a polarity index to (label, lean); the neutral band is inclusive."""
    if not 0.0 <= index <= 1.0:
        raise ValueError(f"polarity index {index} outside [0, 1]")
    if index < low:
        return Sentiment.NEGATIVE, None
    if index > high:
        return Sentiment.POSITIVE, None
    if index > 0.5:
        return Sentiment.NEUTRAL, Sentiment.POSITIVE
    if index < 0.5:
        return Sentiment.NEUTRAL, Sentiment.NEGATIVE
    return Sentiment.NEUTRAL, None


def aggregate_clauses(
    items: Sequence[ClauseSentiment], low: float = NEUTRAL_LOW, high: float = NEUTRAL_HIGH
) -> AspectAggregate:
    if not items:
        raise ValueError("cannot aggregate an empty clause list")
    aspects = {c.aspect for c in items}
    if len(aspects) != 1:
        raise ValueError(f"clauses span several aspects: {sorted(a.value for a in aspects)}")
    fused = fuse([c.scores for c in items], [c.relevance for c in items])
    idx = polarity_index(fused)
    label, lean = label_from_index(min(max(idx, 0.0), 1.0), low, high)
    return AspectAggregate(items[0].aspect, fused, idx, label, lean, len(items))


@dataclass(frozen=True)
class AspectSummary:
    aspect: AspectLabel
    label_distribution: dict  # Sentiment value -> fraction
    mean_polarity_index: float
    support: int


def aggregate_corpus(per_review: Iterable[Sequence[AspectAggregate]]) -> dict[AspectLabel, AspectSummary]:
    """Roll per-review aspect aggregates up to corpus level.

    Keys follow enum order (named aspects, then General if present).
    """
    buckets: dict[AspectLabel, list[AspectAggregate]] = {}
    for aggs in per_review:
        for agg in aggs:
            buckets.setdefault(agg.aspect, []).append(agg)
    out = {}
    for aspect in list(NAMED_ASPECTS) + [AspectLabel.GENERAL]:
        aggs = buckets.get(aspect)
        if not aggs:
            continue
        n = len(aggs)
        dist = {s.value: sum(a.label is s for a in aggs) / n for s in SENTIMENTS}
        mean_idx = math.fsum(a.polarity_index for a in aggs) / n
        out[aspect] = AspectSummary(aspect, dist, mean_idx, n)
    return out
