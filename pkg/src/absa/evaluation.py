"""Confusion matrices, classification metrics and backend comparison tables."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from absa.classify import score
from absa.labels import SENTIMENTS, Sentiment
from absa.lexicon import Lexicon, apply_correction, lexicon_score, match_phrases
from absa.textprep import normalize, words

ZERO_DIVISION = "0/0 := 0 for precision, recall and F1"


@dataclass(frozen=True)
class ConfusionMatrix:
    """Rows are gold labels, columns predictions, both in Negative/Neutral/Positive order."""

    counts: np.ndarray

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def to_list(self) -> list[list[int]]:
        return self.counts.astype(int).tolist()


@dataclass(frozen=True)
class MetricsReport:
    accuracy: float
    precision: dict
    recall: dict
    f1: dict
    macro_f1: float
    n: int

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "macro_f1": self.macro_f1,
            "n": self.n,
            "zero_division": ZERO_DIVISION,
        }


def confusion(golds: Sequence, preds: Sequence) -> ConfusionMatrix:
    if len(golds) != len(preds):
        raise ValueError(f"length mismatch: {len(golds)} gold vs {len(preds)} predicted")
    if not golds:
        raise ValueError("cannot build a confusion matrix from no examples")
    cm = np.zeros((3, 3), dtype=np.int64)
    for g, p in zip(golds, preds):
        cm[Sentiment.parse(g).index, Sentiment.parse(p).index] += 1
    return ConfusionMatrix(cm)


def _div(a: float, b: float) -> float:
    return a / b if b else 0.0


def metrics(cm: ConfusionMatrix) -> MetricsReport:
    c = cm.counts
    total = c.sum()
    if total <= 0:
        raise ValueError("empty confusion matrix")
    prec, rec, f1 = {}, {}, {}
    for s in SENTIMENTS:
        i = s.index
        tp = float(c[i, i])
        p = _div(tp, float(c[:, i].sum()))
        r = _div(tp, float(c[i, :].sum()))
        prec[s.value], rec[s.value] = p, r
        f1[s.value] = _div(2 * p * r, p + r)
    return MetricsReport(
        accuracy=float(np.trace(c)) / float(total),
        precision=prec,
        recall=rec,
        f1=f1,
        macro_f1=sum(f1.values()) / 3,
        n=int(total),
    )


def predict(backend, text: str, lexicon: Optional[Lexicon] = None, beta: float = 1.0) -> Sentiment:
    """Whole-text prediction, optionally lexicon-corrected."""
    s = score(backend, text)
    if lexicon is not None:
        L = lexicon_score(match_phrases(lexicon, words(normalize(text))))
        s = apply_correction(s, L, beta)
    return s.label


@dataclass(frozen=True)
class ComparisonRow:
    backend: str
    lexicon: bool
    accuracy: Optional[float]
    macro_f1: Optional[float]
    n: int
    error: Optional[str] = None

    def to_dict(self) -> dict:
        d = {
            "backend": self.backend,
            "lexicon": self.lexicon,
            "accuracy": self.accuracy,
            "macro_f1": self.macro_f1,
            "n": self.n,
        }
        if self.error is not None:
            d["error"] = self.error
        return d


@dataclass(frozen=True)
class ComparisonTable:
    rows: tuple[ComparisonRow, ...]

    def to_json(self) -> str:
        return json.dumps([r.to_dict() for r in self.rows], ensure_ascii=False, indent=2)

    def to_text(self) -> str:
        header = ("Model", "Lexicon", "Accuracy (%)", "Macro-F1", "n")
        body = []
        for r in self.rows:
            if r.error is not None:
                body.append((r.backend, "on" if r.lexicon else "off", "error", r.error, str(r.n)))
            else:
                body.append(
                    (r.backend, "on" if r.lexicon else "off", f"{100 * r.accuracy:.1f}",
                     f"{r.macro_f1:.3f}", str(r.n))
                )
        widths = [max(len(x) for x in col) for col in zip(header, *body)]
        fmt = "  ".join(f"{{:<{w}}}" for w in widths)
        lines = [fmt.format(*header), fmt.format(*("-" * w for w in widths))]
        lines += [fmt.format(*row) for row in body]
        return "\n".join(lines)


def compare_backends(
    backends: Sequence,
    test,
    lexicon: Optional[Lexicon] = None,
    lexicon_settings: Sequence[bool] = (False, True),
    beta: float = 1.0,
) -> ComparisonTable:
    """One row per (backend, lexicon on/off); a failing backend only spoils its own row.

    ``backends`` holds scorer objects or ``(backend, [settings])`` pairs.
    """
    reviews = [r for r in test if r.gold_sentiment is not None]
    if backends and not reviews:
        raise ValueError("test set has no gold sentiment labels")
    rows = []
    for item in backends:
        backend, settings = item if isinstance(item, tuple) else (item, lexicon_settings)
        for use_lex in settings:
            if use_lex and lexicon is None:
                continue
            try:
                preds = [
                    predict(backend, r.raw_text, lexicon if use_lex else None, beta)
                    for r in reviews
                ]
                m = metrics(confusion([r.gold_sentiment for r in reviews], preds))
                rows.append(ComparisonRow(backend.name, use_lex, m.accuracy, m.macro_f1, m.n))
            except Exception as exc:  # recorded in-row; other rows continue
                rows.append(ComparisonRow(backend.name, use_lex, None, None, len(reviews), str(exc)))
    return ComparisonTable(tuple(rows))


BETA_GRID = (0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0)


def tune_beta(backend, dev, lexicon: Lexicon, grid: Sequence[float] = BETA_GRID) -> tuple[float, dict]:
    """Pick the correction strength with the best dev accuracy; ties go to the smaller beta.

    Returns ``(beta, {beta: accuracy})``.
    """
    reviews = [r for r in dev if r.gold_sentiment is not None]
    if not reviews:
        raise ValueError("dev set has no gold sentiment labels")
    if not grid or any(b < 0 for b in grid):
        raise ValueError("beta grid must be non-empty and non-negative")
    raw = [(score(backend, r.raw_text), lexicon_score(match_phrases(lexicon, words(normalize(r.raw_text)))))
           for r in reviews]
    acc = {}
    for beta in sorted(set(grid)):
        hits = sum(apply_correction(s, L, beta).label is r.gold_sentiment for (s, L), r in zip(raw, reviews))
        acc[beta] = hits / len(reviews)
    best = max(acc, key=lambda b: (acc[b], -b))
    return best, acc
