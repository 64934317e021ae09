"""Seed-keyword aspect relevance for clauses."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from absa.labels import NAMED_ASPECTS, AspectLabel
from absa.lexicon import PhraseMatcher, parse_phrase
from absa.textprep import normalize, words

DEFAULT_THRESHOLD = 0.3


class AspectSeedError(ValueError):
    pass


@dataclass(frozen=True)
class AspectScores:
    """Softmax relevance over the five named aspects (enum order)."""

    relevance: tuple[float, ...]

    def __post_init__(self):
        if len(self.relevance) != len(NAMED_ASPECTS):
            raise ValueError("relevance needs one value per named aspect")
        if abs(math.fsum(self.relevance) - 1.0) > 1e-9 or min(self.relevance) < 0:
            raise ValueError(f"relevance is not a simplex: {self.relevance}")

    def __getitem__(self, aspect: AspectLabel) -> float:
        return self.relevance[NAMED_ASPECTS.index(aspect)]

    def as_dict(self) -> dict[str, float]:
        return {a.value: r for a, r in zip(NAMED_ASPECTS, self.relevance)}


class AspectSeeds:
    """Per-aspect keyword phrases, each matched leftmost-longest on its own."""

    def __init__(self, keywords: Mapping[AspectLabel, Iterable[tuple[str, ...]]]):
        self.keywords: dict[AspectLabel, tuple[tuple[str, ...], ...]] = {}
        for aspect in NAMED_ASPECTS:
            kws = tuple(sorted(set(keywords.get(aspect, ()))))
            if not kws:
                raise AspectSeedError(f"no seed keywords for aspect {aspect.value}")
            self.keywords[aspect] = kws
        self._matchers = {
            a: PhraseMatcher((kw, kw) for kw in kws) for a, kws in self.keywords.items()
        }

    def all_keywords(self) -> set[tuple[str, ...]]:
        return {kw for kws in self.keywords.values() for kw in kws}

    def matches(self, aspect: AspectLabel, tokens: Sequence[str]) -> list[tuple[str, ...]]:
        return [kw for _, _, kw in self._matchers[aspect].find(tokens)]


def load_aspect_seeds(path: "str | Path") -> AspectSeeds:
    """Read ``aspect<TAB>keyword`` lines; ``#`` comments allowed."""
    path = Path(path)
    table: dict[AspectLabel, list] = {}
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n\r")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) != 2:
                raise AspectSeedError(f"{path}:{lineno}: expected aspect<TAB>keyword")
            try:
                aspect = AspectLabel.parse(cols[0])
            except ValueError as exc:
                raise AspectSeedError(f"{path}:{lineno}: {exc}") from None
            if aspect is AspectLabel.GENERAL:
                raise AspectSeedError(f"{path}:{lineno}: General takes no keywords")
            kw = parse_phrase(cols[1])
            if not kw:
                raise AspectSeedError(f"{path}:{lineno}: empty keyword")
            table.setdefault(aspect, []).append(kw)
    try:
        return AspectSeeds(table)
    except AspectSeedError as exc:
        raise AspectSeedError(f"{path}: {exc}") from None


@dataclass(frozen=True)
class IdfTable:
    idf: dict
    n_docs: int

    def __call__(self, keyword: tuple[str, ...]) -> float:
        v = self.idf.get(keyword)
        if v is None:
            return math.log(1 + self.n_docs) + 1.0
        return v


def _contains(tokens: Sequence[str], phrase: tuple[str, ...]) -> bool:
    k = len(phrase)
    return any(tuple(tokens[i : i + k]) == phrase for i in range(len(tokens) - k + 1))


def build_idf(texts: Iterable[str], seeds: AspectSeeds) -> IdfTable:
    """Smoothed idf ``ln((1+N)/(1+df)) + 1`` for every seed keyword."""
    docs = [words(normalize(t)) for t in texts]
    n = len(docs)
    idf = {}
    for kw in seeds.all_keywords():
        df = sum(_contains(d, kw) for d in docs)
        idf[kw] = math.log((1 + n) / (1 + df)) + 1.0
    return IdfTable(idf, n)


def score_aspects(tokens: Sequence[str], seeds: AspectSeeds, idf: IdfTable) -> AspectScores:
    """Softmax of summed keyword idf per aspect; uniform when nothing matches."""
    raw = [math.fsum(idf(kw) for kw in seeds.matches(a, tokens)) for a in NAMED_ASPECTS]
    if not any(raw):
        n = len(NAMED_ASPECTS)
        return AspectScores((1.0 / n,) * n)
    m = max(raw)
    ex = [math.exp(r - m) for r in raw]
    s = math.fsum(ex)
    rel = [e / s for e in ex]
    return AspectScores(tuple(rel))


def assign_aspect(scores: AspectScores, threshold: float = DEFAULT_THRESHOLD) -> AspectLabel:
    """Argmax aspect, or General when its relevance is below ``threshold``."""
    if not 0 < threshold < 1:
        raise ValueError(f"threshold must be in (0, 1), got {threshold}")
    best = max(scores.relevance)
    if best < threshold:
        return AspectLabel.GENERAL
    return NAMED_ASPECTS[scores.relevance.index(best)]
