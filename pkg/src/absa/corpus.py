"""Labelled review datasets: loading, variant detection, splitting, augmentation."""

from __future__ import annotations

import csv
import json
import math
import random
from collections import Counter
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Iterator, Optional, Sequence

from absa.labels import NAMED_ASPECTS, SENTIMENTS, AspectLabel, Sentiment, Variant
from absa.lexicon import Lexicon, lexicon_score, match_phrases
from absa.textprep import is_latin_letter, is_sinhala, normalize, word_spans

FIELDS = ("id", "text", "variant", "aspect", "sentiment")


class CorpusError(ValueError):
    pass


@dataclass(frozen=True)
class Review:
    id: str
    raw_text: str
    variant: Variant = Variant.UNKNOWN
    gold_aspect: Optional[AspectLabel] = None
    gold_sentiment: Optional[Sentiment] = None
    source: str = ""

    def to_record(self) -> dict:
        rec = {"id": self.id, "text": self.raw_text, "variant": self.variant.value}
        if self.gold_aspect is not None:
            rec["aspect"] = self.gold_aspect.value
        if self.gold_sentiment is not None:
            rec["sentiment"] = self.gold_sentiment.value
        return rec


@dataclass(frozen=True)
class DatasetStats:
    total: int
    by_sentiment: dict
    by_aspect: dict
    by_variant: dict

    @classmethod
    def of(cls, reviews: Sequence[Review]) -> "DatasetStats":
        # unlabelled reviews are counted under None so each dimension sums to total
        sent = Counter(r.gold_sentiment for r in reviews)
        asp = Counter(r.gold_aspect for r in reviews)
        var = Counter(r.variant for r in reviews)
        return cls(len(reviews), dict(sent), dict(asp), dict(var))

    def __add__(self, other: "DatasetStats") -> "DatasetStats":
        def add(a, b):
            out = Counter(a)
            out.update(b)
            return dict(out)

        return DatasetStats(
            self.total + other.total,
            add(self.by_sentiment, other.by_sentiment),
            add(self.by_aspect, other.by_aspect),
            add(self.by_variant, other.by_variant),
        )

    def sentiment_counts(self) -> dict[str, int]:
        return {s.value: self.by_sentiment.get(s, 0) for s in SENTIMENTS}

    def describe(self) -> str:
        rows = [f"total: {self.total}"]
        rows.append("sentiment: " + ", ".join(f"{k}={v}" for k, v in self.sentiment_counts().items()))
        rows.append(
            "aspect: "
            + ", ".join(f"{a.value}={self.by_aspect.get(a, 0)}" for a in NAMED_ASPECTS)
        )
        rows.append(
            "variant: "
            + ", ".join(f"{v.value}={self.by_variant.get(v, 0)}" for v in Variant if v in self.by_variant)
        )
        return "\n".join(rows)


@dataclass(frozen=True)
class Dataset:
    reviews: tuple[Review, ...] = ()
    stats: DatasetStats = field(init=False)

    def __post_init__(self):
        seen = set()
        for r in self.reviews:
            if r.id in seen:
                raise CorpusError(f"duplicate review id {r.id!r}")
            seen.add(r.id)
        object.__setattr__(self, "stats", DatasetStats.of(self.reviews))

    def __len__(self) -> int:
        return len(self.reviews)

    def __iter__(self) -> Iterator[Review]:
        return iter(self.reviews)

    def __getitem__(self, i):
        return self.reviews[i]

    def filter(self, pred) -> "Dataset":
        return Dataset(tuple(r for r in self.reviews if pred(r)))

    def save_jsonl(self, path: "str | Path") -> None:
        with Path(path).open("w", encoding="utf-8") as fh:
            for r in self.reviews:
                fh.write(json.dumps(r.to_record(), ensure_ascii=False) + "\n")


def _parse_record(rec: dict, where: str, hints: Optional[Lexicon]) -> Review:
    if not isinstance(rec, dict):
        raise CorpusError(f"{where}: record must be an object")
    rid = rec.get("id")
    text = rec.get("text")
    if not isinstance(rid, str) or not rid:
        raise CorpusError(f"{where}: missing or non-string id")
    if not isinstance(text, str) or not text.strip():
        raise CorpusError(f"{where}: empty or missing text for id {rid!r}")
    try:
        if rec.get("variant"):
            variant = Variant.parse(rec["variant"])
        elif hints is not None:
            variant = detect_variant(text, hints)
        else:
            variant = Variant.UNKNOWN
        aspect = AspectLabel.parse(rec["aspect"]) if rec.get("aspect") else None
        sentiment = Sentiment.parse(rec["sentiment"]) if rec.get("sentiment") else None
    except ValueError as exc:
        raise CorpusError(f"{where}: {exc}") from None
    return Review(rid, text, variant, aspect, sentiment, source=str(rec.get("source", "")))


def load_corpus(
    path: "str | Path", format: Optional[str] = None, hints: Optional[Lexicon] = None
) -> Dataset:
    """Read a JSONL or CSV review file (fields: id, text, variant, aspect, sentiment).

    ``format`` defaults to the file extension. Records without a variant
    are classified with :func:`detect_variant` when ``hints`` is given.
    """
    path = Path(path)
    fmt = (format or path.suffix.lstrip(".")).lower()
    reviews: list[Review] = []
    ids: set[str] = set()

    def add(rec, where):
        r = _parse_record(rec, where, hints)
        if r.id in ids:
            raise CorpusError(f"{where}: duplicate id {r.id!r}")
        ids.add(r.id)
        reviews.append(r)

    if fmt == "jsonl":
        with path.open(encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                try:
                    rec = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise CorpusError(f"{path}:{lineno}: malformed JSON ({exc.msg})") from None
                add(rec, f"{path}:{lineno}")
    elif fmt == "csv":
        with path.open(encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None:
                return Dataset(())
            missing = {"id", "text"} - set(reader.fieldnames)
            if missing:
                raise CorpusError(f"{path}:1: header lacks column(s) {sorted(missing)}")
            for rec in reader:
                if None in rec:
                    raise CorpusError(f"{path}:{reader.line_num}: too many fields")
                add(rec, f"{path}:{reader.line_num}")
    else:
        raise CorpusError(f"{path}: unsupported corpus format {fmt!r}")
    return Dataset(tuple(reviews))


def detect_variant(text: str, romanized_hints: Optional[Lexicon] = None) -> Variant:
    """Script-based language variant.

    Sinhala script only -> Sinhala; both scripts -> CodeMixed; Latin only
    -> Singlish when a romanized-Sinhala hint phrase matches, else English.
    """
    has_sinhala = has_latin = False
    for ch in text:
        if is_sinhala(ch):
            has_sinhala = True
        elif is_latin_letter(ch):
            has_latin = True
    if has_sinhala and has_latin:
        return Variant.CODEMIXED
    if has_sinhala:
        return Variant.SINHALA
    if has_latin:
        if romanized_hints is not None and match_phrases(
            romanized_hints, [w for w, _, _ in word_spans(normalize(text).text)]
        ):
            return Variant.SINGLISH
        return Variant.ENGLISH
    return Variant.UNKNOWN


def _allocate(n: int, ratios: Sequence[float]) -> list[int]:
    # largest remainder, ties to the earlier split
    raw = [n * r for r in ratios]
    base = [math.floor(x) for x in raw]
    rest = n - sum(base)
    order = sorted(range(len(ratios)), key=lambda i: (-(raw[i] - base[i]), i))
    for i in order[:rest]:
        base[i] += 1
    return base


def stratified_split(
    dataset: Dataset, ratios: Sequence[float] = (0.8, 0.1, 0.1), seed: int = 0
) -> tuple[Dataset, Dataset, Dataset]:
    """Per-sentiment-label split into train/dev/test.

    Each label's reviews are shuffled with ``seed`` and cut by largest
    remainder, so every split holds each label within one sample of its
    overall share. Original order is kept inside each split.
    """
    if len(ratios) != 3 or any(r <= 0 for r in ratios) or abs(sum(ratios) - 1) > 1e-9:
        raise ValueError(f"ratios must be three positive numbers summing to 1, got {ratios}")
    groups: dict[Optional[Sentiment], list[int]] = {}
    for i, r in enumerate(dataset.reviews):
        groups.setdefault(r.gold_sentiment, []).append(i)
    for s in SENTIMENTS:
        if len(groups.get(s, [])) < 3:
            raise CorpusError(
                f"need at least 3 labelled reviews per class; {s.value} has {len(groups.get(s, []))}"
            )

    rng = random.Random(seed)
    parts: list[list[int]] = [[], [], []]
    for key in sorted(groups, key=lambda s: -1 if s is None else s.index):
        idx = list(groups[key])
        rng.shuffle(idx)
        sizes = _allocate(len(idx), ratios)
        start = 0
        for k, n in enumerate(sizes):
            parts[k].extend(idx[start : start + n])
            start += n
    return tuple(Dataset(tuple(dataset.reviews[i] for i in sorted(p))) for p in parts)


def _sign(x: float) -> int:
    return (x > 0) - (x < 0)


def augment_lexical(review: Review, lexicon: Lexicon, seed: int = 0) -> Review:
    """Swap one matched lexicon phrase for another of the same sign and variant.

    Candidates that would flip the sign of the text's lexicon score are
    skipped. Returns the input unchanged when nothing can be swapped.
    """
    norm = normalize(review.raw_text)
    spans = word_spans(norm.text)
    tokens = [w for w, _, _ in spans]
    matches = match_phrases(lexicon, tokens)
    base_sign = _sign(lexicon_score(matches))
    rng = random.Random(seed)

    options = []
    for m in matches:
        if m.entry.weight == 0:
            continue
        for alt in lexicon.entries:
            if (
                alt.phrase != m.entry.phrase
                and alt.variant == m.entry.variant
                and _sign(alt.weight) == _sign(m.entry.weight)
            ):
                options.append((m, alt))
    rng.shuffle(options)

    for m, alt in options:
        s, e = m.span
        new_tokens = tokens[:s] + list(alt.phrase) + tokens[e:]
        if _sign(lexicon_score(match_phrases(lexicon, new_tokens))) != base_sign:
            continue
        raw_a, _ = norm.raw_span(spans[s][1], spans[s][2])
        _, raw_b = norm.raw_span(spans[e - 1][1], spans[e - 1][2])
        text = review.raw_text[:raw_a] + alt.text + review.raw_text[raw_b:]
        return replace(review, id=f"{review.id}~aug{seed}", raw_text=text, source="augment_lexical")
    return review


def concat(datasets: Iterable[Dataset]) -> Dataset:
    return Dataset(tuple(r for d in datasets for r in d))
