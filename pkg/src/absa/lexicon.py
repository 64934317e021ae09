"""Domain sentiment lexicon: loading, phrase matching and logit correction."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from absa.labels import Variant
from absa.textprep import normalize, words


class LexiconError(ValueError):
    pass


@dataclass(frozen=True)
class LexiconEntry:
    phrase: tuple[str, ...]
    weight: float
    variant: Variant = Variant.UNKNOWN
    domain: str = ""

    def __post_init__(self):
        if not self.phrase:
            raise LexiconError("empty phrase")
        if not (-1.0 <= self.weight <= 1.0) or math.isnan(self.weight):
            raise LexiconError(
                f"weight {self.weight} for {' '.join(self.phrase)!r} outside [-1, 1]"
            )

    @property
    def text(self) -> str:
        return " ".join(self.phrase)


@dataclass(frozen=True)
class Match:
    span: tuple[int, int]
    entry: LexiconEntry


def _entry_key(e: LexiconEntry):
    variant_rank = list(Variant).index(e.variant)
    return (-len(e.phrase), e.phrase, variant_rank, e.weight, e.domain)


class PhraseMatcher:
    """Leftmost-longest, non-overlapping matcher over word sequences.

    Candidates are indexed by first word and kept in a canonical order,
    so results never depend on insertion order.
    """

    def __init__(self, items: Iterable[tuple[tuple[str, ...], object]], key=None):
        self._index: dict[str, list] = {}
        for phrase, payload in items:
            self._index.setdefault(phrase[0], []).append((phrase, payload))
        for cands in self._index.values():
            cands.sort(key=key or (lambda pc: (-len(pc[0]), pc[0])))

    def find(self, tokens: Sequence[str]) -> list[tuple[int, int, object]]:
        out = []
        i = 0
        n = len(tokens)
        while i < n:
            hit = None
            for phrase, payload in self._index.get(tokens[i], ()):
                k = len(phrase)
                if i + k <= n and tuple(tokens[i : i + k]) == phrase:
                    hit = (i, i + k, payload)
                    break
            if hit is None:
                i += 1
            else:
                out.append(hit)
                i = hit[1]
        return out


class Lexicon:
    """Immutable set of polarity-weighted phrases."""

    def __init__(self, entries: Iterable[LexiconEntry] = ()):
        seen: dict[tuple, LexiconEntry] = {}
        for e in entries:
            key = (e.phrase, e.variant)
            if key in seen:
                raise LexiconError(
                    f"duplicate entry {e.text!r} for variant {e.variant.value}"
                )
            seen[key] = e
        self.entries: tuple[LexiconEntry, ...] = tuple(sorted(seen.values(), key=_entry_key))
        self._matcher = PhraseMatcher(
            ((e.phrase, e) for e in self.entries), key=lambda pc: _entry_key(pc[1])
        )

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __add__(self, other: "Lexicon") -> "Lexicon":
        return Lexicon(list(self.entries) + list(other.entries))

    def for_variant(self, variant: Variant) -> "Lexicon":
        return Lexicon(e for e in self.entries if e.variant == variant)

    def match(self, word_tokens: Sequence[str]) -> list[Match]:
        return match_phrases(self, word_tokens)


def parse_phrase(phrase: str) -> tuple[str, ...]:
    return tuple(words(normalize(phrase)))


def load_lexicon(path: "str | Path") -> Lexicon:
    """Read a ``phrase<TAB>weight<TAB>variant<TAB>domain`` file.

    Blank lines and lines starting with ``#`` are skipped. Variant and
    domain columns are optional.
    """
    path = Path(path)
    entries = []
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n\r")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) < 2:
                raise LexiconError(f"{path}:{lineno}: expected phrase<TAB>weight")
            try:
                weight = float(cols[1])
            except ValueError:
                raise LexiconError(f"{path}:{lineno}: bad weight {cols[1]!r}") from None
            variant = Variant.parse(cols[2]) if len(cols) > 2 and cols[2] else Variant.UNKNOWN
            domain = cols[3].strip() if len(cols) > 3 else ""
            try:
                entries.append(LexiconEntry(parse_phrase(cols[0]), weight, variant, domain))
            except LexiconError as exc:
                raise LexiconError(f"{path}:{lineno}: {exc}") from None
    try:
        return Lexicon(entries)
    except LexiconError as exc:
        raise LexiconError(f"{path}: {exc}") from None


def load_lexicons(paths: Iterable["str | Path"]) -> Lexicon:
    lex = Lexicon()
    for p in paths:
        lex = lex + load_lexicon(p)
    return lex


def match_phrases(lexicon: Lexicon, word_tokens: Sequence[str]) -> list[Match]:
    return [Match((s, e), entry) for s, e, entry in lexicon._matcher.find(word_tokens)]


def lexicon_score(matches: Sequence[Match]) -> float:
    """Mean weight of the matched entries, 0 when nothing matched."""
    if not matches:
        return 0.0
    return math.fsum(m.entry.weight for m in matches) / len(matches)


def apply_correction(scores, L: float, beta: float = 1.0):
    """Shift positive/negative log-probabilities by +/- beta*L and renormalize.

    The neutral logit is left alone. ``L == 0`` or ``beta == 0`` returns
    the input object untouched.
    """
    from absa.classify import softmax

    if L == 0 or beta == 0:
        return scores
    if not math.isfinite(beta) or beta < 0:
        raise ValueError(f"beta must be finite and non-negative, got {beta}")
    logp = [math.log(p) if p > 0 else -math.inf for p in scores.as_tuple()]
    shift = beta * L
    return softmax((logp[0] - shift, logp[1], logp[2] + shift))
