"""Text normalization and clause segmentation.

Every transformation keeps a per-character back-reference into the raw
string so clause spans and token offsets can be mapped back for display.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass
from typing import Optional, Sequence

DEFAULT_CUES = ("but", "however", "නමුත්")
SENTENCE_PUNCT = frozenset(".!?;")

_URL = re.compile(r"(?:https?://|www\.)\S+", re.IGNORECASE)
_SINHALA = (0x0D80, 0x0DFF)


@dataclass(frozen=True)
class NormalizedText:
    text: str
    char_map: tuple[int, ...]
    raw: str = ""

    def __str__(self) -> str:
        return self.text

    def __len__(self) -> int:
        return len(self.text)

    def raw_span(self, start: int, end: int) -> tuple[int, int]:
        """Map a half-open span of the normalized text onto the raw string."""
        if start >= end:
            pos = self.char_map[start] if start < len(self.char_map) else len(self.raw)
            return pos, pos
        return self.char_map[start], self.char_map[end - 1] + 1


@dataclass(frozen=True)
class Clause:
    text: str
    span: tuple[int, int]
    split_cue: Optional[str] = None


def is_sinhala(ch: str) -> bool:
    return _SINHALA[0] <= ord(ch) <= _SINHALA[1]


def is_latin_letter(ch: str) -> bool:
    return ch.isalpha() and "LATIN" in unicodedata.name(ch, "")


def _nfc_chunks(raw: str) -> list[tuple[str, int]]:
    # Composition never crosses a base character, so normalize per
    # base+marks chunk and keep each output char pointing at its chunk.
    out: list[tuple[str, int]] = []
    start = 0
    for i in range(1, len(raw) + 1):
        if i < len(raw):
            cat = unicodedata.category(raw[i])
            if cat.startswith("M") or raw[i] in "\u200c\u200d":
                continue
        chunk = unicodedata.normalize("NFC", raw[start:i])
        for j, ch in enumerate(chunk):
            out.append((ch, min(start + j, i - 1)))
        start = i
    return out


def normalize(raw: str) -> NormalizedText:
    """Canonical form used by every downstream stage.

    NFC composition, whitespace-like controls become spaces, remaining
    control characters and URLs are dropped, Latin letters lowercased,
    letter runs longer than two squashed to two, whitespace collapsed.
    """
    text, cmap = _normalize_once(raw)
    # dropping a URL or a control char can expose a new URL or letter run
    for _ in range(8):
        again, amap = _normalize_once(text)
        if again == text:
            break
        text, cmap = again, [cmap[p] for p in amap]
    return NormalizedText(text=text, char_map=tuple(cmap), raw=raw)


def _normalize_once(raw: str) -> tuple[str, list[int]]:
    chars = _nfc_chunks(raw)

    cleaned = []
    for ch, pos in chars:
        if ch.isspace():
            cleaned.append((" ", pos))
        elif unicodedata.category(ch) != "Cc":
            cleaned.append((ch, pos))

    text = "".join(c for c, _ in cleaned)
    keep = [True] * len(cleaned)
    for m in _URL.finditer(text):
        for k in range(m.start(), m.end()):
            keep[k] = False
    cleaned = [cp for cp, k in zip(cleaned, keep) if k]

    lowered = []
    for ch, pos in cleaned:
        if is_latin_letter(ch):
            low = ch.lower()
            if len(low) == 1:
                ch = low
        lowered.append((ch, pos))

    squashed: list[tuple[str, int]] = []
    for ch, pos in lowered:
        if (
            ch.isalpha()
            and len(squashed) >= 2
            and squashed[-1][0] == ch
            and squashed[-2][0] == ch
        ):
            continue
        squashed.append((ch, pos))

    collapsed: list[tuple[str, int]] = []
    for ch, pos in squashed:
        if ch == " " and (not collapsed or collapsed[-1][0] == " "):
            continue
        collapsed.append((ch, pos))
    if collapsed and collapsed[-1][0] == " ":
        collapsed.pop()

    return "".join(c for c, _ in collapsed), [p for _, p in collapsed]


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def word_spans(text: str) -> list[tuple[str, int, int]]:
    """Whitespace-delimited words with leading/trailing punctuation stripped."""
    spans = []
    for m in re.finditer(r"\S+", text):
        s, e = m.start(), m.end()
        while s < e and _is_punct(text[s]):
            s += 1
        while e > s and _is_punct(text[e - 1]):
            e -= 1
        if s < e:
            spans.append((text[s:e], s, e))
    return spans


def words(text: "str | NormalizedText") -> list[str]:
    return [w for w, _, _ in word_spans(str(text))]


def _is_delimiter(text: str, i: int) -> bool:
    ch = text[i]
    if ch not in SENTENCE_PUNCT:
        return False
    if ch == ".":
        # decimal points and abbreviations like "a.b" do not end a clause
        nxt = text[i + 1] if i + 1 < len(text) else " "
        return nxt.isspace() or nxt in SENTENCE_PUNCT
    return True


def segment_clauses(
    text: "NormalizedText | str", cues: Sequence[str] = DEFAULT_CUES
) -> list[Clause]:
    """Split at sentence punctuation and before contrastive conjunctions.

    Commas are not boundaries. A conjunction starts the clause that
    follows it; the clause before records it as ``split_cue``. Text with
    no letters or digits yields no clauses.
    """
    s = str(text)
    if not cues:
        raise ValueError("cue list must be non-empty")
    cue_set = {c.lower() for c in cues}

    # (start, end, cue) pieces between delimiters, then split at cues
    pieces: list[tuple[int, int, Optional[str]]] = []
    start = 0
    i = 0
    while i < len(s):
        if _is_delimiter(s, i):
            j = i
            while j < len(s) and (s[j] in SENTENCE_PUNCT or s[j].isspace()):
                j += 1
            cue = s[i:j].strip()
            pieces.append((start, i, cue[0] if cue else None))
            start = j
            i = j
        else:
            i += 1
    if start < len(s):
        pieces.append((start, len(s), None))

    clauses: list[Clause] = []
    for ps, pe, pcue in pieces:
        cut_points = []
        for w, ws, we in word_spans(s[ps:pe]):
            if w in cue_set and ws > 0:
                cut_points.append((ps + ws, w))
        bounds = [ps] + [c for c, _ in cut_points] + [pe]
        cue_names = [w for _, w in cut_points] + [pcue]
        for k in range(len(bounds) - 1):
            a, b = bounds[k], bounds[k + 1]
            while a < b and s[a].isspace():
                a += 1
            while b > a and s[b - 1].isspace():
                b -= 1
            # stray punctuation between delimiters is not a clause
            if a < b and any(c.isalnum() for c in s[a:b]):
                clauses.append(Clause(s[a:b], (a, b), cue_names[k]))
    return clauses
