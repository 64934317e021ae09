"""Byte-pair-encoding subword tokenizer with word-boundary markers.

Words are whitespace-delimited. The first character of every word is
carried as a marked symbol (``"▁b"``), so word-initial pieces always begin
with the marker and decoding can restore the spaces.
"""

from __future__ import annotations

import heapq
import re
import threading
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

MARKER = "▁"
UNK = "<unk>"
MASK = "<mask>"
SPECIALS = (UNK, MASK)
FORMAT_VERSION = 1
DEFAULT_VOCAB_SIZE = 8000
DEFAULT_COVERAGE = 0.9995

_SPECIAL_RE = re.compile("(" + "|".join(re.escape(s) for s in SPECIALS) + ")")


class TokenizerError(ValueError):
    pass


@dataclass(frozen=True)
class TokenizedText:
    tokens: tuple[str, ...]
    offsets: tuple[tuple[int, int], ...]

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True, eq=False)
class SubwordVocab:
    pieces: tuple[str, ...]
    merges: tuple[tuple[str, str], ...]
    vocab_size: int
    coverage: float = DEFAULT_COVERAGE
    specials: tuple[str, ...] = SPECIALS
    _ranks: dict = field(default_factory=dict, repr=False)
    _piece_set: frozenset = field(default=frozenset(), repr=False)
    _cache: dict = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_ranks", {m: r for r, m in enumerate(self.merges)})
        object.__setattr__(self, "_piece_set", frozenset(self.pieces))

    def __eq__(self, other):
        if not isinstance(other, SubwordVocab):
            return NotImplemented
        return (self.pieces, self.merges, self.vocab_size, self.coverage, self.specials) == (
            other.pieces, other.merges, other.vocab_size, other.coverage, other.specials
        )

    def __hash__(self):
        return hash((self.pieces, self.merges))

    def __contains__(self, piece: str) -> bool:
        return piece in self._piece_set

    def is_special(self, token: str) -> bool:
        return token.removeprefix(MARKER) in self.specials

    def encode(self, text) -> TokenizedText:
        return encode(self, text)

    def decode(self, tokens: Sequence[str]) -> str:
        return decode(self, tokens)

    def save(self, path: "str | Path") -> None:
        save_vocab(self, path)


def _word_symbols(word: str, keep: "set[str] | None") -> list[str]:
    syms = []
    for i, ch in enumerate(word):
        if keep is not None and ch not in keep:
            syms.append(UNK)
        else:
            syms.append(MARKER + ch if i == 0 else ch)
    return syms


def _pairs(syms: Sequence[str]):
    for a, b in zip(syms, syms[1:]):
        if a != UNK and b != UNK:
            yield a, b


def _merge_word(syms: list[str], left: str, right: str) -> list[str]:
    out = []
    i = 0
    while i < len(syms):
        if i + 1 < len(syms) and syms[i] == left and syms[i + 1] == right:
            out.append(left + right)
            i += 2
        else:
            out.append(syms[i])
            i += 1
    return out


def train_subword(
    texts: Iterable[str],
    vocab_size: int = DEFAULT_VOCAB_SIZE,
    coverage: float = DEFAULT_COVERAGE,
    min_frequency: int = 2,
) -> SubwordVocab:
    """Learn BPE merges from normalized texts.

    ``vocab_size`` counts non-special pieces: the alphabet (marked and
    unmarked form of every covered character) plus one piece per merge.
    Training stops early when no pair reaches ``min_frequency``.
    Frequency ties go to the lexicographically smallest merged string.
    """
    if not 0.9 <= coverage <= 1.0:
        raise TokenizerError(f"coverage must be in [0.9, 1.0], got {coverage}")

    word_freq: Counter = Counter()
    for t in texts:
        for w in str(t).split():
            if w not in SPECIALS:
                word_freq[w] += 1
    if not word_freq:
        raise TokenizerError("empty training corpus")

    char_freq: Counter = Counter()
    for w, n in word_freq.items():
        for ch in w:
            char_freq[ch] += n
    total = sum(char_freq.values())
    kept: set[str] = set()
    running = 0
    for ch, n in sorted(char_freq.items(), key=lambda kv: (-kv[1], kv[0])):
        if running >= coverage * total and kept:
            break
        kept.add(ch)
        running += n

    alphabet = sorted({c for c in kept} | {MARKER + c for c in kept})
    if vocab_size < len(alphabet):
        raise TokenizerError(
            f"vocab_size {vocab_size} is below the alphabet size {len(alphabet)}"
        )

    words = sorted(word_freq)
    freqs = [word_freq[w] for w in words]
    seqs = [_word_symbols(w, kept) for w in words]

    pair_count: Counter = Counter()
    pair_where: dict[tuple[str, str], set[int]] = {}
    for idx, syms in enumerate(seqs):
        for p in _pairs(syms):
            pair_count[p] += freqs[idx]
            pair_where.setdefault(p, set()).add(idx)

    heap = [(-c, a + b, a, b) for (a, b), c in pair_count.items()]
    heapq.heapify(heap)

    pieces = list(alphabet)
    piece_set = set(pieces)
    merges: list[tuple[str, str]] = []
    while len(pieces) < vocab_size and heap:
        negc, _, a, b = heapq.heappop(heap)
        if pair_count.get((a, b), 0) != -negc or -negc <= 0:
            continue
        if -negc < min_frequency:
            break
        merges.append((a, b))
        new = a + b
        if new not in piece_set:
            pieces.append(new)
            piece_set.add(new)

        touched: set[tuple[str, str]] = set()
        for idx in sorted(pair_where.pop((a, b), ())):
            old = seqs[idx]
            f = freqs[idx]
            for p in _pairs(old):
                pair_count[p] -= f
                touched.add(p)
                if p in pair_where:
                    pair_where[p].discard(idx)
            seqs[idx] = _merge_word(old, a, b)
            for p in _pairs(seqs[idx]):
                pair_count[p] += f
                touched.add(p)
                pair_where.setdefault(p, set()).add(idx)
        pair_count.pop((a, b), None)
        for p in touched:
            c = pair_count.get(p, 0)
            if c > 0:
                heapq.heappush(heap, (-c, p[0] + p[1], p[0], p[1]))
            else:
                pair_count.pop(p, None)

    return SubwordVocab(
        pieces=tuple(SPECIALS) + tuple(pieces),
        merges=tuple(merges),
        vocab_size=vocab_size,
        coverage=coverage,
    )


def _bpe_segment(vocab: SubwordVocab, segment: str, initial: bool) -> list[str]:
    key = (segment, initial)
    cached = vocab._cache.get(key)
    if cached is not None:
        return cached
    syms = []
    for i, ch in enumerate(segment):
        s = MARKER + ch if (i == 0 and initial) else ch
        if s in vocab._piece_set and s not in vocab.specials:
            syms.append(s)
        else:
            syms.append(MARKER + UNK if (i == 0 and initial) else UNK)
    ranks = vocab._ranks
    while len(syms) > 1:
        best = None
        for a, b in zip(syms, syms[1:]):
            r = ranks.get((a, b))
            if r is not None and (best is None or r < best[0]):
                best = (r, a, b)
        if best is None:
            break
        syms = _merge_word(syms, best[1], best[2])
    with vocab._lock:
        vocab._cache[key] = syms
    return syms


def encode(vocab: SubwordVocab, text) -> TokenizedText:
    """Greedy rank-order merge application within each word."""
    s = str(text)
    tokens: list[str] = []
    offsets: list[tuple[int, int]] = []
    for m in re.finditer(r"\S+", s):
        word, base = m.group(), m.start()
        pos = 0
        for seg in _SPECIAL_RE.split(word):
            if not seg:
                continue
            initial = pos == 0
            if seg in vocab.specials:
                tokens.append(MARKER + seg if initial else seg)
                offsets.append((base + pos, base + pos + len(seg)))
            else:
                cur = base + pos
                for piece in _bpe_segment(vocab, seg, initial):
                    width = len(piece.removeprefix(MARKER))
                    if piece.removeprefix(MARKER) == UNK:
                        width = 1
                    tokens.append(piece)
                    offsets.append((cur, cur + width))
                    cur += width
            pos += len(seg)
    return TokenizedText(tuple(tokens), tuple(offsets))


def decode(vocab: SubwordVocab, tokens: Sequence[str]) -> str:
    """Concatenate pieces, turning boundary markers back into spaces."""
    for t in tokens:
        if t not in vocab._piece_set and t.removeprefix(MARKER) not in vocab.specials:
            raise TokenizerError(f"unknown piece {t!r}")
    return join_pieces(tokens)


def save_vocab(vocab: SubwordVocab, path: "str | Path") -> None:
    lines = [
        f"#absa-bpe\t{FORMAT_VERSION}\t{vocab.vocab_size}\t{vocab.coverage!r}"
        f"\t{len(vocab.pieces)}\t{len(vocab.merges)}"
    ]
    lines.extend(vocab.pieces)
    lines.extend(f"{a} {b} {r}" for r, (a, b) in enumerate(vocab.merges))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_vocab(path: "str | Path") -> SubwordVocab:
    path = Path(path)
    lines = path.read_text(encoding="utf-8").split("\n")
    head = lines[0].split("\t")
    if len(head) != 6 or head[0] != "#absa-bpe":
        raise TokenizerError(f"{path}: not a subword vocab file")
    if int(head[1]) != FORMAT_VERSION:
        raise TokenizerError(f"{path}: unsupported format version {head[1]}")
    vocab_size, coverage = int(head[2]), float(head[3])
    n_pieces, n_merges = int(head[4]), int(head[5])
    pieces = tuple(lines[1 : 1 + n_pieces])
    merges = []
    for r, line in enumerate(lines[1 + n_pieces : 1 + n_pieces + n_merges]):
        a, b, rank = line.split(" ")
        if int(rank) != r:
            raise TokenizerError(f"{path}: merge ranks out of order at {line!r}")
        merges.append((a, b))
    specials = tuple(p for p in pieces if p in SPECIALS)
    return SubwordVocab(pieces, tuple(merges), vocab_size, coverage, specials or SPECIALS)


def join_pieces(tokens: Sequence[str]) -> str:
    """:func:`decode` without vocabulary validation."""
    out = []
    for t in tokens:
        if t.startswith(MARKER) and t != MARKER:
            out.append(" " + t[len(MARKER):])
        else:
            out.append(t)
    return "".join(out).removeprefix(" ")
