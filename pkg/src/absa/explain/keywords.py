from __future__ import annotations

import math
from collections import Counter
from typing import Iterable, Optional, Sequence

from absa.textprep import normalize, words

# Short function-word list used by reports; Sinhala/Singlish particles
# that carry no aspect content are included.
STOPWORDS = frozenset(
    """a an the and or but however is are was were be been being to of in on at for
    with by from it its this that these those i me my we our you your they them their
    he she his her as so too very not no na than then there here have has had do does
    did will would can could should just also me eke eka ekak eken mata mage api
    මෙම මේ මම අපි ඒ එක එකේ""".split()
)


def term_counts(text: str, stopwords: Iterable[str] = ()) -> Counter:
    stop = set(stopwords)
    return Counter(w for w in words(normalize(text)) if w not in stop and any(c.isalpha() for c in w))


def extract_keywords(
    texts: Sequence[str],
    k: int = 10,
    background: Optional[Sequence[str]] = None,
    stopwords: Iterable[str] = (),
) -> list[tuple[str, float]]:
    """Rank terms of ``texts`` by tf-idf summed over the slice.

    idf = ln((1 + N) / (1 + df)) + 1 over ``background`` (defaults to the
    slice itself); tf is the raw count per document. Ties break
    lexicographically.
    """
    if not texts:
        raise ValueError("keyword extraction needs a non-empty slice")
    stop = frozenset(stopwords)
    bg = list(background) if background is not None else list(texts)
    df: Counter = Counter()
    for t in bg:
        df.update(set(term_counts(t, stop)))
    n = len(bg)

    scores: dict[str, float] = {}
    for t in texts:
        for term, tf in term_counts(t, stop).items():
            idf = math.log((1 + n) / (1 + df.get(term, 0))) + 1.0
            scores[term] = scores.get(term, 0.0) + tf * idf
    ranked = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))
    return ranked[:k]
