"""
From raw review to aspect sentiment
===================================

Walks one code-mixed review and one contrastive English review through
each stage: normalization, clause splitting, subword tokens, clause
scores, lexicon correction, aspect relevance and fusion.

    python3 demos/01_pipeline_walkthrough.py
"""

# %%
# Build an engine from the bundled defaults. With no saved model it trains
# a tokenizer and a naive Bayes baseline on the bundled corpus (a few seconds).
import numpy as np

from absa.config import load_config
from absa.pipeline import Engine
from absa.subword import encode
from absa.textprep import normalize, segment_clauses

engine = Engine.from_config(load_config())
print("backend:", engine.scorer.name, "| vocabulary:", len(engine.vocab.pieces), "pieces")

# %%
# Normalization lower-cases Latin text, squashes elongations and keeps
# Sinhala untouched. The character map ties every output character back
# to the raw input.
raw = "Customer service ගොඩක් හොඳයි!!!  But the APP is sooooo slow"
norm = normalize(raw)
print(repr(norm.text))
print([c.text for c in segment_clauses(norm)])

# %%
# Word-initial pieces carry the boundary marker; unseen words split
# into smaller pieces instead of becoming unknown.
print(encode(engine.vocab, norm).tokens)

# %%
# The engine scores each clause, applies the lexicon shift, and assigns
# the clause to an aspect by seed-keyword relevance.
analysis = engine.analyze_text(raw)
for c in analysis.clauses:
    print(f"{c.clause.text!r:45} -> {c.aspect.value:16} rel={c.relevance:.2f} "
          f"L={c.lexicon_score:+.2f} probs={np.round(c.scores.as_array(), 3)}")

for agg in analysis.aspects:
    lean = f" leaning {agg.lean.value}" if agg.lean else ""
    print(f"{agg.aspect.title}: index {agg.polarity_index:.2f} -> {agg.label.value}{lean}")

# %%
# Two clauses about the same aspect are fused by a relevance-weighted mean.
# Here both halves are about loans, so one LoanCredit verdict comes out.
mixed = engine.analyze_text(
    "The bank's loan approval was smooth and fast, but the interest rates were too high"
)
(loan,) = mixed.aspects
print("clauses:", [c.clause.text for c in mixed.clauses])
print(f"fused index {loan.polarity_index:.3f} -> {loan.label.value}")

# %%
# Singlish with a strongly negative lexicon phrase.
print(engine.analyze_text("app eka lag wenawa").to_dict()["aspects"])
