"""
Comparing backends, with and without the lexicon
================================================

Trains both baselines on a stratified split, prints the comparison
table on the held-out Singlish slice, then shows how the correction
strength moves one borderline prediction.

    python3 demos/03_backend_comparison.py
"""

# %%
import numpy as np

from absa.classify import SentimentScores, accuracy, majority_accuracy, train_linear, train_nb
from absa.config import data_path
from absa.corpus import load_corpus, stratified_split
from absa.evaluation import compare_backends, confusion, metrics, predict, tune_beta
from absa.lexicon import apply_correction, load_lexicon, load_lexicons
from absa.subword import train_subword
from absa.textprep import normalize

hints = load_lexicon(data_path("singlish_hints.tsv"))
corpus = load_corpus(data_path("corpus.jsonl"), hints=hints)
lexicon = load_lexicons([data_path(n) for n in ("sinhala.tsv", "singlish.tsv", "codemix.tsv")])
train, dev, test = stratified_split(corpus, (0.7, 0.15, 0.15), seed=0)
print("split sizes:", len(train), len(dev), len(test))

# %%
vocab = train_subword([normalize(r.raw_text).text for r in train])
nb = train_nb(train, vocab)
linear = train_linear(train, vocab)
print(f"majority {majority_accuracy(test):.3f} | nb {accuracy(nb, test):.3f} | linear {accuracy(linear, test):.3f}")
print("linear loss by epoch:", np.round(linear.history[::5], 3))

# %%
# Per-class metrics for the linear model on the test split.
m = metrics(confusion([r.gold_sentiment for r in test], [predict(linear, r.raw_text) for r in test]))
print("F1 by class:", {k: round(v, 3) for k, v in m.f1.items()}, "| macro", round(m.macro_f1, 3))

# %%
# The Singlish slice is held out from the main corpus.
singlish = load_corpus(data_path("singlish_slice.jsonl"))
print(compare_backends([nb, linear], singlish, lexicon).to_text())

# %%
# The correction strength is chosen on the dev split, never on test.
beta, by_beta = tune_beta(nb, dev, lexicon)
print("nb dev accuracy by beta:", {b: round(a, 3) for b, a in by_beta.items()}, "-> beta =", beta)

# %%
# A near-uniform prediction on a negative Singlish phrase, for rising beta.
near_uniform = SentimentScores(0.32, 0.33, 0.35)
for beta in (0.0, 0.25, 0.5, 1.0, 2.0):
    out = apply_correction(near_uniform, -0.8, beta)
    print(f"beta={beta:4}: {np.round(out.as_array(), 3)} -> {out.label.value}")
