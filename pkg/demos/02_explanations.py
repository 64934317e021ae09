"""
Why did the model say that?
===========================

LIME and Shapley attributions for one review, then a sanity check of
both explainers on a synthetic scorer whose true attributions are known.

    python3 demos/02_explanations.py
"""

# %%
import numpy as np

from absa.config import load_config
from absa.explain import lime_explain, shap_exact, shap_kernel
from absa.pipeline import Engine
from absa.subword import MASK, train_subword

engine = Engine.from_config(load_config())
text = "the mobile app keeps failing"
target = engine.scorer.score(text).label
print("prediction:", target.value, np.round(engine.scorer.score(text).as_array(), 3))

# %%
# LIME: 1000 keep-vectors, each token kept with probability 1/2, fitted by
# proximity-weighted ridge regression. The seed fixes every sample.
lime = lime_explain(engine.scorer, text, target, vocab=engine.vocab, n_samples=1000, seed=0)
for a in lime.attributions:
    print(f"  {a.token:12} {a.weight:+.3f}")
print(f"surrogate R^2 = {lime.fidelity_r2:.3f}")

# %%
# Exact Shapley values enumerate all 2^M coalitions. Attributions plus
# the fully masked base value add up to the model output.
shap = shap_exact(engine.scorer, text, target, vocab=engine.vocab)
print("phi:", {t: round(p, 3) for t, p in zip(shap.tokens, shap.phi)})
print(f"base {shap.base_value:.3f} + sum(phi) {sum(shap.phi):.3f} = f(x) {shap.fx:.3f}")

# %%
# Synthetic check. One letter per token; masked words end in the mask
# piece, so the scorer sees exactly which letters survived.
letters = "abcdefgh"
vocab = train_subword([" ".join(letters)] * 3, vocab_size=100)
w = np.array([0.3, -0.2, 0.15, 0.05, -0.1, 0.25, 0.0, 0.12])


def game(t):
    z = np.array([0.0 if tok.endswith(MASK) else 1.0 for tok in t.split()])
    return float(0.1 + z @ w + 0.2 * z[0] * z[1])


exact = np.array(shap_exact(game, " ".join(letters), vocab=vocab).phi)
print("exact:", np.round(exact, 4))
for n in (500, 2000, 8000):
    approx = np.array(shap_kernel(game, " ".join(letters), vocab=vocab, n_samples=n, seed=1).phi)
    print(f"kernel n={n:5d}: max gap {np.max(np.abs(approx - exact)):.4f}")

# %%
# The pairwise term is split evenly between tokens 0 and 1, and the
# zero-weight token 6 gets nothing.
print("phi_0 - w_0 =", round(exact[0] - w[0], 6), "| phi_6 =", round(exact[6], 12))
