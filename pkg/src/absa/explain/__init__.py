"""Model-agnostic token attributions: LIME, exact and kernel Shapley, tf-idf keywords."""

from absa.explain._core import Attribution, ExplainError, perturb, value_function, word_groups
from absa.explain.keywords import STOPWORDS, extract_keywords
from absa.explain.lime import LimeExplanation, lime_explain
from absa.explain.shapley import ShapExplanation, shap_exact, shap_kernel

__all__ = [
    "Attribution",
    "ExplainError",
    "LimeExplanation",
    "STOPWORDS",
    "ShapExplanation",
    "extract_keywords",
    "lime_explain",
    "perturb",
    "shap_exact",
    "shap_kernel",
    "value_function",
    "word_groups",
]
