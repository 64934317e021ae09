"""Corpus-level aspect report: JSON document, schema validation, static HTML view."""

from __future__ import annotations

import html
import json
import os
import tempfile
from pathlib import Path
from typing import Iterable, Sequence

import jsonschema

from absa.aggregate import aggregate_corpus, label_from_index
from absa.config import DATA_DIR
from absa.explain import STOPWORDS, ExplainError, extract_keywords, lime_explain, shap_exact, shap_kernel
from absa.labels import NAMED_ASPECTS, SENTIMENTS, AspectLabel, Sentiment
from absa.pipeline import Engine, ReviewAnalysis

SCHEMA_VERSION = 1
SCHEMA_PATH = DATA_DIR / "report.schema.json"


def load_schema() -> dict:
    return json.loads(SCHEMA_PATH.read_text(encoding="utf-8"))


def validate_report(report: dict) -> None:
    jsonschema.validate(report, load_schema())


def explain_text(engine: Engine, text: str, method: str, target: Sentiment) -> dict:
    """Run the configured explainer on the lexicon-corrected scorer."""
    cfg = engine.config
    kw = dict(vocab=engine.vocab, workers=cfg.workers)
    if method == "shap-exact":
        exp = shap_exact(engine.scorer, text, target, max_tokens=cfg.max_exact_tokens, **kw)
    elif method == "shap-kernel":
        exp = shap_kernel(engine.scorer, text, target, n_samples=cfg.kernel_samples, seed=cfg.seed, **kw)
    elif method == "lime":
        exp = lime_explain(
            engine.scorer, text, target, n_samples=cfg.lime_samples, seed=cfg.seed,
            kernel_width=cfg.kernel_width, top_k=cfg.top_k, ridge=cfg.ridge, **kw,
        )
    else:
        raise ExplainError(f"unknown explanation method {method!r}")
    return exp.to_dict()


def _summary(title: str, dist: dict, mean_idx: float, support: int, keywords: dict, cfg) -> str:
    top = max(SENTIMENTS, key=lambda s: (dist[s.value], -s.index))
    label, lean = label_from_index(min(max(mean_idx, 0.0), 1.0), cfg.neutral_low, cfg.neutral_high)
    mood = label.value.lower()
    if lean is not None:
        mood += f" leaning {lean.value.lower()}"
    s = (
        f"{title}: {support} review(s), mostly {top.value.lower()} "
        f"({100 * dist[top.value]:.0f}%); mean polarity index {mean_idx:.2f} ({mood})."
    )
    terms = [t for t, _ in keywords.get(top.value, [])[:3]]
    if terms:
        s += f" Frequent {top.value.lower()} terms: {', '.join(terms)}."
    return s


def build_report(engine: Engine, analyses: Sequence[ReviewAnalysis], source: str = "") -> dict:
    if not analyses:
        raise ValueError("empty corpus")
    cfg = engine.config
    summaries = aggregate_corpus(a.aspects for a in analyses)

    all_clause_texts = [c.clause.text for a in analyses for c in a.clauses]
    method = cfg.explain_method
    aspects_out = []
    for aspect in (*NAMED_ASPECTS, AspectLabel.GENERAL):
        summary = summaries.get(aspect)
        if summary is None:
            if aspect is AspectLabel.GENERAL:
                continue
            aspects_out.append({
                "aspect": aspect.value, "title": aspect.title, "support": 0,
                "label_distribution": {s.value: 0.0 for s in SENTIMENTS},
                "mean_polarity_index": None, "keywords": {s.value: [] for s in SENTIMENTS},
                "examples": [], "summary": f"{aspect.title}: no reviews.",
            })
            continue

        members = [(a, a.aspect(aspect)) for a in analyses if a.aspect(aspect) is not None]
        keywords = {}
        for s in SENTIMENTS:
            texts = [c.clause.text for a, agg in members if agg.label is s
                     for c in a.clauses if c.aspect is aspect]
            kws = extract_keywords(texts, cfg.keywords_k, all_clause_texts, STOPWORDS) if texts else []
            keywords[s.value] = [{"term": t, "score": sc} for t, sc in kws]

        ranked = sorted(members, key=lambda m: (-abs(m[1].polarity_index - 0.5), m[0].review.id))
        examples = []
        for rank, (a, agg) in enumerate(ranked[: cfg.examples_per_aspect]):
            ex = {
                "id": a.review.id,
                "text": a.normalized.text,
                "polarity_index": agg.polarity_index,
                "label": agg.label.value,
                "lean": agg.lean.value if agg.lean else None,
                "explanation": None,
            }
            if rank < cfg.explain_per_aspect:
                m = method
                n_tokens = len(engine.vocab.encode(a.normalized.text))
                if m == "shap-exact" and n_tokens > cfg.max_exact_tokens:
                    m = "shap-kernel"
                if m == "shap-kernel" and n_tokens < 2:
                    m = "shap-exact"
                ex["explanation"] = explain_text(engine, a.normalized.text, m, agg.label)
            examples.append(ex)

        kw_plain = {k: [(d["term"], d["score"]) for d in v] for k, v in keywords.items()}
        aspects_out.append({
            "aspect": aspect.value,
            "title": aspect.title,
            "support": summary.support,
            "label_distribution": summary.label_distribution,
            "mean_polarity_index": summary.mean_polarity_index,
            "keywords": keywords,
            "examples": examples,
            "summary": _summary(aspect.title, summary.label_distribution,
                                summary.mean_polarity_index, summary.support, kw_plain, cfg),
        })

    overall = {s.value: sum(a.label is s for a in analyses) / len(analyses) for s in SENTIMENTS}
    return {
        "schema_version": SCHEMA_VERSION,
        "source": source,
        "n_reviews": len(analyses),
        "config": {
            "backend": engine.scorer.name,
            "beta": cfg.beta,
            "seed": cfg.seed,
            "explain_method": method,
            "neutral_band": [cfg.neutral_low, cfg.neutral_high],
            "aspect_threshold": cfg.aspect_threshold,
        },
        "overall_label_distribution": overall,
        "aspects": aspects_out,
    }


def dumps(report: dict) -> str:
    return json.dumps(report, ensure_ascii=False, indent=2, sort_keys=False) + "\n"


# -- HTML ----------------------------------------------------------------------

_CSS = """
body{font-family:sans-serif;max-width:960px;margin:2em auto;color:#222}
table{border-collapse:collapse;margin:.5em 0}td,th{border:1px solid #ccc;padding:.25em .6em;text-align:left}
.tok{padding:0 .1em;border-radius:3px}.bar{display:inline-block;height:.8em}
.neg{background:#d9534f}.neu{background:#aaa}.pos{background:#5cb85c}
section{border-top:2px solid #eee;margin-top:1.5em}
"""


def _color(weight: float, scale: float) -> str:
    a = min(abs(weight) / scale, 1.0) if scale > 0 else 0.0
    rgb = "92,184,92" if weight >= 0 else "217,83,79"
    return f"rgba({rgb},{a:.3f})"


def highlight(explanation: dict) -> str:
    """Inline-styled word spans; green supports the target class, red opposes it."""
    groups = explanation.get("words", [])
    scale = max((abs(g["weight"]) for g in groups), default=0.0)
    spans = [
        f'<span class="tok" style="background:{_color(g["weight"], scale)}" '
        f'title="{g["weight"]:+.4f}">{html.escape(g["word"])}</span>'
        for g in groups
    ]
    return " ".join(spans)


def render_html(report: dict) -> str:
    e = html.escape
    out = [
        "<!DOCTYPE html>",
        '<html lang="en"><head><meta charset="utf-8"><title>Aspect sentiment report</title>',
        f"<style>{_CSS}</style></head><body>",
        "<h1>Aspect sentiment report</h1>",
        f"<p>{report['n_reviews']} reviews from {e(report['source'] or 'input')}; "
        f"backend {e(report['config']['backend'])}.</p>",
    ]
    for a in report["aspects"]:
        out.append(f"<section><h2>{e(a['title'])}</h2><p>{e(a['summary'])}</p>")
        if a["support"]:
            dist = a["label_distribution"]
            bars = "".join(
                f'<span class="bar {cls}" style="width:{300 * dist[s]:.1f}px" title="{s} {dist[s]:.3f}"></span>'
                for s, cls in (("Negative", "neg"), ("Neutral", "neu"), ("Positive", "pos"))
            )
            out.append(f"<p>{bars}</p><table><tr><th>Label</th><th>Share</th><th>Top terms</th></tr>")
            for s in ("Negative", "Neutral", "Positive"):
                terms = ", ".join(e(k["term"]) for k in a["keywords"][s])
                out.append(f"<tr><td>{s}</td><td>{dist[s]:.3f}</td><td>{terms}</td></tr>")
            out.append("</table>")
        for ex in a["examples"]:
            lean = f", leaning {ex['lean'].lower()}" if ex["lean"] else ""
            out.append(
                f"<p><b>{e(ex['id'])}</b> ({ex['label'].lower()}{lean}, index {ex['polarity_index']:.2f}): "
            )
            if ex["explanation"]:
                exp = ex["explanation"]
                out.append(f"{highlight(exp)} <small>[{e(exp['method'])}, target {e(exp['target_class'])}]</small>")
            else:
                out.append(e(ex["text"]))
            out.append("</p>")
        out.append("</section>")
    out.append("</body></html>")
    return "\n".join(out) + "\n"


# -- output --------------------------------------------------------------------


def write_atomic(files: Iterable[tuple[Path, str]]) -> None:
    """Write every file or none: contents go to temp files first, then renamed.

    If any step fails, temp files and already-renamed outputs are removed.
    """
    staged: list[tuple[Path, Path]] = []
    done: list[Path] = []
    try:
        for path, text in files:
            path = Path(path)
            path.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
            with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
            staged.append((Path(tmp), path))
        for tmp, path in staged:
            os.replace(tmp, path)
            done.append(path)
    except BaseException:
        for tmp, _ in staged:
            tmp.unlink(missing_ok=True)
        for path in done:
            path.unlink(missing_ok=True)
        raise
