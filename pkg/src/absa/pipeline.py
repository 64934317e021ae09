"""End-to-end review analysis: normalize, segment, score, correct, assign aspects, aggregate."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

from absa.adapter import AdapterConfig, ExternalScorer
from absa.aggregate import (
    AspectAggregate,
    ClauseSentiment,
    aggregate_clauses,
    fuse,
    label_from_index,
    polarity_index,
)
from absa.aspect import AspectSeeds, IdfTable, assign_aspect, build_idf, load_aspect_seeds, score_aspects
from absa.classify import SentimentScores, load_model, score, train_linear, train_nb
from absa.config import EngineConfig
from absa.corpus import Dataset, Review, detect_variant, load_corpus
from absa.labels import NAMED_ASPECTS, AspectLabel, Sentiment
from absa.lexicon import Lexicon, apply_correction, lexicon_score, load_lexicon, load_lexicons, match_phrases
from absa.subword import SubwordVocab, load_vocab, train_subword
from absa.textprep import NormalizedText, normalize, segment_clauses, words


class PipelineError(RuntimeError):
    """A pipeline stage failed; ``stage`` names it."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


class CorrectedScorer:
    """Backend scores shifted by the lexicon correction of the same text."""

    def __init__(self, backend, lexicon: Lexicon, beta: float):
        self.backend = backend
        self.lexicon = lexicon
        self.beta = beta
        self.name = f"{backend.name}+lexicon" if len(lexicon) and beta else backend.name

    def lexicon_score(self, text: str) -> float:
        return lexicon_score(match_phrases(self.lexicon, words(normalize(text))))

    def score(self, text: str) -> SentimentScores:
        raw = score(self.backend, text)
        return apply_correction(raw, self.lexicon_score(text), self.beta)


@dataclass(frozen=True)
class ReviewAnalysis:
    review: Review
    normalized: NormalizedText
    clauses: tuple[ClauseSentiment, ...]
    aspects: tuple[AspectAggregate, ...]
    overall: SentimentScores
    polarity_index: float
    label: Sentiment
    lean: Optional[Sentiment]

    @property
    def confidence(self) -> float:
        return self.overall.confidence

    def aspect(self, aspect: AspectLabel) -> Optional[AspectAggregate]:
        for a in self.aspects:
            if a.aspect is aspect:
                return a
        return None

    def to_dict(self) -> dict:
        return {
            "id": self.review.id,
            "text": self.normalized.text,
            "variant": self.review.variant.value,
            "clauses": [
                {
                    "text": c.clause.text,
                    "span": list(c.clause.span),
                    "split_cue": c.clause.split_cue,
                    "scores": _triple(c.scores),
                    "lexicon_score": c.lexicon_score,
                    "aspect": c.aspect.value,
                    "relevance": c.relevance,
                    "confidence": c.confidence,
                }
                for c in self.clauses
            ],
            "aspects": [
                {
                    "aspect": a.aspect.value,
                    "scores": _triple(a.scores),
                    "polarity_index": a.polarity_index,
                    "label": a.label.value,
                    "lean": a.lean.value if a.lean else None,
                    "support": a.support,
                }
                for a in self.aspects
            ],
            "aggregate": _triple(self.overall),
            "polarity_index": self.polarity_index,
            "label": self.label.value,
            "lean": self.lean.value if self.lean else None,
            "confidence": self.confidence,
        }


def _triple(s: SentimentScores) -> dict:
    return {"Negative": s.p_neg, "Neutral": s.p_neu, "Positive": s.p_pos}


class Engine:
    """All loaded resources for one configuration. Immutable after construction."""

    def __init__(
        self,
        config: EngineConfig,
        vocab: SubwordVocab,
        lexicon: Lexicon,
        seeds: AspectSeeds,
        idf: IdfTable,
        backend,
        hints: Optional[Lexicon] = None,
    ):
        self.config = config
        self.vocab = vocab
        self.lexicon = lexicon
        self.seeds = seeds
        self.idf = idf
        self.backend = backend
        self.hints = hints
        self.scorer = CorrectedScorer(backend, lexicon, config.beta)

    @classmethod
    def from_config(cls, config: EngineConfig) -> "Engine":
        def stage(name, fn, *args, **kw):
            try:
                return fn(*args, **kw)
            except PipelineError:
                raise
            except Exception as exc:
                raise PipelineError(name, str(exc)) from exc

        cfg = config
        hints = stage("lexicon", load_lexicon, cfg.hints_path) if cfg.hints_path else None
        lexicon = stage("lexicon", load_lexicons, cfg.lexicon_paths)
        train = None
        if cfg.train_corpus is not None:
            train = stage("corpus", load_corpus, cfg.train_corpus, hints=hints)

        if cfg.tokenizer_path is not None:
            vocab = stage("tokenizer", load_vocab, cfg.tokenizer_path)
        else:
            if train is None or not len(train):
                raise PipelineError("tokenizer", "no tokenizer file and no training corpus configured")
            texts = [normalize(r.raw_text).text for r in train]
            vocab = stage("tokenizer", train_subword, texts, cfg.vocab_size, cfg.coverage)

        seeds = stage("aspect", load_aspect_seeds, cfg.seeds_path) if cfg.seeds_path else None
        if seeds is None:
            raise PipelineError("aspect", "no aspect seed file configured")
        idf_docs = train if cfg.idf_corpus == cfg.train_corpus else (
            stage("corpus", load_corpus, cfg.idf_corpus) if cfg.idf_corpus else Dataset(())
        )
        idf = build_idf((r.raw_text for r in idf_docs), seeds)

        backend = stage("classify", _make_backend, cfg, vocab, train)
        return cls(cfg, vocab, lexicon, seeds, idf, backend, hints)

    def close(self) -> None:
        if isinstance(self.backend, ExternalScorer):
            self.backend.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    # -- per review ----------------------------------------------------------

    def analyze_text(self, text: str, review_id: str = "input") -> ReviewAnalysis:
        return self.analyze(Review(review_id, text, detect_variant(text, self.hints), None, None, "input"))

    def analyze(self, review: Review) -> ReviewAnalysis:
        cfg = self.config
        norm = normalize(review.raw_text)
        clauses = segment_clauses(norm, cfg.cues) if norm.text else []
        if not clauses:
            raise PipelineError("textprep", f"review {review.id!r} has no text after normalization")
        items = []
        for clause in clauses:
            toks = words(clause.text)
            try:
                raw = score(self.backend, clause.text)
            except Exception as exc:
                raise PipelineError("classify", str(exc)) from exc
            L = lexicon_score(match_phrases(self.lexicon, toks))
            corrected = apply_correction(raw, L, cfg.beta)
            rel = score_aspects(toks, self.seeds, self.idf)
            if review.gold_aspect is not None and review.gold_aspect is not AspectLabel.GENERAL:
                aspect = review.gold_aspect
            else:
                aspect = assign_aspect(rel, cfg.aspect_threshold)
            relevance = rel[aspect] if aspect is not AspectLabel.GENERAL else max(rel.relevance)
            items.append(ClauseSentiment(clause, corrected, aspect, relevance, rel, L))

        aggs = []
        for aspect in (*NAMED_ASPECTS, AspectLabel.GENERAL):
            group = [c for c in items if c.aspect is aspect]
            if group:
                aggs.append(aggregate_clauses(group, cfg.neutral_low, cfg.neutral_high))
        overall = fuse([c.scores for c in items], [c.relevance for c in items])
        idx = polarity_index(overall)
        label, lean = label_from_index(min(max(idx, 0.0), 1.0), cfg.neutral_low, cfg.neutral_high)
        return ReviewAnalysis(review, norm, tuple(items), tuple(aggs), overall, idx, label, lean)

    def analyze_many(self, reviews: Sequence[Review], workers: Optional[int] = None) -> list[ReviewAnalysis]:
        """Analyses in input order; results do not depend on ``workers``."""
        workers = self.config.workers if workers is None else workers
        if workers > 1 and not isinstance(self.backend, ExternalScorer):
            with ThreadPoolExecutor(max_workers=workers) as pool:
                return list(pool.map(self.analyze, reviews))
        return [self.analyze(r) for r in reviews]


def _make_backend(cfg: EngineConfig, vocab: SubwordVocab, train: Optional[Dataset]):
    if cfg.backend == "external":
        ac = AdapterConfig.parse(
            cfg.adapter_endpoint, timeout=cfg.adapter_timeout, concurrent=cfg.adapter_concurrent
        )
        return ExternalScorer(ac)
    if cfg.model_path is not None:
        model = load_model(cfg.model_path, vocab)
        if model.name != cfg.backend:
            raise ValueError(f"model file {cfg.model_path} holds a {model.name!r} model, not {cfg.backend!r}")
        return model
    if train is None:
        raise ValueError("no model file and no training corpus configured")
    if cfg.backend == "nb":
        return train_nb(train, vocab, alpha=cfg.alpha)
    return train_linear(train, vocab, lr=cfg.lr, epochs=cfg.epochs, l2=cfg.l2, seed=cfg.seed)
