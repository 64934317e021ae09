import dataclasses
import json
import math

import jsonschema
import pytest

from absa.config import load_config
from absa.corpus import Review, load_corpus
from absa.labels import NAMED_ASPECTS, AspectLabel, Sentiment, Variant
from absa.pipeline import CorrectedScorer, Engine, PipelineError
from absa.report import build_report, dumps, highlight, render_html, validate_report, write_atomic


@pytest.fixture(scope="module")
def sample(data_dir, hints):
    # every tenth review keeps all aspects and variants present
    return list(load_corpus(data_dir / "corpus.jsonl", hints=hints))[::10]


@pytest.fixture(scope="module")
def report(engine, sample):
    return build_report(engine, engine.analyze_many(sample), "sample")


class TestAnalyze:
    def test_contrastive_sentence(self, engine):
        a = engine.analyze_text("The bank's loan approval was smooth and fast, but the interest rates were too high")
        assert len(a.clauses) == 2
        assert {c.aspect for c in a.clauses} == {AspectLabel.LOAN_CREDIT}
        (agg,) = a.aspects
        assert agg.support == 2 and 0 <= agg.polarity_index <= 1

    def test_anchor_phrases(self, engine):
        a = engine.analyze_text("loan approval delays")
        assert a.aspects[0].aspect is AspectLabel.LOAN_CREDIT and a.label is Sentiment.NEGATIVE
        b = engine.analyze_text("app eka lag wenawa")
        assert b.aspects[0].aspect is AspectLabel.DIGITAL_BANKING and b.label is Sentiment.NEGATIVE
        assert b.review.variant is Variant.SINGLISH

    def test_gold_aspect_used(self, engine):
        r = Review("x", "everything was fine", Variant.ENGLISH, AspectLabel.TRUST_SECURITY, None)
        assert engine.analyze(r).aspects[0].aspect is AspectLabel.TRUST_SECURITY

    def test_general_fallback(self, engine):
        a = engine.analyze_text("nothing to say really")
        assert a.aspects[0].aspect is AspectLabel.GENERAL

    def test_empty_text(self, engine):
        with pytest.raises(PipelineError, match="textprep"):
            engine.analyze_text("!!! ...")

    def test_simplexes(self, engine, sample):
        for a in engine.analyze_many(sample):
            for s in [a.overall] + [c.scores for c in a.clauses] + [g.scores for g in a.aspects]:
                assert abs(sum(s.as_tuple()) - 1) <= 1e-9
            assert a.polarity_index == pytest.approx(a.overall.p_pos + 0.5 * a.overall.p_neu)

    def test_workers_identical(self, engine, sample):
        one = [a.to_dict() for a in engine.analyze_many(sample, workers=1)]
        four = [a.to_dict() for a in engine.analyze_many(sample, workers=4)]
        assert one == four

    def test_corrected_scorer(self, engine):
        sc = engine.scorer
        assert isinstance(sc, CorrectedScorer) and sc.name == "nb+lexicon"
        raw = engine.backend.score("app eka lag wenawa")
        assert sc.score("app eka lag wenawa").p_neg > raw.p_neg

    def test_to_dict_is_json(self, engine):
        d = engine.analyze_text("Customer service ගොඩක් හොඳයි.").to_dict()
        assert json.loads(json.dumps(d, ensure_ascii=False)) == d
        assert d["variant"] == "CodeMixed"


class TestEngineConfig:
    def test_missing_tokenizer_and_corpus(self):
        bare = dataclasses.replace(load_config(env={}), train_corpus=None, tokenizer_path=None)
        with pytest.raises(PipelineError, match="tokenizer"):
            Engine.from_config(bare)

    def test_bad_lexicon_names_stage(self, tmp_path):
        bad = tmp_path / "bad.tsv"
        bad.write_text("x\t9\tEnglish\tbanking\n")
        cfg = load_config(env={}).replace(lexicon_paths=(bad,))
        with pytest.raises(PipelineError, match=r"^\[lexicon\]"):
            Engine.from_config(cfg)

    def test_linear_backend(self, sample):
        with Engine.from_config(load_config(env={}, backend="linear", epochs=5)) as eng:
            assert eng.scorer.name == "linear+lexicon"
            assert eng.analyze(sample[0]).label in set(Sentiment)


class TestReport:
    def test_schema_valid(self, report):
        validate_report(report)

    def test_schema_rejects_broken(self, report):
        broken = json.loads(json.dumps(report))
        del broken["aspects"][0]["label_distribution"]
        with pytest.raises(jsonschema.ValidationError):
            validate_report(broken)

    def test_five_named_aspects(self, report):
        names = [a["aspect"] for a in report["aspects"]]
        assert names[:5] == [a.value for a in NAMED_ASPECTS]

    def test_distributions_sum_to_one(self, report):
        assert math.isclose(sum(report["overall_label_distribution"].values()), 1.0)
        for a in report["aspects"]:
            if a["support"]:
                assert math.isclose(sum(a["label_distribution"].values()), 1.0)
                assert 0 <= a["mean_polarity_index"] <= 1

    def test_examples_ranked_and_explained(self, report):
        for a in report["aspects"]:
            ex = a["examples"]
            assert len(ex) <= 3
            keys = [abs(e["polarity_index"] - 0.5) for e in ex]
            assert keys == sorted(keys, reverse=True)
            if ex:
                exp = ex[0]["explanation"]
                assert exp["method"] == "lime" and exp["target_class"] == ex[0]["label"]
                assert all(e["explanation"] is None for e in ex[1:])

    def test_supports_add_up(self, report, engine, sample):
        n_aspect_rows = sum(len(a.aspects) for a in engine.analyze_many(sample))
        assert sum(a["support"] for a in report["aspects"]) == n_aspect_rows

    def test_missing_aspect_entry(self, engine, sample):
        only_loans = [r for r in sample if r.gold_aspect is AspectLabel.LOAN_CREDIT]
        rep = build_report(engine, engine.analyze_many(only_loans))
        validate_report(rep)
        empty = [a for a in rep["aspects"] if a["support"] == 0]
        assert len(empty) == 4 and all(a["mean_polarity_index"] is None for a in empty)

    def test_empty_corpus(self, engine):
        with pytest.raises(ValueError, match="empty"):
            build_report(engine, [])

    def test_shap_exact_falls_back(self, engine, sample):
        eng = Engine(engine.config.replace(explain_method="shap-exact", max_exact_tokens=4),
                     engine.vocab, engine.lexicon, engine.seeds, engine.idf, engine.backend, engine.hints)
        rep = build_report(eng, eng.analyze_many(sample[:10]))
        methods = {a["examples"][0]["explanation"]["method"] for a in rep["aspects"] if a["examples"]}
        assert methods <= {"shap-exact", "shap-kernel"} and "shap-kernel" in methods
        validate_report(rep)

    def test_deterministic_bytes(self, engine, sample):
        a = dumps(build_report(engine, engine.analyze_many(sample, workers=1)))
        b = dumps(build_report(engine, engine.analyze_many(sample, workers=3)))
        assert a == b


class TestHtml:
    def test_render(self, report):
        html = render_html(report)
        assert html.startswith("<!DOCTYPE html>") or html.lower().startswith("<!doctype html>")
        for a in report["aspects"]:
            assert a["title"] in html

    def test_escapes(self):
        exp = {"tokens": [{"token": "▁<b>", "position": 0, "weight": 0.5}], "words": [
            {"word": "<b>", "positions": [0], "weight": 0.5}]}
        assert "<b>" not in highlight(exp)

    def test_weights_colored(self, report):
        exp = next(a["examples"][0]["explanation"] for a in report["aspects"] if a["examples"])
        assert "background" in highlight(exp)


class TestWriteAtomic:
    def test_writes_all(self, tmp_path):
        write_atomic([(tmp_path / "a.json", "{}"), (tmp_path / "sub" / "b.html", "<p>")])
        assert (tmp_path / "a.json").read_text() == "{}" and (tmp_path / "sub" / "b.html").exists()

    def test_failure_leaves_nothing(self, tmp_path):
        def files():
            yield tmp_path / "a.json", "{}"
            raise RuntimeError("render failed")

        with pytest.raises(RuntimeError):
            write_atomic(files())
        assert list(tmp_path.iterdir()) == []

    def test_rename_failure_cleans_up(self, tmp_path):
        (tmp_path / "b").mkdir()
        (tmp_path / "b" / "keep").write_text("x")
        with pytest.raises(OSError):
            # renaming a file onto a non-empty directory fails after a.json was placed
            write_atomic([(tmp_path / "a.json", "{}"), (tmp_path / "b", "text")])
        assert sorted(p.name for p in tmp_path.iterdir()) == ["b"]
