import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from absa.classify import SentimentScores
from absa.corpus import Review, load_corpus
from absa.evaluation import compare_backends, confusion, metrics, predict, tune_beta
from absa.labels import Sentiment, Variant

labels = st.sampled_from(list(Sentiment))


class Const:
    def __init__(self, probs, name="const"):
        self.probs, self.name = probs, name

    def score(self, text):
        return SentimentScores(*self.probs)


class Broken:
    name = "broken"

    def score(self, text):
        raise RuntimeError("adapter went away")


class TestMetrics:
    def test_worked_example(self):
        gold = ["Negative", "Negative", "Neutral", "Neutral", "Positive", "Positive"]
        pred = ["Negative", "Negative", "Positive", "Positive", "Positive", "Positive"]
        m = metrics(confusion(gold, pred))
        assert m.accuracy == pytest.approx(2 / 3)
        assert m.f1 == pytest.approx({"Negative": 1.0, "Neutral": 0.0, "Positive": 2 / 3})
        assert m.macro_f1 == pytest.approx(5 / 9)

    def test_confusion_layout(self):
        cm = confusion(["Negative", "Positive"], ["Positive", "Positive"])
        assert cm.to_list() == [[0, 0, 1], [0, 0, 0], [0, 0, 1]] and cm.total == 2

    def test_zero_division_is_zero(self):
        m = metrics(confusion(["Positive"], ["Positive"]))
        assert m.precision["Neutral"] == 0.0 and m.recall["Negative"] == 0.0
        assert m.macro_f1 == pytest.approx(1 / 3)

    def test_mismatch_and_empty(self):
        with pytest.raises(ValueError, match="length"):
            confusion(["Positive"], [])
        with pytest.raises(ValueError):
            confusion([], [])

    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.tuples(labels, labels), min_size=1, max_size=40))
    def test_invariants(self, pairs):
        g, p = zip(*pairs)
        cm = confusion(g, p)
        m = metrics(cm)
        assert cm.total == len(pairs)
        assert m.accuracy == pytest.approx(np.mean([a is b for a, b in pairs]))
        for d in (m.precision, m.recall, m.f1):
            assert all(0 <= v <= 1 for v in d.values())
        assert min(m.f1.values()) <= m.macro_f1 <= max(m.f1.values())

    def test_perfect(self):
        g = ["Negative", "Neutral", "Positive"] * 3
        m = metrics(confusion(g, g))
        assert m.accuracy == 1.0 and m.macro_f1 == 1.0


class TestPredict:
    def test_lexicon_flips(self, lexicon):
        near = Const((0.32, 0.33, 0.35))
        assert predict(near, "app eka lag wenawa") is Sentiment.POSITIVE
        assert predict(near, "app eka lag wenawa", lexicon) is Sentiment.NEGATIVE


class TestCompare:
    def test_rows_and_errors(self, data_dir, lexicon, nb_model):
        test = load_corpus(data_dir / "singlish_slice.jsonl")
        table = compare_backends([nb_model, Broken()], test, lexicon)
        assert [(r.backend, r.lexicon) for r in table.rows] == [
            ("nb", False), ("nb", True), ("broken", False), ("broken", True)]
        assert table.rows[0].accuracy > 0.8 and table.rows[0].n == 60
        assert "adapter went away" in table.rows[2].error and table.rows[2].accuracy is None
        assert "error" in table.to_text()
        rows = json.loads(table.to_json())
        assert rows[0]["backend"] == "nb" and "error" not in rows[0]

    def test_no_lexicon_skips_rows(self, data_dir, nb_model):
        test = load_corpus(data_dir / "singlish_slice.jsonl")
        assert len(compare_backends([nb_model], test, None).rows) == 1

    def test_per_backend_settings(self, data_dir, lexicon, nb_model, linear_model):
        test = load_corpus(data_dir / "singlish_slice.jsonl")
        table = compare_backends([(nb_model, [True]), linear_model], test, lexicon)
        assert [(r.backend, r.lexicon) for r in table.rows] == [
            ("nb", True), ("linear", False), ("linear", True)]

    def test_text_table_header(self, data_dir, nb_model):
        test = load_corpus(data_dir / "singlish_slice.jsonl")
        text = compare_backends([nb_model], test).to_text()
        assert text.splitlines()[0].split()[:3] == ["Model", "Lexicon", "Accuracy"]


class TestTuneBeta:
    def test_picks_best_on_dev(self, lexicon):
        near = Const((0.32, 0.33, 0.35))
        dev = [Review("a", "app eka lag wenawa", Variant.SINGLISH, None, Sentiment.NEGATIVE),
               Review("b", "service eka hari hodai", Variant.SINGLISH, None, Sentiment.POSITIVE)]
        beta, acc = tune_beta(near, dev, lexicon, grid=(0.0, 0.5, 1.0))
        assert acc == {0.0: 0.5, 0.5: 1.0, 1.0: 1.0} and beta == 0.5

    def test_no_labels(self, lexicon):
        with pytest.raises(ValueError):
            tune_beta(Const((0.2, 0.3, 0.5)), [Review("a", "x", Variant.ENGLISH)], lexicon)

    def test_bad_grid(self, lexicon):
        dev = [Review("a", "x", Variant.ENGLISH, None, Sentiment.NEUTRAL)]
        with pytest.raises(ValueError):
            tune_beta(Const((0.2, 0.3, 0.5)), dev, lexicon, grid=(-1.0,))
