import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from absa.corpus import (
    CorpusError,
    Dataset,
    Review,
    augment_lexical,
    detect_variant,
    load_corpus,
    stratified_split,
)
from absa.labels import AspectLabel, Sentiment, Variant
from absa.lexicon import Lexicon, LexiconEntry, lexicon_score, match_phrases
from absa.textprep import normalize, words


def write_jsonl(path, records):
    path.write_text("".join(json.dumps(r, ensure_ascii=False) + "\n" for r in records), encoding="utf-8")
    return path


def balanced(n_per_class, prefix="r"):
    reviews = []
    for s in Sentiment:
        for i in range(n_per_class):
            reviews.append(Review(f"{prefix}{s.value}{i}", f"text {i}", Variant.ENGLISH, None, s))
    return Dataset(tuple(reviews))


class TestLoadCorpus:
    def test_empty_file(self, tmp_path):
        p = tmp_path / "empty.jsonl"
        p.write_text("")
        ds = load_corpus(p)
        assert len(ds) == 0 and ds.stats.total == 0

    def test_single_record(self, tmp_path):
        p = write_jsonl(tmp_path / "one.jsonl", [{"id": "r1", "text": "good service", "sentiment": "Positive"}])
        ds = load_corpus(p)
        assert len(ds) == 1
        assert ds.stats.sentiment_counts()["Positive"] == 1

    def test_csv_with_quotes(self, tmp_path):
        p = tmp_path / "c.csv"
        p.write_text('id,text,variant,aspect,sentiment\nr1,"slow, but ok",English,LoanCredit,Neutral\n',
                     encoding="utf-8")
        (r,) = load_corpus(p)
        assert r.raw_text == "slow, but ok"
        assert r.gold_aspect is AspectLabel.LOAN_CREDIT and r.gold_sentiment is Sentiment.NEUTRAL

    def test_malformed_line_number(self, tmp_path):
        p = tmp_path / "bad.jsonl"
        p.write_text('{"id": "a", "text": "x"}\n{"id": "b", "text": \n', encoding="utf-8")
        with pytest.raises(CorpusError, match=":2:"):
            load_corpus(p)

    def test_duplicate_id(self, tmp_path):
        p = write_jsonl(tmp_path / "d.jsonl", [{"id": "a", "text": "x"}, {"id": "a", "text": "y"}])
        with pytest.raises(CorpusError, match="duplicate id"):
            load_corpus(p)

    @pytest.mark.parametrize("field,value", [("sentiment", "Great"), ("aspect", "Weather")])
    def test_unknown_label(self, tmp_path, field, value):
        p = write_jsonl(tmp_path / "u.jsonl", [{"id": "a", "text": "x", field: value}])
        with pytest.raises(CorpusError, match=":1:"):
            load_corpus(p)

    def test_empty_text_rejected(self, tmp_path):
        p = write_jsonl(tmp_path / "e.jsonl", [{"id": "a", "text": "   "}])
        with pytest.raises(CorpusError, match="empty"):
            load_corpus(p)

    def test_ordering_preserved(self, corpus):
        assert [r.id for r in corpus] == sorted(r.id for r in corpus)

    def test_toy_english_ratio(self, data_dir):
        ds = load_corpus(data_dir / "toy_english.jsonl")
        assert ds.stats.sentiment_counts() == {"Negative": 30, "Neutral": 33, "Positive": 37}
        assert set(ds.stats.by_variant) == {Variant.ENGLISH}

    def test_bundled_corpus_shape(self, corpus):
        st_ = corpus.stats
        assert st_.total == 600
        assert st_.sentiment_counts() == {"Negative": 200, "Neutral": 200, "Positive": 200}
        assert {a: st_.by_aspect[a] for a in st_.by_aspect} == {a: 120 for a in AspectLabel if a is not AspectLabel.GENERAL}
        for dim in (st_.by_sentiment, st_.by_aspect, st_.by_variant):
            assert sum(dim.values()) == st_.total

    def test_dataset_is_immutable(self, corpus):
        with pytest.raises(AttributeError):
            corpus.reviews = ()


class TestDetectVariant:
    @pytest.mark.parametrize(
        "text,expected",
        [
            ("මෙම බැංකුවේ සේවාව හොඳයි", Variant.SINHALA),
            ("Customer service ගොඩක් හොඳයි.", Variant.CODEMIXED),
            ("", Variant.UNKNOWN),
            ("12345 !!", Variant.UNKNOWN),
            ("Me bank eke service eka hari hodai.", Variant.SINGLISH),
            ("The service was excellent", Variant.ENGLISH),
        ],
    )
    def test_examples(self, hints, text, expected):
        assert detect_variant(text, hints) is expected

    def test_without_hints_latin_is_english(self):
        assert detect_variant("service eka hari hodai") is Variant.ENGLISH

    @settings(max_examples=200, deadline=None)
    @given(st.text(max_size=30))
    def test_total_and_pure(self, hints, text):
        a = detect_variant(text, hints)
        assert a is detect_variant(text, hints)
        assert isinstance(a, Variant)

    def test_bundled_labels_agree(self, data_dir, hints):
        # every bundled review's declared variant is what detection would say
        for r in load_corpus(data_dir / "corpus.jsonl"):
            assert detect_variant(r.raw_text, hints) is r.variant, r.id


class TestStratifiedSplit:
    def test_sizes(self):
        tr, dv, te = stratified_split(balanced(30), (0.8, 0.1, 0.1), seed=7)
        assert (len(tr), len(dv), len(te)) == (72, 9, 9)

    def test_deterministic(self):
        ds = balanced(30)
        a = stratified_split(ds, (0.8, 0.1, 0.1), seed=7)
        b = stratified_split(ds, (0.8, 0.1, 0.1), seed=7)
        assert [[r.id for r in p] for p in a] == [[r.id for r in p] for p in b]

    def test_balanced_within_one(self, data_dir):
        ds = load_corpus(data_dir / "toy_english.jsonl")
        for seed in range(20):
            parts = stratified_split(ds, (0.8, 0.1, 0.1), seed=seed)
            for part, ratio in zip(parts, (0.8, 0.1, 0.1)):
                for s in Sentiment:
                    expected = ratio * ds.stats.by_sentiment[s]
                    assert abs(part.stats.by_sentiment.get(s, 0) - expected) <= 1

    def test_balanced_30_30_30(self):
        for seed in range(10):
            for part in stratified_split(balanced(30), (0.7, 0.15, 0.15), seed=seed):
                counts = [part.stats.by_sentiment.get(s, 0) for s in Sentiment]
                assert max(counts) - min(counts) <= 1

    def test_disjoint_exhaustive_and_stats_add_up(self, corpus):
        parts = stratified_split(corpus, (0.6, 0.2, 0.2), seed=3)
        ids = [r.id for p in parts for r in p]
        assert sorted(ids) == sorted(r.id for r in corpus)
        total = parts[0].stats + parts[1].stats + parts[2].stats
        assert total == corpus.stats

    @pytest.mark.parametrize("ratios", [(0.5, 0.5, 0.1), (0.8, 0.2, 0.0), (1.0, 0.0), (-0.1, 0.6, 0.5)])
    def test_bad_ratios(self, ratios):
        with pytest.raises(ValueError):
            stratified_split(balanced(5), ratios, 0)

    def test_too_small(self):
        with pytest.raises(CorpusError, match="at least 3"):
            stratified_split(balanced(2), (0.8, 0.1, 0.1), 0)


class TestAugmentLexical:
    def test_no_match_unchanged(self, lexicon):
        r = Review("a", "The app is fine", Variant.ENGLISH, None, Sentiment.NEUTRAL)
        assert augment_lexical(r, lexicon, seed=1) is r

    def test_hari_hodai_substituted(self, lexicon):
        r = Review("a", "Service eka hari hodai!", Variant.SINGLISH, None, Sentiment.POSITIVE)
        out = augment_lexical(r, lexicon, seed=1)
        assert out.raw_text != r.raw_text
        assert out.gold_sentiment is Sentiment.POSITIVE
        assert out.raw_text.startswith("Service eka ") and out.raw_text.endswith("!")
        (m,) = match_phrases(lexicon, words(normalize(out.raw_text))[2:])
        assert m.entry.weight > 0 and m.entry.variant is Variant.SINGLISH

    def test_deterministic(self, lexicon):
        r = Review("a", "app eka lag wenawa", Variant.SINGLISH, None, Sentiment.NEGATIVE)
        assert augment_lexical(r, lexicon, 5) == augment_lexical(r, lexicon, 5)

    def test_sign_preserved_on_corpus(self, corpus, lexicon):
        def L(text):
            return lexicon_score(match_phrases(lexicon, words(normalize(text))))

        changed = 0
        for i, r in enumerate(corpus):
            out = augment_lexical(r, lexicon, seed=i)
            assert out.gold_sentiment is r.gold_sentiment
            assert (L(out.raw_text) > 0) == (L(r.raw_text) > 0)
            assert (L(out.raw_text) < 0) == (L(r.raw_text) < 0)
            changed += out is not r
        assert changed > 50

    def test_only_same_variant(self):
        lex = Lexicon([
            LexiconEntry(("hodai",), 0.5, Variant.SINGLISH),
            LexiconEntry(("good",), 0.5, Variant.ENGLISH),
        ])
        r = Review("a", "hodai", Variant.SINGLISH)
        assert augment_lexical(r, lex, 0) is r
