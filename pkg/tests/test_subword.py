from concurrent.futures import ThreadPoolExecutor

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from absa.subword import (
    MARKER,
    UNK,
    TokenizerError,
    decode,
    encode,
    load_vocab,
    save_vocab,
    train_subword,
)
from absa.textprep import is_latin_letter, is_sinhala, normalize


class TestTrain:
    def test_first_merge_is_aa(self):
        # alphabet {a, b, ▁a, ▁b}; pair counts per word "▁a a a b": (▁a,a)=1 (a,a)=1 (a,b)=1,
        # times 2 words; all tie at 2 and "aa" < "ab" < "▁aa"
        v = train_subword(["aaab", "aaab"], vocab_size=4 + 2)
        assert v.merges[0] == ("a", "a")
        assert v.merges == (("a", "a"), ("aa", "b"))

    def test_alphabet_only(self):
        v = train_subword(["aaab", "aaab"], vocab_size=4)
        assert v.merges == ()
        assert encode(v, "aaab").tokens == ("▁a", "a", "a", "b")

    def test_vocab_below_alphabet(self):
        with pytest.raises(TokenizerError, match="alphabet"):
            train_subword(["abc"], vocab_size=3)

    @pytest.mark.parametrize("texts", [[], [""], ["   "]])
    def test_empty_corpus(self, texts):
        with pytest.raises(TokenizerError, match="empty"):
            train_subword(texts)

    @pytest.mark.parametrize("coverage", [0.5, 1.01])
    def test_coverage_range(self, coverage):
        with pytest.raises(TokenizerError):
            train_subword(["abc"], coverage=coverage)

    def test_deterministic(self, corpus):
        texts = [normalize(r.raw_text).text for r in corpus]
        assert train_subword(texts, 500) == train_subword(texts, 500)

    def test_monotone_vocabulary(self, corpus):
        texts = [normalize(r.raw_text).text for r in corpus]
        small = train_subword(texts, 300)
        large = train_subword(texts, 600)
        assert small.merges == large.merges[: len(small.merges)]
        assert len(large.merges) > len(small.merges)

    def test_merges_reference_pieces(self, vocab):
        pieces = set(vocab.pieces)
        for a, b in vocab.merges:
            assert a in pieces and b in pieces and a + b in pieces
        assert not any(s in a + b for a, b in vocab.merges for s in vocab.specials)

    def test_rare_characters_become_unk(self):
        texts = ["aaaa bbbb"] * 500 + ["z"]
        v = train_subword(texts, vocab_size=50, coverage=0.999)
        assert "z" not in v.pieces
        assert encode(v, "az").tokens[-1] == UNK


class TestEncode:
    def test_unseen_sinhala_word_splits(self):
        v = train_subword(["බැංකුව සේවාව", "බැංකුව"], vocab_size=40)
        toks = encode(v, "බැංකුවේ").tokens
        assert len(toks) >= 2
        assert toks[0].startswith(MARKER)

    def test_single_piece(self, vocab):
        piece = next(p for p in vocab.pieces if p.startswith(MARKER) and len(p) > 4)
        assert encode(vocab, piece[1:]).tokens == (piece,)

    def test_code_mixed(self, vocab):
        toks = encode(vocab, normalize("Customer service ගොඩක් හොඳයි.")).tokens
        initial = [t for t in toks if t.startswith(MARKER)]
        assert len(initial) == 4
        assert any(is_latin_letter(c) for t in toks for c in t)
        assert any(is_sinhala(c) for t in toks for c in t)

    def test_offsets_partition_non_space(self, vocab, corpus):
        for r in list(corpus)[:200]:
            text = normalize(r.raw_text).text
            enc = encode(vocab, text)
            covered = []
            prev = 0
            for (s, e), tok in zip(enc.offsets, enc.tokens):
                assert prev <= s < e
                if UNK not in tok:
                    assert text[s:e] == tok.removeprefix(MARKER)
                covered.extend(range(s, e))
                prev = e
            assert covered == [i for i, c in enumerate(text) if c != " "]

    def test_thread_safe(self, vocab, corpus):
        texts = [normalize(r.raw_text).text for r in corpus]
        serial = [encode(vocab, t) for t in texts]
        with ThreadPoolExecutor(8) as pool:
            assert list(pool.map(lambda t: encode(vocab, t), texts)) == serial


class TestDecode:
    def test_empty(self, vocab):
        assert decode(vocab, []) == ""

    def test_marker_piece(self):
        v = train_subword(["bank bank bank"], vocab_size=100)
        assert "▁bank" in v.pieces
        assert decode(v, ["▁bank"]) == "bank"

    def test_unknown_piece(self, vocab):
        with pytest.raises(TokenizerError, match="unknown piece"):
            decode(vocab, ["▁definitely-not-a-piece"])

    def test_round_trip_unlabeled_lines(self, vocab, data_dir):
        lines = (data_dir / "unlabeled.txt").read_text(encoding="utf-8").splitlines()
        encoded = [(t, encode(vocab, t)) for t in (normalize(x).text for x in lines)]
        clean = [(t, e) for t, e in encoded if UNK not in "".join(e.tokens)][:1000]
        assert len(clean) == 1000
        assert all(decode(vocab, e.tokens) == t for t, e in clean)

    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.sampled_from(list("abdeilnorstkw ") + ["ක", "ා", "ි", "ු", "ේ"]), max_size=30))
    def test_round_trip_property(self, vocab, chars):
        text = normalize("".join(chars)).text
        enc = encode(vocab, text)
        if UNK not in "".join(enc.tokens):
            assert decode(vocab, enc.tokens) == text


class TestPersistence:
    def test_bit_exact_reload(self, vocab, tmp_path):
        p = tmp_path / "v.bpe"
        save_vocab(vocab, p)
        again = load_vocab(p)
        assert again == vocab
        save_vocab(again, tmp_path / "w.bpe")
        assert p.read_bytes() == (tmp_path / "w.bpe").read_bytes()

    def test_retrain_byte_identical(self, corpus, tmp_path):
        texts = [normalize(r.raw_text).text for r in corpus]
        save_vocab(train_subword(texts), tmp_path / "a")
        save_vocab(train_subword(texts), tmp_path / "b")
        assert (tmp_path / "a").read_bytes() == (tmp_path / "b").read_bytes()

    def test_header(self, vocab, tmp_path):
        save_vocab(vocab, tmp_path / "v")
        head = (tmp_path / "v").read_text(encoding="utf-8").split("\n")[0].split("\t")
        assert head[:3] == ["#absa-bpe", "1", str(vocab.vocab_size)]

    def test_rejects_foreign_file(self, tmp_path):
        (tmp_path / "x").write_text("hello\n")
        with pytest.raises(TokenizerError):
            load_vocab(tmp_path / "x")
