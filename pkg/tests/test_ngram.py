import pytest
from hypothesis import given, settings, strategies as st

from langprofile import ngram
from langprofile.chat import parse_chat
from langprofile.errors import EmptyCorpus, ZeroProbability
from langprofile.ngram import EOS, UNK, load_model, perplexity, perplexity_features, save_model, train


def chi(*utterances: str):
    return parse_chat("".join(f"*CHI:\t{u} .\n" for u in utterances))


def chi_group(group: str, *utterances: str):
    header = f"@ID:\teng|synth|CHI|5;00.|male|{group}||Target_Child|||\n"
    return parse_chat(header + "".join(f"*CHI:\t{u} .\n" for u in utterances))


class TestTrain:
    def test_unigram_counts_with_padding(self):
        # stream is [a, b, </s>] so the MLE of each symbol is 1/3
        m = train([chi("a b")], order=1, smoothing_k=0)
        assert m.prob(("a",)) == 1 / 3
        assert m.prob(("b",)) == 1 / 3
        assert m.prob((EOS,)) == 1 / 3

    def test_normalization_identity(self):
        m = train([chi("a b a", "b c a")], order=2, smoothing_k=0.5)
        for ctx in set(m.context_totals):
            total = sum(m.prob(ctx + (w,)) for w in m.vocab)
            assert abs(total - 1.0) < 1e-9
        # unseen context still normalizes under smoothing
        total = sum(m.prob(("zzz", w)) for w in m.vocab)
        assert abs(total - 1.0) < 1e-9

    def test_unk_threshold(self):
        m = train([chi("cat cat zebra")], order=1, smoothing_k=1, unk_threshold=2)
        assert "zebra" not in m.vocab
        assert UNK in m.vocab
        # a transcript of unseen words scores identically to the rare type
        assert perplexity(m, chi("zebra")) == perplexity(m, chi("qux"))

    def test_empty_corpus(self):
        with pytest.raises(EmptyCorpus):
            train([], order=1)

    def test_bad_order(self):
        with pytest.raises(ValueError):
            train([chi("a")], order=4)


class TestPerplexity:
    def test_uniform_model(self):
        # 4 equiprobable types, no padding: PP equals the vocabulary size
        m = train([chi("a b c d")], order=1, smoothing_k=0, pad=False)
        assert abs(perplexity(m, chi("a b c d")) - 4.0) < 1e-9

    def test_certainty(self):
        m = train([chi("a a a")], order=1, smoothing_k=0, pad=False)
        assert perplexity(m, chi("a")) == 1.0

    def test_add_one_bigram_hand_case(self):
        # train "a b": vocab {a, b, <unk>, </s>}; every scored bigram has
        # probability (1+1)/(1+4), so PP = 5/2
        m = train([chi("a b")], order=2, smoothing_k=1)
        assert abs(perplexity(m, chi("a b")) - 2.5) < 1e-9

    def test_zero_probability_unsmoothed(self):
        m = train([chi("a a")], order=1, smoothing_k=0)
        with pytest.raises(ZeroProbability):
            perplexity(m, chi("b"))

    def test_lower_bound(self):
        m = train([chi("a b c a b")], order=2, smoothing_k=1)
        for text in ("a b", "c c c", "zebra"):
            assert perplexity(m, chi(text)) >= 1.0 - 1e-12

    def test_smoothing_pulls_toward_vocab_size(self):
        # in-distribution text: as k grows, PP climbs monotonically
        # toward |vocab| = 3 ({a, b, <unk>})
        m0 = train([chi("a a a b")], order=1, smoothing_k=0, pad=False)
        v = m0.vocab_size
        gaps = []
        for k in (0.0, 0.1, 0.5, 1.0, 2.0, 5.0, 20.0, 200.0):
            m = train([chi("a a a b")], order=1, smoothing_k=k, pad=False)
            gaps.append(abs(perplexity(m, chi("a a a b")) - v))
        assert all(a > b for a, b in zip(gaps, gaps[1:]))

    @settings(max_examples=25, deadline=None)
    @given(st.lists(st.sampled_from(["a", "b", "c", "d"]), min_size=1, max_size=12),
           st.integers(1, 3))
    def test_perplexity_at_least_one(self, tokens, order):
        corpus = chi(" ".join(tokens), "a b c d")
        m = train([corpus], order=order, smoothing_k=1)
        assert perplexity(m, chi(" ".join(tokens))) >= 1.0 - 1e-12


class TestPerplexityFeatures:
    def test_identical_corpora_symmetry(self):
        sli = chi_group("SLI", "the dog ran", "he fell")
        td = chi_group("TD", "the dog ran", "he fell")
        models = ngram.train_group_models([sli, td])
        feats = perplexity_features(chi("the dog ran"), models["SLI"], models["TD"])
        for order in (1, 2, 3):
            assert feats[f"s_{order}g_ppl"] == feats[f"d_{order}g_ppl"]
        assert all(v >= 1.0 for v in feats.values())

    def test_separable_corpora_ordering(self):
        # disjoint vocabularies: a TD-drawn transcript is predictable for
        # the TD models and all-<unk> for the SLI models
        sli = chi_group("SLI", "zig zag zog", "zag zig", "zog zig zag")
        td = chi_group("TD", "the dog ran home", "the dog fell", "he ran home")
        models = ngram.train_group_models([sli, td])
        feats = perplexity_features(chi("the dog ran home"),
                                    models["SLI"], models["TD"])
        for order in (1, 2, 3):
            assert feats[f"d_{order}g_ppl"] < feats[f"s_{order}g_ppl"]

    def test_group_missing(self):
        td = chi_group("TD", "the dog ran")
        with pytest.raises(EmptyCorpus):
            ngram.train_group_models([td])


class TestSaveLoad:
    def test_round_trip_bit_exact(self, tmp_path):
        m = train([chi("the dog ran home", "the dog fell")], order=2,
                  smoothing_k=0.5, unk_threshold=1)
        p1 = tmp_path / "m1.lm"
        p2 = tmp_path / "m2.lm"
        save_model(m, p1)
        loaded = load_model(p1)
        save_model(loaded, p2)
        assert p1.read_bytes() == p2.read_bytes()
        assert loaded.counts == m.counts
        assert loaded.context_totals == m.context_totals
        assert loaded.vocab == m.vocab
        assert (loaded.order, loaded.smoothing_k, loaded.unk_threshold,
                loaded.pad) == (m.order, m.smoothing_k, m.unk_threshold, m.pad)

    def test_loaded_model_scores_identically(self, tmp_path):
        m = train([chi("a b c", "b c a")], order=3, smoothing_k=1)
        save_model(m, tmp_path / "m.lm")
        loaded = load_model(tmp_path / "m.lm")
        t = chi("a b c")
        assert perplexity(m, t) == perplexity(loaded, t)
