"""Behavioral metric tests: cue matching, repetition, sentiment, toxicity."""

import logging

import numpy as np
import pytest

from coreval._http import EndpointError
from coreval.behavior import (
    CUE_NAMES, CueLexicon, behavior_profile, cue_rate,
    default_cue_lexicons, load_cue_lexicon, load_sentiment_lexicon, repetition_rate,
    sentiment, toxicity,
)
from coreval.corpus import extract_ngrams
from coreval.metric import repeated_fraction
from conftest import make_corpus, make_dialog


def lexicon(name, phrases):
    return CueLexicon(name=name, phrases=frozenset(tuple(p.split()) for p in phrases))


class TestCueRate:
    def test_single_match(self):
        lex = lexicon("agreement", ["agree"])
        assert cue_rate(["i", "agree", "completely"], lex) == pytest.approx(1 / 3)

    def test_no_matches(self):
        lex = lexicon("agreement", ["agree"])
        assert cue_rate(["nothing", "matches", "here"], lex) == 0.0

    def test_all_tokens_match(self):
        lex = lexicon("hedging", ["maybe", "perhaps"])
        assert cue_rate(["maybe", "perhaps"], lex) == 1.0

    def test_longest_match_first(self):
        lex = lexicon("agreement", ["sounds good", "good"])
        # "sounds good" consumes both tokens: one match, not two
        assert cue_rate(["sounds", "good"], lex) == pytest.approx(1 / 2)

    def test_non_overlapping(self):
        lex = lexicon("hedging", ["kind of"])
        assert cue_rate(["kind", "of", "kind", "of"], lex) == pytest.approx(2 / 4)

    def test_rate_bounded_by_one(self):
        rng = np.random.default_rng(0)
        lex = lexicon("hedging", ["maybe", "kind of", "i think"])
        pool = ["maybe", "kind", "of", "i", "think", "other", "words"]
        for _ in range(50):
            tokens = [pool[int(i)] for i in rng.integers(0, len(pool), rng.integers(1, 20))]
            assert 0.0 <= cue_rate(tokens, lex) <= 1.0

    def test_utterance_boundary_invariance(self):
        # matching runs over the dialog's concatenated stream, so a phrase
        # split across utterances still matches
        lex = lexicon("agreement", ["sounds good"])
        d1 = make_dialog("d1", "neutral", ["that sounds", "good to me"])
        assert cue_rate(d1.tokens(), lex) == pytest.approx(1 / 5)

    def test_empty_dialog_raises(self):
        with pytest.raises(ValueError):
            cue_rate([], lexicon("agreement", ["agree"]))


class TestRepetitionRate:
    def test_all_identical_unigrams(self):
        assert repetition_rate(["a", "a", "a", "a"], 1) == 1.0

    def test_all_distinct_unigrams(self):
        assert repetition_rate(["a", "b", "c"], 1) == 0.0

    def test_matches_metric_repeated_fraction(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            texts = [" ".join(f"w{int(w)}" for w in rng.integers(0, 5, rng.integers(3, 10)))
                     for _ in range(int(rng.integers(2, 5)))]
            dialog = make_dialog("d", "neutral", texts)
            corpus = make_corpus([("d", "neutral", texts)])
            expected = repeated_fraction(extract_ngrams(corpus, 3))
            assert repetition_rate(dialog.tokens(), 3) == expected

    def test_short_dialog_zero_with_warning(self, caplog):
        with caplog.at_level(logging.WARNING, logger="coreval.behavior"):
            assert repetition_rate(["a", "b"], 3) == 0.0
        assert "fewer than n" in caplog.text


class TestSentiment:
    def test_empty_text(self):
        assert sentiment("", {"good": 0.7}) == 0.0

    def test_single_word(self):
        assert sentiment("Great!", {"great": 0.8}) == 0.8

    def test_opposites_cancel(self):
        lex = {"best": 1.0, "worst": -1.0}
        assert sentiment("best worst", lex) == 0.0

    def test_bundled_lexicon(self):
        lex = load_sentiment_lexicon()
        assert len(lex) > 100
        assert all(-1.0 <= v <= 1.0 for v in lex.values())
        assert sentiment("this is great and wonderful", lex) > 0.0
        assert sentiment("this is terrible and awful", lex) < 0.0


class TestToxicity:
    def test_passthrough(self, mock_service):
        service = mock_service(lambda path, payload: (200, {"scores": [0.02]}))
        assert toxicity(service.url, "hello") == 0.02

    def test_out_of_range_rejected(self, mock_service):
        service = mock_service(lambda path, payload: (200, {"scores": [1.5]}))
        with pytest.raises(EndpointError, match="out of range"):
            toxicity(service.url, "hello")

    def test_retries_then_succeeds(self, mock_service):
        state = {"n": 0}

        def flaky(path, payload):
            state["n"] += 1
            if state["n"] == 1:
                return 500, {}
            return 200, {"scores": [0.4]}

        service = mock_service(flaky)
        assert toxicity(service.url, "hello", backoff=0.01) == 0.4


class TestBehaviorProfile:
    def test_no_endpoint_means_absent_toxicity(self):
        dialog = make_dialog("d", "neutral", ["i agree maybe", "no not really"])
        profile = behavior_profile(dialog)
        assert profile.toxicity is None

    def test_with_endpoint(self, mock_service):
        service = mock_service(lambda path, payload: (200, {"scores": [0.11]}))
        dialog = make_dialog("d", "neutral", ["i agree maybe", "no not really"])
        profile = behavior_profile(dialog, toxicity_endpoint=service.url)
        assert profile.toxicity == 0.11

    def test_rates_in_unit_interval(self):
        rng = np.random.default_rng(2)
        pool = ["agree", "no", "maybe", "the", "cat", "sat", "i", "think", "wrong", "yes"]
        for _ in range(25):
            texts = [" ".join(pool[int(i)] for i in rng.integers(0, len(pool), 8))
                     for _ in range(3)]
            profile = behavior_profile(make_dialog("d", "neutral", texts))
            for rate in (profile.repetition_rate, profile.agreement_rate,
                         profile.disagreement_rate, profile.hedging_rate):
                assert 0.0 <= rate <= 1.0
            assert -1.0 <= profile.sentiment <= 1.0

    def test_repeat_invocation_identical(self):
        dialog = make_dialog("d", "neutral", ["i agree this is great", "maybe not really"])
        assert behavior_profile(dialog) == behavior_profile(dialog)

    def test_custom_lexicon_overrides(self, tmp_path):
        path = tmp_path / "agreement.txt"
        path.write_text("totally\n")
        lex = load_cue_lexicon("agreement", path)
        assert lex.phrases == frozenset({("totally",)})
        dialog = make_dialog("d", "neutral", ["totally agree", "ok then words"])
        profile = behavior_profile(dialog, cue_lexicons={**default_cue_lexicons(),
                                                         "agreement": lex})
        assert profile.agreement_rate == pytest.approx(1 / 5)


class TestLexiconLoading:
    def test_bundled_defaults(self):
        lexicons = default_cue_lexicons()
        assert set(lexicons) == set(CUE_NAMES)
        for lex in lexicons.values():
            assert all(1 <= len(p) <= 3 for p in lex.phrases)

    def test_lexicon_validation(self):
        with pytest.raises(ValueError, match="1-3 tokens"):
            CueLexicon(name="hedging", phrases=frozenset({("a", "b", "c", "d")}))
        with pytest.raises(ValueError, match="empty"):
            CueLexicon(name="hedging", phrases=frozenset())

    def test_bad_sentiment_file(self, tmp_path):
        path = tmp_path / "sent.tsv"
        path.write_text("word without tab\n")
        with pytest.raises(ValueError, match="word<TAB>polarity"):
            load_sentiment_lexicon(path)
