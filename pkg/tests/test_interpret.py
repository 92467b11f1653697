"""Genre-mixture interpretation: word/topic/document/term profiles, timelines."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from genretopics.errors import (
    EmptyDocument,
    MissingLabel,
    MissingTopicProfile,
    MissingWordProfile,
    UnusedWord,
    WindowTooLarge,
)
from genretopics.interpret import (
    GenreDistribution,
    GenreTimeline,
    clip_word_map,
    doc_genre_profile,
    mix,
    progressive_timeline,
    term_genre_profile,
    topic_genre_profile,
    word_genre_profile,
)
from genretopics.lda import LdaModel
from genretopics.vocab import Corpus, Document, Vocabulary

from oracles import brute_doc_profile, brute_word_counts


def dist(**weights) -> GenreDistribution:
    return GenreDistribution(weights)


def corpus_of(song_specs, vocab_size) -> Corpus:
    """song_specs: list of (song_id, genre, tokens)."""
    docs = [Document(s, g, list(t)) for s, g, t in song_specs]
    genres = {g for _, g, _ in song_specs}
    return Corpus(docs, Vocabulary.placeholder(vocab_size), genres)


def model_of(beta, topic_prior=None, alpha=0.5) -> LdaModel:
    beta = np.asarray(beta, dtype=np.float64)
    k = beta.shape[0]
    prior = np.full(k, 1.0 / k) if topic_prior is None else np.asarray(topic_prior)
    return LdaModel(
        n_topics=k,
        vocab_size=beta.shape[1],
        alpha=alpha,
        eta=0.01,
        beta=beta,
        topic_prior=prior,
    )


class TestGenreDistribution:
    def test_exact_fractions_allowed(self):
        d = dist(blues=Fraction(2, 3), country=Fraction(1, 3))
        assert d["blues"] == Fraction(2, 3)
        assert d.genres == ("blues", "country")

    def test_rejects_bad_sum(self):
        with pytest.raises(ValueError):
            dist(blues=0.5, jazz=0.4)

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            dist(blues=1.5, jazz=-0.5)

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            GenreDistribution({})
        with pytest.raises(ValueError):
            GenreDistribution({"": 1.0})

    def test_get_default(self):
        d = dist(rock=1.0)
        assert d.get("pop") == 0

    def test_describe_matches_display_convention(self):
        d = dist(blues=Fraction(2, 3), country=Fraction(1, 3))
        assert d.describe() == "0.67 Blues + 0.33 Country"

    def test_describe_orders_by_weight_then_name(self):
        d = dist(jazz=0.25, blues=0.25, country=0.5)
        assert d.describe() == "0.50 Country + 0.25 Blues + 0.25 Jazz"

    def test_describe_drops_zeros(self):
        d = dist(rock=1.0, pop=0.0)
        assert d.describe() == "1.00 Rock"

    def test_as_floats(self):
        d = dist(blues=Fraction(1, 4), jazz=Fraction(3, 4))
        assert d.as_floats() == {"blues": 0.25, "jazz": 0.75}


class TestMix:
    def test_fraction_exactness(self):
        a = dist(blues=Fraction(2, 3), country=Fraction(1, 3))
        b = dist(blues=Fraction(1, 4), jazz=Fraction(3, 4))
        out = mix([(Fraction(1, 2), a), (Fraction(1, 2), b)])
        assert out["blues"] == Fraction(11, 24)
        assert out["country"] == Fraction(1, 6)
        assert out["jazz"] == Fraction(3, 8)

    def test_zero_weights_skipped(self):
        a = dist(blues=1.0)
        b = dist(jazz=1.0)
        out = mix([(1.0, a), (0.0, b)])
        assert out.genres == ("blues",)

    def test_renormalizes_unnormalized_weights(self):
        a = dist(blues=1.0)
        b = dist(jazz=1.0)
        out = mix([(2.0, a), (6.0, b)])
        assert out["blues"] == pytest.approx(0.25)

    def test_no_mass(self):
        with pytest.raises(ValueError):
            mix([])
        with pytest.raises(ValueError):
            mix([(0.0, dist(blues=1.0))])


class TestGenreTimeline:
    def test_times_must_increase(self):
        d = dist(rock=1.0)
        with pytest.raises(ValueError):
            GenreTimeline([(0.0, d), (0.0, d)])

    def test_len_iter_genres(self):
        t = GenreTimeline([(0.0, dist(rock=1.0)), (0.1, dist(pop=1.0))])
        assert len(t) == 2
        assert [time for time, _ in t] == [0.0, 0.1]
        assert t.genres == ("pop", "rock")


class TestWordGenreProfile:
    def blues_country_corpus(self):
        # word 1's clips come from songs labeled blues, country, blues
        return corpus_of(
            [
                ("s1", "blues", [1, 0]),
                ("s2", "country", [1, 0]),
                ("s3", "blues", [1, 0]),
            ],
            vocab_size=2,
        )

    def test_two_thirds_blues(self):
        profile = word_genre_profile(1, self.blues_country_corpus())
        assert profile.weights == {
            "blues": Fraction(2, 3),
            "country": Fraction(1, 3),
        }
        # display convention rounds to two decimals
        assert abs(float(profile["blues"]) - 0.67) <= 0.005
        assert abs(float(profile["country"]) - 0.33) <= 0.005

    def test_four_clip_mixture(self):
        corpus = corpus_of(
            [
                ("s1", "blues", [1]),
                ("s2", "jazz", [1]),
                ("s3", "jazz", [1]),
                ("s4", "country", [1]),
            ],
            vocab_size=2,
        )
        profile = word_genre_profile(1, corpus)
        assert profile.weights == {
            "blues": Fraction(1, 4),
            "country": Fraction(1, 4),
            "jazz": Fraction(1, 2),
        }

    def test_single_genre(self):
        corpus = corpus_of([("s1", "rock", [0, 0, 0])], vocab_size=1)
        assert word_genre_profile(0, corpus).weights == {"rock": Fraction(1, 1)}

    def test_count_by_song_collapses_repeats(self):
        corpus = corpus_of(
            [("s1", "rock", [0, 0, 0, 0, 0]), ("s2", "pop", [0])], vocab_size=1
        )
        by_clip = word_genre_profile(0, corpus, count_by="clip")
        by_song = word_genre_profile(0, corpus, count_by="song")
        assert by_clip.weights == {"pop": Fraction(1, 6), "rock": Fraction(5, 6)}
        assert by_song.weights == {"pop": Fraction(1, 2), "rock": Fraction(1, 2)}

    def test_unused_word(self):
        with pytest.raises(UnusedWord):
            word_genre_profile(1, corpus_of([("s1", "rock", [0])], vocab_size=2))

    def test_unknown_song_in_assignments(self):
        corpus = corpus_of([("s1", "rock", [0])], vocab_size=1)
        with pytest.raises(MissingLabel):
            word_genre_profile(0, corpus, assignments={"ghost": [0]})

    def test_bad_count_by(self):
        with pytest.raises(ValueError):
            word_genre_profile(0, corpus_of([("s1", "rock", [0])], 1), count_by="x")

    def test_matches_brute_rescan(self):
        rng = np.random.default_rng(13)
        genres = ["rock", "pop", "metal"]
        specs = [
            (f"s{i}", genres[i % 3], rng.integers(0, 4, 12).tolist())
            for i in range(9)
        ]
        corpus = corpus_of(specs, vocab_size=4)
        tokens = {s: t for s, _, t in specs}
        labels = {s: g for s, g, _ in specs}
        for w in range(4):
            want = brute_word_counts(w, tokens, labels)
            got = word_genre_profile(w, corpus)
            assert got.weights == want


class TestTopicGenreProfile:
    def eq1_profiles(self):
        return {
            0: dist(blues=Fraction(2, 3), country=Fraction(1, 3)),
            1: dist(
                blues=Fraction(1, 4), jazz=Fraction(1, 2), country=Fraction(1, 4)
            ),
        }

    def test_one_hot_identity(self):
        beta = np.zeros((1, 6))
        beta[0, 5] = 1.0
        target = dist(rock=0.4, pop=0.6)
        profiles = {w: dist(metal=1.0) for w in range(5)}
        profiles[5] = target
        out = topic_genre_profile(0, model_of(beta), profiles)
        assert out.as_floats() == pytest.approx(target.as_floats())

    def test_blend_of_two_cluster_means(self):
        beta = np.array([[0.6, 0.4]])
        out = topic_genre_profile(0, model_of(beta), self.eq1_profiles())
        floats = out.as_floats()
        assert floats["blues"] == pytest.approx(0.5, abs=1e-12)
        assert floats["country"] == pytest.approx(0.3, abs=1e-12)
        assert floats["jazz"] == pytest.approx(0.2, abs=1e-12)
        # two-decimal hand arithmetic from the display values
        assert abs(floats["blues"] - 0.502) <= 0.005
        assert abs(floats["country"] - 0.298) <= 0.005
        assert abs(floats["jazz"] - 0.200) <= 0.005

    def test_uniform_over_identical_profiles(self):
        p = dist(rock=0.7, pop=0.3)
        out = topic_genre_profile(
            0, model_of(np.array([[0.5, 0.5]])), {0: p, 1: p}
        )
        assert out.as_floats() == pytest.approx(p.as_floats())

    def test_missing_word_profile(self):
        with pytest.raises(MissingWordProfile):
            topic_genre_profile(0, model_of(np.array([[0.5, 0.5]])), {0: dist(rock=1.0)})

    def test_unused_word_excluded_and_renormalized(self):
        profiles = {0: dist(rock=1.0), 1: None}
        out = topic_genre_profile(0, model_of(np.array([[0.5, 0.5]])), profiles)
        assert out.weights == {"rock": 1.0}

    def test_all_words_unused(self):
        with pytest.raises(MissingWordProfile):
            topic_genre_profile(
                0, model_of(np.array([[0.5, 0.5]])), {0: None, 1: None}
            )

    def test_bad_topic_index(self):
        with pytest.raises(ValueError):
            topic_genre_profile(2, model_of(np.array([[1.0]])), {0: dist(rock=1.0)})


class TestDocGenreProfile:
    def test_one_hot_theta(self):
        profiles = {0: dist(rock=1.0), 1: dist(pop=1.0)}
        out = doc_genre_profile([0.0, 1.0], profiles)
        assert out.weights == {"pop": 1.0}

    def test_half_half_blend(self):
        topic1 = dist(blues=0.33, country=0.33, jazz=0.34)
        topic2 = dist(jazz=0.5, country=0.5)
        out = doc_genre_profile([0.5, 0.5], {0: topic1, 1: topic2})
        floats = out.as_floats()
        assert floats["blues"] == pytest.approx(0.165, abs=1e-9)
        assert floats["country"] == pytest.approx(0.415, abs=1e-9)
        assert floats["jazz"] == pytest.approx(0.420, abs=1e-9)
        assert sum(floats.values()) == pytest.approx(1.0, abs=1e-9)

    def test_rejects_non_simplex_theta(self):
        with pytest.raises(ValueError):
            doc_genre_profile([0.5, 0.4], {0: dist(rock=1.0), 1: dist(pop=1.0)})

    def test_missing_topic_profile(self):
        with pytest.raises(MissingTopicProfile):
            doc_genre_profile([0.5, 0.5], {0: dist(rock=1.0)})


class TestTermGenreProfile:
    def test_one_hot_posterior(self):
        # word 0 only generated by topic 2
        beta = np.array([[0.0, 1.0], [0.0, 1.0], [0.5, 0.5]])
        profiles = {0: dist(rock=1.0), 1: dist(pop=1.0), 2: dist(jazz=1.0)}
        out = term_genre_profile(0, model_of(beta), profiles)
        assert out.weights == {"jazz": 1.0}

    def test_seventy_thirty_blend(self):
        beta = np.array([[0.7, 0.3], [0.3, 0.7]])
        profiles = {0: dist(blues=1.0), 1: dist(blues=0.5, jazz=0.5)}
        out = term_genre_profile(0, model_of(beta, topic_prior=[0.5, 0.5]), profiles)
        floats = out.as_floats()
        assert floats["blues"] == pytest.approx(0.85, abs=1e-12)
        assert floats["jazz"] == pytest.approx(0.15, abs=1e-12)

    def test_single_topic(self):
        out = term_genre_profile(
            0, model_of(np.array([[0.4, 0.6]])), {0: dist(rock=1.0)}
        )
        assert out.weights == {"rock": 1.0}

    def test_missing_topic_profile(self):
        beta = np.array([[0.5, 0.5], [0.5, 0.5]])
        with pytest.raises(MissingTopicProfile):
            term_genre_profile(0, model_of(beta), {0: dist(rock=1.0)})


class TestCompositionConsistency:
    @given(st.integers(min_value=0, max_value=200))
    @settings(max_examples=40, deadline=None)
    def test_doc_profile_equals_double_sum(self, case):
        rng = np.random.default_rng(case)
        k = int(rng.integers(1, 5))
        v = int(rng.integers(1, 7))
        genres = ["rock", "pop", "metal"]
        beta = rng.dirichlet(np.ones(v), size=k)
        theta = rng.dirichlet(np.ones(k))
        word_profiles = {
            w: dist(**dict(zip(genres, rng.dirichlet(np.ones(3))))) for w in range(v)
        }
        topic_profiles = {
            t: topic_genre_profile(t, model_of(beta), word_profiles) for t in range(k)
        }
        got = doc_genre_profile(theta, topic_profiles).as_floats()
        want = brute_doc_profile(
            theta.tolist(),
            beta.tolist(),
            {w: p.as_floats() for w, p in word_profiles.items()},
        )
        assert set(got) == set(want)
        for genre, value in want.items():
            assert got[genre] == pytest.approx(value, abs=1e-9)


class TestProgressiveTimeline:
    def profiles(self):
        return {
            0: dist(rock=Fraction(3, 4), pop=Fraction(1, 4)),
            1: dist(pop=Fraction(1, 1)),
        }

    def test_constant_tokens(self):
        doc = Document("d", "g", [0] * 30)
        timeline = progressive_timeline(doc, 0.10, self.profiles(), window=11)
        assert len(timeline) == 20
        for t, d in timeline:
            assert d.weights == self.profiles()[0].weights

    def test_window_one_is_raw_sequence(self):
        doc = Document("d", "g", [0, 1, 0])
        timeline = progressive_timeline(doc, 0.10, self.profiles(), window=1)
        entries = list(timeline)
        assert [e[1].weights for e in entries] == [
            self.profiles()[0].weights,
            self.profiles()[1].weights,
            self.profiles()[0].weights,
        ]

    def test_three_hundred_tokens_window_eleven(self):
        doc = Document("d", "g", [0, 1] * 150)
        timeline = progressive_timeline(doc, 0.10, self.profiles(), window=11)
        assert len(timeline) == 290
        times = [t for t, _ in timeline]
        assert times[0] == 0.0
        np.testing.assert_allclose(np.diff(times), 0.10)

    def test_moving_average_is_exact(self):
        doc = Document("d", "g", [0, 0, 1])
        timeline = progressive_timeline(doc, 0.10, self.profiles(), window=2)
        entries = list(timeline)
        assert entries[0][1].weights == self.profiles()[0].weights
        assert entries[1][1].weights == {
            "pop": Fraction(5, 8),
            "rock": Fraction(3, 8),
        }

    def test_window_too_large(self):
        doc = Document("d", "g", [0, 1])
        with pytest.raises(WindowTooLarge):
            progressive_timeline(doc, 0.10, self.profiles(), window=3)

    def test_empty_document(self):
        with pytest.raises(EmptyDocument):
            progressive_timeline(Document("d", "g", []), 0.10, self.profiles())

    def test_missing_term_profile(self):
        doc = Document("d", "g", [0, 2])
        with pytest.raises(MissingWordProfile):
            progressive_timeline(doc, 0.10, self.profiles(), window=1)

    def test_bad_parameters(self):
        doc = Document("d", "g", [0])
        with pytest.raises(ValueError):
            progressive_timeline(doc, 0.0, self.profiles(), window=1)
        with pytest.raises(ValueError):
            progressive_timeline(doc, 0.10, self.profiles(), window=0)


class TestClipWordMap:
    def test_preserves_order(self):
        corpus = corpus_of([("a", "rock", [2, 0, 1]), ("b", "pop", [1])], 3)
        assert clip_word_map(corpus) == {"a": [2, 0, 1], "b": [1]}
