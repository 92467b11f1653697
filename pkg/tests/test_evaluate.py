"""Splits, the one-vs-rest linear classifier, and the accuracy sweep."""

import numpy as np
import pytest

from genretopics.errors import (
    EmptyTestSet,
    GenreTooSmall,
    MissingLabel,
    SingleClass,
)
from genretopics.evaluate import (
    AccuracyTable,
    LinearClassifier,
    SplitSpec,
    SweepConfig,
    TrainConfig,
    evaluate_accuracy,
    foldin_seed,
    run_cell,
    split_bucket,
    split_by_tags,
    split_seed,
    split_stratified,
    sweep_topic_counts,
    train_classifier,
    train_seed,
    svm_seed,
)
from genretopics.vocab import Corpus, Document, Vocabulary


def corpus_of(song_specs, vocab_size, bucket_id=1) -> Corpus:
    docs = [Document(s, g, list(t)) for s, g, t in song_specs]
    return Corpus(
        docs, Vocabulary.placeholder(vocab_size), {g for _, g, _ in song_specs},
        bucket_id=bucket_id,
    )


def uniform_bucket(n_per_genre=10, bucket_id=1, seed=0) -> Corpus:
    """Two genres with disjoint word ranges: trivially separable."""
    rng = np.random.default_rng(seed)
    specs = []
    for i in range(n_per_genre):
        specs.append((f"a{i:02d}", "ambient", rng.integers(0, 3, 30).tolist()))
    for i in range(n_per_genre):
        specs.append((f"b{i:02d}", "breakbeat", rng.integers(3, 6, 30).tolist()))
    return corpus_of(specs, vocab_size=6, bucket_id=bucket_id)


class TestSplitSpec:
    def test_rejects_bad_fraction(self):
        with pytest.raises(ValueError):
            SplitSpec(train_fraction=1.0)
        with pytest.raises(ValueError):
            SplitSpec(train_fraction=0.0)


class TestTrainConfig:
    def test_rejects_bad_values(self):
        with pytest.raises(ValueError):
            TrainConfig(epochs=0)
        with pytest.raises(ValueError):
            TrainConfig(lam=0.0)


class TestSplitStratified:
    def three_genre_corpus(self):
        specs = []
        for g in ("blues", "country", "jazz"):
            for i in range(10):
                specs.append((f"{g}{i}", g, [0]))
        return corpus_of(specs, vocab_size=1)

    def test_eighty_twenty_per_genre(self):
        train, test = split_stratified(self.three_genre_corpus(), SplitSpec(seed=42))
        by_genre = lambda c: {
            g: sum(1 for d in c.documents if d.genre == g)
            for g in ("blues", "country", "jazz")
        }
        assert by_genre(train) == {"blues": 8, "country": 8, "jazz": 8}
        assert by_genre(test) == {"blues": 2, "country": 2, "jazz": 2}

    def test_partition(self):
        corpus = self.three_genre_corpus()
        train, test = split_stratified(corpus, SplitSpec(seed=1))
        train_ids = {d.song_id for d in train.documents}
        test_ids = {d.song_id for d in test.documents}
        assert train_ids & test_ids == set()
        assert train_ids | test_ids == {d.song_id for d in corpus.documents}

    def test_preserves_document_order(self):
        corpus = self.three_genre_corpus()
        order = [d.song_id for d in corpus.documents]
        train, test = split_stratified(corpus, SplitSpec(seed=3))
        for sub in (train, test):
            ids = [d.song_id for d in sub.documents]
            assert ids == sorted(ids, key=order.index)

    def test_deterministic(self):
        corpus = self.three_genre_corpus()
        a_train, _ = split_stratified(corpus, SplitSpec(seed=9))
        b_train, _ = split_stratified(corpus, SplitSpec(seed=9))
        assert [d.song_id for d in a_train.documents] == [
            d.song_id for d in b_train.documents
        ]

    def test_seed_changes_split(self):
        corpus = self.three_genre_corpus()
        a_train, _ = split_stratified(corpus, SplitSpec(seed=0))
        b_train, _ = split_stratified(corpus, SplitSpec(seed=1))
        assert [d.song_id for d in a_train.documents] != [
            d.song_id for d in b_train.documents
        ]

    def test_both_sides_nonempty_even_when_rounding_up(self):
        specs = [(f"r{i}", "rock", [0]) for i in range(2)]
        corpus = corpus_of(specs, vocab_size=1)
        train, test = split_stratified(corpus, SplitSpec(train_fraction=0.9))
        assert len(train.documents) == 1 and len(test.documents) == 1

    def test_genre_too_small(self):
        corpus = corpus_of(
            [("a", "rock", [0]), ("b", "pop", [0]), ("c", "pop", [0])], 1
        )
        with pytest.raises(GenreTooSmall):
            split_stratified(corpus, SplitSpec())

    def test_unstratified_minimum(self):
        corpus = corpus_of([("a", "rock", [0])], 1)
        with pytest.raises(GenreTooSmall):
            split_stratified(corpus, SplitSpec(stratified=False))


class TestSplitByTags:
    def test_explicit_assignment(self):
        corpus = corpus_of(
            [("a", "rock", [0]), ("b", "rock", [0]), ("c", "pop", [0])], 1
        )
        tags = {"a": "train", "b": "test", "c": "train"}
        train, test = split_by_tags(corpus, tags)
        assert [d.song_id for d in train.documents] == ["a", "c"]
        assert [d.song_id for d in test.documents] == ["b"]

    def test_missing_tag(self):
        corpus = corpus_of([("a", "rock", [0])], 1)
        with pytest.raises(MissingLabel):
            split_by_tags(corpus, {})

    def test_bad_tag_value(self):
        corpus = corpus_of([("a", "rock", [0])], 1)
        with pytest.raises(ValueError):
            split_by_tags(corpus, {"a": "validation"})


class TestTrainClassifier:
    def separable_data(self):
        features = {
            "a0": [0.9, 0.1], "a1": [0.8, 0.2], "a2": [0.95, 0.05],
            "b0": [0.1, 0.9], "b1": [0.2, 0.8], "b2": [0.05, 0.95],
        }
        labels = {k: ("ambient" if k.startswith("a") else "breakbeat")
                  for k in features}
        return features, labels

    def test_separable_training_accuracy(self):
        features, labels = self.separable_data()
        clf = train_classifier(features, labels, TrainConfig(epochs=100, seed=0))
        assert evaluate_accuracy(clf, features, labels) == 1.0

    def test_three_class_corners(self):
        features, labels = {}, {}
        corners = {"ambient": [1.0, 0.0, 0.0],
                   "breakbeat": [0.0, 1.0, 0.0],
                   "chillout": [0.0, 0.0, 1.0]}
        rng = np.random.default_rng(2)
        for genre, corner in corners.items():
            for i in range(5):
                sid = f"{genre}{i}"
                jitter = rng.normal(0, 0.02, 3)
                features[sid] = (np.array(corner) + jitter).tolist()
                labels[sid] = genre
        clf = train_classifier(features, labels, TrainConfig(epochs=150, seed=1))
        assert clf.genres == ["ambient", "breakbeat", "chillout"]
        assert evaluate_accuracy(clf, features, labels) == 1.0

    def test_deterministic(self):
        features, labels = self.separable_data()
        a = train_classifier(features, labels, TrainConfig(seed=5))
        b = train_classifier(features, labels, TrainConfig(seed=5))
        np.testing.assert_array_equal(a.weights, b.weights)
        np.testing.assert_array_equal(a.bias, b.bias)

    def test_single_class(self):
        with pytest.raises(SingleClass):
            train_classifier({"a": [0.5]}, {"a": "rock"})
        with pytest.raises(SingleClass):
            train_classifier({}, {})

    def test_keyset_mismatch(self):
        with pytest.raises(ValueError):
            train_classifier({"a": [0.5]}, {"b": "rock"})


class TestPredict:
    def test_tie_breaks_to_first_sorted_genre(self):
        clf = LinearClassifier(
            genres=["pop", "rock"],
            weights=np.zeros((2, 2)),
            bias=np.zeros(2),
            config=TrainConfig(),
        )
        assert clf.predict([0.5, 0.5]) == "pop"

    def test_rejects_unsorted_genres(self):
        with pytest.raises(ValueError):
            LinearClassifier(
                genres=["rock", "pop"],
                weights=np.zeros((2, 2)),
                bias=np.zeros(2),
                config=TrainConfig(),
            )


class TestEvaluateAccuracy:
    def constant_classifier(self):
        # positive bias on 'ambient' only: every input predicts ambient
        return LinearClassifier(
            genres=["ambient", "rock"],
            weights=np.zeros((2, 1)),
            bias=np.array([1.0, 0.0]),
            config=TrainConfig(),
        )

    def test_constant_predictor_hits_base_rate(self):
        clf = self.constant_classifier()
        features = {f"s{i}": [0.0] for i in range(6)}
        labels = {"s0": "ambient", "s1": "ambient",
                  "s2": "rock", "s3": "rock", "s4": "rock", "s5": "rock"}
        assert evaluate_accuracy(clf, features, labels) == pytest.approx(1 / 3)

    def test_perfect_and_zero(self):
        clf = self.constant_classifier()
        features = {"x": [0.0]}
        assert evaluate_accuracy(clf, features, {"x": "ambient"}) == 1.0
        assert evaluate_accuracy(clf, features, {"x": "rock"}) == 0.0

    def test_empty_test_set(self):
        with pytest.raises(EmptyTestSet):
            evaluate_accuracy(self.constant_classifier(), {}, {})

    def test_keyset_mismatch(self):
        with pytest.raises(ValueError):
            evaluate_accuracy(self.constant_classifier(), {"a": [0.0]}, {"b": "rock"})


class TestAccuracyTable:
    def sample(self):
        return AccuracyTable(
            bucket_ids=[1],
            topic_counts=[2, 3],
            cells=np.array([[0.5, np.nan]]),
            seeds=np.array([[7, 8]]),
            errors={"bucket1:K3": "boom"},
        )

    def test_cell_lookup(self):
        assert self.sample().cell(1, 2) == 0.5
        assert np.isnan(self.sample().cell(1, 3))

    def test_csv_format(self):
        assert self.sample().to_csv() == "bucket,2,3\n1,0.5,\n"

    def test_json_roundtrip(self):
        table = self.sample()
        back = AccuracyTable.from_json_obj(table.to_json_obj())
        assert back.bucket_ids == [1] and back.topic_counts == [2, 3]
        assert back.cell(1, 2) == 0.5 and np.isnan(back.cell(1, 3))
        np.testing.assert_array_equal(back.seeds, table.seeds)
        assert back.errors == {"bucket1:K3": "boom"}

    def test_merge_rows(self):
        other = AccuracyTable(
            bucket_ids=[2],
            topic_counts=[2, 3],
            cells=np.array([[0.25, 1.0]]),
            seeds=np.array([[9, 10]]),
        )
        merged = AccuracyTable.merge_rows([self.sample(), other])
        assert merged.bucket_ids == [1, 2]
        assert merged.cell(2, 3) == 1.0
        assert merged.errors == {"bucket1:K3": "boom"}

    def test_merge_requires_matching_columns(self):
        other = AccuracyTable(
            bucket_ids=[2], topic_counts=[4], cells=np.array([[0.5]]),
            seeds=np.array([[1]]),
        )
        with pytest.raises(ValueError):
            AccuracyTable.merge_rows([self.sample(), other])

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            AccuracyTable([1], [2], np.array([[1.5]]), np.array([[0]]))


class TestSeedDerivation:
    def test_seeds_are_distinct_across_labels(self):
        seeds = {
            split_seed(42, 1), split_seed(42, 2),
            train_seed(42, 1, 2), train_seed(42, 1, 3), train_seed(42, 2, 2),
            svm_seed(42, 1, 2),
            foldin_seed(42, 1, 2, "song.a"), foldin_seed(42, 1, 2, "song.b"),
        }
        assert len(seeds) == 8

    def test_master_seed_matters(self):
        assert train_seed(42, 1, 2) != train_seed(43, 1, 2)


class TestSweep:
    def test_separable_bucket_sweeps_clean(self):
        corpus = uniform_bucket(n_per_genre=8)
        config = SweepConfig(alpha=0.5, n_iters=60, epochs=80, master_seed=7)
        table = sweep_topic_counts({1: corpus}, topic_counts=(2, 3), config=config)
        assert table.bucket_ids == [1]
        assert table.errors == {}
        assert np.all(table.cells >= 0) and np.all(table.cells <= 1)
        # disjoint vocabularies make genre recovery near-trivial
        assert table.cell(1, 2) >= 0.75

    def test_deterministic(self):
        corpus = uniform_bucket(n_per_genre=6)
        config = SweepConfig(alpha=0.5, n_iters=40, epochs=60, master_seed=3)
        a = sweep_topic_counts({1: corpus}, (2,), config)
        b = sweep_topic_counts({1: corpus}, (2,), config)
        np.testing.assert_array_equal(a.cells, b.cells)

    def test_failing_bucket_isolated(self):
        good = uniform_bucket(n_per_genre=6, bucket_id=1)
        bad = corpus_of(
            [("x", "rock", [0, 1]), ("y", "pop", [1, 2]), ("z", "pop", [0, 2])],
            vocab_size=6,
            bucket_id=2,
        )
        config = SweepConfig(alpha=0.5, n_iters=40, epochs=60, master_seed=3)
        table = sweep_topic_counts({1: good, 2: bad}, (2, 3), config)
        assert not np.any(np.isnan(table.cells[0]))
        assert np.all(np.isnan(table.cells[1]))
        assert set(table.errors) == {"bucket2:K2", "bucket2:K3"}
        assert "rock" in table.errors["bucket2:K2"]

    def test_split_tags_override_seeded_split(self):
        corpus = uniform_bucket(n_per_genre=3)
        tags = {d.song_id: ("test" if d.song_id.endswith("0") else "train")
                for d in corpus.documents}
        train, test = split_bucket(corpus, SweepConfig(split_tags=tags))
        assert {d.song_id for d in test.documents} == {"a00", "b00"}

    def test_run_cell_matches_sweep_cell(self):
        corpus = uniform_bucket(n_per_genre=6)
        config = SweepConfig(alpha=0.5, n_iters=40, epochs=60, master_seed=11)
        table = sweep_topic_counts({1: corpus}, (2,), config)
        train_c, test_c = split_bucket(corpus, config)
        direct = run_cell(train_c, test_c, 2, config, bucket_id=1)
        assert table.cell(1, 2) == direct
