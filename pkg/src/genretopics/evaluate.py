"""Genre classification from topic proportions.

Each song is represented by its theta vector; a one-vs-rest linear SVM
is trained on the train split by seeded stochastic subgradient descent
(hinge loss + L2), test songs get thetas by fold-in only, and the sweep
fills an accuracy grid of genre buckets x topic counts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    EmptyTestSet,
    GenreTooSmall,
    GenreTopicsError,
    MissingLabel,
    SingleClass,
)
from .lda import infer_theta, train_gibbs
from .util import SCHEMA_VERSION, derive_seed
from .vocab import Corpus

DEFAULT_TOPIC_COUNTS = (2, 3, 4, 5)


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.8
    seed: int = 42
    stratified: bool = True

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train_fraction must be in (0, 1)")


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 200
    lam: float = 1e-3
    seed: int = 0

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.lam <= 0:
            raise ValueError("lam must be positive")


@dataclass
class LinearClassifier:
    """One-vs-rest linear scorer over theta features."""

    genres: list[str]
    weights: np.ndarray
    bias: np.ndarray
    config: TrainConfig

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64)
        self.bias = np.asarray(self.bias, dtype=np.float64)
        if self.weights.shape != (len(self.genres), self.n_features):
            raise ValueError("weights must be (n_genres, n_features)")
        if self.bias.shape != (len(self.genres),):
            raise ValueError("bias must have one entry per genre")
        if self.genres != sorted(self.genres):
            raise ValueError("genres must be sorted")

    @property
    def n_features(self) -> int:
        return self.weights.shape[1]

    def scores(self, x: Sequence[float]) -> np.ndarray:
        return self.weights @ np.asarray(x, dtype=np.float64) + self.bias

    def predict(self, x: Sequence[float]) -> str:
        # argmax takes the first maximum; genres are sorted, so ties go
        # to the lexicographically smallest label
        return self.genres[int(np.argmax(self.scores(x)))]


def _subcorpus(corpus: Corpus, keep: Sequence[int]) -> Corpus:
    return Corpus(
        documents=[corpus.documents[i] for i in sorted(keep)],
        vocabulary=corpus.vocabulary,
        genres=set(corpus.genres),
        bucket_id=corpus.bucket_id,
    )


def split_stratified(corpus: Corpus, spec: SplitSpec) -> tuple[Corpus, Corpus]:
    """Seeded per-genre proportional split, preserving document order.

    Every genre keeps at least one document on each side, which needs
    two or more documents per genre.
    """
    rng = np.random.default_rng(spec.seed)
    if spec.stratified:
        groups: dict[str, list[int]] = {}
        for i, doc in enumerate(corpus.documents):
            groups.setdefault(doc.genre, []).append(i)
        for genre in sorted(groups):
            if len(groups[genre]) < 2:
                raise GenreTooSmall(
                    f"genre {genre!r} has {len(groups[genre])} document(s); need >= 2"
                )
        train_idx: list[int] = []
        for genre in sorted(groups):
            idx = groups[genre]
            perm = rng.permutation(len(idx))
            n_train = min(max(round(spec.train_fraction * len(idx)), 1), len(idx) - 1)
            train_idx.extend(idx[p] for p in perm[:n_train])
    else:
        n = len(corpus.documents)
        if n < 2:
            raise GenreTooSmall("need >= 2 documents to split")
        perm = rng.permutation(n)
        n_train = min(max(round(spec.train_fraction * n), 1), n - 1)
        train_idx = list(perm[:n_train])

    train_set = set(train_idx)
    test_idx = [i for i in range(len(corpus.documents)) if i not in train_set]
    return _subcorpus(corpus, train_idx), _subcorpus(corpus, test_idx)


def split_by_tags(corpus: Corpus, tags: Mapping[str, str]) -> tuple[Corpus, Corpus]:
    """Split along a predefined train/test assignment by song id."""
    train_idx, test_idx = [], []
    for i, doc in enumerate(corpus.documents):
        tag = tags.get(doc.song_id)
        if tag is None:
            raise MissingLabel(f"no split tag for song {doc.song_id!r}")
        if tag == "train":
            train_idx.append(i)
        elif tag == "test":
            test_idx.append(i)
        else:
            raise ValueError(f"{doc.song_id}: split tag must be train|test, got {tag!r}")
    return _subcorpus(corpus, train_idx), _subcorpus(corpus, test_idx)


def _pegasos(
    x: np.ndarray, y: np.ndarray, config: TrainConfig, seed: int
) -> np.ndarray:
    """Binary hinge-loss SGD with L2, bias folded in as a constant
    feature so the 1/(lam*t) step schedule stays stable."""
    n = x.shape[0]
    w = np.zeros(x.shape[1])
    rng = np.random.default_rng(seed)
    t = 0
    for _ in range(config.epochs):
        for i in rng.permutation(n):
            t += 1
            step = 1.0 / (config.lam * t)
            w *= 1.0 - 1.0 / t
            if y[i] * (w @ x[i]) < 1.0:
                w += step * y[i] * x[i]
    return w


def train_classifier(
    features: Mapping[str, Sequence[float]],
    labels: Mapping[str, str],
    config: TrainConfig = TrainConfig(),
) -> LinearClassifier:
    """One-vs-rest linear SVM; deterministic for fixed data and seed."""
    if set(features) != set(labels):
        raise ValueError("features and labels must cover the same songs")
    if not features:
        raise SingleClass("no training documents")
    ids = sorted(features)
    x = np.stack([np.asarray(features[i], dtype=np.float64) for i in ids])
    genres = sorted(set(labels.values()))
    if len(genres) < 2:
        raise SingleClass(f"training data has a single label {genres[0]!r}")

    x_aug = np.hstack([x, np.ones((x.shape[0], 1))])
    weights = np.empty((len(genres), x.shape[1]))
    bias = np.empty(len(genres))
    for g, genre in enumerate(genres):
        y = np.where(np.array([labels[i] for i in ids]) == genre, 1.0, -1.0)
        w_aug = _pegasos(x_aug, y, config, derive_seed(config.seed, f"ovr:{genre}"))
        weights[g] = w_aug[:-1]
        bias[g] = w_aug[-1]
    return LinearClassifier(genres=genres, weights=weights, bias=bias, config=config)


def evaluate_accuracy(
    classifier: LinearClassifier,
    features: Mapping[str, Sequence[float]],
    labels: Mapping[str, str],
) -> float:
    if not features:
        raise EmptyTestSet("no test documents")
    if set(features) != set(labels):
        raise ValueError("features and labels must cover the same songs")
    hits = sum(1 for i in features if classifier.predict(features[i]) == labels[i])
    return hits / len(features)


@dataclass
class AccuracyTable:
    """Accuracy grid: one row per genre bucket, one column per topic
    count. Failed cells hold nan with the error recorded by key."""

    bucket_ids: list[int]
    topic_counts: list[int]
    cells: np.ndarray
    seeds: np.ndarray
    errors: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        shape = (len(self.bucket_ids), len(self.topic_counts))
        self.cells = np.asarray(self.cells, dtype=np.float64)
        self.seeds = np.asarray(self.seeds, dtype=np.int64)
        if self.cells.shape != shape or self.seeds.shape != shape:
            raise ValueError(f"cells and seeds must have shape {shape}")
        filled = self.cells[~np.isnan(self.cells)]
        if np.any((filled < 0) | (filled > 1)):
            raise ValueError("accuracies must lie in [0, 1]")

    def cell(self, bucket_id: int, n_topics: int) -> float:
        r = self.bucket_ids.index(bucket_id)
        c = self.topic_counts.index(n_topics)
        return float(self.cells[r, c])

    def to_csv(self) -> str:
        lines = ["bucket," + ",".join(str(t) for t in self.topic_counts)]
        for r, bucket_id in enumerate(self.bucket_ids):
            row = [
                "" if np.isnan(v) else f"{v:.12g}" for v in self.cells[r]
            ]
            lines.append(f"{bucket_id}," + ",".join(row))
        return "\n".join(lines) + "\n"

    def to_json_obj(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "bucket_ids": list(self.bucket_ids),
            "topic_counts": list(self.topic_counts),
            "cells": [
                [None if np.isnan(v) else float(v) for v in row] for row in self.cells
            ],
            "seeds": [[int(s) for s in row] for row in self.seeds],
            "errors": dict(self.errors),
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "AccuracyTable":
        cells = np.array(
            [[np.nan if v is None else v for v in row] for row in obj["cells"]],
            dtype=np.float64,
        ).reshape(len(obj["bucket_ids"]), len(obj["topic_counts"]))
        return cls(
            bucket_ids=list(obj["bucket_ids"]),
            topic_counts=list(obj["topic_counts"]),
            cells=cells,
            seeds=np.asarray(obj["seeds"], dtype=np.int64).reshape(cells.shape),
            errors=dict(obj.get("errors", {})),
        )

    @classmethod
    def merge_rows(cls, tables: Sequence["AccuracyTable"]) -> "AccuracyTable":
        """Stack single-bucket tables that share topic counts."""
        if not tables:
            raise ValueError("nothing to merge")
        counts = tables[0].topic_counts
        if any(t.topic_counts != counts for t in tables):
            raise ValueError("tables disagree on topic counts")
        errors: dict[str, str] = {}
        for t in tables:
            errors.update(t.errors)
        return cls(
            bucket_ids=[b for t in tables for b in t.bucket_ids],
            topic_counts=list(counts),
            cells=np.vstack([t.cells for t in tables]),
            seeds=np.vstack([t.seeds for t in tables]),
            errors=errors,
        )


def split_seed(master_seed: int, bucket_id: int) -> int:
    return derive_seed(master_seed, f"bucket{bucket_id}:split")


def train_seed(master_seed: int, bucket_id: int, n_topics: int) -> int:
    return derive_seed(master_seed, f"bucket{bucket_id}:train:K{n_topics}")


def foldin_seed(master_seed: int, bucket_id: int, n_topics: int, song_id: str) -> int:
    return derive_seed(master_seed, f"bucket{bucket_id}:foldin:K{n_topics}:{song_id}")


def svm_seed(master_seed: int, bucket_id: int, n_topics: int) -> int:
    return derive_seed(master_seed, f"bucket{bucket_id}:svm:K{n_topics}")


@dataclass(frozen=True)
class SweepConfig:
    """Knobs shared by every sweep cell; per-cell seeds are derived from
    master_seed so cells are reproducible in isolation."""

    alpha: float | None = None
    eta: float = 0.01
    n_iters: int = 200
    burn_in: int | None = None
    foldin_iters: int | None = None
    train_fraction: float = 0.8
    epochs: int = 200
    lam: float = 1e-3
    master_seed: int = 42
    split_tags: Mapping[str, str] | None = None


def split_bucket(corpus: Corpus, config: SweepConfig) -> tuple[Corpus, Corpus]:
    if config.split_tags is not None:
        return split_by_tags(corpus, config.split_tags)
    spec = SplitSpec(
        train_fraction=config.train_fraction,
        seed=split_seed(config.master_seed, corpus.bucket_id),
    )
    return split_stratified(corpus, spec)


def run_cell(
    train_corpus: Corpus,
    test_corpus: Corpus,
    n_topics: int,
    config: SweepConfig,
    bucket_id: int,
) -> float:
    """Train LDA on the train split, fold in test thetas, classify."""
    model, doc_topics, _ = train_gibbs(
        train_corpus,
        n_topics,
        alpha=config.alpha,
        eta=config.eta,
        n_iters=config.n_iters,
        burn_in=config.burn_in,
        seed=train_seed(config.master_seed, bucket_id, n_topics),
    )
    train_feats = {sid: doc_topics.theta[i] for i, sid in enumerate(doc_topics.song_ids)}
    train_labels = {d.song_id: d.genre for d in train_corpus.documents}

    foldin_iters = config.foldin_iters or config.n_iters
    test_feats = {
        d.song_id: infer_theta(
            model,
            d,
            n_iters=foldin_iters,
            seed=foldin_seed(config.master_seed, bucket_id, n_topics, d.song_id),
        )
        for d in test_corpus.documents
    }
    test_labels = {d.song_id: d.genre for d in test_corpus.documents}

    classifier = train_classifier(
        train_feats,
        train_labels,
        TrainConfig(
            epochs=config.epochs,
            lam=config.lam,
            seed=svm_seed(config.master_seed, bucket_id, n_topics),
        ),
    )
    return evaluate_accuracy(classifier, test_feats, test_labels)


def sweep_topic_counts(
    bucket_corpora: Mapping[int, Corpus],
    topic_counts: Sequence[int] = DEFAULT_TOPIC_COUNTS,
    config: SweepConfig = SweepConfig(),
) -> AccuracyTable:
    """Fill the bucket x topic-count accuracy grid.

    A failing cell records its error and leaves nan; remaining cells
    still run.
    """
    bucket_ids = sorted(bucket_corpora)
    shape = (len(bucket_ids), len(topic_counts))
    cells = np.full(shape, np.nan)
    seeds = np.zeros(shape, dtype=np.int64)
    errors: dict[str, str] = {}

    for r, bucket_id in enumerate(bucket_ids):
        corpus = bucket_corpora[bucket_id]
        if corpus.bucket_id != bucket_id:
            corpus = replace_bucket_id(corpus, bucket_id)
        try:
            train_c, test_c = split_bucket(corpus, config)
        except GenreTopicsError as exc:
            for c, n_topics in enumerate(topic_counts):
                seeds[r, c] = train_seed(config.master_seed, bucket_id, n_topics)
                errors[f"bucket{bucket_id}:K{n_topics}"] = str(exc)
            continue
        for c, n_topics in enumerate(topic_counts):
            seeds[r, c] = train_seed(config.master_seed, bucket_id, n_topics)
            try:
                cells[r, c] = run_cell(train_c, test_c, n_topics, config, bucket_id)
            except (GenreTopicsError, ValueError) as exc:
                errors[f"bucket{bucket_id}:K{n_topics}"] = str(exc)

    return AccuracyTable(
        bucket_ids=bucket_ids,
        topic_counts=list(topic_counts),
        cells=cells,
        seeds=seeds,
        errors=errors,
    )


def replace_bucket_id(corpus: Corpus, bucket_id: int) -> Corpus:
    return Corpus(
        documents=corpus.documents,
        vocabulary=corpus.vocabulary,
        genres=set(corpus.genres),
        bucket_id=bucket_id,
    )
