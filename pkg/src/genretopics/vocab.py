"""The "musical word" codebook: k-means over clip features, and tokenization
of songs into word-id documents."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DimensionMismatch, EmptyDocument, InsufficientData, MissingLabel
from .mfcc import ClipFeature
from .util import SCHEMA_VERSION, read_json, write_json_atomic

DEFAULT_CODEBOOK_SIZE = 3
DEFAULT_KMEANS_ITERS = 300
DEFAULT_KMEANS_TOL = 1e-6


@dataclass
class Vocabulary:
    """k-means centroids acting as the word codebook."""

    centroids: np.ndarray = field(repr=False)
    seed: int = 0

    def __post_init__(self):
        self.centroids = np.asarray(self.centroids, dtype=np.float64)
        if self.centroids.ndim != 2 or self.centroids.shape[0] < 1:
            raise ValueError("centroids must be a (V, dim) matrix with V >= 1")
        if not np.all(np.isfinite(self.centroids)):
            raise ValueError("centroids must be finite")

    @property
    def size(self) -> int:
        return self.centroids.shape[0]

    @property
    def feature_dim(self) -> int:
        return self.centroids.shape[1]

    @classmethod
    def placeholder(cls, size: int, seed: int = 0) -> "Vocabulary":
        """A codebook for synthetic corpora where no real centroids exist."""
        return cls(np.arange(size, dtype=np.float64).reshape(size, 1), seed=seed)


@dataclass
class Document:
    """One song as a temporally ordered word-id sequence."""

    song_id: str
    genre: str
    tokens: list[int]


@dataclass
class Corpus:
    documents: list[Document]
    vocabulary: Vocabulary
    genres: set[str]
    bucket_id: int = 0

    def __post_init__(self):
        v = self.vocabulary.size
        for doc in self.documents:
            if doc.genre not in self.genres:
                raise ValueError(f"{doc.song_id}: genre {doc.genre!r} not in corpus genres")
            if any(t < 0 or t >= v for t in doc.tokens):
                raise ValueError(f"{doc.song_id}: token out of range for V={v}")

    @property
    def n_tokens(self) -> int:
        return sum(len(d.tokens) for d in self.documents)


def _features_matrix(features: Sequence[ClipFeature]) -> np.ndarray:
    return np.stack([f.values for f in features])


def _kmeans_pp_init(x: np.ndarray, v: int, rng: np.random.Generator) -> np.ndarray:
    centers = np.empty((v, x.shape[1]))
    centers[0] = x[int(rng.integers(x.shape[0]))]
    d2 = ((x - centers[0]) ** 2).sum(axis=1)
    for j in range(1, v):
        total = d2.sum()
        if total > 0:
            idx = int(rng.choice(x.shape[0], p=d2 / total))
        else:
            idx = int(rng.integers(x.shape[0]))
        centers[j] = x[idx]
        d2 = np.minimum(d2, ((x - centers[j]) ** 2).sum(axis=1))
    return centers


def _pairwise_sq_dists(x: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    # |x - c|^2 expansion keeps memory at (N, V) for large clip counts
    d2 = (
        (x**2).sum(axis=1)[:, None]
        - 2.0 * (x @ centroids.T)
        + (centroids**2).sum(axis=1)[None, :]
    )
    return np.maximum(d2, 0.0)


def _lloyd(x, centroids, max_iters, tol):
    """Lloyd iterations. Returns (centroids, per-iteration objectives).

    The objective (sum of squared distances to assigned centroids) is
    non-increasing exactly: a failure to decrease can only be float noise
    at convergence, and is treated as convergence.
    """
    centroids = centroids.copy()
    v = centroids.shape[0]
    objectives: list[float] = []
    for _ in range(max_iters):
        d2 = _pairwise_sq_dists(x, centroids)
        assign = d2.argmin(axis=1)
        point_d2 = d2[np.arange(x.shape[0]), assign]

        for j in range(v):
            if not np.any(assign == j):
                # donate the farthest point from a cluster that can spare one;
                # pigeonhole guarantees a >=2 cluster exists whenever n >= v
                counts = np.bincount(assign, minlength=v)
                donors = np.flatnonzero(counts[assign] > 1)
                worst = int(donors[point_d2[donors].argmax()])
                centroids[j] = x[worst]
                assign[worst] = j
                point_d2[worst] = 0.0

        objective = float(point_d2.sum())
        if objectives and objective >= objectives[-1]:
            break
        objectives.append(objective)

        new_centroids = np.stack(
            [x[assign == j].mean(axis=0) for j in range(v)]
        )
        shift = float(np.sqrt(((new_centroids - centroids) ** 2).sum(axis=1)).max())
        centroids = new_centroids
        if shift < tol:
            break
    return centroids, objectives


def kmeans_fit(
    features: Sequence[ClipFeature],
    v: int = DEFAULT_CODEBOOK_SIZE,
    seed: int = 0,
    max_iters: int = DEFAULT_KMEANS_ITERS,
    tol: float = DEFAULT_KMEANS_TOL,
) -> Vocabulary:
    """Fit a v-entry codebook with k-means++ init and Lloyd iterations."""
    if v < 1:
        raise ValueError("v must be >= 1")
    if len(features) < v:
        raise InsufficientData(f"{len(features)} features < {v} codebook entries")
    x = _features_matrix(features)
    rng = np.random.default_rng(seed)
    centroids, _ = _lloyd(x, _kmeans_pp_init(x, v, rng), max_iters, tol)
    return Vocabulary(centroids, seed=seed)


def assign_word(vocabulary: Vocabulary, feature: ClipFeature) -> int:
    """Nearest centroid under L2; ties break toward the lowest index."""
    if feature.values.shape[0] != vocabulary.feature_dim:
        raise DimensionMismatch(
            f"feature dim {feature.values.shape[0]} != codebook dim "
            f"{vocabulary.feature_dim}"
        )
    d2 = ((vocabulary.centroids - feature.values) ** 2).sum(axis=1)
    return int(d2.argmin())


def build_corpus(
    per_song_features: Mapping[str, Sequence[ClipFeature]],
    labels: Mapping[str, str],
    vocabulary: Vocabulary,
    bucket_id: int = 0,
) -> Corpus:
    """One document per song; tokens are nearest-centroid ids in clip order.

    Document order follows the iteration order of per_song_features.
    """
    documents = []
    for song_id, features in per_song_features.items():
        if song_id not in labels:
            raise MissingLabel(f"no genre label for song {song_id}")
        if len(features) == 0:
            raise EmptyDocument(f"song {song_id} has no clips")
        ordered = sorted(features, key=lambda f: f.clip_index)
        tokens = [assign_word(vocabulary, f) for f in ordered]
        documents.append(Document(song_id=song_id, genre=labels[song_id], tokens=tokens))
    genres = {doc.genre for doc in documents}
    return Corpus(documents=documents, vocabulary=vocabulary, genres=genres, bucket_id=bucket_id)


def save_vocabulary(vocabulary: Vocabulary, path: Path) -> None:
    write_json_atomic(
        path,
        {
            "schema_version": SCHEMA_VERSION,
            "seed": vocabulary.seed,
            "feature_dim": vocabulary.feature_dim,
            "centroids": vocabulary.centroids,
        },
    )


def load_vocabulary(path: Path) -> Vocabulary:
    obj = read_json(path)
    vocab = Vocabulary(np.asarray(obj["centroids"]), seed=obj["seed"])
    if vocab.feature_dim != obj["feature_dim"]:
        raise ValueError("stored feature_dim disagrees with centroid shape")
    return vocab
