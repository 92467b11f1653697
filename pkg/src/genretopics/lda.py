"""Topic model over word-id documents.

Implements the generative story forward (synthetic-corpus sampler, used as
a recovery oracle in tests) and inverted: collapsed Gibbs training and
fold-in inference for held-out documents. Training is sequential
token-by-token resampling so a fixed seed gives bit-identical models; the
inner sweeps are numba-compiled with all randomness pre-drawn from one
numpy Generator.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from numba import njit

from .errors import EmptyCorpus, UnknownWord, ZeroProbabilityWord
from .util import SCHEMA_VERSION, read_json, write_json_atomic
from .vocab import Corpus, Document, Vocabulary

DEFAULT_ETA = 0.01
SIMPLEX_TOL = 1e-9


def default_alpha(n_topics: int) -> np.ndarray:
    return np.full(n_topics, 50.0 / n_topics)


def _as_alpha(alpha, n_topics: int) -> np.ndarray:
    if alpha is None:
        return default_alpha(n_topics)
    arr = np.atleast_1d(np.asarray(alpha, dtype=np.float64))
    if arr.shape == (1,):
        arr = np.full(n_topics, float(arr[0]))
    if arr.shape != (n_topics,):
        raise ValueError(f"alpha must be scalar or length {n_topics}")
    if np.any(arr <= 0):
        raise ValueError("alpha entries must be positive")
    return arr


def _check_simplex(arr: np.ndarray, what: str) -> None:
    if np.any(arr < 0):
        raise ValueError(f"{what} has negative entries")
    sums = arr.sum(axis=-1)
    if np.any(np.abs(sums - 1.0) > SIMPLEX_TOL):
        raise ValueError(f"{what} rows must sum to 1 within {SIMPLEX_TOL}")


@dataclass
class LdaModel:
    """Topic-word distributions plus hyperparameters and the corpus-level
    topic marginal used to invert beta into per-word topic posteriors."""

    n_topics: int
    vocab_size: int
    alpha: np.ndarray
    eta: float
    beta: np.ndarray = field(repr=False)
    topic_prior: np.ndarray
    seed: int = 0
    n_iters: int = 0

    def __post_init__(self):
        self.alpha = _as_alpha(self.alpha, self.n_topics)
        self.beta = np.asarray(self.beta, dtype=np.float64)
        self.topic_prior = np.asarray(self.topic_prior, dtype=np.float64)
        if self.eta <= 0:
            raise ValueError("eta must be positive")
        if self.beta.shape != (self.n_topics, self.vocab_size):
            raise ValueError("beta must have shape (n_topics, vocab_size)")
        _check_simplex(self.beta, "beta")
        if self.topic_prior.shape != (self.n_topics,):
            raise ValueError("topic_prior must have length n_topics")
        _check_simplex(self.topic_prior, "topic_prior")


@dataclass
class DocTopics:
    """Per-document topic proportions, aligned with song_ids."""

    theta: np.ndarray
    song_ids: list[str]

    def __post_init__(self):
        self.theta = np.asarray(self.theta, dtype=np.float64)
        if self.theta.ndim != 2 or self.theta.shape[0] != len(self.song_ids):
            raise ValueError("theta must be (n_docs, n_topics) aligned with song_ids")
        _check_simplex(self.theta, "theta")

    def for_song(self, song_id: str) -> np.ndarray:
        return self.theta[self.song_ids.index(song_id)]


@dataclass
class TopicAssignments:
    """Final-sweep topic id per token, per document."""

    z: list[np.ndarray]
    song_ids: list[str]


def _flatten_corpus(corpus: Corpus):
    words = np.concatenate(
        [np.asarray(d.tokens, dtype=np.int64) for d in corpus.documents]
    )
    doc_ids = np.concatenate(
        [np.full(len(d.tokens), i, dtype=np.int64) for i, d in enumerate(corpus.documents)]
    )
    return words, doc_ids


def generate_corpus(
    n_topics: int,
    vocab_size: int,
    alpha,
    eta: float,
    n_docs: int,
    doc_len: int,
    seed: int = 0,
) -> tuple[LdaModel, Corpus]:
    """Sample a synthetic corpus from the generative story.

    The returned model's topic_prior is the empirical frequency of the
    topic assignments actually drawn, so tests can compare corpus
    statistics against exactly the randomness that produced them.
    """
    if min(n_topics, vocab_size, n_docs, doc_len) < 1:
        raise ValueError("all counts must be positive")
    alpha_vec = _as_alpha(alpha, n_topics)
    rng = np.random.default_rng(seed)

    beta = rng.dirichlet(np.full(vocab_size, float(eta)), size=n_topics)
    # dirichlet can be off by an ulp; rows must sum to 1 exactly for V=1
    beta /= beta.sum(axis=1, keepdims=True)
    beta_cum = beta.cumsum(axis=1)
    topic_counts = np.zeros(n_topics)

    documents = []
    for d in range(n_docs):
        theta = rng.dirichlet(alpha_vec)
        z = np.searchsorted(theta.cumsum(), rng.random(doc_len), side="right")
        z = np.minimum(z, n_topics - 1)
        w = (beta_cum[z] < rng.random(doc_len)[:, None]).sum(axis=1)
        w = np.minimum(w, vocab_size - 1)
        topic_counts += np.bincount(z, minlength=n_topics)
        documents.append(
            Document(song_id=f"synthetic{d:04d}", genre="synthetic", tokens=w.tolist())
        )

    model = LdaModel(
        n_topics=n_topics,
        vocab_size=vocab_size,
        alpha=alpha_vec,
        eta=float(eta),
        beta=beta,
        topic_prior=topic_counts / topic_counts.sum(),
        seed=seed,
    )
    corpus = Corpus(
        documents=documents,
        vocabulary=Vocabulary.placeholder(vocab_size, seed=seed),
        genres={"synthetic"},
    )
    return model, corpus


@njit(cache=True)
def _gibbs_sweep(words, doc_ids, z, n_dk, n_kw, n_k, alpha, eta, v_eta, uniforms, cum):
    n_topics = n_kw.shape[0]
    for i in range(words.shape[0]):
        w = words[i]
        d = doc_ids[i]
        k_old = z[i]
        n_dk[d, k_old] -= 1.0
        n_kw[k_old, w] -= 1.0
        n_k[k_old] -= 1.0

        total = 0.0
        for k in range(n_topics):
            total += (n_dk[d, k] + alpha[k]) * (n_kw[k, w] + eta) / (n_k[k] + v_eta)
            cum[k] = total

        u = uniforms[i] * total
        k_new = 0
        while k_new < n_topics - 1 and cum[k_new] < u:
            k_new += 1

        z[i] = k_new
        n_dk[d, k_new] += 1.0
        n_kw[k_new, w] += 1.0
        n_k[k_new] += 1.0


@njit(cache=True)
def _foldin_sweep(words, z, n_k_doc, beta, alpha, uniforms, cum):
    n_topics = beta.shape[0]
    for i in range(words.shape[0]):
        w = words[i]
        k_old = z[i]
        n_k_doc[k_old] -= 1.0

        total = 0.0
        for k in range(n_topics):
            total += (n_k_doc[k] + alpha[k]) * beta[k, w]
            cum[k] = total

        u = uniforms[i] * total
        k_new = 0
        while k_new < n_topics - 1 and cum[k_new] < u:
            k_new += 1

        z[i] = k_new
        n_k_doc[k_new] += 1.0


def _point_log_likelihood(words, doc_ids, n_dk, n_kw, n_k, alpha, eta, vocab_size, doc_lens):
    theta = (n_dk + alpha[None, :]) / (doc_lens[:, None] + alpha.sum())
    beta = (n_kw + eta) / ((n_k + vocab_size * eta)[:, None])
    per_token = (theta[doc_ids] * beta[:, words].T).sum(axis=1)
    return float(np.log(per_token).sum())


def train_gibbs(
    corpus: Corpus,
    n_topics: int,
    alpha=None,
    eta: float = DEFAULT_ETA,
    n_iters: int = 200,
    burn_in: int | None = None,
    seed: int = 0,
    on_sweep: Callable[[int, float], None] | None = None,
) -> tuple[LdaModel, DocTopics, TopicAssignments]:
    """Collapsed Gibbs training.

    p(z=k | rest) is proportional to
    (n_dk + alpha_k) * (n_kw + eta) / (n_k + V*eta), with the current token
    excluded from all counts. After burn_in (default n_iters//2), theta,
    beta and the global topic prior are smoothed count estimates averaged
    over every retained sweep. on_sweep, when given, receives
    (sweep_index, smoothed corpus log-likelihood) each sweep.
    """
    if n_topics < 1:
        raise ValueError("n_topics must be >= 1")
    if not corpus.documents:
        raise EmptyCorpus("corpus has no documents")
    if burn_in is None:
        burn_in = n_iters // 2
    if not (0 <= burn_in < n_iters):
        raise ValueError("need 0 <= burn_in < n_iters")

    alpha_vec = _as_alpha(alpha, n_topics)
    vocab_size = corpus.vocabulary.size
    n_docs = len(corpus.documents)
    words, doc_ids = _flatten_corpus(corpus)
    doc_lens = np.bincount(doc_ids, minlength=n_docs).astype(np.float64)

    rng = np.random.default_rng(seed)
    z = rng.integers(0, n_topics, words.shape[0], dtype=np.int64)

    n_dk = np.zeros((n_docs, n_topics))
    n_kw = np.zeros((n_topics, vocab_size))
    n_k = np.zeros(n_topics)
    np.add.at(n_dk, (doc_ids, z), 1.0)
    np.add.at(n_kw, (z, words), 1.0)
    np.add.at(n_k, z, 1.0)

    theta_acc = np.zeros_like(n_dk)
    beta_acc = np.zeros_like(n_kw)
    prior_acc = np.zeros_like(n_k)
    cum = np.empty(n_topics)

    for sweep in range(n_iters):
        uniforms = rng.random(words.shape[0])
        _gibbs_sweep(
            words, doc_ids, z, n_dk, n_kw, n_k,
            alpha_vec, eta, vocab_size * eta, uniforms, cum,
        )
        if sweep >= burn_in:
            theta_acc += (n_dk + alpha_vec[None, :]) / (doc_lens[:, None] + alpha_vec.sum())
            beta_acc += (n_kw + eta) / ((n_k + vocab_size * eta)[:, None])
            prior_acc += (n_k + alpha_vec) / (words.shape[0] + alpha_vec.sum())
        if on_sweep is not None:
            on_sweep(
                sweep,
                _point_log_likelihood(
                    words, doc_ids, n_dk, n_kw, n_k, alpha_vec, eta, vocab_size, doc_lens
                ),
            )

    retained = n_iters - burn_in
    theta = theta_acc / retained
    theta /= theta.sum(axis=1, keepdims=True)
    beta = beta_acc / retained
    beta /= beta.sum(axis=1, keepdims=True)
    prior = prior_acc / retained
    prior /= prior.sum()

    song_ids = [d.song_id for d in corpus.documents]
    model = LdaModel(
        n_topics=n_topics,
        vocab_size=vocab_size,
        alpha=alpha_vec,
        eta=float(eta),
        beta=beta,
        topic_prior=prior,
        seed=seed,
        n_iters=n_iters,
    )
    doc_topics = DocTopics(theta=theta, song_ids=song_ids)
    bounds = np.cumsum(doc_lens.astype(int))[:-1]
    assignments = TopicAssignments(z=np.split(z, bounds), song_ids=song_ids)
    return model, doc_topics, assignments


def infer_theta(
    model: LdaModel,
    document: Document,
    n_iters: int = 100,
    seed: int = 0,
) -> np.ndarray:
    """Fold-in Gibbs with beta held fixed; returns averaged smoothed topic
    proportions. An empty document yields the normalized prior."""
    alpha_vec = model.alpha
    if len(document.tokens) == 0:
        return alpha_vec / alpha_vec.sum()
    words = np.asarray(document.tokens, dtype=np.int64)
    if words.min() < 0 or words.max() >= model.vocab_size:
        raise UnknownWord(
            f"{document.song_id}: token outside vocabulary of {model.vocab_size}"
        )
    col_mass = model.beta[:, words].sum(axis=0)
    if np.any(col_mass <= 0):
        raise ZeroProbabilityWord(
            f"{document.song_id}: a token has zero probability under every topic"
        )

    burn_in = n_iters // 2
    if not (0 <= burn_in < n_iters):
        raise ValueError("n_iters must be >= 1")
    rng = np.random.default_rng(seed)
    z = rng.integers(0, model.n_topics, words.shape[0], dtype=np.int64)
    n_k_doc = np.bincount(z, minlength=model.n_topics).astype(np.float64)
    cum = np.empty(model.n_topics)

    theta_acc = np.zeros(model.n_topics)
    for sweep in range(n_iters):
        uniforms = rng.random(words.shape[0])
        _foldin_sweep(words, z, n_k_doc, model.beta, alpha_vec, uniforms, cum)
        if sweep >= burn_in:
            theta_acc += (n_k_doc + alpha_vec) / (words.shape[0] + alpha_vec.sum())

    theta = theta_acc / (n_iters - burn_in)
    return theta / theta.sum()


def term_topic_posterior(model: LdaModel, word: int) -> np.ndarray:
    """p(topic | word) by Bayes over the corpus-level topic prior."""
    if not (0 <= word < model.vocab_size):
        raise UnknownWord(f"word id {word} outside vocabulary of {model.vocab_size}")
    joint = model.topic_prior * model.beta[:, word]
    denom = joint.sum()
    if denom <= 1e-300:
        raise ZeroProbabilityWord(f"word {word} is never generated by any topic")
    return joint / denom


def log_likelihood(model: LdaModel, corpus: Corpus, doc_topics: DocTopics) -> float:
    """Sum over tokens of log(theta_d . beta[:, w])."""
    ids = [d.song_id for d in corpus.documents]
    if ids != doc_topics.song_ids:
        raise ValueError("doc_topics is not aligned with the corpus")
    total = 0.0
    for doc, theta in zip(corpus.documents, doc_topics.theta):
        if not doc.tokens:
            continue
        words = np.asarray(doc.tokens, dtype=np.int64)
        total += float(np.log(theta @ model.beta[:, words]).sum())
    return total


def save_model(model: LdaModel, path: Path) -> None:
    write_json_atomic(
        path,
        {
            "schema_version": SCHEMA_VERSION,
            "n_topics": model.n_topics,
            "vocab_size": model.vocab_size,
            "alpha": model.alpha,
            "eta": model.eta,
            "beta": model.beta,
            "topic_prior": model.topic_prior,
            "seed": model.seed,
            "n_iters": model.n_iters,
        },
    )


def load_model(path: Path) -> LdaModel:
    obj = read_json(path)
    beta = np.asarray(obj["beta"])
    beta /= beta.sum(axis=1, keepdims=True)
    prior = np.asarray(obj["topic_prior"])
    return LdaModel(
        n_topics=obj["n_topics"],
        vocab_size=obj["vocab_size"],
        alpha=np.asarray(obj["alpha"]),
        eta=obj["eta"],
        beta=beta,
        topic_prior=prior / prior.sum(),
        seed=obj["seed"],
        n_iters=obj["n_iters"],
    )
