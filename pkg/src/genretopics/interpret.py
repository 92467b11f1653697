"""Genre-mixture readings of the latent space.

Every level of the model gets mapped back to the genre labels of the
clips that ground it: a word's profile is the genre census of its clips,
a topic's profile is the beta-weighted blend of word profiles, a
document's is the theta-weighted blend of topic profiles, and a term's
is the blend under its topic posterior. Word-level counts are kept as
exact rationals; blends renormalize to absorb float rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .errors import (
    EmptyDocument,
    MissingLabel,
    MissingTopicProfile,
    MissingWordProfile,
    UnusedWord,
    WindowTooLarge,
)
from .lda import LdaModel, term_topic_posterior
from .vocab import Corpus, Document

SIMPLEX_TOL = 1e-9

DEFAULT_WINDOW = 11


@dataclass(frozen=True)
class GenreDistribution:
    """Convex weights over genre labels. Values may be Fractions (exact
    count ratios) or floats; both must sum to 1 within 1e-9."""

    weights: Mapping[str, object]

    def __post_init__(self):
        items = dict(sorted((str(g), w) for g, w in self.weights.items()))
        if not items:
            raise ValueError("distribution needs at least one genre")
        for genre, w in items.items():
            if not genre:
                raise ValueError("genre labels must be non-empty")
            if w < 0:
                raise ValueError(f"negative weight for {genre!r}")
        total = float(sum(items.values()))
        if abs(total - 1.0) > SIMPLEX_TOL:
            raise ValueError(f"weights sum to {total!r}, not 1")
        object.__setattr__(self, "weights", items)

    def __getitem__(self, genre: str):
        return self.weights[genre]

    def get(self, genre: str, default=0):
        return self.weights.get(genre, default)

    @property
    def genres(self) -> tuple[str, ...]:
        return tuple(self.weights)

    def as_floats(self) -> dict[str, float]:
        return {g: float(w) for g, w in self.weights.items()}

    def describe(self, decimals: int = 2) -> str:
        """Display form, rounded: '0.67 Blues + 0.33 Country'."""
        order = sorted(self.weights.items(), key=lambda kv: (-float(kv[1]), kv[0]))
        parts = [
            f"{float(w):.{decimals}f} {g.title()}" for g, w in order if float(w) > 0
        ]
        return " + ".join(parts)


def mix(parts: Iterable[tuple[object, GenreDistribution]]) -> GenreDistribution:
    """Convex combination of genre distributions, renormalized.

    Fraction weights over Fraction-valued profiles stay exact; any float
    in the chain degrades gracefully to float arithmetic.
    """
    acc: dict[str, object] = {}
    for weight, dist in parts:
        if weight == 0:
            continue
        for genre, value in dist.weights.items():
            acc[genre] = acc.get(genre, 0) + weight * value
    total = sum(acc.values())
    if not acc or float(total) <= 0:
        raise ValueError("mixture has no mass")
    return GenreDistribution({g: v / total for g, v in acc.items()})


@dataclass(frozen=True)
class GenreTimeline:
    """Time-ordered genre mixtures across a song."""

    entries: Sequence[tuple[float, GenreDistribution]]

    def __post_init__(self):
        entries = tuple((float(t), d) for t, d in self.entries)
        for (t0, _), (t1, _) in zip(entries, entries[1:]):
            if not t1 > t0:
                raise ValueError("start times must be strictly increasing")
        object.__setattr__(self, "entries", entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def genres(self) -> tuple[str, ...]:
        seen: set[str] = set()
        for _, dist in self.entries:
            seen.update(dist.genres)
        return tuple(sorted(seen))


def clip_word_map(corpus: Corpus) -> dict[str, list[int]]:
    """song_id -> word id per clip, in temporal order."""
    return {d.song_id: list(d.tokens) for d in corpus.documents}


def word_genre_profile(
    word: int,
    corpus: Corpus,
    assignments: Mapping[str, Sequence[int]] | None = None,
    count_by: str = "clip",
) -> GenreDistribution:
    """Genre census of the clips mapped to this word, as exact rationals.

    count_by="clip" weights every assigned clip once; "song" counts each
    song at most once regardless of how many of its clips landed here.
    """
    if count_by not in ("clip", "song"):
        raise ValueError("count_by must be 'clip' or 'song'")
    if assignments is None:
        assignments = clip_word_map(corpus)
    genre_of = {d.song_id: d.genre for d in corpus.documents}

    counts: dict[str, int] = {}
    for song_id, words in assignments.items():
        if song_id not in genre_of:
            raise MissingLabel(f"no genre known for song {song_id!r}")
        hits = sum(1 for w in words if w == word)
        if hits == 0:
            continue
        if count_by == "song":
            hits = 1
        genre = genre_of[song_id]
        counts[genre] = counts.get(genre, 0) + hits

    total = sum(counts.values())
    if total == 0:
        raise UnusedWord(f"no clips are assigned to word {word}")
    return GenreDistribution({g: Fraction(c, total) for g, c in counts.items()})


def topic_genre_profile(
    topic: int,
    model: LdaModel,
    word_profiles: Mapping[int, Optional[GenreDistribution]],
) -> GenreDistribution:
    """Beta-weighted blend of word profiles for one topic.

    word_profiles must have an entry for every word the topic puts mass
    on; an explicit None marks a word no clip ever used, which is
    excluded from the blend and its weight renormalized away.
    """
    if not 0 <= topic < model.n_topics:
        raise ValueError(f"topic {topic} outside [0, {model.n_topics})")
    row = model.beta[topic]
    parts: list[tuple[float, GenreDistribution]] = []
    for w in np.flatnonzero(row > 0):
        w = int(w)
        if w not in word_profiles:
            raise MissingWordProfile(f"topic {topic} needs a profile for word {w}")
        profile = word_profiles[w]
        if profile is None:
            continue
        parts.append((float(row[w]), profile))
    if not parts:
        raise MissingWordProfile(
            f"every word topic {topic} puts mass on is unused by the corpus"
        )
    return mix(parts)


def doc_genre_profile(
    theta: Sequence[float],
    topic_profiles: Mapping[int, GenreDistribution],
) -> GenreDistribution:
    """Theta-weighted blend of topic profiles."""
    theta = np.asarray(theta, dtype=np.float64)
    if theta.ndim != 1 or np.any(theta < 0) or abs(theta.sum() - 1.0) > SIMPLEX_TOL:
        raise ValueError("theta must be a probability vector")
    parts = []
    for k in np.flatnonzero(theta > 0):
        k = int(k)
        if k not in topic_profiles:
            raise MissingTopicProfile(f"no profile for topic {k}")
        parts.append((float(theta[k]), topic_profiles[k]))
    return mix(parts)


def term_genre_profile(
    word: int,
    model: LdaModel,
    topic_profiles: Mapping[int, GenreDistribution],
) -> GenreDistribution:
    """Blend of topic profiles under the word's topic posterior p(z|w)."""
    posterior = term_topic_posterior(model, word)
    parts = []
    for k in np.flatnonzero(posterior > 0):
        k = int(k)
        if k not in topic_profiles:
            raise MissingTopicProfile(f"no profile for topic {k}")
        parts.append((float(posterior[k]), topic_profiles[k]))
    return mix(parts)


def progressive_timeline(
    document: Document,
    clip_seconds: float,
    term_profiles: Mapping[int, GenreDistribution],
    window: int = DEFAULT_WINDOW,
) -> GenreTimeline:
    """Moving average of per-clip term profiles along the song.

    Entry i averages the profiles of tokens [i, i+window); its start time
    is i*clip_seconds. window=1 is the raw unsmoothed sequence.
    """
    if clip_seconds <= 0:
        raise ValueError("clip_seconds must be positive")
    if window < 1:
        raise ValueError("window must be >= 1")
    tokens = list(document.tokens)
    if not tokens:
        raise EmptyDocument(f"{document.song_id} has no clips")
    if window > len(tokens):
        raise WindowTooLarge(
            f"window {window} exceeds the {len(tokens)} clips of {document.song_id}"
        )
    profiles = []
    for w in tokens:
        if w not in term_profiles:
            raise MissingWordProfile(f"no term profile for word {w}")
        profiles.append(term_profiles[w])

    share = Fraction(1, window)
    entries = []
    for i in range(len(tokens) - window + 1):
        dist = mix((share, p) for p in profiles[i : i + window])
        entries.append((i * clip_seconds, dist))
    return GenreTimeline(entries)
