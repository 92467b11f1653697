"""Dataset scanning and the per-bucket stage pipeline.

Stages (features -> vocab -> train -> eval -> interpret -> viz) each
read their inputs from the artifact directory and write their outputs
atomically, stamped with a config hash that chains through upstream
stages. Re-running reuses any stage whose stamp and files are intact,
and a parameter change invalidates exactly the stages it reaches.
Every stage rereads upstream artifacts from disk, so a resumed run and
a fresh run see bit-identical inputs.
"""

from __future__ import annotations

import re
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .audio import CANONICAL_RATE, DEFAULT_CLIP_SECONDS, decode_wav, resample, segment_clips, to_mono
from .errors import (
    DuplicateSongId,
    EmptyDataset,
    GenreTooSmall,
    GenreTopicsError,
    PipelineError,
    UnknownGenre,
    UnusedWord,
)
from .evaluate import (
    AccuracyTable,
    SweepConfig,
    TrainConfig,
    evaluate_accuracy,
    split_bucket,
    svm_seed,
    train_classifier,
    train_seed,
    foldin_seed,
)
from .interpret import (
    DEFAULT_WINDOW,
    GenreDistribution,
    doc_genre_profile,
    progressive_timeline,
    term_genre_profile,
    topic_genre_profile,
    word_genre_profile,
)
from .lda import infer_theta, load_model, save_model, train_gibbs
from .mfcc import ClipFeature, MfccConfig, mfcc_clip
from .util import (
    SCHEMA_VERSION,
    config_hash,
    derive_seed,
    read_json,
    write_json_atomic,
    write_text_atomic,
)
from .viz import DEFAULT_PALETTE, Palette, doughnut_svg, export_report_json, timeline_svg
from .vocab import Corpus, Document, assign_word, kmeans_fit, load_vocabulary, save_vocabulary

DEFAULT_CODEBOOK_SIZE = 3
DEFAULT_TOPIC_COUNTS = (2, 3, 4, 5)
STAGES = ("features", "vocab", "train", "eval", "interpret", "viz")


def normalize_genre(label: str) -> str:
    """Case-insensitive genre key; 'Hip-Hop'/'hip hop' collapse to 'hiphop'."""
    return re.sub(r"[\s_-]+", "", label.strip().lower())


@dataclass(frozen=True)
class ManifestEntry:
    song_id: str
    path: str
    genre: str
    split: str | None = None

    def __post_init__(self):
        if not self.genre:
            raise ValueError(f"{self.song_id}: genre label must be non-empty")
        if self.split not in (None, "train", "test"):
            raise ValueError(f"{self.song_id}: split must be train|test")


@dataclass
class DatasetManifest:
    root: Path
    entries: list[ManifestEntry]

    def __post_init__(self):
        self.root = Path(self.root)
        seen: set[str] = set()
        for e in self.entries:
            if e.song_id in seen:
                raise DuplicateSongId(f"song id {e.song_id!r} appears twice")
            seen.add(e.song_id)

    def validate_paths(self) -> None:
        missing = [e.path for e in self.entries if not (self.root / e.path).is_file()]
        if missing:
            raise FileNotFoundError(f"missing audio files: {missing[:5]}")

    def genres(self) -> set[str]:
        return {e.genre for e in self.entries}

    def for_genres(self, genres: set[str]) -> list[ManifestEntry]:
        return [e for e in self.entries if e.genre in genres]

    def split_tags(self) -> dict[str, str] | None:
        """Predefined split, or None when no entry is tagged. A partial
        tagging is surfaced later by split_by_tags as MissingLabel."""
        tags = {e.song_id: e.split for e in self.entries if e.split}
        return tags or None


@dataclass(frozen=True)
class BucketSpec:
    bucket_id: int
    genres: frozenset[str]

    def __post_init__(self):
        object.__setattr__(
            self, "genres", frozenset(normalize_genre(g) for g in self.genres)
        )
        if not self.genres:
            raise ValueError("bucket needs at least one genre")


DEFAULT_BUCKETS = (
    BucketSpec(1, frozenset({"rock", "metal", "pop"})),
    BucketSpec(2, frozenset({"blues", "jazz", "country"})),
    BucketSpec(3, frozenset({"reggae", "disco", "hiphop"})),
)


@dataclass(frozen=True)
class RunConfig:
    clip_seconds: float = DEFAULT_CLIP_SECONDS
    mfcc: MfccConfig = field(default_factory=MfccConfig)
    codebook_size: int = DEFAULT_CODEBOOK_SIZE
    topic_counts: tuple[int, ...] = DEFAULT_TOPIC_COUNTS
    report_topics: int = 3
    alpha: float | None = None
    eta: float = 0.01
    n_iters: int = 200
    burn_in: int | None = None
    foldin_iters: int | None = None
    train_fraction: float = 0.8
    epochs: int = 200
    lam: float = 1e-3
    timeline_window: int = DEFAULT_WINDOW
    seed: int = 42
    out: Path = Path("out")

    def __post_init__(self):
        object.__setattr__(self, "out", Path(self.out))
        object.__setattr__(self, "topic_counts", tuple(self.topic_counts))
        if self.clip_seconds <= 0:
            raise ValueError("clip_seconds must be positive")
        if self.codebook_size < 1:
            raise ValueError("codebook_size must be >= 1")
        if not self.topic_counts or any(t < 1 for t in self.topic_counts):
            raise ValueError("topic_counts must be positive")
        if self.report_topics < 1:
            raise ValueError("report_topics must be >= 1")

    def trained_topic_counts(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.topic_counts) | {self.report_topics}))

    def sweep_config(self, split_tags: Mapping[str, str] | None = None) -> SweepConfig:
        return SweepConfig(
            alpha=self.alpha,
            eta=self.eta,
            n_iters=self.n_iters,
            burn_in=self.burn_in,
            foldin_iters=self.foldin_iters,
            train_fraction=self.train_fraction,
            epochs=self.epochs,
            lam=self.lam,
            master_seed=self.seed,
            split_tags=split_tags,
        )


def scan_dataset(root: Path) -> DatasetManifest:
    """Build a manifest from genre-named subdirectories of .wav files,
    or from an explicit JSON manifest file.

    Directory scan order is lexicographic; song ids are genre-prefixed
    so the same filename under two genres stays distinct.
    """
    root = Path(root)
    if root.is_file():
        obj = read_json(root)
        base = Path(obj.get("root", root.parent))
        entries = [
            ManifestEntry(
                song_id=item.get("song_id") or f"{normalize_genre(item['genre'])}.{Path(item['path']).stem}",
                path=item["path"],
                genre=normalize_genre(item["genre"]),
                split=item.get("split"),
            )
            for item in obj["entries"]
        ]
        if not entries:
            raise EmptyDataset(f"manifest {root} lists no songs")
        manifest = DatasetManifest(root=base, entries=entries)
        manifest.validate_paths()
        return manifest

    if not root.is_dir():
        raise EmptyDataset(f"dataset root {root} does not exist")
    entries = []
    for sub in sorted(p for p in root.iterdir() if p.is_dir()):
        genre = normalize_genre(sub.name)
        if not genre:
            continue
        for wav in sorted(sub.glob("*.wav")):
            entries.append(
                ManifestEntry(
                    song_id=f"{genre}.{wav.stem}",
                    path=f"{sub.name}/{wav.name}",
                    genre=genre,
                )
            )
    if not entries:
        raise EmptyDataset(f"no genre/*.wav files under {root}")
    return DatasetManifest(root=root, entries=entries)


def save_manifest(manifest: DatasetManifest, path: Path) -> None:
    write_json_atomic(
        path,
        {
            "schema_version": SCHEMA_VERSION,
            "root": str(manifest.root),
            "entries": [
                {"song_id": e.song_id, "path": e.path, "genre": e.genre, "split": e.split}
                for e in manifest.entries
            ],
        },
    )


def load_manifest(path: Path) -> DatasetManifest:
    obj = read_json(path)
    return DatasetManifest(
        root=Path(obj["root"]),
        entries=[
            ManifestEntry(
                song_id=e["song_id"], path=e["path"], genre=e["genre"], split=e.get("split")
            )
            for e in obj["entries"]
        ],
    )


def _safe_name(song_id: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]", "_", song_id)


def _mfcc_obj(cfg: MfccConfig) -> dict:
    return asdict(cfg)


class _Checkpoints:
    """Stage stamps for one bucket directory."""

    def __init__(self, bucket_dir: Path):
        self.path = bucket_dir / "stamps.json"
        self.stamps: dict[str, str] = {}
        if self.path.is_file():
            obj = read_json(self.path)
            if isinstance(obj, dict):
                self.stamps = {k: v for k, v in obj.items() if isinstance(v, str)}

    def is_current(self, stage: str, stamp: str, files: Sequence[Path]) -> bool:
        return self.stamps.get(stage) == stamp and all(f.is_file() for f in files)

    def mark(self, stage: str, stamp: str) -> None:
        self.stamps[stage] = stamp
        write_json_atomic(self.path, self.stamps)

    def drop(self, stage: str) -> None:
        if stage in self.stamps:
            del self.stamps[stage]
            write_json_atomic(self.path, self.stamps)


def _validate_bucket(manifest: DatasetManifest, bucket: BucketSpec) -> None:
    # fail before any audio is touched
    present: dict[str, int] = {}
    for e in manifest.entries:
        present[e.genre] = present.get(e.genre, 0) + 1
    for genre in sorted(bucket.genres):
        if genre not in present:
            raise UnknownGenre(
                f"bucket {bucket.bucket_id} genre {genre!r} is absent from the dataset"
            )
        if present[genre] < 2:
            raise GenreTooSmall(
                f"bucket {bucket.bucket_id} genre {genre!r} has {present[genre]} song(s); need >= 2"
            )


def _stage_features(
    manifest: DatasetManifest, bucket: BucketSpec, config: RunConfig, bucket_dir: Path
) -> None:
    songs = {}
    for entry in manifest.for_genres(set(bucket.genres)):
        try:
            raw = (manifest.root / entry.path).read_bytes()
            signal = resample(to_mono(decode_wav(raw)), CANONICAL_RATE)
            clips = segment_clips(signal, entry.song_id, config.clip_seconds)
            feats = [mfcc_clip(c, config.mfcc) for c in clips]
        except (GenreTopicsError, ValueError, OSError) as exc:
            raise PipelineError("features", str(exc), song_id=entry.song_id) from exc
        songs[entry.song_id] = {
            "genre": entry.genre,
            "features": [f.values for f in feats],
        }
    write_json_atomic(
        bucket_dir / "features.json",
        {
            "schema_version": SCHEMA_VERSION,
            "clip_seconds": config.clip_seconds,
            "mfcc": _mfcc_obj(config.mfcc),
            "songs": songs,
        },
    )


def _stage_vocab(config: RunConfig, bucket_dir: Path, bucket_id: int) -> None:
    obj = read_json(bucket_dir / "features.json")
    all_feats: list[ClipFeature] = []
    per_song: dict[str, list[ClipFeature]] = {}
    labels: dict[str, str] = {}
    for song_id in sorted(obj["songs"]):
        rec = obj["songs"][song_id]
        feats = [
            ClipFeature(song_id=song_id, clip_index=i, values=v)
            for i, v in enumerate(rec["features"])
        ]
        per_song[song_id] = feats
        labels[song_id] = rec["genre"]
        all_feats.extend(feats)

    seed = derive_seed(config.seed, f"bucket{bucket_id}:vocab")
    vocabulary = kmeans_fit(all_feats, v=config.codebook_size, seed=seed)
    save_vocabulary(vocabulary, bucket_dir / "vocab.json")

    tokens = {
        song_id: [assign_word(vocabulary, f) for f in feats]
        for song_id, feats in per_song.items()
    }
    write_json_atomic(
        bucket_dir / "corpus.json",
        {
            "schema_version": SCHEMA_VERSION,
            "bucket_id": bucket_id,
            "genres": sorted(set(labels.values())),
            "songs": {
                song_id: {"genre": labels[song_id], "tokens": tokens[song_id]}
                for song_id in per_song
            },
        },
    )


def load_corpus(bucket_dir: Path) -> Corpus:
    vocabulary = load_vocabulary(bucket_dir / "vocab.json")
    obj = read_json(bucket_dir / "corpus.json")
    documents = [
        Document(
            song_id=song_id,
            genre=obj["songs"][song_id]["genre"],
            tokens=list(obj["songs"][song_id]["tokens"]),
        )
        for song_id in sorted(obj["songs"])
    ]
    return Corpus(
        documents=documents,
        vocabulary=vocabulary,
        genres=set(obj["genres"]),
        bucket_id=obj["bucket_id"],
    )


def _stage_train(
    manifest: DatasetManifest, config: RunConfig, bucket_dir: Path, bucket_id: int
) -> None:
    corpus = load_corpus(bucket_dir)
    sweep = config.sweep_config(manifest.split_tags())
    train_c, test_c = split_bucket(corpus, sweep)
    for n_topics in config.trained_topic_counts():
        model, doc_topics, _ = train_gibbs(
            train_c,
            n_topics,
            alpha=config.alpha,
            eta=config.eta,
            n_iters=config.n_iters,
            burn_in=config.burn_in,
            seed=train_seed(config.seed, bucket_id, n_topics),
        )
        save_model(model, bucket_dir / f"model_K{n_topics}.json")

        foldin_iters = config.foldin_iters or config.n_iters
        thetas = {
            sid: {"split": "train", "theta": doc_topics.theta[i]}
            for i, sid in enumerate(doc_topics.song_ids)
        }
        for doc in test_c.documents:
            thetas[doc.song_id] = {
                "split": "test",
                "theta": infer_theta(
                    model,
                    doc,
                    n_iters=foldin_iters,
                    seed=foldin_seed(config.seed, bucket_id, n_topics, doc.song_id),
                ),
            }
        write_json_atomic(
            bucket_dir / f"thetas_K{n_topics}.json",
            {
                "schema_version": SCHEMA_VERSION,
                "n_topics": n_topics,
                "thetas": thetas,
            },
        )


def _split_features(
    bucket_dir: Path, n_topics: int
) -> tuple[dict[str, np.ndarray], dict[str, np.ndarray]]:
    obj = read_json(bucket_dir / f"thetas_K{n_topics}.json")
    train_f, test_f = {}, {}
    for song_id, rec in obj["thetas"].items():
        target = train_f if rec["split"] == "train" else test_f
        target[song_id] = np.asarray(rec["theta"], dtype=np.float64)
    return train_f, test_f


def _stage_eval(config: RunConfig, bucket_dir: Path, bucket_id: int) -> None:
    corpus_obj = read_json(bucket_dir / "corpus.json")
    labels = {s: rec["genre"] for s, rec in corpus_obj["songs"].items()}

    counts = list(config.topic_counts)
    cells = np.full((1, len(counts)), np.nan)
    seeds = np.zeros((1, len(counts)), dtype=np.int64)
    errors: dict[str, str] = {}
    for c, n_topics in enumerate(counts):
        seeds[0, c] = train_seed(config.seed, bucket_id, n_topics)
        try:
            train_f, test_f = _split_features(bucket_dir, n_topics)
            classifier = train_classifier(
                train_f,
                {s: labels[s] for s in train_f},
                TrainConfig(
                    epochs=config.epochs,
                    lam=config.lam,
                    seed=svm_seed(config.seed, bucket_id, n_topics),
                ),
            )
            cells[0, c] = evaluate_accuracy(
                classifier, test_f, {s: labels[s] for s in test_f}
            )
        except (GenreTopicsError, ValueError) as exc:
            errors[f"bucket{bucket_id}:K{n_topics}"] = str(exc)

    table = AccuracyTable(
        bucket_ids=[bucket_id], topic_counts=counts, cells=cells, seeds=seeds, errors=errors
    )
    write_text_atomic(bucket_dir / "accuracy.csv", table.to_csv())
    write_json_atomic(bucket_dir / "accuracy.json", table.to_json_obj())


def _stage_interpret(config: RunConfig, bucket_dir: Path, bucket_id: int) -> None:
    corpus = load_corpus(bucket_dir)
    n_topics = config.report_topics
    model = load_model(bucket_dir / f"model_K{n_topics}.json")
    thetas_obj = read_json(bucket_dir / f"thetas_K{n_topics}.json")

    word_profiles: dict[int, GenreDistribution | None] = {}
    for w in range(corpus.vocabulary.size):
        try:
            word_profiles[w] = word_genre_profile(w, corpus)
        except UnusedWord:
            word_profiles[w] = None

    topic_profiles = {
        k: topic_genre_profile(k, model, word_profiles) for k in range(n_topics)
    }
    docs = {
        song_id: doc_genre_profile(
            np.asarray(rec["theta"], dtype=np.float64), topic_profiles
        )
        for song_id, rec in thetas_obj["thetas"].items()
    }
    terms = {
        w: term_genre_profile(w, model, topic_profiles)
        for w in range(corpus.vocabulary.size)
    }
    table = AccuracyTable.from_json_obj(read_json(bucket_dir / "accuracy.json"))
    write_text_atomic(
        bucket_dir / "report.json",
        export_report_json(bucket_id, topic_profiles, docs, terms, table),
    )


def _bucket_palette(genres: set[str]) -> Palette:
    if genres <= set(DEFAULT_PALETTE.genres):
        return DEFAULT_PALETTE
    return Palette.for_genres(genres)


def _stage_viz(config: RunConfig, bucket_dir: Path, bucket_id: int) -> None:
    report = read_json(bucket_dir / "report.json")
    corpus = load_corpus(bucket_dir)
    palette = _bucket_palette(set(corpus.genres))

    for key in sorted(report["topics"], key=int):
        dist = GenreDistribution(report["topics"][key])
        write_text_atomic(
            bucket_dir / f"topic{int(key)}.svg",
            doughnut_svg(dist, palette, title=f"topic {int(key)}"),
        )

    term_profiles = {
        int(w): GenreDistribution(d) for w, d in report["terms"].items()
    }
    for doc in corpus.documents:
        timeline = progressive_timeline(
            doc, config.clip_seconds, term_profiles, window=config.timeline_window
        )
        write_text_atomic(
            bucket_dir / f"timeline_{_safe_name(doc.song_id)}.svg",
            timeline_svg(timeline, palette, title=doc.song_id),
        )


def _viz_outputs(config: RunConfig, bucket_dir: Path) -> list[Path]:
    files = [bucket_dir / f"topic{i}.svg" for i in range(config.report_topics)]
    corpus_path = bucket_dir / "corpus.json"
    if corpus_path.is_file():
        for song_id in read_json(corpus_path)["songs"]:
            files.append(bucket_dir / f"timeline_{_safe_name(song_id)}.svg")
    return files


def _bucket_entry_list(manifest: DatasetManifest, bucket: BucketSpec) -> list[dict]:
    return [
        {"song_id": e.song_id, "path": e.path, "genre": e.genre, "split": e.split}
        for e in manifest.for_genres(set(bucket.genres))
    ]


def run_bucket(
    manifest: DatasetManifest,
    bucket: BucketSpec,
    config: RunConfig,
    through: str = "viz",
    force: Sequence[str] = (),
) -> dict:
    """Run the bucket's stage chain up to and including `through`.

    Stages with a current stamp and intact outputs are reused; a failed
    stage removes its partial outputs and drops its stamp before the
    error propagates with stage context.
    """
    if through not in STAGES:
        raise ValueError(f"unknown stage {through!r}")
    _validate_bucket(manifest, bucket)

    bucket_dir = config.out / f"bucket{bucket.bucket_id}"
    bucket_dir.mkdir(parents=True, exist_ok=True)
    checkpoints = _Checkpoints(bucket_dir)
    k = bucket.bucket_id

    entry_list = _bucket_entry_list(manifest, bucket)
    features_stamp = config_hash(
        {
            "stage": "features",
            "entries": entry_list,
            "clip_seconds": config.clip_seconds,
            "mfcc": _mfcc_obj(config.mfcc),
        }
    )
    vocab_stamp = config_hash(
        {
            "stage": "vocab",
            "parent": features_stamp,
            "codebook_size": config.codebook_size,
            "seed": derive_seed(config.seed, f"bucket{k}:vocab"),
        }
    )
    train_stamp = config_hash(
        {
            "stage": "train",
            "parent": vocab_stamp,
            "topic_counts": list(config.trained_topic_counts()),
            "alpha": config.alpha,
            "eta": config.eta,
            "n_iters": config.n_iters,
            "burn_in": config.burn_in,
            "foldin_iters": config.foldin_iters,
            "train_fraction": config.train_fraction,
            "seed": config.seed,
        }
    )
    eval_stamp = config_hash(
        {
            "stage": "eval",
            "parent": train_stamp,
            "topic_counts": list(config.topic_counts),
            "epochs": config.epochs,
            "lam": config.lam,
        }
    )
    interpret_stamp = config_hash(
        {"stage": "interpret", "parent": eval_stamp, "report_topics": config.report_topics}
    )
    viz_stamp = config_hash(
        {
            "stage": "viz",
            "parent": interpret_stamp,
            "timeline_window": config.timeline_window,
        }
    )

    trained = config.trained_topic_counts()
    plan = [
        (
            "features",
            features_stamp,
            lambda: _stage_features(manifest, bucket, config, bucket_dir),
            lambda: [bucket_dir / "features.json"],
        ),
        (
            "vocab",
            vocab_stamp,
            lambda: _stage_vocab(config, bucket_dir, k),
            lambda: [bucket_dir / "vocab.json", bucket_dir / "corpus.json"],
        ),
        (
            "train",
            train_stamp,
            lambda: _stage_train(manifest, config, bucket_dir, k),
            lambda: [
                bucket_dir / name
                for t in trained
                for name in (f"model_K{t}.json", f"thetas_K{t}.json")
            ],
        ),
        (
            "eval",
            eval_stamp,
            lambda: _stage_eval(config, bucket_dir, k),
            lambda: [bucket_dir / "accuracy.csv", bucket_dir / "accuracy.json"],
        ),
        (
            "interpret",
            interpret_stamp,
            lambda: _stage_interpret(config, bucket_dir, k),
            lambda: [bucket_dir / "report.json"],
        ),
        (
            "viz",
            viz_stamp,
            lambda: _stage_viz(config, bucket_dir, k),
            lambda: _viz_outputs(config, bucket_dir),
        ),
    ]

    ran, reused = [], []
    for stage, stamp, fn, outputs in plan:
        if checkpoints.is_current(stage, stamp, outputs()) and stage not in force:
            reused.append(stage)
        else:
            checkpoints.drop(stage)
            try:
                fn()
            except PipelineError:
                for f in outputs():
                    f.unlink(missing_ok=True)
                raise
            except (GenreTopicsError, ValueError, OSError) as exc:
                for f in outputs():
                    f.unlink(missing_ok=True)
                raise PipelineError(stage, str(exc)) from exc
            checkpoints.mark(stage, stamp)
            ran.append(stage)
        if stage == through:
            break

    return {
        "bucket_id": bucket.bucket_id,
        "dir": str(bucket_dir),
        "ran": ran,
        "reused": reused,
    }


def applicable_buckets(
    manifest: DatasetManifest, buckets: Sequence[BucketSpec] = DEFAULT_BUCKETS
) -> list[BucketSpec]:
    """Buckets whose genres all have >= 2 songs in the manifest."""
    counts: dict[str, int] = {}
    for e in manifest.entries:
        counts[e.genre] = counts.get(e.genre, 0) + 1
    return [
        b
        for b in buckets
        if all(counts.get(g, 0) >= 2 for g in b.genres)
    ]


def run_all(
    manifest: DatasetManifest,
    config: RunConfig,
    buckets: Sequence[BucketSpec] | None = None,
    through: str = "viz",
    force: Sequence[str] = (),
) -> dict:
    """Run every applicable bucket and merge their accuracy rows.

    Explicitly passed buckets are run as-is (missing genres fail fast);
    otherwise the default buckets fully covered by the dataset run.
    """
    if buckets is None:
        buckets = applicable_buckets(manifest)
        if not buckets:
            raise EmptyDataset(
                "no genre bucket is fully covered by the dataset (need >= 2 songs per genre)"
            )
    config.out.mkdir(parents=True, exist_ok=True)
    save_manifest(manifest, config.out / "manifest.json")

    summaries = [run_bucket(manifest, b, config, through=through, force=force) for b in buckets]

    stage_index = {s: i for i, s in enumerate(STAGES)}
    if stage_index[through] >= stage_index["eval"]:
        tables = [
            AccuracyTable.from_json_obj(
                read_json(config.out / f"bucket{b.bucket_id}" / "accuracy.json")
            )
            for b in buckets
        ]
        merged = AccuracyTable.merge_rows(tables)
        write_text_atomic(config.out / "accuracy.csv", merged.to_csv())
        write_json_atomic(config.out / "accuracy.json", merged.to_json_obj())

    return {"buckets": summaries, "out": str(config.out)}
