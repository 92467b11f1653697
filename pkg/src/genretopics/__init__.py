"""Acoustic topic models over genre-labeled music.

Songs become documents of k-means "musical words" over short-clip MFCC
features; a topic model fit per genre bucket yields genre-mixture
readings of words, topics, documents, and terms, plus progressive
timelines, doughnut/stacked-area SVGs, and a topic-count accuracy sweep.
"""

from . import errors
from .audio import (
    CANONICAL_RATE,
    DEFAULT_CLIP_SECONDS,
    AudioClip,
    AudioSignal,
    decode_wav,
    encode_wav_pcm16,
    resample,
    segment_clips,
    to_mono,
)
from .evaluate import (
    AccuracyTable,
    LinearClassifier,
    SplitSpec,
    SweepConfig,
    TrainConfig,
    evaluate_accuracy,
    split_by_tags,
    split_stratified,
    sweep_topic_counts,
    train_classifier,
)
from .interpret import (
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
from .lda import (
    DocTopics,
    LdaModel,
    TopicAssignments,
    generate_corpus,
    infer_theta,
    load_model,
    log_likelihood,
    save_model,
    term_topic_posterior,
    train_gibbs,
)
from .mfcc import ClipFeature, MfccConfig, mfcc_clip, mfcc_frames
from .pipeline import (
    DEFAULT_BUCKETS,
    BucketSpec,
    DatasetManifest,
    ManifestEntry,
    RunConfig,
    load_manifest,
    run_all,
    run_bucket,
    save_manifest,
    scan_dataset,
)
from .synth import generate_fixture
from .viz import DEFAULT_PALETTE, Palette, doughnut_svg, export_report_json, timeline_svg
from .vocab import (
    Corpus,
    Document,
    Vocabulary,
    assign_word,
    build_corpus,
    kmeans_fit,
    load_vocabulary,
    save_vocabulary,
)

__version__ = "0.1.0"
