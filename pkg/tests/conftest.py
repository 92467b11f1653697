"""Shared fixtures: the synthetic dataset and one full artifact run."""

from __future__ import annotations

from types import SimpleNamespace

import pytest

from genretopics.pipeline import RunConfig, run_all, scan_dataset
from genretopics.synth import generate_fixture
from genretopics.vocab import Corpus, Document, Vocabulary


@pytest.fixture(scope="session")
def fixture_dataset(tmp_path_factory):
    root = tmp_path_factory.mktemp("dataset")
    generate_fixture(root, seed=0)
    return root


@pytest.fixture(scope="session")
def fixture_manifest(fixture_dataset):
    return scan_dataset(fixture_dataset)


@pytest.fixture(scope="session")
def default_run(fixture_manifest, tmp_path_factory):
    """One complete default-config run over the bundled fixture."""
    out = tmp_path_factory.mktemp("artifacts") / "out"
    config = RunConfig(out=out, seed=42)
    summary = run_all(fixture_manifest, config)
    return SimpleNamespace(
        config=config, manifest=fixture_manifest, out=out, summary=summary
    )


@pytest.fixture
def corpus_factory():
    """Build a corpus from (song_id, genre, tokens) triples."""

    def build(rows, vocab_size, bucket_id=0):
        docs = [Document(song_id=s, genre=g, tokens=list(t)) for s, g, t in rows]
        return Corpus(
            documents=docs,
            vocabulary=Vocabulary.placeholder(vocab_size),
            genres={g for _, g, _ in rows},
            bucket_id=bucket_id,
        )

    return build
