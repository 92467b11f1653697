"""Deterministic labeled test audio.

GTZAN cannot be bundled, so the pipeline is exercised against a small
synthetic dataset: three "genres" with distinct spectral recipes, three
songs each. One song is stereo at 44100 Hz to cover downmix and
resampling; everything else is mono 22050 Hz.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .audio import CANONICAL_RATE, encode_wav_pcm16
from .util import derive_seed

FIXTURE_GENRES = ("metal", "pop", "rock")
SONGS_PER_GENRE = 3


def _timebase(seconds: float, rate: int) -> np.ndarray:
    return np.arange(round(seconds * rate)) / rate


def _sine(t: np.ndarray, freq: float) -> np.ndarray:
    return np.sin(2 * np.pi * freq * t)


def _saw(t: np.ndarray, freq: float) -> np.ndarray:
    return 2.0 * ((freq * t) % 1.0) - 1.0


def fixture_song(genre: str, index: int, seed: int = 0) -> tuple[np.ndarray, int]:
    """Samples and rate for one fixture song.

    rock: sawtooth around 110 Hz with light noise; metal: noise-heavy
    with a low square wave; pop: clean triad of sines. Recipes only need
    to be spectrally far apart so the codebook separates them.
    """
    if genre not in FIXTURE_GENRES:
        raise ValueError(f"unknown fixture genre {genre!r}")
    rng = np.random.default_rng(derive_seed(seed, f"fixture:{genre}{index}"))
    rate = 44100 if (genre, index) == ("pop", 0) else CANONICAL_RATE
    seconds = 3.0 + 0.2 * index
    t = _timebase(seconds, rate)

    if genre == "rock":
        base = 110.0 * (1 + 0.25 * index)
        x = 0.8 * _saw(t, base) + 0.2 * _sine(t, base * 3) + 0.15 * rng.uniform(-1, 1, t.size)
    elif genre == "metal":
        base = 73.4 * (1 + 0.3 * index)
        square = np.sign(_sine(t, base))
        x = 0.35 * square + 0.75 * rng.uniform(-1, 1, t.size)
    else:
        root = 440.0 * (1 + 0.12 * index)
        x = (
            0.5 * _sine(t, root)
            + 0.35 * _sine(t, root * 5 / 4)
            + 0.25 * _sine(t, root * 3 / 2)
        )

    x *= 0.7 / np.abs(x).max()
    if rate != CANONICAL_RATE:
        x = np.stack([x, x * 0.5], axis=1)
    return x, rate


def generate_fixture(root: Path, seed: int = 0) -> list[tuple[str, str, str]]:
    """Write the 9-song dataset under root/<genre>/<genre><i>.wav.

    Returns (song_id, relative path, genre) per song, in the scan order
    a directory walk would produce.
    """
    root = Path(root)
    written = []
    for genre in FIXTURE_GENRES:
        (root / genre).mkdir(parents=True, exist_ok=True)
        for i in range(SONGS_PER_GENRE):
            samples, rate = fixture_song(genre, i, seed)
            rel = f"{genre}/{genre}{i}.wav"
            (root / rel).write_bytes(encode_wav_pcm16(samples, rate))
            written.append((f"{genre}.{genre}{i}", rel, genre))
    return written
