"""MFCC features for clips: pre-emphasis, Hann frames, mel filterbank, DCT-II.

Built directly on numpy's FFT; a brute-force O(n^2) DFT reference lives in
the test suite to cross-check this path.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .audio import AudioClip
from .errors import ClipTooShort, DegenerateBand

MEL_SCALE = 2595.0
MEL_BREAK_HZ = 700.0


@dataclass(frozen=True)
class MfccConfig:
    """Frame/filterbank parameters. Defaults give >=3 frames per 0.10 s clip
    at 22050 Hz.

    fmax=None means "Nyquist at the clip's sample rate". aggregate picks how
    per-frame coefficient vectors collapse into one clip feature.
    """

    n_fft: int = 1024
    hop: int = 512
    n_mels: int = 40
    n_coeffs: int = 13
    pre_emphasis: float = 0.97
    fmin: float = 0.0
    fmax: float | None = None
    log_floor: float = 1e-10
    aggregate: str = "mean"

    def __post_init__(self):
        if not (0 < self.hop <= self.n_fft):
            raise ValueError("need 0 < hop <= n_fft")
        if not (0 < self.n_coeffs <= self.n_mels):
            raise ValueError("need 0 < n_coeffs <= n_mels")
        if not (0.0 <= self.pre_emphasis < 1.0):
            raise ValueError("pre_emphasis must be in [0, 1)")
        if self.log_floor <= 0:
            raise ValueError("log_floor must be positive")
        if self.aggregate not in ("mean", "first"):
            raise ValueError("aggregate must be 'mean' or 'first'")

    def resolve_fmax(self, sample_rate: int) -> float:
        fmax = sample_rate / 2 if self.fmax is None else self.fmax
        if not (0 <= self.fmin < fmax <= sample_rate / 2):
            raise ValueError("need 0 <= fmin < fmax <= sample_rate/2")
        return fmax


@dataclass
class ClipFeature:
    """One MFCC coefficient vector summarizing a clip."""

    song_id: str
    clip_index: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if not np.all(np.isfinite(self.values)):
            raise ValueError("feature values must be finite")


def hz_to_mel(hz):
    return MEL_SCALE * np.log10(1.0 + np.asarray(hz, dtype=np.float64) / MEL_BREAK_HZ)


def mel_to_hz(mel):
    return MEL_BREAK_HZ * (10.0 ** (np.asarray(mel, dtype=np.float64) / MEL_SCALE) - 1.0)


def mel_center_frequencies(n_mels: int, fmin: float, fmax: float) -> np.ndarray:
    """The n_mels+2 band edge/center frequencies, equally spaced on the mel
    scale between fmin and fmax."""
    return mel_to_hz(np.linspace(hz_to_mel(fmin), hz_to_mel(fmax), n_mels + 2))


@lru_cache(maxsize=32)
def _filterbank_cached(config: MfccConfig, sample_rate: int) -> np.ndarray:
    fmax = config.resolve_fmax(sample_rate)
    centers = mel_center_frequencies(config.n_mels, config.fmin, fmax)

    bin_hz = sample_rate / config.n_fft
    center_bins = np.rint(centers / bin_hz).astype(int)
    if np.any(np.diff(center_bins) == 0):
        raise DegenerateBand(
            f"{config.n_mels} mel bands over {config.fmin}-{fmax} Hz collapse "
            f"onto shared FFT bins at n_fft={config.n_fft}"
        )

    bin_freqs = np.arange(config.n_fft // 2 + 1) * bin_hz
    lower = (bin_freqs[None, :] - centers[:-2, None]) / np.diff(centers[:-1])[:, None]
    upper = (centers[2:, None] - bin_freqs[None, :]) / np.diff(centers[1:])[:, None]
    weights = np.maximum(0.0, np.minimum(lower, upper))

    if np.any(weights.sum(axis=1) <= 0):
        raise DegenerateBand("a mel filter row has no positive weight")
    weights.flags.writeable = False
    return weights


def mel_filterbank(config: MfccConfig, sample_rate: int) -> np.ndarray:
    """Triangular mel filterbank, shape (n_mels, n_fft//2 + 1).

    Returned array is cached and read-only; copy before mutating.
    """
    return _filterbank_cached(config, sample_rate)


@lru_cache(maxsize=32)
def _dct2_cached(n_coeffs: int, n_mels: int) -> np.ndarray:
    n = np.arange(n_mels)
    k = np.arange(n_coeffs)[:, None]
    matrix = np.cos(np.pi * k * (2 * n + 1) / (2 * n_mels))
    matrix *= np.sqrt(2.0 / n_mels)
    matrix[0] *= np.sqrt(0.5)
    matrix.flags.writeable = False
    return matrix


def dct2_matrix(n_coeffs: int, n_mels: int) -> np.ndarray:
    """Orthonormal DCT-II rows, shape (n_coeffs, n_mels). Cached, read-only."""
    if n_coeffs > n_mels:
        raise ValueError("n_coeffs must not exceed n_mels")
    return _dct2_cached(n_coeffs, n_mels)


def hann_window(n: int) -> np.ndarray:
    return 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(n) / (n - 1))


def frame_signal(samples: np.ndarray, n_fft: int, hop: int) -> np.ndarray:
    """Complete frames only, shape (n_frames, n_fft)."""
    starts = range(0, samples.shape[0] - n_fft + 1, hop)
    return np.stack([samples[s : s + n_fft] for s in starts])


def mfcc_frames(samples: np.ndarray, sample_rate: int, config: MfccConfig) -> np.ndarray:
    """Per-frame MFCC matrix, shape (n_frames, n_coeffs)."""
    if samples.shape[0] < config.n_fft:
        raise ClipTooShort(
            f"{samples.shape[0]} samples < n_fft={config.n_fft}"
        )
    emphasized = np.concatenate(
        ([samples[0]], samples[1:] - config.pre_emphasis * samples[:-1])
    )
    frames = frame_signal(emphasized, config.n_fft, config.hop)
    frames = frames * hann_window(config.n_fft)

    power = np.abs(np.fft.rfft(frames, axis=1)) ** 2
    mel_energies = power @ mel_filterbank(config, sample_rate).T
    log_energies = np.log(np.maximum(mel_energies, config.log_floor))
    return log_energies @ dct2_matrix(config.n_coeffs, config.n_mels).T


def mfcc_clip(clip: AudioClip, config: MfccConfig) -> ClipFeature:
    """One feature vector per clip: frame MFCCs collapsed per config.aggregate."""
    coeffs = mfcc_frames(clip.samples, clip.sample_rate, config)
    values = coeffs.mean(axis=0) if config.aggregate == "mean" else coeffs[0]
    return ClipFeature(song_id=clip.song_id, clip_index=clip.clip_index, values=values)
