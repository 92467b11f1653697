"""WAV decoding and slicing of songs into fixed-length clips.

Ingest normalizes everything to mono float64 in [-1, 1]; the pipeline
then resamples to a single canonical rate (22050 Hz) so one MFCC
configuration covers the whole corpus.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import MalformedWav, SignalTooShort, UnsupportedEncoding

CANONICAL_RATE = 22050
DEFAULT_CLIP_SECONDS = 0.10

_WAVE_FORMAT_PCM = 1
_WAVE_FORMAT_IEEE_FLOAT = 3


@dataclass
class AudioSignal:
    """Decoded audio: samples in [-1, 1], shape (n,) mono or (n, channels)."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("samples must be finite")

    @property
    def n_channels(self) -> int:
        return 1 if self.samples.ndim == 1 else self.samples.shape[1]

    @property
    def duration(self) -> float:
        return self.samples.shape[0] / self.sample_rate


@dataclass
class AudioClip:
    """One fixed-length slice of a song, temporally indexed."""

    song_id: str
    clip_index: int
    start_time: float
    samples: np.ndarray = field(repr=False)
    sample_rate: int

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.clip_index < 0:
            raise ValueError("clip_index must be non-negative")


def decode_wav(data: bytes) -> AudioSignal:
    """Decode a RIFF/WAVE container into an AudioSignal.

    Supports 8/16/24/32-bit integer PCM and 32-bit float; anything else
    raises UnsupportedEncoding. Header inconsistencies (bad magic, data
    chunk longer than the file, frame-misaligned data) raise MalformedWav.
    """
    if len(data) < 12 or data[0:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise MalformedWav("not a RIFF/WAVE container")

    fmt = None
    payload = None
    offset = 12
    while offset + 8 <= len(data):
        chunk_id = data[offset : offset + 4]
        (chunk_size,) = struct.unpack_from("<I", data, offset + 4)
        body_start = offset + 8
        if chunk_id == b"fmt ":
            if chunk_size < 16 or body_start + 16 > len(data):
                raise MalformedWav("truncated fmt chunk")
            fmt = struct.unpack_from("<HHIIHH", data, body_start)
        elif chunk_id == b"data":
            if body_start + chunk_size > len(data):
                raise MalformedWav("data chunk length disagrees with file size")
            payload = data[body_start : body_start + chunk_size]
        # chunks are word-aligned
        offset = body_start + chunk_size + (chunk_size & 1)

    if fmt is None or payload is None:
        raise MalformedWav("missing fmt or data chunk")

    audio_format, n_channels, sample_rate, _, _, bits = fmt
    if n_channels < 1 or sample_rate <= 0:
        raise MalformedWav("nonsensical channel count or sample rate")

    if audio_format == _WAVE_FORMAT_PCM and bits in (8, 16, 24, 32):
        values = _decode_pcm(payload, bits)
    elif audio_format == _WAVE_FORMAT_IEEE_FLOAT and bits == 32:
        if len(payload) % 4:
            raise MalformedWav("float data not 32-bit aligned")
        values = np.frombuffer(payload, dtype="<f4").astype(np.float64)
    else:
        raise UnsupportedEncoding(
            f"format tag {audio_format} at {bits} bits is not supported"
        )

    if values.size % n_channels:
        raise MalformedWav("data chunk not a whole number of frames")
    if n_channels > 1:
        values = values.reshape(-1, n_channels)

    return AudioSignal(np.clip(values, -1.0, 1.0), sample_rate)


def _decode_pcm(payload: bytes, bits: int) -> np.ndarray:
    if bits == 8:
        raw = np.frombuffer(payload, dtype=np.uint8).astype(np.float64)
        return (raw - 128.0) / 128.0
    if bits == 16:
        if len(payload) % 2:
            raise MalformedWav("16-bit data has odd byte count")
        return np.frombuffer(payload, dtype="<i2").astype(np.float64) / 32768.0
    if bits == 24:
        if len(payload) % 3:
            raise MalformedWav("24-bit data not 3-byte aligned")
        b = np.frombuffer(payload, dtype=np.uint8).reshape(-1, 3).astype(np.int32)
        raw = b[:, 0] | (b[:, 1] << 8) | (b[:, 2] << 16)
        raw = np.where(raw >= 1 << 23, raw - (1 << 24), raw)
        return raw.astype(np.float64) / float(1 << 23)
    if len(payload) % 4:
        raise MalformedWav("32-bit data not 4-byte aligned")
    return np.frombuffer(payload, dtype="<i4").astype(np.float64) / float(1 << 31)


def encode_wav_pcm16(samples: np.ndarray, sample_rate: int) -> bytes:
    """Encode mono or multi-channel samples as a 16-bit PCM WAV.

    decode_wav(encode_wav_pcm16(x, sr)) round-trips 16-bit data bit-exactly.
    """
    x = np.asarray(samples, dtype=np.float64)
    n_channels = 1 if x.ndim == 1 else x.shape[1]
    ints = np.clip(np.rint(x * 32768.0), -32768, 32767).astype("<i2")
    payload = ints.tobytes()
    block_align = 2 * n_channels
    header = b"RIFF" + struct.pack("<I", 36 + len(payload)) + b"WAVE"
    header += b"fmt " + struct.pack(
        "<IHHIIHH",
        16,
        _WAVE_FORMAT_PCM,
        n_channels,
        sample_rate,
        sample_rate * block_align,
        block_align,
        16,
    )
    header += b"data" + struct.pack("<I", len(payload))
    return header + payload


def to_mono(signal: AudioSignal) -> AudioSignal:
    """Downmix by per-frame arithmetic mean of channels."""
    if signal.samples.ndim == 1:
        return AudioSignal(signal.samples.copy(), signal.sample_rate)
    return AudioSignal(signal.samples.mean(axis=1), signal.sample_rate)


def resample(signal: AudioSignal, target_rate: int) -> AudioSignal:
    """Linear-interpolation resampling onto the target sample grid."""
    if target_rate <= 0:
        raise ValueError("target_rate must be positive")
    if target_rate == signal.sample_rate:
        return AudioSignal(signal.samples.copy(), signal.sample_rate)

    n_in = signal.samples.shape[0]
    n_out = int(round(n_in * target_rate / signal.sample_rate))
    positions = np.arange(n_out) * (signal.sample_rate / target_rate)
    grid = np.arange(n_in, dtype=np.float64)
    if signal.samples.ndim == 1:
        out = np.interp(positions, grid, signal.samples)
    else:
        out = np.column_stack(
            [np.interp(positions, grid, ch) for ch in signal.samples.T]
        )
    return AudioSignal(out, target_rate)


def segment_clips(
    signal: AudioSignal,
    song_id: str,
    clip_seconds: float = DEFAULT_CLIP_SECONDS,
) -> list[AudioClip]:
    """Slice a mono signal into consecutive non-overlapping clips.

    The trailing remainder shorter than clip_seconds is discarded, never
    zero-padded, so song ends don't contribute silence-biased words.
    """
    if clip_seconds <= 0:
        raise ValueError("clip_seconds must be positive")
    if signal.samples.ndim != 1:
        raise ValueError("segment_clips expects a mono signal; call to_mono first")

    clip_len = int(round(clip_seconds * signal.sample_rate))
    n_clips = signal.samples.shape[0] // clip_len
    if n_clips == 0:
        raise SignalTooShort(
            f"{song_id}: {signal.samples.shape[0]} samples < one {clip_seconds}s clip"
        )
    return [
        AudioClip(
            song_id=song_id,
            clip_index=i,
            start_time=i * clip_seconds,
            samples=signal.samples[i * clip_len : (i + 1) * clip_len].copy(),
            sample_rate=signal.sample_rate,
        )
        for i in range(n_clips)
    ]
