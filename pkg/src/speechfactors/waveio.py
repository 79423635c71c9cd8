"""Mono 16-bit PCM WAV reading, writing, and in-memory buffers.

This is the substrate for every perturbation and renderer in the package.
Only PCM 16-bit mono is supported; anything else is a hard error rather
than a silent conversion, so cut-and-concatenate perturbations stay
byte-exact and testable. Buffers are immutable after construction.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

DEFAULT_SAMPLE_RATE = 16_000

# Decode divides by 32768; encode clamps to [-1, 1] then rounds, so the
# int16 -> float -> int16 trip is exact for every representable value.
_FLOAT_SCALE = 32768.0


class WavError(Exception):
    """Base class for WAV format errors."""


class MalformedHeaderError(WavError):
    """File is not a syntactically valid RIFF/WAVE container."""


class NotPcm16MonoError(WavError):
    """File is WAV but not PCM, not 16-bit, or not single channel."""


class SampleRateMismatchError(WavError):
    """Buffers with different sample rates were combined."""


@dataclass(frozen=True, eq=False)
class AudioBuffer:
    """Immutable mono PCM signal: int16 samples at a fixed rate."""

    samples: np.ndarray
    sample_rate_hz: int = DEFAULT_SAMPLE_RATE

    def __post_init__(self):
        if self.sample_rate_hz <= 0:
            raise ValueError(f"sample_rate_hz must be positive, got {self.sample_rate_hz}")
        arr = np.asarray(self.samples)
        if arr.ndim != 1:
            raise ValueError(f"samples must be 1-D, got shape {arr.shape}")
        if arr.dtype != np.int16:
            if arr.dtype.kind not in "iu":
                raise ValueError("samples must be integers; use AudioBuffer.from_float for floats")
            if arr.size and (int(arr.min()) < -32768 or int(arr.max()) > 32767):
                raise ValueError("sample values exceed the int16 range")
            arr = arr.astype(np.int16)
        else:
            arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "samples", arr)

    def __len__(self) -> int:
        return len(self.samples)

    def __eq__(self, other) -> bool:
        if not isinstance(other, AudioBuffer):
            return NotImplemented
        return self.sample_rate_hz == other.sample_rate_hz and np.array_equal(
            self.samples, other.samples
        )

    @property
    def duration_s(self) -> float:
        return len(self.samples) / self.sample_rate_hz

    def to_float(self) -> np.ndarray:
        """Normalized float64 view in [-1.0, 1.0)."""
        return self.samples.astype(np.float64) / _FLOAT_SCALE

    @classmethod
    def from_float(cls, data: np.ndarray, sample_rate_hz: int = DEFAULT_SAMPLE_RATE) -> "AudioBuffer":
        """Encode normalized floats: clamp to [-1, 1], round, clamp to int16."""
        x = np.clip(np.asarray(data, dtype=np.float64), -1.0, 1.0)
        ints = np.clip(np.rint(x * _FLOAT_SCALE), -32768, 32767).astype(np.int16)
        return cls(ints, sample_rate_hz)

    def slice(self, start: int, end: int) -> "AudioBuffer":
        return AudioBuffer(self.samples[start:end], self.sample_rate_hz)


def read_wav(path) -> AudioBuffer:
    """Read a PCM 16-bit mono WAV file, byte-exact, no resampling.

    Raises MalformedHeaderError for broken RIFF structure and
    NotPcm16MonoError for valid WAVs in an unsupported format.
    I/O failures propagate as OSError.
    """
    data = Path(path).read_bytes()
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise MalformedHeaderError(f"{path}: not a RIFF/WAVE file")

    fmt = None
    payload = None
    pos = 12
    while pos + 8 <= len(data):
        chunk_id = data[pos : pos + 4]
        (chunk_size,) = struct.unpack_from("<I", data, pos + 4)
        body = data[pos + 8 : pos + 8 + chunk_size]
        if chunk_id == b"fmt ":
            if len(body) < 16:
                raise MalformedHeaderError(f"{path}: fmt chunk truncated")
            fmt = struct.unpack_from("<HHIIHH", body, 0)
        elif chunk_id == b"data":
            if len(body) < chunk_size:
                raise MalformedHeaderError(f"{path}: data chunk truncated")
            payload = body
            break
        pos += 8 + chunk_size + (chunk_size & 1)  # chunks are word-aligned

    if fmt is None:
        raise MalformedHeaderError(f"{path}: missing fmt chunk")
    if payload is None:
        raise MalformedHeaderError(f"{path}: missing data chunk")

    audio_format, channels, sample_rate, _byte_rate, _block_align, bits = fmt
    if audio_format != 1 or bits != 16 or channels != 1:
        raise NotPcm16MonoError(
            f"{path}: need PCM 16-bit mono, got format={audio_format} "
            f"bits={bits} channels={channels}"
        )
    if len(payload) % 2:
        raise MalformedHeaderError(f"{path}: odd data chunk size for 16-bit samples")

    samples = np.frombuffer(payload, dtype="<i2").astype(np.int16)
    return AudioBuffer(samples, int(sample_rate))


def write_wav(buffer: AudioBuffer, path) -> None:
    """Write a buffer as PCM 16-bit mono WAV (little-endian data chunk)."""
    payload = buffer.samples.astype("<i2").tobytes()
    rate = buffer.sample_rate_hz
    header = b"RIFF" + struct.pack("<I", 36 + len(payload)) + b"WAVE"
    header += b"fmt " + struct.pack("<IHHIIHH", 16, 1, 1, rate, rate * 2, 2, 16)
    header += b"data" + struct.pack("<I", len(payload))
    Path(path).write_bytes(header + payload)


def concat(buffers: list[AudioBuffer], sample_rate_hz: int = DEFAULT_SAMPLE_RATE) -> AudioBuffer:
    """Exact sample-level concatenation: no crossfade, gain, or click removal.

    All buffers must share one sample rate. An empty list yields an empty
    buffer at ``sample_rate_hz``.
    """
    if not buffers:
        return AudioBuffer(np.zeros(0, dtype=np.int16), sample_rate_hz)
    rates = {b.sample_rate_hz for b in buffers}
    if len(rates) > 1:
        raise SampleRateMismatchError(f"mixed sample rates: {sorted(rates)}")
    joined = np.concatenate([b.samples for b in buffers])
    return AudioBuffer(joined, buffers[0].sample_rate_hz)


def silence(n_samples: int, sample_rate_hz: int = DEFAULT_SAMPLE_RATE) -> AudioBuffer:
    return AudioBuffer(np.zeros(n_samples, dtype=np.int16), sample_rate_hz)
