"""Synthetic phonetic language: 44-sound inventory, lexicon, and renderers.

The inventory holds five noise colors plus 39 pure tones drawn uniformly
from 200-900 Hz. Words are uniform random phone sequences, sentences are
uniform random word sequences, and every sampled distribution is uniform.
Also provides the two control corpora: plain Gaussian noise and word-length
noise/tone sequences (300 ms units instead of 90 ms phones).

Noise colors follow the standard acoustics definitions, as nominal PSD
slopes in dB per octave: white 0, pink -3, brown -6, blue +3, violet +6.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass

import numpy as np

from .rng import child_seeds, make_rng
from .waveio import DEFAULT_SAMPLE_RATE, AudioBuffer, concat

NOISE_COLOR_COUNT = 5
TONE_COUNT = 39
INVENTORY_SIZE = NOISE_COLOR_COUNT + TONE_COUNT  # 44 sounds

TONE_FREQ_MIN_HZ = 200.0
TONE_FREQ_MAX_HZ = 900.0
TONE_FREQ_RESOLUTION_HZ = 0.1  # collisions resolved at this granularity

TONE_RAMP_S = 0.005  # linear onset/offset, bounds click energy

DEFAULT_VOCAB_SIZE = 10_000
DEFAULT_WORD_LEN_RANGE = (2, 8)
DEFAULT_SENT_LEN_RANGE = (5, 20)

_SERIALIZATION_VERSION = 1


class SynthLangError(Exception):
    pass


class UnknownWordIdError(SynthLangError):
    pass


class UnknownPhoneIdError(SynthLangError):
    pass


class NoiseColor(enum.Enum):
    WHITE = "white"
    BROWN = "brown"
    PINK = "pink"
    BLUE = "blue"
    VIOLET = "violet"


# PSD ~ f**alpha; alpha = slope_db_per_octave / (10 * log10(2))
_POWER_LAW_EXPONENT = {
    NoiseColor.WHITE: 0.0,
    NoiseColor.PINK: -1.0,
    NoiseColor.BROWN: -2.0,
    NoiseColor.BLUE: 1.0,
    NoiseColor.VIOLET: 2.0,
}

NOMINAL_SLOPE_DB_PER_OCT = {
    NoiseColor.WHITE: 0.0,
    NoiseColor.PINK: -3.0,
    NoiseColor.BROWN: -6.0,
    NoiseColor.BLUE: 3.0,
    NoiseColor.VIOLET: 6.0,
}


@dataclass(frozen=True)
class Tone:
    freq_hz: float

    def __post_init__(self):
        if not TONE_FREQ_MIN_HZ <= self.freq_hz <= TONE_FREQ_MAX_HZ:
            raise ValueError(f"tone frequency {self.freq_hz} outside "
                             f"[{TONE_FREQ_MIN_HZ}, {TONE_FREQ_MAX_HZ}] Hz")


@dataclass(frozen=True)
class PhoneSpec:
    phone_id: int
    source: NoiseColor | Tone


@dataclass(frozen=True)
class PhoneInventory:
    phones: tuple[PhoneSpec, ...]

    def __post_init__(self):
        if len(self.phones) != INVENTORY_SIZE:
            raise ValueError(f"inventory must hold {INVENTORY_SIZE} phones, got {len(self.phones)}")
        ids = [p.phone_id for p in self.phones]
        if sorted(ids) != list(range(INVENTORY_SIZE)):
            raise ValueError("phone ids must be 0..43 and unique")
        colors = [p.source for p in self.phones if isinstance(p.source, NoiseColor)]
        if sorted(c.value for c in colors) != sorted(c.value for c in NoiseColor):
            raise ValueError("each noise color must appear exactly once")

    def by_id(self, phone_id: int) -> PhoneSpec:
        for p in self.phones:
            if p.phone_id == phone_id:
                return p
        raise UnknownPhoneIdError(f"no phone with id {phone_id}")

    @property
    def tones(self) -> list[PhoneSpec]:
        return [p for p in self.phones if isinstance(p.source, Tone)]

    @property
    def noises(self) -> list[PhoneSpec]:
        return [p for p in self.phones if isinstance(p.source, NoiseColor)]


@dataclass(frozen=True)
class Lexicon:
    """word_id -> phone id sequence; insertion order is the sampling order."""

    words: dict[str, tuple[int, ...]]

    def __post_init__(self):
        for word_id, phones in self.words.items():
            if not phones:
                raise ValueError(f"word {word_id!r} has no phones")
        object.__setattr__(self, "_word_ids", tuple(self.words))

    @property
    def word_ids(self) -> tuple[str, ...]:
        return self._word_ids

    def __len__(self) -> int:
        return len(self.words)


@dataclass(frozen=True)
class RenderParams:
    phone_base_ms: float = 90.0
    phone_jitter_ms: float = 30.0
    word_unit_base_ms: float = 300.0
    word_unit_jitter_ms: float = 30.0
    volume_range: tuple[float, float] = (0.1, 0.9)
    sample_rate_hz: int = DEFAULT_SAMPLE_RATE

    def __post_init__(self):
        for base, jitter in (
            (self.phone_base_ms, self.phone_jitter_ms),
            (self.word_unit_base_ms, self.word_unit_jitter_ms),
        ):
            if not base > jitter >= 0:
                raise ValueError(f"need base > jitter >= 0, got base={base} jitter={jitter}")
        lo, hi = self.volume_range
        if not 0.0 < lo <= hi <= 1.0:
            raise ValueError(f"volume range must sit within (0, 1], got {self.volume_range}")


def build_inventory(seed: int) -> PhoneInventory:
    """Five noise colors plus 39 tones drawn uniformly in 200-900 Hz.

    Tone frequencies are quantized to 0.1 Hz and redrawn on collision so
    all 39 are distinct.
    """
    rng = make_rng(seed)
    phones = [PhoneSpec(i, color) for i, color in enumerate(NoiseColor)]
    seen = set()
    while len(seen) < TONE_COUNT:
        freq = round(float(rng.uniform(TONE_FREQ_MIN_HZ, TONE_FREQ_MAX_HZ)), 1)
        if freq not in seen:
            seen.add(freq)
            phones.append(PhoneSpec(len(phones), Tone(freq)))
    return PhoneInventory(tuple(phones))


def _ms_to_samples(duration_ms: float, sample_rate_hz: int) -> int:
    return math.floor(duration_ms * sample_rate_hz / 1000.0 + 0.5)


def _power_law_noise(n: int, alpha: float, rng: np.random.Generator) -> np.ndarray:
    """Gaussian noise spectrally shaped so PSD ~ f**alpha (DC removed)."""
    white = rng.standard_normal(n)
    if alpha == 0.0 or n < 2:
        return white
    spectrum = np.fft.rfft(white)
    k = np.arange(len(spectrum), dtype=np.float64)
    scale = np.zeros_like(k)
    scale[1:] = k[1:] ** (alpha / 2.0)
    return np.fft.irfft(spectrum * scale, n)


def render_source(
    source: NoiseColor | Tone,
    n_samples: int,
    peak: float,
    sample_rate_hz: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Render one sound source as normalized floats with the given peak.

    Tones are sinusoids with 5 ms linear onset/offset ramps; noises carry
    their color's nominal spectral slope and are scaled to the peak.
    """
    if n_samples <= 0:
        return np.zeros(0, dtype=np.float64)
    if isinstance(source, Tone):
        t = np.arange(n_samples, dtype=np.float64) / sample_rate_hz
        signal = np.sin(2.0 * np.pi * source.freq_hz * t)
        ramp = min(int(round(TONE_RAMP_S * sample_rate_hz)), n_samples // 2)
        if ramp > 0:
            slope = np.linspace(0.0, 1.0, ramp, endpoint=False)
            signal[:ramp] *= slope
            signal[-ramp:] *= slope[::-1]
        return signal * peak
    signal = _power_law_noise(n_samples, _POWER_LAW_EXPONENT[source], rng)
    top = np.max(np.abs(signal))
    if top > 0:
        signal = signal * (peak / top)
    return signal


def render_phone(spec: PhoneSpec, params: RenderParams, seed: int) -> AudioBuffer:
    """Render one phone: duration base +/- uniform jitter, sampled peak volume.

    Draw order from the seed is pinned: duration, volume, then the noise
    samples (tones draw nothing further).
    """
    rng = make_rng(seed)
    duration_ms = params.phone_base_ms + rng.uniform(-params.phone_jitter_ms, params.phone_jitter_ms)
    peak = rng.uniform(*params.volume_range)
    n = _ms_to_samples(duration_ms, params.sample_rate_hz)
    data = render_source(spec.source, n, peak, params.sample_rate_hz, rng)
    return AudioBuffer.from_float(data, params.sample_rate_hz)


def build_lexicon(
    inventory: PhoneInventory,
    vocab_size: int,
    word_len_range: tuple[int, int],
    seed: int,
) -> Lexicon:
    """Sample a lexicon: word length and phone choices all uniform i.i.d."""
    lo, hi = word_len_range
    if vocab_size < 1:
        raise ValueError("vocab_size must be at least 1")
    if not 1 <= lo <= hi:
        raise ValueError(f"bad word length range [{lo}, {hi}]")
    rng = make_rng(seed)
    width = len(str(vocab_size - 1))
    words = {}
    for i in range(vocab_size):
        length = int(rng.integers(lo, hi + 1))
        phones = tuple(int(p) for p in rng.integers(0, len(inventory.phones), size=length))
        words[f"w{i:0{width}d}"] = phones
    return Lexicon(words)


def sample_sentence(lexicon: Lexicon, sent_len_range: tuple[int, int], seed: int) -> list[str]:
    """Sentence length uniform in the range, words uniform over the lexicon."""
    lo, hi = sent_len_range
    if not 1 <= lo <= hi:
        raise ValueError(f"bad sentence length range [{lo}, {hi}]")
    if not len(lexicon):
        raise ValueError("lexicon is empty")
    rng = make_rng(seed)
    length = int(rng.integers(lo, hi + 1))
    ids = lexicon.word_ids
    picks = rng.integers(0, len(ids), size=length)
    return [ids[int(i)] for i in picks]


def render_utterance(
    sentence: list[str],
    lexicon: Lexicon,
    inventory: PhoneInventory,
    params: RenderParams,
    seed: int,
) -> AudioBuffer:
    """Render every phone of every word in order, with zero inter-phone gaps.

    Per-phone seeds are derived from the utterance seed stream, so a fixed
    seed yields a byte-identical waveform on every run.
    """
    phone_ids = []
    for word_id in sentence:
        if word_id not in lexicon.words:
            raise UnknownWordIdError(f"word id {word_id!r} not in lexicon")
        phone_ids.extend(lexicon.words[word_id])
    specs = [inventory.by_id(pid) for pid in phone_ids]
    seeds = child_seeds(make_rng(seed), len(specs))
    parts = [render_phone(spec, params, s) for spec, s in zip(specs, seeds)]
    return concat(parts, params.sample_rate_hz)


@dataclass(frozen=True)
class WordNoiseUnit:
    phone_id: int
    n_samples: int
    peak: float


def word_noise_units(
    params: RenderParams,
    inventory: PhoneInventory,
    total_samples: int,
    seed: int,
) -> list[WordNoiseUnit]:
    """Draw the unit sequence for a word-length noise corpus.

    Sources are uniform over the 44 sounds; durations are the word-unit
    base +/- uniform jitter. Units are drawn until they cover
    ``total_samples``; rendering truncates the final unit to length.
    """
    if total_samples <= 0:
        raise ValueError("total_samples must be positive")
    rng = make_rng(seed)
    return _draw_word_noise_units(rng, params, inventory, total_samples)


def _draw_word_noise_units(rng, params, inventory, total_samples):
    units = []
    covered = 0
    while covered < total_samples:
        phone_id = int(rng.integers(0, len(inventory.phones)))
        duration_ms = params.word_unit_base_ms + rng.uniform(
            -params.word_unit_jitter_ms, params.word_unit_jitter_ms
        )
        peak = float(rng.uniform(*params.volume_range))
        n = _ms_to_samples(duration_ms, params.sample_rate_hz)
        units.append(WordNoiseUnit(phone_id, n, peak))
        covered += n
    return units


def word_noise_sequence(
    params: RenderParams,
    inventory: PhoneInventory,
    total_samples: int,
    seed: int,
) -> AudioBuffer:
    """Render a word-length noise/tone sequence of exactly ``total_samples``."""
    if total_samples <= 0:
        raise ValueError("total_samples must be positive")
    rng = make_rng(seed)
    units = _draw_word_noise_units(rng, params, inventory, total_samples)
    seeds = child_seeds(rng, len(units))
    pieces = []
    for unit, unit_seed in zip(units, seeds):
        spec = inventory.by_id(unit.phone_id)
        pieces.append(
            render_source(spec.source, unit.n_samples, unit.peak,
                          params.sample_rate_hz, make_rng(unit_seed))
        )
    signal = np.concatenate(pieces)[:total_samples]
    return AudioBuffer.from_float(signal, params.sample_rate_hz)


def white_noise(
    total_samples: int,
    seed: int,
    volume: float = 0.5,
    sample_rate_hz: int = DEFAULT_SAMPLE_RATE,
) -> AudioBuffer:
    """I.i.d. Gaussian noise of exact length.

    The standard deviation is volume/5, which puts the per-sample
    probability of exceeding the volume (clipping) below 1e-6.
    """
    if total_samples < 0:
        raise ValueError("total_samples must be >= 0")
    rng = make_rng(seed)
    sigma = volume / 5.0
    return AudioBuffer.from_float(rng.standard_normal(total_samples) * sigma, sample_rate_hz)


# ---------------------------------------------------------------------------
# Serialization

def inventory_to_json(inventory: PhoneInventory) -> str:
    entries = []
    for p in inventory.phones:
        if isinstance(p.source, NoiseColor):
            entries.append({"phone_id": p.phone_id, "type": "noise", "color": p.source.value})
        else:
            entries.append({"phone_id": p.phone_id, "type": "tone", "freq_hz": p.source.freq_hz})
    return json.dumps({"version": _SERIALIZATION_VERSION, "phones": entries}, indent=2) + "\n"


def inventory_from_json(text: str) -> PhoneInventory:
    doc = json.loads(text)
    if doc.get("version") != _SERIALIZATION_VERSION:
        raise SynthLangError(f"unsupported inventory version {doc.get('version')!r}")
    phones = []
    for entry in doc["phones"]:
        if entry["type"] == "noise":
            source: NoiseColor | Tone = NoiseColor(entry["color"])
        elif entry["type"] == "tone":
            source = Tone(entry["freq_hz"])
        else:
            raise SynthLangError(f"unknown phone type {entry['type']!r}")
        phones.append(PhoneSpec(entry["phone_id"], source))
    return PhoneInventory(tuple(phones))


def lexicon_to_json(lexicon: Lexicon) -> str:
    doc = {
        "version": _SERIALIZATION_VERSION,
        "words": {word_id: list(phones) for word_id, phones in lexicon.words.items()},
    }
    return json.dumps(doc, indent=2) + "\n"


def lexicon_from_json(text: str) -> Lexicon:
    doc = json.loads(text)
    if doc.get("version") != _SERIALIZATION_VERSION:
        raise SynthLangError(f"unsupported lexicon version {doc.get('version')!r}")
    return Lexicon({word_id: tuple(phones) for word_id, phones in doc["words"].items()})
