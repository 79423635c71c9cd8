import collections

import numpy as np
import pytest

from speechfactors.synthlang import (
    INVENTORY_SIZE,
    NOISE_COLOR_COUNT,
    TONE_COUNT,
    Lexicon,
    NoiseColor,
    PhoneInventory,
    PhoneSpec,
    RenderParams,
    Tone,
    UnknownPhoneIdError,
    UnknownWordIdError,
    build_inventory,
    build_lexicon,
    inventory_from_json,
    inventory_to_json,
    lexicon_from_json,
    lexicon_to_json,
    render_phone,
    render_utterance,
    sample_sentence,
    white_noise,
    word_noise_sequence,
    word_noise_units,
)

from oracles import chi_square_uniform_pvalue

PARAMS = RenderParams()
RATE = PARAMS.sample_rate_hz


@pytest.fixture(scope="module")
def inventory():
    return build_inventory(2024)


@pytest.fixture(scope="module")
def lexicon(inventory):
    return build_lexicon(inventory, 500, (2, 8), seed=77)


# --- inventory ----------------------------------------------------------------

def test_inventory_has_44_sounds(inventory):
    assert len(inventory.phones) == INVENTORY_SIZE == 44
    assert len(inventory.noises) == NOISE_COLOR_COUNT == 5
    assert len(inventory.tones) == TONE_COUNT == 39


def test_inventory_covers_each_noise_color_once(inventory):
    colors = sorted(p.source.value for p in inventory.noises)
    assert colors == ["blue", "brown", "pink", "violet", "white"]


def test_tone_frequencies_in_range_and_distinct(inventory):
    freqs = [p.source.freq_hz for p in inventory.tones]
    assert all(200.0 <= f <= 900.0 for f in freqs)
    assert len({round(f, 1) for f in freqs}) == len(freqs)


def test_inventory_deterministic():
    assert build_inventory(5) == build_inventory(5)
    assert build_inventory(5) != build_inventory(6)


def test_inventory_constructor_enforces_invariants(inventory):
    with pytest.raises(ValueError):
        PhoneInventory(inventory.phones[:43])
    doubled_white = tuple(
        PhoneSpec(p.phone_id, NoiseColor.WHITE if p.phone_id == 5 else p.source)
        for p in inventory.phones
    )
    with pytest.raises(ValueError):
        PhoneInventory(doubled_white)


def test_tone_range_enforced():
    with pytest.raises(ValueError):
        Tone(199.9)
    with pytest.raises(ValueError):
        Tone(900.1)


def test_inventory_json_round_trip(inventory):
    assert inventory_from_json(inventory_to_json(inventory)) == inventory


# --- phone rendering ----------------------------------------------------------

def test_phone_durations_within_jitter_bounds(inventory):
    lo = int(round(0.060 * RATE))
    hi = int(round(0.120 * RATE))
    for seed, spec in enumerate(inventory.phones):
        buf = render_phone(spec, PARAMS, seed)
        assert lo <= len(buf) <= hi


def test_phone_render_deterministic(inventory):
    spec = inventory.tones[0]
    assert render_phone(spec, PARAMS, 99) == render_phone(spec, PARAMS, 99)


def test_phone_peak_within_volume_range(inventory):
    for seed in range(10):
        buf = render_phone(inventory.noises[0], PARAMS, seed)
        peak = np.abs(buf.to_float()).max()
        assert peak <= 0.9 + 1e-3


# --- lexicon and sentences ------------------------------------------------------

def test_single_word_lexicon(inventory):
    lex = build_lexicon(inventory, 1, (3, 3), seed=0)
    assert len(lex) == 1
    (phones,) = lex.words.values()
    assert len(phones) == 3


def test_lexicon_lengths_within_range(inventory):
    lex = build_lexicon(inventory, 2000, (2, 8), seed=1)
    lengths = [len(p) for p in lex.words.values()]
    assert min(lengths) >= 2 and max(lengths) <= 8
    assert all(0 <= pid < 44 for phones in lex.words.values() for pid in phones)


def test_lexicon_deterministic(inventory):
    assert build_lexicon(inventory, 50, (2, 4), 9) == build_lexicon(inventory, 50, (2, 4), 9)


def test_lexicon_json_round_trip(lexicon):
    assert lexicon_from_json(lexicon_to_json(lexicon)) == lexicon


def test_lexicon_rejects_empty_words():
    with pytest.raises(ValueError):
        Lexicon({"w0": ()})


def test_sentence_single_word(lexicon):
    assert len(sample_sentence(lexicon, (1, 1), seed=4)) == 1


def test_sentence_deterministic(lexicon):
    assert sample_sentence(lexicon, (5, 15), 3) == sample_sentence(lexicon, (5, 15), 3)


def test_sentence_lengths_within_range(lexicon):
    for seed in range(200):
        n = len(sample_sentence(lexicon, (5, 15), seed))
        assert 5 <= n <= 15


# --- utterance rendering --------------------------------------------------------

def test_single_phone_utterance(inventory):
    lex = Lexicon({"w0": (7,)})
    buf = render_utterance(["w0"], lex, inventory, PARAMS, seed=12)
    assert int(round(0.060 * RATE)) <= len(buf) <= int(round(0.120 * RATE))


def test_utterance_duration_bounded_by_phone_count(inventory, lexicon):
    sentence = sample_sentence(lexicon, (5, 10), seed=21)
    k = sum(len(lexicon.words[w]) for w in sentence)
    buf = render_utterance(sentence, lexicon, inventory, PARAMS, seed=22)
    assert k * 0.060 * RATE - k <= len(buf) <= k * 0.120 * RATE + k


def test_utterance_byte_identical_across_runs(inventory, lexicon):
    sentence = sample_sentence(lexicon, (5, 10), seed=31)
    a = render_utterance(sentence, lexicon, inventory, PARAMS, seed=32)
    b = render_utterance(sentence, lexicon, inventory, PARAMS, seed=32)
    assert a == b


def test_unknown_word_id(inventory, lexicon):
    with pytest.raises(UnknownWordIdError):
        render_utterance(["nope"], lexicon, inventory, PARAMS, seed=1)


def test_unknown_phone_id(inventory):
    lex = Lexicon({"w0": (44,)})
    with pytest.raises(UnknownPhoneIdError):
        render_utterance(["w0"], lex, inventory, PARAMS, seed=1)


# --- word-noise control ---------------------------------------------------------

def test_word_noise_unit_durations(inventory):
    lo = int(round(0.270 * RATE))
    hi = int(round(0.330 * RATE))
    units = word_noise_units(PARAMS, inventory, total_samples=RATE * 60, seed=8)
    for unit in units[:-1]:
        assert lo <= unit.n_samples <= hi
    assert lo <= units[-1].n_samples <= hi  # drawn length; rendering truncates


def test_word_noise_exact_length(inventory):
    for total in (1, 100, RATE, RATE * 3 + 17):
        buf = word_noise_sequence(PARAMS, inventory, total, seed=5)
        assert len(buf) == total


def test_word_noise_deterministic(inventory):
    a = word_noise_sequence(PARAMS, inventory, RATE, seed=61)
    b = word_noise_sequence(PARAMS, inventory, RATE, seed=61)
    assert a == b


def test_word_noise_rejects_zero_length(inventory):
    with pytest.raises(ValueError):
        word_noise_sequence(PARAMS, inventory, 0, seed=1)


# --- white noise -----------------------------------------------------------------

def test_white_noise_zero_length():
    assert len(white_noise(0, seed=1)) == 0


def test_white_noise_exact_length_and_determinism():
    a = white_noise(12345, seed=2)
    b = white_noise(12345, seed=2)
    assert len(a) == 12345
    assert a == b


def test_white_noise_mean_near_zero():
    n = 1_000_000
    buf = white_noise(n, seed=3, volume=0.5)
    sigma = 0.5 / 5.0
    assert abs(buf.to_float().mean()) < 4 * sigma / np.sqrt(n)


def test_white_noise_rarely_exceeds_volume():
    # sigma = volume/5 puts P(|x| > volume) ~ 5.7e-7 per sample.
    n = 1_000_000
    buf = white_noise(n, seed=4, volume=0.5)
    exceed = int((np.abs(buf.to_float()) > 0.5).sum())
    assert exceed <= 10


# --- uniformity statistics -------------------------------------------------------

def test_word_length_histogram_uniform(inventory):
    lex = build_lexicon(inventory, 100_000, (2, 8), seed=1234)
    counts = collections.Counter(len(p) for p in lex.words.values())
    assert sorted(counts) == list(range(2, 9))
    assert chi_square_uniform_pvalue([counts[k] for k in range(2, 9)]) > 0.01


def test_sentence_length_histogram_uniform(lexicon):
    lengths = [len(sample_sentence(lexicon, (5, 15), seed)) for seed in range(10_000)]
    counts = collections.Counter(lengths)
    assert sorted(counts) == list(range(5, 16))
    assert chi_square_uniform_pvalue([counts[k] for k in range(5, 16)]) > 0.01


def test_word_noise_sources_uniform(inventory):
    # Enough audio to cover >= 10_000 units at ~300 ms each.
    total = int(10_500 * 0.3 * RATE)
    units = word_noise_units(PARAMS, inventory, total, seed=555)
    assert len(units) >= 10_000
    counts = collections.Counter(u.phone_id for u in units)
    assert len(counts) == 44
    assert chi_square_uniform_pvalue([counts[k] for k in range(44)]) > 0.01


def test_tone_frequency_spread_uniform():
    # Pool tones from many inventories; per-inventory dedup barely
    # perturbs uniformity at 0.1 Hz resolution.
    freqs = []
    for seed in range(600):
        freqs.extend(p.source.freq_hz for p in build_inventory(seed).tones)
    counts, _ = np.histogram(freqs, bins=14, range=(200.0, 900.0))
    assert chi_square_uniform_pvalue(counts) > 0.01


# --- render params ----------------------------------------------------------------

def test_render_params_validation():
    with pytest.raises(ValueError):
        RenderParams(phone_base_ms=20.0, phone_jitter_ms=30.0)
    with pytest.raises(ValueError):
        RenderParams(volume_range=(0.0, 0.9))
    with pytest.raises(ValueError):
        RenderParams(volume_range=(0.5, 1.2))
