"""Spectral checks: noise color slopes and tone purity.

Measured with Welch periodograms and direct FFTs (see oracles.py), which
are independent of the rFFT shaping the generators use.
"""

import numpy as np
import pytest

from speechfactors.rng import make_rng
from speechfactors.synthlang import (
    NOMINAL_SLOPE_DB_PER_OCT,
    NoiseColor,
    Tone,
    build_inventory,
    render_source,
    white_noise,
)

from oracles import (
    energy_fraction_near,
    fft_bin_width_hz,
    fft_peak_hz,
    psd_slope_db_per_octave,
)

RATE = 16000
TEN_SECONDS = RATE * 10


@pytest.mark.parametrize("color", list(NoiseColor), ids=[c.value for c in NoiseColor])
def test_noise_color_psd_slope(color):
    x = render_source(color, TEN_SECONDS, 0.8, RATE, make_rng(1000 + list(NoiseColor).index(color)))
    slope = psd_slope_db_per_octave(x, RATE)
    assert abs(slope - NOMINAL_SLOPE_DB_PER_OCT[color]) < 0.5


def test_white_noise_buffer_psd_flat():
    buf = white_noise(TEN_SECONDS, seed=7, volume=0.5)
    assert abs(psd_slope_db_per_octave(buf.to_float(), RATE)) < 0.5


@pytest.mark.parametrize("freq", [200.0, 440.0, 440.3, 657.1, 900.0])
def test_tone_peak_within_one_fft_bin(freq):
    # Long-form render overriding the usual phone duration.
    x = render_source(Tone(freq), RATE * 4, 0.8, RATE, make_rng(1))
    assert abs(fft_peak_hz(x, RATE) - freq) <= fft_bin_width_hz(x, RATE)


def test_inventory_tones_peak_at_spec_frequency():
    inventory = build_inventory(31337)
    for spec in inventory.tones[:8]:
        x = render_source(spec.source, RATE * 4, 0.8, RATE, make_rng(2))
        assert abs(fft_peak_hz(x, RATE) - spec.source.freq_hz) <= fft_bin_width_hz(x, RATE)


def test_tone_energy_concentrated_within_10_hz():
    for freq in (212.4, 555.5, 893.0):
        x = render_source(Tone(freq), RATE * 4, 0.8, RATE, make_rng(3))
        assert energy_fraction_near(x, RATE, freq, half_width_hz=10.0) >= 0.99


def test_tone_ramps_bound_the_edges():
    x = render_source(Tone(500.0), RATE, 0.8, RATE, make_rng(4))
    ramp = int(round(0.005 * RATE))
    assert abs(x[0]) < 1e-9  # starts from zero
    assert np.all(np.abs(x[:ramp]) <= 0.8)
    assert np.all(np.abs(x[-ramp:]) <= 0.8)
