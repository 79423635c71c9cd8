"""Shared fixture builders for the test suite."""

import hashlib
import shutil
from pathlib import Path

import numpy as np

from speechfactors.alignment import load_alignment
from speechfactors.perturb import round_half_up
from speechfactors.waveio import AudioBuffer, write_wav

DATA_DIR = Path(__file__).parent / "data"

GOLDEN_IDS = ("golden_consent", "golden_hi", "golden_story")


def random_audio(n_samples, sample_rate_hz=16000, seed=0) -> AudioBuffer:
    rng = np.random.default_rng(seed)
    return AudioBuffer(
        rng.integers(-20000, 20000, size=n_samples).astype(np.int16), sample_rate_hz
    )


def make_fixture_corpus(base: Path, rate=16000) -> tuple[Path, Path, list[str]]:
    """Lay out audio/ and alignments/ dirs for the golden utterances.

    Audio is random PCM of exactly the aligned duration, so validation
    passes and every perturbation is exercised end to end.
    """
    audio_dir = base / "audio"
    align_dir = base / "alignments"
    audio_dir.mkdir(parents=True, exist_ok=True)
    align_dir.mkdir(parents=True, exist_ok=True)
    for i, utt_id in enumerate(GOLDEN_IDS):
        shutil.copy(DATA_DIR / f"{utt_id}.TextGrid", align_dir / f"{utt_id}.TextGrid")
        alignment = load_alignment(DATA_DIR / f"{utt_id}.TextGrid")
        n = round_half_up(alignment.duration_s * rate)
        write_wav(random_audio(n, rate, seed=1000 + i), audio_dir / f"{utt_id}.wav")
    return audio_dir, align_dir, list(GOLDEN_IDS)


def tree_hash(root: Path) -> str:
    """Hash of every file's relative path and bytes, order-independent."""
    digest = hashlib.sha256()
    for path in sorted(p for p in Path(root).rglob("*") if p.is_file()):
        digest.update(path.relative_to(root).as_posix().encode())
        digest.update(b"\x00")
        digest.update(path.read_bytes())
        digest.update(b"\x01")
    return digest.hexdigest()
