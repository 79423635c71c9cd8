from pathlib import Path

import pytest

from speechfactors.alignment import load_alignment

from helpers import DATA_DIR, make_fixture_corpus


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture
def hi_alignment():
    return load_alignment(DATA_DIR / "golden_hi.TextGrid")


@pytest.fixture
def consent_alignment():
    return load_alignment(DATA_DIR / "golden_consent.TextGrid")


@pytest.fixture
def story_alignment():
    return load_alignment(DATA_DIR / "golden_story.TextGrid")


@pytest.fixture
def fixture_corpus(tmp_path):
    return make_fixture_corpus(tmp_path)
