import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from speechfactors.corpus import (
    CorpusManifest,
    InvalidSpeakerCountError,
    ManifestEntry,
    SampleCountMismatchError,
    duration_budget,
    lexicon_stats,
    read_manifest,
    resolve_root,
    scan_corpus,
    speaker_split,
    verify_manifest,
    write_manifest,
)
from speechfactors.waveio import write_wav

from helpers import random_audio

IDS_1000 = [f"utt{i:04d}" for i in range(1000)]


# --- speaker_split -----------------------------------------------------------

def test_one_speaker_takes_everything():
    assignment = speaker_split(IDS_1000[:10], 1, seed=0)
    assert set(assignment.by_utterance.values()) == {0}


def test_ten_over_three_balances_4_3_3():
    assignment = speaker_split(IDS_1000[:10], 3, seed=1)
    assert sorted(assignment.counts(), reverse=True) == [4, 3, 3]


def test_vctk_scale_balance():
    assignment = speaker_split(IDS_1000, 109, seed=2)
    counts = assignment.counts()
    assert max(counts) - min(counts) <= 1
    assert sum(counts) == 1000


def test_split_deterministic_but_seed_dependent():
    a = speaker_split(IDS_1000[:40], 7, seed=5)
    b = speaker_split(IDS_1000[:40], 7, seed=5)
    c = speaker_split(IDS_1000[:40], 7, seed=6)
    assert a == b
    assert a != c


def test_invalid_speaker_counts():
    with pytest.raises(InvalidSpeakerCountError):
        speaker_split(IDS_1000[:5], 0, seed=0)
    with pytest.raises(InvalidSpeakerCountError):
        speaker_split(IDS_1000[:5], 110, seed=0, max_speakers=109)
    speaker_split(IDS_1000[:5], 109, seed=0, max_speakers=109)  # at the cap is fine


def test_duplicate_ids_rejected():
    with pytest.raises(ValueError):
        speaker_split(["a", "a"], 1, seed=0)


@given(
    n_utts=st.integers(0, 400),
    n_speakers=st.integers(1, 120),
    seed=st.integers(0, 2**64 - 1),
)
@settings(max_examples=150, deadline=None)
def test_balance_holds_for_all_inputs(n_utts, n_speakers, seed):
    assignment = speaker_split([f"u{i}" for i in range(n_utts)], n_speakers, seed)
    counts = assignment.counts()
    assert max(counts) - min(counts) <= 1


# --- duration_budget ----------------------------------------------------------

HOUR_SAMPLES = 16000 * 3600


def test_budget_exact_pool():
    entries = [(f"u{i}", HOUR_SAMPLES // 4) for i in range(4)]
    result = duration_budget(entries, 1.0, 16000)
    assert result.selected_ids == ("u0", "u1", "u2", "u3")
    assert not result.shortfall
    assert result.achieved_hours == pytest.approx(1.0)


def test_budget_shortfall():
    entries = [(f"u{i}", HOUR_SAMPLES // 4) for i in range(4)]
    result = duration_budget(entries, 960.0, 16000)
    assert result.selected_ids == ("u0", "u1", "u2", "u3")
    assert result.shortfall


def test_budget_stops_within_one_utterance():
    entries = [(f"u{i}", 16000 * 60) for i in range(100)]  # 1 minute each
    result = duration_budget(entries, 0.5, 16000)
    selected_samples = 16000 * 60 * len(result.selected_ids)
    assert selected_samples >= 0.5 * HOUR_SAMPLES
    assert selected_samples - 16000 * 60 < 0.5 * HOUR_SAMPLES
    assert result.achieved_hours == pytest.approx(selected_samples / HOUR_SAMPLES)


def test_budget_rejects_nonpositive_target():
    with pytest.raises(ValueError):
        duration_budget([("u", 1)], 0.0, 16000)


@given(
    sizes=st.lists(st.integers(1, 10_000_000), min_size=0, max_size=30),
    target_a=st.floats(0.001, 2.0),
    target_b=st.floats(0.001, 2.0),
)
@settings(max_examples=150, deadline=None)
def test_budget_monotonic(sizes, target_a, target_b):
    entries = [(f"u{i}", n) for i, n in enumerate(sizes)]
    lo, hi = sorted([target_a, target_b])
    assert len(duration_budget(entries, lo, 16000).selected_ids) <= len(
        duration_budget(entries, hi, 16000).selected_ids
    )


# --- lexicon_stats --------------------------------------------------------------

def test_stats_basic():
    stats = lexicon_stats(["a b a"])
    assert stats.token_count == 3
    assert stats.type_count == 2


def test_stats_empty():
    stats = lexicon_stats([])
    assert stats.token_count == 0
    assert stats.type_count == 0


def test_stats_lowercases_types():
    stats = lexicon_stats(["The the THE", "cat"])
    assert stats.token_count == 4
    assert stats.type_count == 2


def test_stats_match_one_line_oracle():
    corpus = [
        "a small bird sang sweetly",
        "over the quiet river bed",
        "the bird sang again",
        "",
    ]
    stats = lexicon_stats(corpus)
    assert stats.token_count == sum(len(line.split()) for line in corpus)
    assert stats.type_count == len({w.lower() for line in corpus for w in line.split()})


# --- manifests -------------------------------------------------------------------

def test_empty_manifest_is_root_line_only(tmp_path):
    path = tmp_path / "m.tsv"
    write_manifest(CorpusManifest(root=".", entries=()), path)
    assert path.read_text() == ".\n"


def test_manifest_round_trip(tmp_path):
    manifest = CorpusManifest(
        root="corpus",
        entries=(ManifestEntry("a.wav", 123), ManifestEntry("sub/b.wav", 456)),
    )
    path = tmp_path / "m.tsv"
    write_manifest(manifest, path)
    assert read_manifest(path) == manifest


def test_manifest_requires_unique_paths():
    with pytest.raises(ValueError):
        CorpusManifest(root=".", entries=(ManifestEntry("a.wav", 1), ManifestEntry("a.wav", 2)))


def test_manifest_rejects_zero_samples():
    with pytest.raises(ValueError):
        ManifestEntry("a.wav", 0)


def test_scan_and_verify(tmp_path):
    corpus_dir = tmp_path / "corpus"
    corpus_dir.mkdir()
    write_wav(random_audio(300, seed=1), corpus_dir / "a.wav")
    write_wav(random_audio(200, seed=2), corpus_dir / "b.wav")
    manifest = scan_corpus(corpus_dir)
    assert [(e.relative_path, e.num_samples) for e in manifest.entries] == [
        ("a.wav", 300),
        ("b.wav", 200),
    ]
    verify_manifest(manifest, corpus_dir)  # clean


def test_verify_reports_mismatch(tmp_path):
    corpus_dir = tmp_path / "corpus"
    corpus_dir.mkdir()
    write_wav(random_audio(300, seed=1), corpus_dir / "a.wav")
    bad = CorpusManifest(root=".", entries=(ManifestEntry("a.wav", 299),))
    with pytest.raises(SampleCountMismatchError) as exc:
        verify_manifest(bad, corpus_dir)
    assert exc.value.mismatches == [("a.wav", 299, 300)]


@pytest.mark.parametrize(
    "text",
    [
        "",  # no root line
        ".\na.wav\n",  # missing sample count
        ".\na.wav\tmany\n",  # non-integer count
        ".\na.wav\t100\textra\n",  # too many fields
    ],
)
def test_read_manifest_malformed(tmp_path, text):
    path = tmp_path / "m.tsv"
    path.write_text(text)
    with pytest.raises(ValueError):
        read_manifest(path)


def test_resolve_root_relative_to_manifest(tmp_path):
    manifest = CorpusManifest(root=".", entries=())
    path = tmp_path / "out" / "manifest.tsv"
    assert resolve_root(manifest, path) == tmp_path / "out" / "."


def test_manifest_totals():
    manifest = CorpusManifest(
        root=".", entries=(ManifestEntry("a.wav", 16000), ManifestEntry("b.wav", 16000))
    )
    assert manifest.total_samples() == 32000
    assert manifest.total_hours(16000) == pytest.approx(2 / 3600)
