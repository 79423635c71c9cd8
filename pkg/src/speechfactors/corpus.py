"""Corpus-level assembly: speaker splits, duration budgets, stats, manifests.

The manifest is the de facto pre-training index format: first line is
the corpus root, then one ``relative_path<TAB>num_samples`` row per
utterance, so generated corpora drop straight into existing trainers.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .rng import fisher_yates, make_rng
from .waveio import read_wav


class CorpusError(Exception):
    pass


class InvalidSpeakerCountError(CorpusError):
    pass


class SampleCountMismatchError(CorpusError):
    """Manifest rows disagree with the WAV files on disk."""

    def __init__(self, mismatches: list[tuple[str, int, int]]):
        lines = ", ".join(f"{p}: manifest {m} vs file {a}" for p, m, a in mismatches)
        super().__init__(f"sample count mismatches: {lines}")
        self.mismatches = mismatches


@dataclass(frozen=True)
class ManifestEntry:
    relative_path: str
    num_samples: int

    def __post_init__(self):
        if self.num_samples <= 0:
            raise ValueError(f"{self.relative_path}: num_samples must be positive")


@dataclass(frozen=True)
class CorpusManifest:
    root: str
    entries: tuple[ManifestEntry, ...]

    def __post_init__(self):
        paths = [e.relative_path for e in self.entries]
        if len(set(paths)) != len(paths):
            raise ValueError("manifest relative paths must be unique")

    def total_samples(self) -> int:
        return sum(e.num_samples for e in self.entries)

    def total_hours(self, sample_rate_hz: int) -> float:
        return self.total_samples() / sample_rate_hz / 3600.0


@dataclass(frozen=True)
class SpeakerAssignment:
    n_speakers: int
    by_utterance: dict[str, int]

    def counts(self) -> list[int]:
        out = [0] * self.n_speakers
        for speaker in self.by_utterance.values():
            out[speaker] += 1
        return out


@dataclass(frozen=True)
class BudgetSelection:
    selected_ids: tuple[str, ...]
    achieved_hours: float
    shortfall: bool


@dataclass(frozen=True)
class LexiconStats:
    token_count: int
    type_count: int


def speaker_split(
    utterance_ids: list[str],
    n_speakers: int,
    seed: int,
    max_speakers: int | None = None,
) -> SpeakerAssignment:
    """Deal utterances to speakers so per-speaker counts differ by at most 1.

    Utterances are shuffled by the seed, then assigned round-robin.
    ``max_speakers`` caps the speaker count at what the downstream
    synthesizer offers (109 for the VCTK voices).
    """
    if n_speakers < 1:
        raise InvalidSpeakerCountError(f"n_speakers must be at least 1, got {n_speakers}")
    if max_speakers is not None and n_speakers > max_speakers:
        raise InvalidSpeakerCountError(
            f"n_speakers {n_speakers} exceeds the {max_speakers} available speakers"
        )
    if len(set(utterance_ids)) != len(utterance_ids):
        raise ValueError("utterance ids must be unique")
    shuffled = fisher_yates(list(utterance_ids), make_rng(seed))
    return SpeakerAssignment(
        n_speakers=n_speakers,
        by_utterance={utt: i % n_speakers for i, utt in enumerate(shuffled)},
    )


def duration_budget(
    entries: list[tuple[str, int]],
    target_hours: float,
    sample_rate_hz: int,
) -> BudgetSelection:
    """Greedily select utterances in the given order until the target is met.

    If the pool runs out first, everything is selected and the shortfall
    flag is set.
    """
    if target_hours <= 0:
        raise ValueError(f"target_hours must be positive, got {target_hours}")
    target_samples = target_hours * 3600.0 * sample_rate_hz
    selected = []
    covered = 0
    for utt_id, num_samples in entries:
        if covered >= target_samples:
            break
        selected.append(utt_id)
        covered += num_samples
    achieved = covered / sample_rate_hz / 3600.0
    return BudgetSelection(
        selected_ids=tuple(selected),
        achieved_hours=achieved,
        shortfall=covered < target_samples,
    )


def lexicon_stats(transcripts: list[str]) -> LexiconStats:
    """Whitespace token count and distinct lowercased type count."""
    tokens = 0
    types = set()
    for text in transcripts:
        for token in text.split():
            tokens += 1
            types.add(token.lower())
    return LexiconStats(token_count=tokens, type_count=len(types))


# ---------------------------------------------------------------------------
# Manifest I/O

def write_manifest(manifest: CorpusManifest, path) -> None:
    lines = [manifest.root]
    lines.extend(f"{e.relative_path}\t{e.num_samples}" for e in manifest.entries)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_manifest(path) -> CorpusManifest:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or not lines[0].strip():
        raise ValueError(f"{path}: manifest must start with a root line")
    entries = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ValueError(f"{path}:{lineno}: expected relative_path<TAB>num_samples")
        entries.append(ManifestEntry(parts[0], int(parts[1])))
    return CorpusManifest(root=lines[0].strip(), entries=tuple(entries))


def resolve_root(manifest: CorpusManifest, manifest_path) -> Path:
    """Resolve the manifest root, relative to the manifest file if needed."""
    root = Path(manifest.root)
    if root.is_absolute():
        return root
    return Path(manifest_path).parent / root


def verify_manifest(manifest: CorpusManifest, root_dir) -> None:
    """Check every entry against the WAV on disk; raise listing all mismatches."""
    root = Path(root_dir)
    mismatches = []
    for entry in manifest.entries:
        actual = len(read_wav(root / entry.relative_path))
        if actual != entry.num_samples:
            mismatches.append((entry.relative_path, entry.num_samples, actual))
    if mismatches:
        raise SampleCountMismatchError(mismatches)


def scan_corpus(root_dir, root_label: str = ".") -> CorpusManifest:
    """Build a manifest by reading every .wav under a directory (sorted)."""
    root = Path(root_dir)
    entries = []
    for wav_path in sorted(root.rglob("*.wav")):
        rel = wav_path.relative_to(root).as_posix()
        entries.append(ManifestEntry(rel, len(read_wav(wav_path))))
    return CorpusManifest(root=root_label, entries=tuple(entries))
