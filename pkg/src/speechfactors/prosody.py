"""Chunk plans for isolated synthesis of N-word groups, and reassembly.

Splitting a transcript into fixed-size word groups caps how much
utterance-level rhythm an external synthesizer can model; the span is
the control knob (unbounded span = one chunk = full prosody). Returned
chunk audio is reassembled by plain concatenation, with an optional
configurable silence gap between chunks (default none).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .waveio import AudioBuffer, concat, silence


class ProsodyError(Exception):
    pass


class EmptyTranscriptError(ProsodyError):
    pass


class ChunkCountMismatchError(ProsodyError):
    pass


@dataclass(frozen=True)
class ChunkPlan:
    """Ordered word groups whose concatenation is the original transcript.

    ``span`` is the words-per-chunk bound, or None for a single unbounded
    chunk. Plans read back from a job file may carry span None with
    multiple chunks; the size rule is only enforced when span is set.
    """

    utterance_id: str
    span: int | None
    chunks: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        if not self.chunks or any(not chunk for chunk in self.chunks):
            raise ValueError("chunks must be non-empty")
        if self.span is not None:
            if self.span < 1:
                raise ValueError(f"span must be positive, got {self.span}")
            for chunk in self.chunks[:-1]:
                if len(chunk) != self.span:
                    raise ValueError("every chunk but the last must have exactly span words")
            if len(self.chunks[-1]) > self.span:
                raise ValueError("last chunk exceeds span")

    @property
    def words(self) -> list[str]:
        return [w for chunk in self.chunks for w in chunk]


def chunk_words(words: list[str], span: int | None, utterance_id: str = "") -> ChunkPlan:
    """Greedy left-to-right grouping into spans; None means one full chunk."""
    if not words:
        raise EmptyTranscriptError(f"empty transcript for {utterance_id!r}")
    if span is None:
        chunks = (tuple(words),)
    else:
        if span < 1:
            raise ValueError(f"span must be positive, got {span}")
        chunks = tuple(tuple(words[i : i + span]) for i in range(0, len(words), span))
    return ChunkPlan(utterance_id=utterance_id, span=span, chunks=chunks)


def assemble(plan: ChunkPlan, chunk_audio: list[AudioBuffer], gap_ms: float = 0.0) -> AudioBuffer:
    """Concatenate chunk audio in order, inserting gap_ms of silence between."""
    if len(chunk_audio) != len(plan.chunks):
        raise ChunkCountMismatchError(
            f"{plan.utterance_id}: plan has {len(plan.chunks)} chunks, got {len(chunk_audio)} buffers"
        )
    rate = chunk_audio[0].sample_rate_hz
    gap_samples = int(round(gap_ms / 1000.0 * rate))
    pieces = []
    for i, buf in enumerate(chunk_audio):
        if i > 0 and gap_samples > 0:
            pieces.append(silence(gap_samples, rate))
        pieces.append(buf)
    return concat(pieces)


# ---------------------------------------------------------------------------
# Job-file interchange with the external synthesizer

def chunk_jobs_to_tsv(plans: list[ChunkPlan]) -> str:
    """Job list rows: utterance_id, chunk_index, chunk text."""
    rows = []
    for plan in plans:
        for k, chunk in enumerate(plan.chunks):
            rows.append(f"{plan.utterance_id}\t{k}\t{' '.join(chunk)}")
    return "\n".join(rows) + "\n" if rows else ""


def read_chunk_jobs(text: str) -> list[ChunkPlan]:
    """Parse a job file back into plans (span is not recorded in the file)."""
    by_utterance: dict[str, dict[int, tuple[str, ...]]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ValueError(f"line {lineno}: expected 3 tab-separated fields")
        utterance_id, index_raw, chunk_text = parts
        chunk = tuple(chunk_text.split())
        if not chunk:
            raise ValueError(f"line {lineno}: empty chunk text")
        by_utterance.setdefault(utterance_id, {})[int(index_raw)] = chunk
    plans = []
    for utterance_id, chunks in by_utterance.items():
        if sorted(chunks) != list(range(len(chunks))):
            raise ValueError(f"{utterance_id}: chunk indices are not 0..{len(chunks) - 1}")
        ordered = tuple(chunks[k] for k in range(len(chunks)))
        plans.append(ChunkPlan(utterance_id=utterance_id, span=None, chunks=ordered))
    return plans


def chunk_wav_name(utterance_id: str, chunk_index: int) -> str:
    return f"{utterance_id}.{chunk_index}.wav"


def load_chunk_audio(plan: ChunkPlan, chunk_dir) -> list[AudioBuffer]:
    """Read the per-chunk WAVs an external synthesizer produced for a plan."""
    from .waveio import read_wav

    base = Path(chunk_dir)
    return [read_wav(base / chunk_wav_name(plan.utterance_id, k)) for k in range(len(plan.chunks))]
