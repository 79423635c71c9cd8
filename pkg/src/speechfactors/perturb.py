"""Segment plans and seeded perturbations over aligned audio.

A plan is an exact tiling of an utterance's samples into labeled and gap
segments plus a permutation saying how to reassemble them. Linguistic
units (words or phones) move; silences stay put, so only one dimension
of the data changes while total duration and pause structure survive.
Rendering is raw cut-and-concatenate: no fades, windowing, or gain
changes at the joins.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .alignment import UtteranceAlignment
from .rng import fisher_yates, make_rng
from .waveio import AudioBuffer

LABELED = "labeled"
GAP = "gap"

WORD = "word"
PHONE = "phone"


class PerturbError(Exception):
    pass


class EmptyTierError(PerturbError):
    """The chosen tier has no non-empty intervals to segment."""


class LengthMismatchError(PerturbError):
    """Audio length does not match the plan's sample range."""


def round_half_up(x: float) -> int:
    return math.floor(x + 0.5)


@dataclass(frozen=True)
class Segment:
    start_sample: int
    end_sample: int
    kind: str  # LABELED or GAP
    label: str

    def __post_init__(self):
        if not 0 <= self.start_sample < self.end_sample:
            raise ValueError(f"bad segment range [{self.start_sample}, {self.end_sample})")
        if self.kind not in (LABELED, GAP):
            raise ValueError(f"bad segment kind {self.kind!r}")

    @property
    def length(self) -> int:
        return self.end_sample - self.start_sample


@dataclass(frozen=True)
class SegmentPlan:
    """Tiling of [0, total_samples) plus a render permutation.

    ``order[k]`` is the index of the segment rendered at output position
    k. Gap segments are always fixed points of the permutation. When a
    random-start segmentation wraps past the end of the utterance, the
    two physical edge pieces form one logical segment; ``wrap_pair``
    holds their indices as (tail, head) and every permutation keeps them
    adjacent in that render order.
    """

    utterance_id: str
    total_samples: int
    segments: tuple[Segment, ...]
    order: tuple[int, ...]
    wrap_pair: tuple[int, int] | None = None

    def __post_init__(self):
        cursor = 0
        for i, seg in enumerate(self.segments):
            if seg.start_sample != cursor:
                raise ValueError(f"segment {i} starts at {seg.start_sample}, expected {cursor}")
            cursor = seg.end_sample
        if cursor != self.total_samples:
            raise ValueError(f"segments cover {cursor} of {self.total_samples} samples")
        if sorted(self.order) != list(range(len(self.segments))):
            raise ValueError("order is not a permutation of the segment indices")
        for pos, idx in enumerate(self.order):
            if self.segments[idx].kind == GAP and idx != pos:
                raise ValueError(f"gap segment {idx} moved by the permutation")
        if self.wrap_pair is not None:
            tail, head = self.wrap_pair
            positions = {idx: pos for pos, idx in enumerate(self.order)}
            if positions[head] != positions[tail] + 1:
                raise ValueError("wrap pair split by the permutation")

    @property
    def is_identity(self) -> bool:
        return self.order == tuple(range(len(self.segments)))

    def segment_lengths(self) -> list[int]:
        """Physical segment lengths, in tiling order."""
        return [seg.length for seg in self.segments]

    def logical_lengths(self) -> list[int]:
        """Segment lengths with a wrap pair merged into one logical segment."""
        lengths = self.segment_lengths()
        if self.wrap_pair is not None:
            tail, head = self.wrap_pair
            merged = lengths[tail] + lengths[head]
            lengths = [n for i, n in enumerate(lengths) if i not in (tail, head)]
            lengths.append(merged)
        return lengths

    def logical_segment_count(self) -> int:
        return len(self.segments) - (1 if self.wrap_pair is not None else 0)


def partition(
    alignment: UtteranceAlignment,
    unit: str,
    sample_rate_hz: int,
    total_samples: int | None = None,
) -> SegmentPlan:
    """Tile an utterance into one labeled segment per word or phone.

    Interval seconds convert to samples by round-half-up; a boundary
    shared by two units belongs to the later one. Samples outside every
    labeled interval (leading/trailing silence, inter-unit pauses)
    become gap segments. The returned order is the identity.

    ``total_samples`` defaults to the rounded alignment duration; pass
    the actual audio length when it is known.
    """
    if unit not in (WORD, PHONE):
        raise ValueError(f"unit must be {WORD!r} or {PHONE!r}, got {unit!r}")
    intervals = alignment.tier("words" if unit == WORD else "phones")
    if total_samples is None:
        total_samples = round_half_up(alignment.duration_s * sample_rate_hz)

    labeled: list[tuple[str, int, int]] = []
    prev_end = 0
    for iv in intervals:
        if not iv.label:
            continue
        start = max(round_half_up(iv.start_s * sample_rate_hz), prev_end)
        end = min(round_half_up(iv.end_s * sample_rate_hz), total_samples)
        if end <= start:
            continue  # interval too short to own a sample after rounding
        labeled.append((iv.label, start, end))
        prev_end = end
    if not labeled:
        raise EmptyTierError(f"no non-empty {unit} intervals in {alignment.utterance_id}")

    segments: list[Segment] = []
    cursor = 0
    for label, start, end in labeled:
        if start > cursor:
            segments.append(Segment(cursor, start, GAP, ""))
        segments.append(Segment(start, end, LABELED, label))
        cursor = end
    if cursor < total_samples:
        segments.append(Segment(cursor, total_samples, GAP, ""))

    return SegmentPlan(
        utterance_id=alignment.utterance_id,
        total_samples=total_samples,
        segments=tuple(segments),
        order=tuple(range(len(segments))),
    )


def _logical_units(plan: SegmentPlan) -> list[list[int]]:
    """Movable units as index groups, in canonical pre-shuffle order."""
    if plan.wrap_pair is not None:
        tail, head = plan.wrap_pair
        units = [[i] for i in range(len(plan.segments)) if i not in (tail, head)]
        units.append([tail, head])
        return units
    return [[i] for i, seg in enumerate(plan.segments) if seg.kind == LABELED]


def _shuffled_order(plan: SegmentPlan, rng: np.random.Generator) -> tuple[int, ...]:
    units = fisher_yates(_logical_units(plan), rng)
    flat = [idx for unit in units for idx in unit]
    slots = [i for i, seg in enumerate(plan.segments) if seg.kind != GAP]
    order = list(range(len(plan.segments)))
    for slot, idx in zip(slots, flat):
        order[slot] = idx
    return tuple(order)


def shuffle(plan: SegmentPlan, seed: int) -> SegmentPlan:
    """Uniformly permute the labeled segments; gaps keep their positions.

    Fisher-Yates over the labeled positions, driven by the pinned
    generator. The segment list itself is unchanged.
    """
    rng = make_rng(seed)
    return replace(plan, order=_shuffled_order(plan, rng))


def random_span(plan: SegmentPlan, seed: int) -> SegmentPlan:
    """Random-start segmentation baseline: same segment count and durations.

    Treats the utterance as circular, shifts every boundary by one
    uniformly drawn offset, and erases the labels. The piece wrapping
    past the end is kept as two physical rows linked as one logical
    segment. The new segmentation is then shuffled with the same seed
    stream that drew the offset.
    """
    if not plan.is_identity:
        raise ValueError("random_span expects a freshly partitioned plan (identity order)")
    if not plan.segments:
        return plan

    rng = make_rng(seed)
    total = plan.total_samples
    offset = int(rng.integers(0, total))
    starts = sorted((seg.start_sample + offset) % total for seg in plan.segments)

    wrap_pair = None
    if starts[0] == 0:
        bounds = starts + [total]
    else:
        bounds = [0] + starts + [total]
        wrap_pair = (len(bounds) - 2, 0)  # tail = last piece, head = first piece
    segments = tuple(
        Segment(bounds[i], bounds[i + 1], LABELED, "") for i in range(len(bounds) - 1)
    )

    base = SegmentPlan(
        utterance_id=plan.utterance_id,
        total_samples=total,
        segments=segments,
        order=_wrap_identity_order(len(segments), wrap_pair),
        wrap_pair=wrap_pair,
    )
    return replace(base, order=_shuffled_order(base, rng))


def _wrap_identity_order(n: int, wrap_pair: tuple[int, int] | None) -> tuple[int, ...]:
    # A valid initial order for a wrapped tiling keeps tail before head.
    if wrap_pair is None:
        return tuple(range(n))
    tail, head = wrap_pair
    rest = [i for i in range(n) if i not in (tail, head)]
    return tuple(rest + [tail, head])


def render(plan: SegmentPlan, audio: AudioBuffer) -> AudioBuffer:
    """Concatenate the segment slices in permutation order, byte-exact."""
    if len(audio) != plan.total_samples:
        raise LengthMismatchError(
            f"{plan.utterance_id}: audio has {len(audio)} samples, plan covers {plan.total_samples}"
        )
    if not plan.segments:
        return AudioBuffer(np.zeros(0, dtype=np.int16), audio.sample_rate_hz)
    parts = [
        audio.samples[seg.start_sample : seg.end_sample]
        for seg in (plan.segments[i] for i in plan.order)
    ]
    return AudioBuffer(np.concatenate(parts), audio.sample_rate_hz)


def plan_to_tsv(plan: SegmentPlan) -> str:
    """Audit serialization, one row per segment.

    Columns: utterance_id, index, kind, label, start_sample, end_sample,
    order_position (the position at which the segment is rendered).
    """
    position_of = {idx: pos for pos, idx in enumerate(plan.order)}
    rows = []
    for i, seg in enumerate(plan.segments):
        rows.append(
            "\t".join(
                (
                    plan.utterance_id,
                    str(i),
                    seg.kind,
                    seg.label,
                    str(seg.start_sample),
                    str(seg.end_sample),
                    str(position_of[i]),
                )
            )
        )
    return "\n".join(rows) + "\n"


def write_plan_tsv(plan: SegmentPlan, path) -> None:
    Path(path).write_text(plan_to_tsv(plan), encoding="utf-8")
