"""Forced-alignment parsing: word/phone interval tiers for one utterance.

Consumes the long-form Praat TextGrid files that forced aligners emit
(plus a plain TSV fallback) and produces validated interval structures.
Short-form and binary TextGrids are rejected. Silence markers vary by
aligner, so {"", "sil", "sp", "spn", "<eps>"} all normalize to the empty
label; downstream code needs exactly one gap marker.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from .waveio import AudioBuffer

# Tolerance for float round-off in alignment text files, in seconds.
EPSILON_S = 1e-6

SILENCE_LABELS = frozenset({"", "sil", "sp", "spn", "<eps>"})


class AlignmentError(Exception):
    """Base class for alignment parsing errors."""


class MissingTierError(AlignmentError):
    def __init__(self, tier_name: str):
        super().__init__(f"no interval tier named {tier_name!r}")
        self.tier_name = tier_name


class TextGridSyntaxError(AlignmentError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class OverlappingIntervalsError(AlignmentError):
    def __init__(self, tier_name: str, index: int):
        super().__init__(f"tier {tier_name!r}: interval {index} overlaps its predecessor")
        self.tier_name = tier_name
        self.index = index


class CountMismatchError(AlignmentError):
    """Grouping phone counts do not match the available phones."""


@dataclass(frozen=True)
class AlignmentInterval:
    """One labeled span; empty label means silence/gap."""

    label: str
    start_s: float
    end_s: float

    def __post_init__(self):
        if not (0.0 <= self.start_s < self.end_s):
            raise ValueError(f"bad interval [{self.start_s}, {self.end_s}]")

    @property
    def duration_s(self) -> float:
        return self.end_s - self.start_s


@dataclass(frozen=True)
class UtteranceAlignment:
    utterance_id: str
    duration_s: float
    phones: tuple[AlignmentInterval, ...]
    words: tuple[AlignmentInterval, ...]

    def tier(self, name: str) -> tuple[AlignmentInterval, ...]:
        if name == "words":
            return self.words
        if name == "phones":
            return self.phones
        raise KeyError(name)


@dataclass(frozen=True)
class ValidationFinding:
    kind: str  # out_of_bounds | overlap | unordered | word_without_phones
    tier: str
    index: int
    message: str


def normalize_label(label: str) -> str:
    return "" if label.strip().casefold() in SILENCE_LABELS else label.strip()


# ---------------------------------------------------------------------------
# TextGrid (long form)

_KV_RE = re.compile(r'^([A-Za-z?][\w? ]*?)\s*=\s*(.*?)\s*$')
_ITEM_RE = re.compile(r"^item\s*\[\d*\]\s*:")
_ENTRY_RE = re.compile(r"^(intervals|points)\s*\[\d+\]\s*:")
_SIZE_RE = re.compile(r"^(intervals|points)\s*:\s*size\s*=\s*(\d+)")


class _Cursor:
    def __init__(self, text: str):
        self.lines = text.splitlines()
        self.pos = 0

    def next_content(self) -> tuple[int, str]:
        """Advance to the next non-blank line; returns (1-based lineno, text)."""
        while self.pos < len(self.lines):
            line = self.lines[self.pos].strip()
            self.pos += 1
            if line:
                return self.pos, line
        raise TextGridSyntaxError("unexpected end of file", len(self.lines) or 1)

    def peek_content(self) -> tuple[int, str] | None:
        save = self.pos
        try:
            lineno, line = self.next_content()
        except TextGridSyntaxError:
            return None
        self.pos = save
        return lineno, line


def _parse_number(value: str, lineno: int) -> float:
    try:
        return float(value)
    except ValueError:
        raise TextGridSyntaxError(f"expected a number, got {value!r}", lineno) from None


def _parse_string(value: str, lineno: int) -> str:
    if len(value) < 2 or not value.startswith('"') or not value.endswith('"'):
        raise TextGridSyntaxError(f"expected a quoted string, got {value!r}", lineno)
    return value[1:-1].replace('""', '"')


def _expect_kv(cursor: _Cursor, key: str) -> tuple[int, str]:
    lineno, line = cursor.next_content()
    m = _KV_RE.match(line)
    if not m or m.group(1).strip() != key:
        raise TextGridSyntaxError(f"expected {key!r} = ..., got {line!r}", lineno)
    return lineno, m.group(2)


def _read_interval(cursor: _Cursor, tier_name: str) -> AlignmentInterval:
    lineno, line = cursor.next_content()
    if not _ENTRY_RE.match(line):
        raise TextGridSyntaxError(f"expected an intervals [k]: header, got {line!r}", lineno)
    xmin_line, xmin_raw = _expect_kv(cursor, "xmin")
    xmin = _parse_number(xmin_raw, xmin_line)
    xmax_line, xmax_raw = _expect_kv(cursor, "xmax")
    xmax = _parse_number(xmax_raw, xmax_line)
    text_line, text_raw = _expect_kv(cursor, "text")
    label = _parse_string(text_raw, text_line)
    if xmin < 0:
        raise TextGridSyntaxError(f"negative interval start {xmin}", xmin_line)
    if xmax <= xmin:
        raise TextGridSyntaxError(f"interval xmax {xmax} <= xmin {xmin}", xmax_line)
    return AlignmentInterval(normalize_label(label), xmin, xmax)


def _check_tier_order(name: str, intervals: list[AlignmentInterval]) -> None:
    for i in range(1, len(intervals)):
        if intervals[i].start_s < intervals[i - 1].end_s - EPSILON_S:
            raise OverlappingIntervalsError(name, i)


def parse_textgrid(text: str, utterance_id: str) -> UtteranceAlignment:
    """Parse a long-form TextGrid with interval tiers named words and phones.

    Tier name matching is case-insensitive; point tiers are skipped.
    Raises MissingTierError, TextGridSyntaxError, or
    OverlappingIntervalsError.
    """
    cursor = _Cursor(text)

    lineno, value = _expect_kv(cursor, "File type")
    if _parse_string(value, lineno) != "ooTextFile":
        raise TextGridSyntaxError("not an ooTextFile", lineno)
    lineno, value = _expect_kv(cursor, "Object class")
    if _parse_string(value, lineno) != "TextGrid":
        raise TextGridSyntaxError("not a TextGrid object", lineno)

    _expect_kv(cursor, "xmin")
    xmax_line, xmax_raw = _expect_kv(cursor, "xmax")
    duration_s = _parse_number(xmax_raw, xmax_line)
    if duration_s <= 0:
        raise TextGridSyntaxError(f"file xmax must be positive, got {duration_s}", xmax_line)

    lineno, line = cursor.next_content()
    if not line.startswith("tiers?"):
        raise TextGridSyntaxError(f"expected tiers? line, got {line!r}", lineno)
    if "<exists>" not in line:
        raise MissingTierError("words")

    _, size_raw = _expect_kv(cursor, "size")
    n_tiers = int(_parse_number(size_raw, lineno))

    lineno, line = cursor.next_content()
    if not _ITEM_RE.match(line):
        raise TextGridSyntaxError(f"expected item []: header, got {line!r}", lineno)

    tiers: dict[str, list[AlignmentInterval]] = {}
    for _ in range(n_tiers):
        lineno, line = cursor.next_content()
        if not _ITEM_RE.match(line):
            raise TextGridSyntaxError(f"expected item [k]: header, got {line!r}", lineno)
        class_line, class_raw = _expect_kv(cursor, "class")
        tier_class = _parse_string(class_raw, class_line)
        name_line, name_raw = _expect_kv(cursor, "name")
        tier_name = _parse_string(name_raw, name_line)
        _expect_kv(cursor, "xmin")
        _expect_kv(cursor, "xmax")

        size_line, line = cursor.next_content()
        m = _SIZE_RE.match(line)
        if not m:
            raise TextGridSyntaxError(f"expected intervals/points size, got {line!r}", size_line)
        n_entries = int(m.group(2))

        if tier_class == "IntervalTier":
            intervals = [_read_interval(cursor, tier_name) for _ in range(n_entries)]
            key = tier_name.casefold()
            if key in ("words", "phones") and key not in tiers:
                _check_tier_order(key, intervals)
                tiers[key] = intervals
        elif tier_class == "TextTier":
            for _ in range(n_entries):  # point tier: skip entries
                lineno, line = cursor.next_content()
                if not _ENTRY_RE.match(line):
                    raise TextGridSyntaxError(f"expected points [k]:, got {line!r}", lineno)
                _expect_kv(cursor, "number")
                _expect_kv(cursor, "mark")
        else:
            raise TextGridSyntaxError(f"unknown tier class {tier_class!r}", class_line)

    for required in ("words", "phones"):
        if required not in tiers:
            raise MissingTierError(required)

    return UtteranceAlignment(
        utterance_id=utterance_id,
        duration_s=duration_s,
        phones=tuple(tiers["phones"]),
        words=tuple(tiers["words"]),
    )


# ---------------------------------------------------------------------------
# TSV fallback

def parse_alignment_tsv(text: str) -> UtteranceAlignment:
    """Parse the plain fallback format.

    Header line ``#utterance_id<TAB>duration_s`` followed by rows
    ``tier<TAB>label<TAB>start_s<TAB>end_s`` with tier in {words, phones}.
    """
    lines = text.splitlines()
    if not lines or not lines[0].startswith("#"):
        raise TextGridSyntaxError("missing #utterance_id<TAB>duration_s header", 1)
    header = lines[0][1:].split("\t")
    if len(header) != 2:
        raise TextGridSyntaxError("header must be #utterance_id<TAB>duration_s", 1)
    utterance_id = header[0]
    duration_s = _parse_number(header[1], 1)

    tiers: dict[str, list[AlignmentInterval]] = {"words": [], "phones": []}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 4:
            raise TextGridSyntaxError(f"expected 4 tab-separated fields, got {len(parts)}", lineno)
        tier, label, start_raw, end_raw = parts
        if tier not in tiers:
            raise TextGridSyntaxError(f"unknown tier {tier!r}", lineno)
        start_s = _parse_number(start_raw, lineno)
        end_s = _parse_number(end_raw, lineno)
        if start_s < 0 or end_s <= start_s:
            raise TextGridSyntaxError(f"bad interval [{start_s}, {end_s}]", lineno)
        tiers[tier].append(AlignmentInterval(normalize_label(label), start_s, end_s))

    for name, intervals in tiers.items():
        intervals.sort(key=lambda iv: iv.start_s)
        _check_tier_order(name, intervals)
        if not intervals:
            raise MissingTierError(name)

    return UtteranceAlignment(
        utterance_id=utterance_id,
        duration_s=duration_s,
        phones=tuple(tiers["phones"]),
        words=tuple(tiers["words"]),
    )


def load_alignment(path, utterance_id: str | None = None) -> UtteranceAlignment:
    """Read a .TextGrid or fallback .tsv alignment file."""
    p = Path(path)
    text = p.read_text(encoding="utf-8")
    if p.suffix.casefold() == ".textgrid":
        return parse_textgrid(text, utterance_id or p.stem)
    return parse_alignment_tsv(text)


# ---------------------------------------------------------------------------
# Derivation and validation

def words_from_phones(
    phones: list[AlignmentInterval] | tuple[AlignmentInterval, ...],
    grouping: list[tuple[str, int]],
) -> list[AlignmentInterval]:
    """Build word intervals from phone intervals and per-word phone counts.

    Each word spans from the start of its first phone to the end of its
    last one; silences between words are not covered by any word interval.
    """
    voiced = [p for p in phones if p.label]
    expected = sum(count for _, count in grouping)
    if expected != len(voiced):
        raise CountMismatchError(
            f"grouping covers {expected} phones but tier has {len(voiced)} non-empty phones"
        )
    words = []
    pos = 0
    for label, count in grouping:
        if count < 1:
            raise CountMismatchError(f"word {label!r} must span at least one phone")
        group = voiced[pos : pos + count]
        words.append(AlignmentInterval(label, group[0].start_s, group[-1].end_s))
        pos += count
    return words


def validate(alignment: UtteranceAlignment, audio: AudioBuffer) -> list[ValidationFinding]:
    """Check an alignment against its audio; an empty report means valid.

    Findings (not exceptions): intervals past the audio end, overlapping
    or unordered intervals within a tier, and words that span no phone.
    The bounds check allows half a sample of slack for text round-off.
    """
    findings = []
    audio_duration = len(audio) / audio.sample_rate_hz
    bound = audio_duration + 0.5 / audio.sample_rate_hz + EPSILON_S

    for name in ("words", "phones"):
        intervals = alignment.tier(name)
        for i, iv in enumerate(intervals):
            if iv.end_s > bound:
                findings.append(
                    ValidationFinding(
                        "out_of_bounds", name, i,
                        f"interval ends at {iv.end_s}s but audio is {audio_duration:.6f}s",
                    )
                )
            if i > 0:
                prev = intervals[i - 1]
                if iv.start_s < prev.start_s:
                    findings.append(
                        ValidationFinding("unordered", name, i, "interval starts before its predecessor")
                    )
                elif iv.start_s < prev.end_s - EPSILON_S:
                    findings.append(
                        ValidationFinding("overlap", name, i, "interval overlaps its predecessor")
                    )

    for i, word in enumerate(alignment.words):
        if not word.label:
            continue
        covered = any(
            p.label
            and p.start_s >= word.start_s - EPSILON_S
            and p.end_s <= word.end_s + EPSILON_S
            for p in alignment.phones
        )
        if not covered:
            findings.append(
                ValidationFinding("word_without_phones", "words", i,
                                  f"word {word.label!r} spans no non-empty phone")
            )
    return findings
