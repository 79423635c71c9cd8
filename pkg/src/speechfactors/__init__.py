"""Deterministic construction of domain-factor-perturbed speech corpora.

Everything generative is seeded and reproducible: shuffled real audio,
random-start segmentation baselines, a synthetic noise/tone phonetic
language, prosody chunk plans, control-noise corpora, speaker-balanced
splits, and training manifests.
"""

__version__ = "0.1.0"

from .waveio import AudioBuffer, concat, read_wav, write_wav
from .alignment import UtteranceAlignment, load_alignment, parse_textgrid
from .perturb import SegmentPlan, partition, random_span, render, shuffle
from .synthlang import PhoneInventory, Lexicon, RenderParams, build_inventory
from .prosody import ChunkPlan, chunk_words, assemble
from .corpus import CorpusManifest, speaker_split, duration_budget, lexicon_stats

__all__ = [
    "__version__",
    "AudioBuffer",
    "concat",
    "read_wav",
    "write_wav",
    "UtteranceAlignment",
    "load_alignment",
    "parse_textgrid",
    "SegmentPlan",
    "partition",
    "shuffle",
    "random_span",
    "render",
    "PhoneInventory",
    "Lexicon",
    "RenderParams",
    "build_inventory",
    "ChunkPlan",
    "chunk_words",
    "assemble",
    "CorpusManifest",
    "speaker_split",
    "duration_budget",
    "lexicon_stats",
]
