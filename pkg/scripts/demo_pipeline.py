#!/usr/bin/env python3
"""Build a small audible demo corpus and run every tool command on it.

The demo utterances are tone-word sequences with silences between words,
paired with exact sample-accurate alignments in the fallback TSV format,
so the whole perturbation pipeline can be exercised without a forced
aligner. Outputs land under --out (default ./demo_out).
"""

import argparse
import sys
from pathlib import Path

import numpy as np

from speechfactors.cli import main as cli_main
from speechfactors.rng import child_seeds, make_rng
from speechfactors.synthlang import RenderParams, build_inventory, render_phone
from speechfactors.waveio import AudioBuffer, concat, silence, write_wav

RATE = 16000
PAUSE_SAMPLES = RATE // 8  # 125 ms between words


def build_demo_corpus(root: Path, seed: int, n_utterances: int = 4) -> Path:
    """Write audio/, alignments/ (TSV), and transcripts.tsv under root."""
    inventory = build_inventory(seed)
    params = RenderParams(sample_rate_hz=RATE)
    audio_dir = root / "audio"
    align_dir = root / "alignments"
    audio_dir.mkdir(parents=True, exist_ok=True)
    align_dir.mkdir(parents=True, exist_ok=True)

    rng = make_rng(seed)
    transcript_rows = []
    for u in range(n_utterances):
        utt_id = f"demo{u:03d}"
        n_words = int(rng.integers(3, 7))
        pieces: list[AudioBuffer] = []
        tsv_rows = []
        words = []
        cursor = 0
        for w in range(n_words):
            if w > 0:
                pieces.append(silence(PAUSE_SAMPLES, RATE))
                cursor += PAUSE_SAMPLES
            n_phones = int(rng.integers(2, 5))
            phone_ids = [int(p) for p in rng.integers(0, 44, size=n_phones)]
            word_start = cursor
            for pid in phone_ids:
                buf = render_phone(inventory.phones[pid], params, child_seeds(rng, 1)[0])
                tsv_rows.append(("phones", f"p{pid}", cursor, cursor + len(buf)))
                pieces.append(buf)
                cursor += len(buf)
            label = "-".join(f"p{pid}" for pid in phone_ids)
            words.append(label)
            tsv_rows.append(("words", label, word_start, cursor))

        audio = concat(pieces, RATE)
        write_wav(audio, audio_dir / f"{utt_id}.wav")
        lines = [f"#{utt_id}\t{len(audio) / RATE}"]
        for tier, label, start, end in sorted(tsv_rows, key=lambda r: (r[0], r[2])):
            lines.append(f"{tier}\t{label}\t{start / RATE}\t{end / RATE}")
        (align_dir / f"{utt_id}.tsv").write_text("\n".join(lines) + "\n")
        transcript_rows.append(f"{utt_id}\t{' '.join(words)}")

    (root / "transcripts.tsv").write_text("\n".join(transcript_rows) + "\n")
    return root


def run(argv) -> int:
    print("$ speechfactors " + " ".join(argv))
    rc = cli_main(argv)
    if rc != 0:
        print(f"command failed with exit code {rc}", file=sys.stderr)
    return rc


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="demo_out", type=Path)
    parser.add_argument("--seed", default=1234, type=int)
    args = parser.parse_args()

    root = args.out
    seed = str(args.seed)
    corpus = build_demo_corpus(root / "natural", args.seed)
    print(f"demo corpus at {corpus}")

    audio = str(corpus / "audio")
    aligns = str(corpus / "alignments")
    transcripts = str(corpus / "transcripts.tsv")

    rc = 0
    rc |= run(["shuffle", "--unit", "word", "--audio", audio, "--alignments", aligns,
               "--out", str(root / "word_shuffle"), "--seed", seed])
    rc |= run(["shuffle", "--unit", "phone", "--audio", audio, "--alignments", aligns,
               "--out", str(root / "phone_shuffle"), "--seed", seed])
    rc |= run(["randspan", "--audio", audio, "--alignments", aligns,
               "--out", str(root / "randspan"), "--seed", seed])
    rc |= run(["synthlang", "--hours", "0.002", "--mode", "language",
               "--vocab-size", "100", "--out", str(root / "synthetic"), "--seed", seed])
    rc |= run(["synthlang", "--hours", "0.001", "--mode", "white-noise",
               "--out", str(root / "white_noise"), "--seed", seed])
    rc |= run(["chunk", "--transcripts", transcripts, "--span", "2",
               "--out", str(root / "chunk_plan.tsv")])
    rc |= run(["stats", "--transcripts", transcripts])
    rc |= run(["speaker-split", "--utterances", transcripts, "--n-speakers", "2",
               "--seed", seed, "--out", str(root / "speakers.tsv")])

    print(f"\nall outputs under {root}/")
    return rc


if __name__ == "__main__":
    sys.exit(main())
