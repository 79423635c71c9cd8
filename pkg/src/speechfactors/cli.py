"""Command-line entry points for the corpus construction recipes.

Every command is deterministic given its inputs and the master seed:
per-utterance seeds are the master seed XORed with a stable hash of the
utterance id, so worker scheduling and file ordering never change the
output. Failures are collected per utterance rather than failing fast,
and every command emits a machine-readable JSON run report recording the
master seed, tool version, and per-utterance status.

Exit codes: 0 success, 1 partial failures, 2 usage/config error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .alignment import load_alignment, validate
from .corpus import (
    CorpusManifest,
    ManifestEntry,
    SampleCountMismatchError,
    lexicon_stats,
    read_manifest,
    resolve_root,
    scan_corpus,
    speaker_split,
    verify_manifest,
    write_manifest,
)
from .perturb import WORD, PHONE, partition, random_span, render, shuffle, write_plan_tsv
from .prosody import chunk_jobs_to_tsv, chunk_words, load_chunk_audio, read_chunk_jobs, assemble
from .rng import make_rng, utterance_seed
from .synthlang import (
    DEFAULT_SENT_LEN_RANGE,
    DEFAULT_VOCAB_SIZE,
    DEFAULT_WORD_LEN_RANGE,
    RenderParams,
    build_inventory,
    build_lexicon,
    inventory_to_json,
    lexicon_to_json,
    render_utterance,
    sample_sentence,
    white_noise,
    word_noise_sequence,
)
from .waveio import DEFAULT_SAMPLE_RATE, read_wav, write_wav

EXIT_OK = 0
EXIT_PARTIAL = 1
EXIT_USAGE = 2

WORKERS_ENV = "SPEECHFACTORS_WORKERS"
DEFAULT_WORKERS = 4

ALIGNMENT_SUFFIXES = (".TextGrid", ".textgrid", ".tsv")


class UsageError(Exception):
    """Bad flags or config; maps to exit code 2."""


@dataclass(frozen=True)
class RunConfig:
    """Run-level settings resolved before any file is touched.

    The master seed is recorded in every run report.
    """

    master_seed: int = 0
    sample_rate_hz: int = DEFAULT_SAMPLE_RATE
    workers: int = DEFAULT_WORKERS


# ---------------------------------------------------------------------------
# Config and option plumbing

def load_config(path) -> dict:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}") from exc
    if p.suffix.lower() == ".toml":
        import tomli

        try:
            return tomli.loads(text)
        except tomli.TOMLDecodeError as exc:
            raise UsageError(f"{path}: invalid TOML: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON: {exc}") from exc


def _resolve(args, config: dict, key: str, default=None, required: bool = False):
    """Flag value if given, else config-file value, else the default."""
    value = getattr(args, key, None)
    if value is None:
        value = config.get(key, default)
    if required and value is None:
        raise UsageError(f"missing required option --{key.replace('_', '-')}")
    return value


def _worker_count(args, config) -> int:
    env = os.environ.get(WORKERS_ENV)
    if env is not None:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError(f"{WORKERS_ENV} must be an integer, got {env!r}") from None
    return max(1, int(_resolve(args, config, "workers", DEFAULT_WORKERS)))


def _run_config(args, config) -> RunConfig:
    return RunConfig(
        master_seed=int(_resolve(args, config, "seed", 0)),
        sample_rate_hz=int(_resolve(args, config, "sample_rate", DEFAULT_SAMPLE_RATE)),
        workers=_worker_count(args, config),
    )


def _emit_report(report: dict, out_dir: Path | None = None) -> None:
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    sys.stdout.write(text)
    if out_dir is not None:
        (out_dir / "run_report.json").write_text(text, encoding="utf-8")


def _base_report(command: str, run: RunConfig) -> dict:
    return {"command": command, "version": __version__, "master_seed": run.master_seed}


def _process_utterances(jobs, fn, workers: int) -> list[dict]:
    """Run fn(utterance_id, payload) per job, collecting failures as data.

    Results come back sorted by utterance id regardless of scheduling.
    """

    def run_one(utt_id, payload):
        try:
            result = fn(utt_id, payload)
            return {"utterance_id": utt_id, "status": "ok", **result}
        except Exception as exc:  # per-utterance failures are report entries
            return {"utterance_id": utt_id, "status": "failed", "error": str(exc)}

    if workers <= 1 or len(jobs) <= 1:
        statuses = [run_one(utt_id, payload) for utt_id, payload in jobs]
    else:
        statuses = []
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(run_one, utt_id, payload) for utt_id, payload in jobs]
            for future in as_completed(futures):
                statuses.append(future.result())
    return sorted(statuses, key=lambda s: s["utterance_id"])


def _read_transcripts(path) -> list[tuple[str, str]]:
    """Rows of ``utterance_id<TAB>text``; text may be empty."""
    rows = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        if "\t" not in line:
            raise UsageError(f"{path}:{lineno}: expected utterance_id<TAB>text")
        utt_id, text = line.split("\t", 1)
        rows.append((utt_id, text))
    return rows


def _find_alignment(alignments_dir: Path, utterance_id: str) -> Path:
    for suffix in ALIGNMENT_SUFFIXES:
        candidate = alignments_dir / f"{utterance_id}{suffix}"
        if candidate.exists():
            return candidate
    raise FileNotFoundError(f"no alignment for {utterance_id!r} in {alignments_dir}")


def _manifest_from_statuses(statuses: list[dict]) -> CorpusManifest:
    entries = tuple(
        ManifestEntry(s["relative_path"], s["num_samples"])
        for s in statuses
        if s["status"] == "ok"
    )
    return CorpusManifest(root=".", entries=entries)


def _finish_corpus_command(report: dict, statuses: list[dict], out_dir: Path) -> int:
    manifest = _manifest_from_statuses(statuses)
    write_manifest(manifest, out_dir / "manifest.tsv")
    failed = sum(1 for s in statuses if s["status"] == "failed")
    total_seconds = sum(s.get("seconds", 0.0) for s in statuses if s["status"] == "ok")
    report.update(
        {
            "utterances": statuses,
            "processed": len(statuses),
            "failed": failed,
            "total_hours": total_seconds / 3600.0,
        }
    )
    _emit_report(report, out_dir)
    return EXIT_PARTIAL if failed else EXIT_OK


# ---------------------------------------------------------------------------
# shuffle / randspan

def _perturb_command(args, config, mode: str) -> int:
    run = _run_config(args, config)
    unit = _resolve(args, config, "unit", WORD)
    if unit not in (WORD, PHONE):
        raise UsageError(f"--unit must be word or phone, got {unit!r}")
    audio_dir = Path(_resolve(args, config, "audio", required=True))
    alignments_dir = Path(_resolve(args, config, "alignments", required=True))
    out_dir = Path(_resolve(args, config, "out", required=True))

    wav_paths = sorted(audio_dir.glob("*.wav"))
    if not wav_paths:
        raise UsageError(f"no .wav files found in {audio_dir}")
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "plans").mkdir(exist_ok=True)

    def one(utt_id: str, wav_path: Path) -> dict:
        alignment_path = _find_alignment(alignments_dir, utt_id)
        audio = read_wav(wav_path)
        alignment = load_alignment(alignment_path, utt_id)
        findings = validate(alignment, audio)
        if findings:
            first = findings[0]
            raise ValueError(
                f"alignment has {len(findings)} finding(s), first: "
                f"{first.kind} in {first.tier}[{first.index}]"
            )
        plan = partition(alignment, unit, audio.sample_rate_hz, total_samples=len(audio))
        seed = utterance_seed(run.master_seed, utt_id)
        plan = shuffle(plan, seed) if mode == "shuffle" else random_span(plan, seed)
        rendered = render(plan, audio)
        write_wav(rendered, out_dir / f"{utt_id}.wav")
        write_plan_tsv(plan, out_dir / "plans" / f"{utt_id}.tsv")
        return {
            "relative_path": f"{utt_id}.wav",
            "num_samples": len(rendered),
            "seconds": rendered.duration_s,
        }

    jobs = [(p.stem, p) for p in wav_paths]
    statuses = _process_utterances(jobs, one, run.workers)
    report = _base_report(mode, run)
    report["unit"] = unit
    return _finish_corpus_command(report, statuses, out_dir)


def cmd_shuffle(args, config) -> int:
    return _perturb_command(args, config, "shuffle")


def cmd_randspan(args, config) -> int:
    return _perturb_command(args, config, "randspan")


# ---------------------------------------------------------------------------
# synthlang

def cmd_synthlang(args, config) -> int:
    run = _run_config(args, config)
    master_seed = run.master_seed
    hours = float(_resolve(args, config, "hours", required=True))
    if hours <= 0:
        raise UsageError("--hours must be positive")
    mode = _resolve(args, config, "mode", "language")
    if mode not in ("language", "word-noise", "white-noise"):
        raise UsageError(f"--mode must be language, word-noise, or white-noise, got {mode!r}")
    out_dir = Path(_resolve(args, config, "out", required=True))
    sample_rate = run.sample_rate_hz
    vocab_size = int(_resolve(args, config, "vocab_size", DEFAULT_VOCAB_SIZE))
    word_len = tuple(_resolve(args, config, "word_len", list(DEFAULT_WORD_LEN_RANGE)))
    sent_len = tuple(_resolve(args, config, "sent_len", list(DEFAULT_SENT_LEN_RANGE)))
    noise_utt_s = tuple(_resolve(args, config, "noise_utt_seconds", [2.0, 15.0]))
    noise_volume = float(_resolve(args, config, "noise_volume", 0.5))

    params = RenderParams(sample_rate_hz=sample_rate)
    out_dir.mkdir(parents=True, exist_ok=True)
    target_samples = hours * 3600.0 * sample_rate

    inventory = None
    lexicon = None
    if mode in ("language", "word-noise"):
        inventory = build_inventory(utterance_seed(master_seed, "inventory"))
        (out_dir / "inventory.json").write_text(inventory_to_json(inventory), encoding="utf-8")
    if mode == "language":
        lexicon = build_lexicon(
            inventory, vocab_size, word_len, utterance_seed(master_seed, "lexicon")
        )
        (out_dir / "lexicon.json").write_text(lexicon_to_json(lexicon), encoding="utf-8")

    statuses = []
    transcript_rows = []
    covered = 0
    index = 0
    while covered < target_samples:
        utt_id = f"utt{index:06d}"
        if mode == "language":
            sentence = sample_sentence(
                lexicon, sent_len, utterance_seed(master_seed, f"{utt_id}/sentence")
            )
            buf = render_utterance(
                sentence, lexicon, inventory, params,
                utterance_seed(master_seed, f"{utt_id}/audio"),
            )
            transcript_rows.append(f"{utt_id}\t{' '.join(sentence)}")
        else:
            length_rng = make_rng(utterance_seed(master_seed, f"{utt_id}/length"))
            total = int(round(float(length_rng.uniform(*noise_utt_s)) * sample_rate))
            audio_seed = utterance_seed(master_seed, f"{utt_id}/audio")
            if mode == "word-noise":
                buf = word_noise_sequence(params, inventory, total, audio_seed)
            else:
                buf = white_noise(total, audio_seed, noise_volume, sample_rate)
        write_wav(buf, out_dir / f"{utt_id}.wav")
        statuses.append(
            {
                "utterance_id": utt_id,
                "status": "ok",
                "relative_path": f"{utt_id}.wav",
                "num_samples": len(buf),
                "seconds": buf.duration_s,
            }
        )
        covered += len(buf)
        index += 1

    if mode == "language":
        (out_dir / "transcripts.tsv").write_text(
            "\n".join(transcript_rows) + "\n", encoding="utf-8"
        )

    report = _base_report("synthlang", run)
    report.update({"mode": mode, "target_hours": hours, "sample_rate_hz": sample_rate})
    return _finish_corpus_command(report, statuses, out_dir)


# ---------------------------------------------------------------------------
# chunk / assemble

def _parse_span(raw) -> int | None:
    if raw is None or (isinstance(raw, str) and raw.lower() == "unbounded"):
        return None
    try:
        span = int(raw)
    except (TypeError, ValueError):
        raise UsageError(f"--span must be a positive integer or 'unbounded', got {raw!r}") from None
    if span < 1:
        raise UsageError(f"--span must be positive, got {span}")
    return span


def cmd_chunk(args, config) -> int:
    run = _run_config(args, config)
    transcripts_path = _resolve(args, config, "transcripts", required=True)
    span = _parse_span(_resolve(args, config, "span", "unbounded"))
    out_path = Path(_resolve(args, config, "out", required=True))

    rows = _read_transcripts(transcripts_path)

    def one(utt_id: str, text: str) -> dict:
        plan = chunk_words(text.split(), span, utt_id)
        return {"plan": plan, "chunks": len(plan.chunks), "words": len(plan.words)}

    statuses = _process_utterances(rows, one, workers=1)
    plans = [s.pop("plan") for s in statuses if s["status"] == "ok"]
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(chunk_jobs_to_tsv(plans), encoding="utf-8")

    failed = sum(1 for s in statuses if s["status"] == "failed")
    report = _base_report("chunk", run)
    report.update(
        {
            "span": span if span is not None else "unbounded",
            "utterances": statuses,
            "processed": len(statuses),
            "failed": failed,
            "plan_file": str(out_path),
        }
    )
    _emit_report(report)
    return EXIT_PARTIAL if failed else EXIT_OK


def cmd_assemble(args, config) -> int:
    run = _run_config(args, config)
    plan_path = Path(_resolve(args, config, "plan", required=True))
    chunks_dir = Path(_resolve(args, config, "chunks", required=True))
    out_dir = Path(_resolve(args, config, "out", required=True))
    gap_ms = float(_resolve(args, config, "gap_ms", 0.0))

    plans = read_chunk_jobs(plan_path.read_text(encoding="utf-8"))
    out_dir.mkdir(parents=True, exist_ok=True)

    def one(utt_id: str, plan) -> dict:
        chunk_audio = load_chunk_audio(plan, chunks_dir)
        buf = assemble(plan, chunk_audio, gap_ms=gap_ms)
        write_wav(buf, out_dir / f"{utt_id}.wav")
        return {
            "relative_path": f"{utt_id}.wav",
            "num_samples": len(buf),
            "seconds": buf.duration_s,
        }

    jobs = [(plan.utterance_id, plan) for plan in plans]
    statuses = _process_utterances(jobs, one, run.workers)
    report = _base_report("assemble", run)
    report["gap_ms"] = gap_ms
    return _finish_corpus_command(report, statuses, out_dir)


# ---------------------------------------------------------------------------
# speaker-split / manifest / stats

def cmd_speaker_split(args, config) -> int:
    run = _run_config(args, config)
    utterances_path = Path(_resolve(args, config, "utterances", required=True))
    n_speakers = int(_resolve(args, config, "n_speakers", required=True))
    max_speakers = _resolve(args, config, "max_speakers")
    out_path = Path(_resolve(args, config, "out", required=True))

    ids = []
    for line in utterances_path.read_text(encoding="utf-8").splitlines():
        stripped = line.strip()
        if stripped and not stripped.startswith("#"):
            ids.append(stripped.split("\t")[0].split()[0])

    assignment = speaker_split(
        ids, n_speakers, run.master_seed,
        max_speakers=int(max_speakers) if max_speakers is not None else None,
    )
    out_path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"{utt}\t{assignment.by_utterance[utt]}" for utt in sorted(assignment.by_utterance)]
    out_path.write_text("\n".join(lines) + "\n" if lines else "", encoding="utf-8")

    counts = assignment.counts()
    report = _base_report("speaker-split", run)
    report.update(
        {
            "n_speakers": n_speakers,
            "utterances_assigned": len(ids),
            "per_speaker_counts": counts,
            "balance": (max(counts) - min(counts)) if counts else 0,
            "out": str(out_path),
        }
    )
    _emit_report(report)
    return EXIT_OK


def cmd_manifest(args, config) -> int:
    run = _run_config(args, config)
    verify_path = _resolve(args, config, "verify")
    report = _base_report("manifest", run)

    if verify_path is not None:
        manifest = read_manifest(verify_path)
        try:
            verify_manifest(manifest, resolve_root(manifest, verify_path))
        except SampleCountMismatchError as exc:
            report.update(
                {
                    "verified": str(verify_path),
                    "entries": len(manifest.entries),
                    "mismatches": [
                        {"relative_path": p, "manifest": m, "actual": a}
                        for p, m, a in exc.mismatches
                    ],
                }
            )
            _emit_report(report)
            return EXIT_PARTIAL
        report.update({"verified": str(verify_path), "entries": len(manifest.entries), "mismatches": []})
        _emit_report(report)
        return EXIT_OK

    root = _resolve(args, config, "root", required=True)
    out_path = Path(_resolve(args, config, "out", required=True))
    manifest = scan_corpus(root)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    write_manifest(manifest, out_path)
    report.update({"root": str(root), "entries": len(manifest.entries), "out": str(out_path)})
    _emit_report(report)
    return EXIT_OK


def cmd_stats(args, config) -> int:
    run = _run_config(args, config)
    transcripts_path = _resolve(args, config, "transcripts", required=True)
    rows = _read_transcripts(transcripts_path)
    stats = lexicon_stats([text for _, text in rows])
    report = _base_report("stats", run)
    report.update(
        {
            "transcripts": str(transcripts_path),
            "utterances": len(rows),
            "token_count": stats.token_count,
            "type_count": stats.type_count,
        }
    )
    _emit_report(report)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser

def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="TOML or JSON run file with flag equivalents")
    parser.add_argument("--seed", type=int, help="master seed (default 0)")
    parser.add_argument("--workers", type=int, help=f"worker pool size (env {WORKERS_ENV})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="speechfactors",
        description="Construct domain-factor-perturbed speech pre-training corpora.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, func, doc in (
        ("shuffle", cmd_shuffle, "shuffle word or phone segments of aligned audio"),
        ("randspan", cmd_randspan, "random-start segmentation baseline"),
    ):
        sp = sub.add_parser(name, help=doc)
        _add_common(sp)
        sp.add_argument("--unit", choices=[WORD, PHONE], help="segmentation unit (default word)")
        sp.add_argument("--alignments", help="directory of .TextGrid/.tsv alignments")
        sp.add_argument("--audio", help="directory of input .wav files")
        sp.add_argument("--out", help="output corpus directory")
        sp.set_defaults(func=func)

    sp = sub.add_parser("synthlang", help="generate the synthetic phone-tone language or noise controls")
    _add_common(sp)
    sp.add_argument("--hours", type=float, help="target corpus duration in hours")
    sp.add_argument("--out", help="output corpus directory")
    sp.add_argument("--mode", choices=["language", "word-noise", "white-noise"])
    sp.add_argument("--sample-rate", type=int, dest="sample_rate")
    sp.add_argument("--vocab-size", type=int, dest="vocab_size")
    sp.add_argument("--word-len", type=int, nargs=2, dest="word_len", metavar=("MIN", "MAX"))
    sp.add_argument("--sent-len", type=int, nargs=2, dest="sent_len", metavar=("MIN", "MAX"))
    sp.add_argument(
        "--noise-utt-seconds", type=float, nargs=2, dest="noise_utt_seconds",
        metavar=("MIN", "MAX"), help="utterance length range for the noise modes",
    )
    sp.add_argument("--noise-volume", type=float, dest="noise_volume")
    sp.set_defaults(func=cmd_synthlang)

    sp = sub.add_parser("chunk", help="split transcripts into N-word synthesis chunks")
    _add_common(sp)
    sp.add_argument("--transcripts", help="utterance_id<TAB>text file")
    sp.add_argument("--span", help="words per chunk, or 'unbounded'")
    sp.add_argument("--out", help="output chunk-plan TSV")
    sp.set_defaults(func=cmd_chunk)

    sp = sub.add_parser("assemble", help="concatenate returned chunk audio per utterance")
    _add_common(sp)
    sp.add_argument("--plan", help="chunk-plan TSV from the chunk command")
    sp.add_argument("--chunks", help="directory of <utterance_id>.<chunk_index>.wav files")
    sp.add_argument("--out", help="output corpus directory")
    sp.add_argument("--gap-ms", type=float, dest="gap_ms", help="silence between chunks (default 0)")
    sp.set_defaults(func=cmd_assemble)

    sp = sub.add_parser("speaker-split", help="assign utterances to speakers, balanced to +/-1")
    _add_common(sp)
    sp.add_argument("--utterances", help="file with one utterance id per line (first column)")
    sp.add_argument("--n-speakers", type=int, dest="n_speakers")
    sp.add_argument("--max-speakers", type=int, dest="max_speakers")
    sp.add_argument("--out", help="output TSV of utterance_id<TAB>speaker_index")
    sp.set_defaults(func=cmd_speaker_split)

    sp = sub.add_parser("manifest", help="build a manifest from a directory, or verify one")
    _add_common(sp)
    sp.add_argument("--root", help="corpus root to scan")
    sp.add_argument("--out", help="manifest file to write")
    sp.add_argument("--verify", help="manifest file to check against the audio on disk")
    sp.set_defaults(func=cmd_manifest)

    sp = sub.add_parser("stats", help="token/type counts over a transcripts file")
    _add_common(sp)
    sp.add_argument("--transcripts", help="utterance_id<TAB>text file")
    sp.set_defaults(func=cmd_stats)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config) if getattr(args, "config", None) else {}
        return args.func(args, config)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
