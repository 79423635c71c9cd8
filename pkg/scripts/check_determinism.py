#!/usr/bin/env python3
"""Run the pipeline twice with one seed and compare output tree hashes.

Exits 0 when the two runs are byte-identical, 1 otherwise.
"""

import argparse
import hashlib
import sys
import tempfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))
from demo_pipeline import build_demo_corpus  # noqa: E402

from speechfactors.cli import main as cli_main  # noqa: E402


def tree_hash(root: Path) -> str:
    digest = hashlib.sha256()
    for path in sorted(p for p in root.rglob("*") if p.is_file()):
        digest.update(path.relative_to(root).as_posix().encode())
        digest.update(path.read_bytes())
    return digest.hexdigest()


def one_run(base: Path, seed: int) -> str:
    corpus = build_demo_corpus(base / "natural", seed)
    out = base / "out"
    for argv in (
        ["shuffle", "--unit", "word", "--audio", str(corpus / "audio"),
         "--alignments", str(corpus / "alignments"), "--out", str(out / "shuffle"),
         "--seed", str(seed)],
        ["randspan", "--audio", str(corpus / "audio"),
         "--alignments", str(corpus / "alignments"), "--out", str(out / "randspan"),
         "--seed", str(seed)],
        ["synthlang", "--hours", "0.002", "--mode", "language", "--vocab-size", "100",
         "--out", str(out / "synthetic"), "--seed", str(seed)],
    ):
        rc = cli_main(argv)
        if rc != 0:
            raise SystemExit(f"command {argv[0]} failed with {rc}")
    return tree_hash(out)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", default=7, type=int)
    args = parser.parse_args()

    with tempfile.TemporaryDirectory() as tmp:
        first = one_run(Path(tmp) / "a", args.seed)
        second = one_run(Path(tmp) / "b", args.seed)

    print(f"run A: {first}")
    print(f"run B: {second}")
    if first == second:
        print("byte-identical: yes")
        return 0
    print("byte-identical: NO")
    return 1


if __name__ == "__main__":
    sys.exit(main())
