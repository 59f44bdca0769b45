"""Command line front end: one extraction run per invocation."""

from __future__ import annotations

import argparse
import sys

from .errors import AudioError, ModelLoadError, TranscriptMismatch
from .extract import ExtractJob, extract

EXIT_CONFIG = 2
EXIT_IO = 3


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="sslextract",
        description="Dump a pretrained speech model's last-layer per-frame "
        "features for a directory of 16 kHz mono WAV files.",
    )
    parser.add_argument("--model", required=True, help="checkpoint id or local path")
    parser.add_argument("--audio-dir", required=True, help="directory of .wav files")
    parser.add_argument("--transcripts", required=True, help="tab-separated id/transcript lines")
    parser.add_argument("--out-dir", required=True, help="output directory (manifest merges by id)")
    parser.add_argument("--layer", default="last", choices=["last"])
    args = parser.parse_args(argv)

    job = ExtractJob(
        model_id=args.model,
        audio_dir=args.audio_dir,
        transcript_file=args.transcripts,
        out_dir=args.out_dir,
        layer=args.layer,
    )
    try:
        manifest = extract(job)
    except (TranscriptMismatch, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ModelLoadError, AudioError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"manifest {manifest}")
    return 0


def entry() -> None:
    raise SystemExit(main())
