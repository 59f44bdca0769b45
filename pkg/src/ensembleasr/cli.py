"""Command-line surface.

Subcommands: ``synth`` (generate a synthetic feature corpus), ``train`` (fit a
head on frozen features), ``eval`` (decode + score), ``inspect`` (dump a
feature-file header), ``report`` (summarize runs into a TSV and figures).

Exit codes: 0 success, 2 configuration/validation, 3 I/O or file format,
4 data infeasibility (utterances too short for their targets, or a diverged
run). Config values resolve as: built-in defaults < JSON config file <
``--preset`` < explicit flags.
"""

from __future__ import annotations

import argparse
import json
import sys
import zlib
from pathlib import Path

import numpy as np

from .combiners import CombinerKind
from .errors import (
    EnsembleAsrError,
    FormatError,
    InfeasibleUtterance,
    NonFiniteLoss,
    ValidationError,
)
from .features import read_features
from .manifest import load_manifest
from .nn import EncoderConfig
from .scoring import evaluate, format_report, write_hyp_dump
from .synth import SynthConfig, synth_corpus
from .trainer import TrainConfig, train

PRESETS = {"indomain": 2, "mismatched": 8}

_TRAIN_DEFAULTS = {
    "models": None,  # required
    "combiner": "concat",
    "d_c": None,
    "encoder_layers": 2,
    "d_model": 32,
    "heads": 4,
    "d_ff": 0,
    "dropout": 0.0,
    "positions": True,
    "epochs": 10,
    "lr": 1e-3,
    "batch": 8,
    "seed": 0,
    "clip": 5.0,
    "sort_by_length": True,
    "align_tolerance": 2,
}

_SYNTH_DEFAULTS = {
    "alphabet_size": 8,
    "num_models": 2,
    "dims": "16,16",
    "frames_per_char": 4,
    "noise_sigma": 0.3,
    "informative_sets": "abcd,efgh",
    "num_utterances": 100,
    "len_range": "6,10",
    "seed": 0,
}


def _load_config_file(path: str | None) -> dict:
    if path is None:
        return {}
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(doc, dict):
        raise ValidationError(f"{path}: config file must hold a JSON object")
    return doc


def _resolve(defaults: dict, file_cfg: dict, args: argparse.Namespace) -> dict:
    """defaults < config file < explicit flags (argparse defaults are None)."""
    cfg = dict(defaults)
    unknown = set(file_cfg) - set(defaults)
    if unknown:
        raise ValidationError(f"unknown config file keys: {sorted(unknown)}")
    cfg.update(file_cfg)
    for key in defaults:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    return cfg


def _ints(text: str | list) -> tuple[int, ...]:
    if isinstance(text, (list, tuple)):
        return tuple(int(x) for x in text)
    return tuple(int(x) for x in str(text).split(","))


def _strs(text: str | list) -> tuple[str, ...]:
    if isinstance(text, (list, tuple)):
        return tuple(str(x) for x in text)
    return tuple(x for x in str(text).split(",") if x)


def cmd_synth(args: argparse.Namespace) -> int:
    cfg_map = _resolve(_SYNTH_DEFAULTS, _load_config_file(args.config), args)
    cfg = SynthConfig(
        alphabet_size=int(cfg_map["alphabet_size"]),
        num_models=int(cfg_map["num_models"]),
        dims=_ints(cfg_map["dims"]),
        frames_per_char=int(cfg_map["frames_per_char"]),
        noise_sigma=float(cfg_map["noise_sigma"]),
        informative_sets=_strs(cfg_map["informative_sets"]),
        num_utterances=int(cfg_map["num_utterances"]),
        utterance_len_range=_ints(cfg_map["len_range"]),  # type: ignore[arg-type]
        seed=int(cfg_map["seed"]),
    )
    synth_corpus(cfg, args.out)
    print(str(Path(args.out) / "manifest.jsonl"))
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    cfg_map = _resolve(_TRAIN_DEFAULTS, _load_config_file(args.config), args)
    # preset sits between the config file and explicit flags
    if args.preset is not None and args.encoder_layers is None:
        cfg_map["encoder_layers"] = PRESETS[args.preset]
    if args.no_positions:
        cfg_map["positions"] = False
    if args.no_sort:
        cfg_map["sort_by_length"] = False
    if args.no_clip:
        cfg_map["clip"] = None
    if cfg_map["models"] is None:
        raise ValidationError("--models is required (comma-separated feature tags)")

    encoder = EncoderConfig(
        num_layers=int(cfg_map["encoder_layers"]),
        d_model=int(cfg_map["d_model"]),
        num_heads=int(cfg_map["heads"]),
        d_ff=int(cfg_map["d_ff"]),
        dropout_rate=float(cfg_map["dropout"]),
        use_positions=bool(cfg_map["positions"]),
    )
    cfg = TrainConfig(
        model_tags=_strs(cfg_map["models"]),
        encoder=encoder,
        combiner_kind=CombinerKind(cfg_map["combiner"]),
        d_c=None if cfg_map["d_c"] is None else int(cfg_map["d_c"]),
        epochs=int(cfg_map["epochs"]),
        batch_size=int(cfg_map["batch"]),
        learning_rate=float(cfg_map["lr"]),
        clip_norm=None if cfg_map["clip"] is None else float(cfg_map["clip"]),
        seed=int(cfg_map["seed"]),
        sort_by_length=bool(cfg_map["sort_by_length"]),
        align_tolerance=int(cfg_map["align_tolerance"]),
    )
    manifest = load_manifest(args.manifest)

    log_fh = open(args.log, "w", encoding="utf-8") if args.log else None
    try:

        def log(line: str) -> None:
            print(line)
            if log_fh:
                log_fh.write(line + "\n")

        resolved = {k: (list(v) if isinstance(v, tuple) else v) for k, v in cfg_map.items()}
        resolved["models"] = list(cfg.model_tags)
        print("config " + json.dumps(resolved, sort_keys=True))
        train(manifest, cfg, checkpoint_path=args.out, log=log)
    finally:
        if log_fh:
            log_fh.close()
    print(f"checkpoint {args.out}")
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    manifest = load_manifest(args.manifest)
    rep = evaluate(manifest, args.checkpoint)
    line = format_report(rep.words, rep.chars)
    print(line)
    if args.report_out:
        Path(args.report_out).write_text(line + "\n", encoding="utf-8")
    if args.hyp_out:
        write_hyp_dump(args.hyp_out, rep.results)
    return 0


def cmd_inspect(args: argparse.Namespace) -> int:
    fm = read_features(args.features)
    payload = np.ascontiguousarray(fm.values, dtype="<f4").tobytes()
    print(f"model_tag {fm.model_tag}")
    print(f"dim {fm.dim}")
    print(f"num_frames {fm.num_frames}")
    print(f"frame_stride_ms {fm.frame_stride_ms:g}")
    print(f"checksum {zlib.crc32(payload):08x}")
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    from .report import parse_eval_report, parse_train_log, write_summary

    curves = []
    for spec in args.train_log or []:
        label, _, path = spec.partition("=")
        if not path:
            raise ValidationError(f"--train-log wants label=path, got {spec!r}")
        curves.append(parse_train_log(label, path))
    evals = []
    for spec in args.eval_report or []:
        label, _, path = spec.partition("=")
        if not path:
            raise ValidationError(f"--eval-report wants label=path, got {spec!r}")
        evals.append(parse_eval_report(label, path))
    if not curves and not evals:
        raise ValidationError("report needs at least one --train-log or --eval-report")
    for path in write_summary(args.out, curves, evals):
        print(str(path))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="ensembleasr",
        description="Train and score lightweight recognizer heads over frozen, "
        "ensembled per-frame speech features.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("synth", help="generate a synthetic feature corpus")
    sp.add_argument("--out", required=True, help="output directory")
    sp.add_argument("--config", help="JSON config file")
    sp.add_argument("--alphabet-size", type=int, dest="alphabet_size")
    sp.add_argument("--num-models", type=int, dest="num_models")
    sp.add_argument("--dims", help="per-model widths, e.g. 16,16")
    sp.add_argument("--frames-per-char", type=int, dest="frames_per_char")
    sp.add_argument("--noise-sigma", type=float, dest="noise_sigma")
    sp.add_argument(
        "--informative-sets",
        dest="informative_sets",
        help="per-model character sets, e.g. abcd,efgh",
    )
    sp.add_argument("--num-utterances", type=int, dest="num_utterances")
    sp.add_argument("--len-range", dest="len_range", help="min,max transcript length")
    sp.add_argument("--seed", type=int)
    sp.set_defaults(fn=cmd_synth)

    tp = sub.add_parser("train", help="train a head on frozen features")
    tp.add_argument("--manifest", required=True)
    tp.add_argument("--out", required=True, help="checkpoint path")
    tp.add_argument("--config", help="JSON config file")
    tp.add_argument("--models", help="comma-separated feature tags to ensemble")
    tp.add_argument("--combiner", choices=[k.value for k in CombinerKind])
    tp.add_argument("--d-c", type=int, dest="d_c", help="attention combiner width")
    tp.add_argument("--preset", choices=sorted(PRESETS))
    tp.add_argument("--encoder-layers", type=int, dest="encoder_layers")
    tp.add_argument("--d-model", type=int, dest="d_model")
    tp.add_argument("--heads", type=int)
    tp.add_argument("--d-ff", type=int, dest="d_ff")
    tp.add_argument("--dropout", type=float)
    tp.add_argument("--no-positions", action="store_true")
    tp.add_argument("--epochs", type=int)
    tp.add_argument("--lr", type=float)
    tp.add_argument("--batch", type=int)
    tp.add_argument("--seed", type=int)
    tp.add_argument("--clip", type=float, help="global gradient-norm cap")
    tp.add_argument("--no-clip", action="store_true")
    tp.add_argument("--no-sort", action="store_true", help="keep manifest order")
    tp.add_argument("--align-tolerance", type=int, dest="align_tolerance")
    tp.add_argument("--log", help="also write epoch lines to this file")
    tp.set_defaults(fn=cmd_train)

    ep = sub.add_parser("eval", help="decode a manifest and score WER/CER")
    ep.add_argument("--manifest", required=True)
    ep.add_argument("--checkpoint", required=True)
    ep.add_argument("--hyp-out", dest="hyp_out", help="hypothesis JSONL dump")
    ep.add_argument("--report-out", dest="report_out", help="also write the report line here")
    ep.set_defaults(fn=cmd_eval)

    ip = sub.add_parser("inspect", help="print a feature file's header")
    ip.add_argument("--features", required=True)
    ip.set_defaults(fn=cmd_inspect)

    rp = sub.add_parser("report", help="summarize runs into a TSV and figures")
    rp.add_argument("--train-log", action="append", metavar="LABEL=PATH")
    rp.add_argument("--eval-report", action="append", metavar="LABEL=PATH")
    rp.add_argument("--out", required=True, help="output directory")
    rp.set_defaults(fn=cmd_report)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (InfeasibleUtterance, NonFiniteLoss) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except EnsembleAsrError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as exc:
        print(f"error: bad JSON config: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
