"""Run summaries: parse training logs and evaluation reports, write a
tab-separated table plus rendered figures (loss curves, error-rate bars)."""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")  # headless rendering; must precede pyplot import
import matplotlib.pyplot as plt

from .errors import FormatError

_EPOCH_RE = re.compile(
    r"^epoch\s+(\d+)\s+loss\s+([-+0-9.eE]+)\s+seconds\s+([-+0-9.eE]+)\s*$"
)
_REPORT_RE = re.compile(
    r"WER\s+([0-9.]+)\s+CER\s+([0-9.]+)\s+S\s+(\d+)\s+I\s+(\d+)\s+D\s+(\d+)\s+N\s+(\d+)"
)


@dataclass
class TrainCurve:
    label: str
    epochs: list[int]
    losses: list[float]
    seconds: list[float]


@dataclass
class EvalSummary:
    label: str
    wer: float  # percent
    cer: float  # percent
    substitutions: int
    insertions: int
    deletions: int
    ref_tokens: int


def parse_train_log(label: str, path: str | Path) -> TrainCurve:
    """Collect ``epoch <k> loss <v> seconds <v>`` lines; other lines pass."""
    epochs, losses, seconds = [], [], []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        m = _EPOCH_RE.match(line.strip())
        if m:
            epochs.append(int(m.group(1)))
            losses.append(float(m.group(2)))
            seconds.append(float(m.group(3)))
    if not epochs:
        raise FormatError(f"{path}: no epoch lines found")
    return TrainCurve(label, epochs, losses, seconds)


def parse_eval_report(label: str, path: str | Path) -> EvalSummary:
    """Find the aggregate ``WER .. CER .. S .. I .. D .. N ..`` line."""
    text = Path(path).read_text(encoding="utf-8")
    m = _REPORT_RE.search(text)
    if not m:
        raise FormatError(f"{path}: no aggregate report line found")
    return EvalSummary(
        label,
        float(m.group(1)),
        float(m.group(2)),
        int(m.group(3)),
        int(m.group(4)),
        int(m.group(5)),
        int(m.group(6)),
    )


def write_summary(
    out_dir: str | Path,
    curves: list[TrainCurve],
    evals: list[EvalSummary],
) -> list[Path]:
    """Write summary.tsv and figures into out_dir; returns written paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    tsv = out / "summary.tsv"
    with open(tsv, "w", encoding="utf-8") as fh:
        fh.write("label\tepochs\tfinal_loss\twer\tcer\tsub\tins\tdel\tref_tokens\n")
        by_label: dict[str, dict] = {}
        for c in curves:
            by_label.setdefault(c.label, {})["curve"] = c
        for e in evals:
            by_label.setdefault(e.label, {})["eval"] = e
        for label in sorted(by_label):
            c = by_label[label].get("curve")
            e = by_label[label].get("eval")
            row = [
                label,
                str(len(c.epochs)) if c else "",
                f"{c.losses[-1]:.6f}" if c else "",
                f"{e.wer:.2f}" if e else "",
                f"{e.cer:.2f}" if e else "",
                str(e.substitutions) if e else "",
                str(e.insertions) if e else "",
                str(e.deletions) if e else "",
                str(e.ref_tokens) if e else "",
            ]
            fh.write("\t".join(row) + "\n")
    written.append(tsv)

    if curves:
        fig, ax = plt.subplots(figsize=(7, 4.5))
        for c in curves:
            ax.plot(c.epochs, c.losses, marker="o", markersize=3, label=c.label)
        ax.set_xlabel("epoch")
        ax.set_ylabel("mean training loss")
        ax.set_title("Training loss")
        ax.legend()
        ax.grid(True, alpha=0.3)
        fig.tight_layout()
        path = out / "loss_curves.png"
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)

    if evals:
        fig, ax = plt.subplots(figsize=(7, 4.5))
        labels = [e.label for e in evals]
        xs = range(len(evals))
        width = 0.38
        ax.bar([x - width / 2 for x in xs], [e.wer for e in evals], width, label="WER %")
        ax.bar([x + width / 2 for x in xs], [e.cer for e in evals], width, label="CER %")
        ax.set_xticks(list(xs))
        ax.set_xticklabels(labels, rotation=20, ha="right")
        ax.set_ylabel("percent")
        ax.set_title("Error rates")
        ax.legend()
        ax.grid(True, axis="y", alpha=0.3)
        fig.tight_layout()
        path = out / "error_rates.png"
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)

    return written
