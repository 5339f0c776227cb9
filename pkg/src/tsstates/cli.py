"""Command-line interface: detect, eval, bench, and plot subcommands."""

from __future__ import annotations

import csv
import io as _io
import json
import sys
import time
from pathlib import Path

import click
import numpy as np

from .config import RunConfig, load_config
from .core import RngSeed, Segmentation, StateSequence, TimeSeries, TsError
from .io import AnnotationMismatch, load_annotation, load_manifest, load_series
from .metrics import ami, covering
from .plotting import render_svg
from .statedetect import ClapResult, clap

BENCH_HEADER = ["name", "covering", "ami", "num_states_pred", "num_states_true",
                "runtime_s", "status"]


def _common_options(fn):
    fn = click.option("--seed", type=int, default=None, help="Root RNG seed.")(fn)
    fn = click.option("--config", "config_path", type=click.Path(exists=True),
                      default=None, help="key=value config file.")(fn)
    fn = click.option("--output", "output_path", type=click.Path(), default=None,
                      help="Write the report here instead of stdout.")(fn)
    fn = click.option("--format", "output_format", type=click.Choice(["json", "csv"]),
                      default=None, help="Report format.")(fn)
    return fn


def _build_config(config_path, seed, output_format) -> RunConfig:
    return load_config(config_path, overrides={"seed": seed,
                                               "output_format": output_format})


def _emit(text: str, output_path):
    if output_path:
        Path(output_path).write_text(text)
    else:
        click.echo(text, nl=False)


def _fail(kind: str, message: str, output_path):
    _emit(json.dumps({"error": {"kind": kind, "message": message}}, indent=2) + "\n",
          output_path)
    sys.exit(1)


def _dataset_seed(config: RunConfig, name: str) -> RngSeed:
    return RngSeed(config.seed).stream("dataset", name).integers(0, 2**63).item()


def _run_clap(ts: TimeSeries, config: RunConfig, seed: int | None = None) -> ClapResult:
    return clap(ts, RngSeed(config.seed if seed is None else seed),
                num_kernels=config.kernel_count,
                folds=config.folds,
                max_samples=config.max_samples,
                suss_threshold=config.suss_threshold,
                validation_threshold=config.validation_threshold,
                min_seg_factor=config.min_seg_factor,
                confusion_mode=config.confusion_mode)


def _rle(states: np.ndarray) -> list:
    runs = []
    start = 0
    for i in range(1, len(states) + 1):
        if i == len(states) or states[i] != states[start]:
            runs.append([int(states[start]), i - start])
            start = i
    return runs


def _detect_report(ts: TimeSeries, result: ClapResult, elapsed: float) -> dict:
    return {
        "name": ts.name,
        "window_width": result.profile.width,
        "change_points": list(result.segmentation.cps),
        "num_states": result.num_states,
        "state_sequence": _rle(result.states.states),
        "profile_score": result.profile.score,
        "merge_trace": [
            {"kept": s.kept, "absorbed": s.absorbed,
             "cgain_before": s.cgain_before, "cgain_after": s.cgain_after}
            for s in result.trace
        ],
        "wall_time_seconds": elapsed,
    }


@click.group()
def main():
    """Annotate time series with latent process-state labels."""


@main.command()
@click.argument("input_path", type=click.Path())
@_common_options
def detect(input_path, seed, config_path, output_path, output_format):
    """Detect states in a series and write a JSON report."""
    try:
        config = _build_config(config_path, seed, output_format)
        ts = load_series(input_path)
    except FileNotFoundError as exc:
        _fail("io", str(exc), output_path)
    except TsError as exc:
        _fail(type(exc).__name__, str(exc), output_path)
    try:
        start = time.perf_counter()
        result = _run_clap(ts, config)
        report = _detect_report(ts, result, time.perf_counter() - start)
    except TsError as exc:
        _fail(type(exc).__name__, str(exc), output_path)
    _emit(json.dumps(report, indent=2) + "\n", output_path)


def _score_one(series_path, annotation_path, config: RunConfig, seed=None):
    ts = load_series(series_path)
    true_segs, seg_labels = load_annotation(annotation_path, ts.n)
    start = time.perf_counter()
    result = _run_clap(ts, config, seed=seed)
    elapsed = time.perf_counter() - start
    true_states = np.empty(ts.n, dtype=np.int64)
    for (s, e), label in zip(true_segs.segments(), seg_labels):
        true_states[s:e] = label
    return {
        "name": ts.name,
        "covering": covering(true_segs, result.segmentation),
        "ami": ami(StateSequence(states=true_states), result.states),
        "num_states_pred": result.num_states,
        "num_states_true": int(len(np.unique(seg_labels))),
        "runtime_s": elapsed,
        "status": "ok",
    }


def _csv_text(rows: list) -> str:
    buf = _io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=BENCH_HEADER, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        out = dict(row)
        for key in ("covering", "ami", "runtime_s"):
            if isinstance(out.get(key), float):
                out[key] = f"{out[key]:.6f}"
        writer.writerow(out)
    return buf.getvalue()


@main.command(name="eval")
@click.argument("input_path", type=click.Path())
@click.argument("annotation_path", type=click.Path())
@_common_options
def eval_cmd(input_path, annotation_path, seed, config_path, output_path, output_format):
    """Score a detection against a ground-truth annotation."""
    try:
        config = _build_config(config_path, seed, output_format)
        row = _score_one(input_path, annotation_path, config)
    except FileNotFoundError as exc:
        _fail("io", str(exc), output_path)
    except TsError as exc:
        _fail(type(exc).__name__, str(exc), output_path)
    if config.output_format == "csv":
        _emit(_csv_text([row]), output_path)
    else:
        _emit(json.dumps(row, indent=2) + "\n", output_path)


@main.command()
@click.argument("manifest_path", type=click.Path())
@_common_options
def bench(manifest_path, seed, config_path, output_path, output_format):
    """Score every dataset in a manifest; failures become error rows."""
    try:
        config = _build_config(config_path, seed, output_format)
        records = load_manifest(manifest_path)
    except FileNotFoundError as exc:
        _fail("io", str(exc), output_path)
    except TsError as exc:
        _fail(type(exc).__name__, str(exc), output_path)
    rows = []
    for series_path, annotation_path in records:
        name = Path(series_path).stem
        try:
            row = _score_one(series_path, annotation_path, config,
                             seed=_dataset_seed(config, name))
        except (TsError, OSError) as exc:
            row = {"name": name, "covering": "", "ami": "", "num_states_pred": "",
                   "num_states_true": "", "runtime_s": "",
                   "status": f"error:{type(exc).__name__}"}
        rows.append(row)
    scored = [r for r in rows if r["status"] == "ok"]
    for stat, reducer in (("mean", np.mean), ("std", np.std)):
        summary = {"name": stat, "num_states_pred": "", "num_states_true": "",
                   "status": "summary"}
        for key in ("covering", "ami", "runtime_s"):
            summary[key] = float(reducer([r[key] for r in scored])) if scored else ""
        rows.append(summary)
    if config.output_format == "json":
        _emit(json.dumps(rows, indent=2) + "\n", output_path)
    else:
        _emit(_csv_text(rows), output_path)


@main.command()
@click.argument("input_path", type=click.Path())
@click.argument("report_path", type=click.Path())
@click.option("--output", "output_path", type=click.Path(), required=True,
              help="Destination SVG file.")
def plot(input_path, report_path, output_path):
    """Render a series, its change points, and state sequence as SVG."""
    try:
        ts = load_series(input_path)
        report = json.loads(Path(report_path).read_text())
        states = np.concatenate([
            np.full(length, label, dtype=np.int64)
            for label, length in report["state_sequence"]
        ])
        svg = render_svg(ts, StateSequence(states=states), report["change_points"])
    except FileNotFoundError as exc:
        _fail("io", str(exc), output_path=None)
    except TsError as exc:
        _fail(type(exc).__name__, str(exc), output_path=None)
    Path(output_path).write_text(svg)


if __name__ == "__main__":
    main()
