"""Command-line pipeline orchestration.

Subcommands compose the library end to end: `synth` renders a synthetic
study, `fixations` and `scanpaths` process gaze into words, `splits`
emits the leave-one-out datasets and prompt files, `predict` runs the
baselines, and `score` produces the scores, report, and histogram CSVs.
Every subcommand is deterministic given its config and inputs; warnings
go to stderr and only errors set a nonzero exit status.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

from . import dataset, files, metrics, predictors, synth
from .config import ExperimentConfig, load_config
from .fixation import FilterConfig, detect_fixations
from .gaze_ingest import (
    GazeFileHeader,
    GazeStream,
    ScreenGeometry,
    load_gaze_file,
    validate_stream,
    write_gaze_file,
)
from .scanpath import Scanpath, extract_scanpath

log = logging.getLogger("gazepath")


def _pmap(fn, items: list, jobs: int) -> list:
    """Order-preserving map, optionally over a bounded process pool."""
    if jobs <= 1 or len(items) < 2:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (jobs * 4))))


def _detect_trial(args: Tuple[GazeStream, FilterConfig, ScreenGeometry]):
    stream, cfg, geom = args
    return (stream.key, detect_fixations(stream, cfg, geom))


def cmd_synth(cfg: ExperimentConfig, args: argparse.Namespace) -> int:
    sc = cfg.synth_corpus
    synth_cfg = sc.synth
    if args.seed is not None:
        from dataclasses import replace

        synth_cfg = replace(synth_cfg, seed=args.seed)
    if args.gen_methods or not cfg.corpus_path.exists():
        sources = synth.demo_method_sources(sc.method_count, seed=synth_cfg.seed + 7)
        cfg.corpus_path.parent.mkdir(parents=True, exist_ok=True)
        files.write_method_corpus(cfg.corpus_path, sources)
        log.info("wrote %d demo methods to %s", len(sources), cfg.corpus_path)
    sources = files.read_method_corpus(cfg.corpus_path)
    layouts = files.build_layouts(sources, cfg.pane)
    method_ids = sorted(layouts)
    rng = np.random.default_rng(synth_cfg.seed)
    streams: List[GazeStream] = []
    for p in range(sc.participants):
        participant_id = f"p{p:03d}"
        chosen = sorted(
            rng.choice(method_ids, size=min(sc.methods_per_participant, len(method_ids)), replace=False)
        )
        for method_id in chosen:
            layout = layouts[method_id]
            script = synth.random_script(layout, sc.script_len, rng, cfg.screen)
            trial_cfg = synth.SynthConfig(
                sampling_rate_hz=synth_cfg.sampling_rate_hz,
                dwell_ms_per_token=synth_cfg.dwell_ms_per_token,
                saccade_ms=synth_cfg.saccade_ms,
                noise_sd_norm=synth_cfg.noise_sd_norm,
                seed=int(rng.integers(0, 2**31 - 1)),
            )
            streams.append(
                synth.generate(layout, script, trial_cfg, cfg.screen, participant_id=participant_id)
            )
    cfg.gaze_path.parent.mkdir(parents=True, exist_ok=True)
    header = GazeFileHeader(sampling_rate_hz=synth_cfg.sampling_rate_hz, screen=cfg.screen)
    write_gaze_file(cfg.gaze_path, header, streams)
    log.info("wrote %d trials to %s", len(streams), cfg.gaze_path)
    return 0


def cmd_fixations(cfg: ExperimentConfig, args: argparse.Namespace) -> int:
    header, streams = load_gaze_file(cfg.gaze_path)
    warning_count = 0
    for stream in streams:
        for w in validate_stream(stream):
            log.warning(w)
            warning_count += 1
    streams = sorted(streams, key=lambda s: s.key)
    results = _pmap(_detect_trial, [(s, cfg.filter, cfg.screen) for s in streams], args.jobs)
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    out_path = cfg.output_dir / "fixations.jsonl"
    files.write_fixations(out_path, header, results)
    empty_trials = sum(1 for _, fx in results if not fx)
    (cfg.output_dir / "fixations_log.json").write_text(
        json.dumps(
            {
                "trials": len(streams),
                "fixations": sum(len(fx) for _, fx in results),
                "empty_trials": empty_trials,
                "stream_warnings": warning_count,
            },
            indent=2,
            sort_keys=True,
        )
        + "\n",
        encoding="utf-8",
    )
    if not streams:
        log.warning("gaze file %s contains no trials", cfg.gaze_path)
    log.info("wrote fixations for %d trials to %s", len(streams), out_path)
    return 0


def _extract_trial(args) -> Scanpath:
    (participant_id, _method_id), fixations, layout, geom, tolerance = args
    return extract_scanpath(fixations, layout, geom, participant_id, tolerance)


def cmd_scanpaths(cfg: ExperimentConfig, args: argparse.Namespace) -> int:
    header, trials = files.read_fixations(cfg.output_dir / "fixations.jsonl")
    layouts = files.build_layouts(files.read_method_corpus(cfg.corpus_path), cfg.pane)
    work = []
    for key in sorted(trials):
        if key[1] not in layouts:
            raise ValueError(f"fixation trial references unknown method_id {key[1]!r}")
        work.append((key, trials[key], layouts[key[1]], header.screen, cfg.tolerance_deg))
    scanpaths = _pmap(_extract_trial, work, args.jobs)
    kept = [sp for sp in scanpaths if sp.words]
    dropped = len(scanpaths) - len(kept)
    if dropped:
        log.warning("excluded %d trials with no mappable fixations", dropped)
    out_path = cfg.output_dir / "scanpaths.jsonl"
    files.write_scanpaths(out_path, kept)
    log.info("wrote %d scanpaths to %s", len(kept), out_path)
    return 0


def _load_corpus(cfg: ExperimentConfig) -> dataset.Corpus:
    layouts = files.build_layouts(files.read_method_corpus(cfg.corpus_path), cfg.pane)
    scanpaths = files.read_scanpaths(cfg.output_dir / "scanpaths.jsonl")
    return dataset.Corpus(layouts=layouts, scanpaths=scanpaths)


def cmd_splits(cfg: ExperimentConfig, args: argparse.Namespace) -> int:
    corpus = _load_corpus(cfg)
    for kind in cfg.split_kinds:
        kind_dir = cfg.output_dir / "splits" / kind
        splits = dataset.make_splits(corpus, kind)
        index = []
        for split in splits:
            split_dir = kind_dir / split.test_id
            dataset.write_split(corpus, split, split_dir)
            index.append(split.test_id)
        kind_dir.mkdir(parents=True, exist_ok=True)
        (kind_dir / "index.json").write_text(
            json.dumps({"kind": kind, "test_ids": index}, indent=2) + "\n", encoding="utf-8"
        )
        log.info("wrote %d %s splits", len(splits), kind)
    return 0


def cmd_predict(cfg: ExperimentConfig, args: argparse.Namespace) -> int:
    corpus = _load_corpus(cfg)
    scan_by_key = {(sp.participant_id, sp.method_id): sp for sp in corpus.scanpaths}
    for kind in cfg.split_kinds:
        kind_dir = cfg.output_dir / "splits" / kind
        index = json.loads((kind_dir / "index.json").read_text(encoding="utf-8"))
        records: List[predictors.PredictionRecord] = []
        for test_id in index["test_ids"]:
            manifest = json.loads(
                (kind_dir / test_id / "manifest.json").read_text(encoding="utf-8")
            )
            model = None
            if args.baseline == "markov":
                train_paths = [
                    scan_by_key[(p, m)]
                    for p, m in manifest["train"]
                    if (p, m) in scan_by_key
                ]
                model = predictors.markov_train(train_paths, corpus.layouts)
            for participant_id, method_id in manifest["test"]:
                layout = corpus.layouts[method_id]
                for n in cfg.n_values:
                    if args.baseline == "reading_order":
                        words = predictors.reading_order_predict(layout, n)
                    elif args.baseline == "name_first":
                        words = predictors.name_first_predict(layout, n)
                    else:
                        words = predictors.markov_predict(model, layout, n)
                    records.append(
                        predictors.PredictionRecord(
                            participant_id=participant_id,
                            method_id=method_id,
                            n=n,
                            words=tuple(words[:n]),
                            source=args.baseline,
                        )
                    )
        records.sort(key=lambda r: (r.participant_id, r.method_id, r.n))
        out_path = cfg.output_dir / f"predictions_{kind}_{args.baseline}.jsonl"
        files.write_predictions(out_path, records)
        log.info("wrote %d predictions to %s", len(records), out_path)
    return 0


def _fmt(v: float) -> str:
    return f"{v:.6f}"


def cmd_score(cfg: ExperimentConfig, args: argparse.Namespace) -> int:
    corpus = _load_corpus(cfg)
    ref_by_key = {(sp.participant_id, sp.method_id): sp for sp in corpus.scanpaths}
    prediction_files: Dict[str, Tuple[Path, Optional[Path]]] = {}
    for spec in args.predictions:
        kind, _, path = spec.partition("=")
        if not path:
            raise ValueError(f"--predictions expects KIND=PATH[@MANIFEST], got {spec!r}")
        raw_path, _, manifest = path.partition("@")
        prediction_files[kind] = (Path(raw_path), Path(manifest) if manifest else None)
    if not prediction_files:
        raise ValueError("no prediction files given")

    scores_by_experiment: Dict[str, List[metrics.ScorePair]] = {}
    rows = []
    for kind in sorted(prediction_files):
        pred_path, manifest_path = prediction_files[kind]
        records = predictors.load_external_predictions(
            pred_path, corpus, manifest_path=manifest_path
        )
        if not records:
            raise ValueError(f"prediction file {pred_path} is empty")
        pairs: List[metrics.ScorePair] = []
        for rec in sorted(records, key=lambda r: (r.participant_id, r.method_id, r.n)):
            ref = ref_by_key.get((rec.participant_id, rec.method_id))
            if ref is None:
                raise ValueError(
                    f"prediction for unknown trial {(rec.participant_id, rec.method_id)}"
                )
            pair = metrics.score(
                list(rec.words),
                list(ref.words),
                rec.n,
                participant_id=rec.participant_id,
                method_id=rec.method_id,
            )
            pairs.append(pair)
            kind_id = (
                rec.participant_id if kind == dataset.PARTICIPANT_HOLDOUT else rec.method_id
            )
            rows.append(
                [
                    kind,
                    kind_id,
                    rec.participant_id,
                    rec.method_id,
                    rec.n,
                    _fmt(pair.levenshtein),
                    _fmt(pair.gestalt),
                ]
            )
        scores_by_experiment[kind] = pairs

    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    with (cfg.output_dir / "scores.csv").open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["experiment", "kind_id", "participant_id", "method_id", "n", "levenshtein", "gestalt"]
        )
        writer.writerows(rows)

    report_rows = metrics.aggregate(scores_by_experiment)
    ns = sorted({r.n for r in report_rows}) or cfg.n_values
    with (cfg.output_dir / "report.csv").open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        header = (
            ["experiment"]
            + [f"levenshtein_n{n}" for n in ns]
            + [f"gestalt_n{n}" for n in ns]
            + [f"count_n{n}" for n in ns]
        )
        writer.writerow(header)
        for experiment in sorted(scores_by_experiment):
            by_n = {r.n: r for r in report_rows if r.experiment == experiment}
            writer.writerow(
                [experiment]
                + [_fmt(by_n[n].mean_levenshtein) if n in by_n else "" for n in ns]
                + [_fmt(by_n[n].mean_gestalt) if n in by_n else "" for n in ns]
                + [by_n[n].count if n in by_n else 0 for n in ns]
            )

    for experiment, pairs in sorted(scores_by_experiment.items()):
        for n in ns:
            values = [p.levenshtein for p in pairs if p.n == n]
            if not values:
                continue
            bins = metrics.histogram(values)
            hist_path = cfg.output_dir / f"histogram_{experiment}_n{n}.csv"
            with hist_path.open("w", encoding="utf-8", newline="") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(["bin_low", "bin_high", "count"])
                for low, high, count in bins:
                    writer.writerow([low, high, count])
    log.info("wrote scores, report, and histograms to %s", cfg.output_dir)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gazepath", description=__doc__)
    parser.add_argument("--config", default=None, help="experiment INI config file")
    parser.add_argument("--jobs", type=int, default=1, help="worker processes for per-trial work")
    parser.add_argument("--seed", type=int, default=None, help="override the synth seed")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p_synth = sub.add_parser("synth", help="generate a synthetic gaze study")
    p_synth.add_argument("--gen-methods", action="store_true", help="regenerate the demo method corpus")
    p_synth.set_defaults(fn=cmd_synth)

    sub.add_parser("fixations", help="gaze JSONL -> fixation JSONL").set_defaults(fn=cmd_fixations)
    sub.add_parser("scanpaths", help="fixations -> scanpath JSONL").set_defaults(fn=cmd_scanpaths)
    sub.add_parser("splits", help="emit leave-one-out datasets and prompts").set_defaults(fn=cmd_splits)

    p_predict = sub.add_parser("predict", help="run a baseline over the split test sets")
    p_predict.add_argument(
        "--baseline",
        choices=["reading_order", "name_first", "markov"],
        default="reading_order",
    )
    p_predict.set_defaults(fn=cmd_predict)

    p_score = sub.add_parser("score", help="score predictions and write reports")
    p_score.add_argument(
        "--predictions",
        action="append",
        default=[],
        metavar="KIND=PATH",
        help="prediction JSONL per experiment kind; repeatable",
    )
    p_score.set_defaults(fn=cmd_score)
    return parser


def main(argv: List[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        cfg = load_config(args.config)
        return args.fn(cfg, args)
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        log.error("%s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
