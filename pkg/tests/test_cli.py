from __future__ import annotations

import csv
import json
from pathlib import Path

import pytest

from gazepath.cli import main
from gazepath.config import load_config


def _write_config(tmp_path: Path, **overrides) -> Path:
    params = {
        "participants": 6,
        "methods_per_participant": 3,
        "method_count": 8,
        "script_len": 4,
        "noise": 0.0,
    }
    params.update(overrides)
    cfg = tmp_path / "exp.ini"
    cfg.write_text(
        f"""[paths]
corpus = {tmp_path / 'methods.jsonl'}
gaze = {tmp_path / 'gaze.jsonl'}
output = {tmp_path / 'out'}

[synth]
participants = {params['participants']}
methods_per_participant = {params['methods_per_participant']}
method_count = {params['method_count']}
script_len = {params['script_len']}
noise_sd_norm = {params['noise']}
seed = 9
""",
        encoding="utf-8",
    )
    return cfg


def _run(cfg: Path, *argv: str, jobs: int = 1) -> int:
    return main(["--config", str(cfg), "--jobs", str(jobs), *argv])


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory):
    tmp_path = tmp_path_factory.mktemp("pipeline")
    cfg = _write_config(tmp_path)
    assert _run(cfg, "synth", "--gen-methods") == 0
    assert _run(cfg, "fixations") == 0
    assert _run(cfg, "scanpaths") == 0
    assert _run(cfg, "splits") == 0
    assert _run(cfg, "predict", "--baseline", "name_first") == 0
    out = tmp_path / "out"
    assert (
        _run(
            cfg,
            "score",
            "--predictions",
            f"participant_holdout={out / 'predictions_participant_holdout_name_first.jsonl'}",
            "--predictions",
            f"method_holdout={out / 'predictions_method_holdout_name_first.jsonl'}",
        )
        == 0
    )
    return tmp_path


def test_synth_produces_all_trials(pipeline):
    lines = (pipeline / "gaze.jsonl").read_text().strip().splitlines()
    trials = {tuple(json.loads(l).get(k) for k in ("participant_id", "method_id")) for l in lines[1:]}
    assert len(trials) == 6 * 3


def test_fixations_output_nonempty(pipeline):
    lines = (pipeline / "out" / "fixations.jsonl").read_text().strip().splitlines()
    assert len(lines) > 18  # header + >=1 fixation per trial
    log = json.loads((pipeline / "out" / "fixations_log.json").read_text())
    assert log["trials"] == 18
    assert log["empty_trials"] == 0


def test_scanpaths_cover_all_trials(pipeline):
    lines = (pipeline / "out" / "scanpaths.jsonl").read_text().strip().splitlines()
    assert len(lines) == 18
    recs = [json.loads(l) for l in lines]
    keys = [(r["participant_id"], r["method_id"]) for r in recs]
    assert keys == sorted(keys)
    assert all(r["words"] for r in recs)


def test_split_counts(pipeline):
    p_dir = pipeline / "out" / "splits" / "participant_holdout"
    m_dir = pipeline / "out" / "splits" / "method_holdout"
    p_index = json.loads((p_dir / "index.json").read_text())
    m_index = json.loads((m_dir / "index.json").read_text())
    assert len(p_index["test_ids"]) == 6
    assert len(m_index["test_ids"]) == 8
    manifest = json.loads((p_dir / p_index["test_ids"][0] / "manifest.json").read_text())
    assert len(manifest["train_ids"]) == 5


def test_report_grid_shape(pipeline):
    with (pipeline / "out" / "report.csv").open() as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    assert [r[0] for r in body] == ["method_holdout", "participant_holdout"]
    for n in (1, 2, 3, 4):
        assert f"levenshtein_n{n}" in header
        assert f"gestalt_n{n}" in header


def test_histogram_partition(pipeline):
    with (pipeline / "out" / "scores.csv").open() as fh:
        n_scores = sum(
            1 for row in csv.DictReader(fh) if row["experiment"] == "participant_holdout" and row["n"] == "1"
        )
    with (pipeline / "out" / "histogram_participant_holdout_n1.csv").open() as fh:
        counts = [int(r["count"]) for r in csv.DictReader(fh)]
    assert sum(counts) == n_scores


def test_self_scoring_reference_is_perfect(pipeline):
    # Build predictions equal to the references at each n and rescore.
    out = pipeline / "out"
    refs = [json.loads(l) for l in (out / "scanpaths.jsonl").read_text().splitlines()]
    pred_path = pipeline / "self_predictions.jsonl"
    with pred_path.open("w") as fh:
        for r in refs:
            for n in (1, 2, 3, 4):
                fh.write(
                    json.dumps(
                        {
                            "participant_id": r["participant_id"],
                            "method_id": r["method_id"],
                            "n": n,
                            "words": r["words"][:n],
                        }
                    )
                    + "\n"
                )
    cfg = pipeline / "exp.ini"
    assert _run(cfg, "score", "--predictions", f"participant_holdout={pred_path}") == 0
    with (out / "report.csv").open() as fh:
        rows = list(csv.DictReader(fh))
    for row in rows:
        for n in (1, 2, 3, 4):
            assert float(row[f"levenshtein_n{n}"]) == 1.0
            assert float(row[f"gestalt_n{n}"]) == 1.0
    # Self-scored references land entirely in the exact-1.0 histogram bin.
    with (out / "histogram_participant_holdout_n1.csv").open() as fh:
        for r in csv.DictReader(fh):
            if (r["bin_low"], r["bin_high"]) == ("1.0", "1.0"):
                assert int(r["count"]) == len(refs)
            else:
                assert int(r["count"]) == 0


def test_score_completions_with_manifest(pipeline):
    # KIND=PATH@MANIFEST pairs a raw completions file with a split manifest.
    out = pipeline / "out"
    index = json.loads((out / "splits" / "participant_holdout" / "index.json").read_text())
    split_dir = out / "splits" / "participant_holdout" / index["test_ids"][0]
    manifest = json.loads((split_dir / "manifest.json").read_text())
    refs = {
        (r["participant_id"], r["method_id"]): r["words"]
        for r in map(json.loads, (out / "scanpaths.jsonl").read_text().splitlines())
    }
    completions = pipeline / "manifest_completions.txt"
    completions.write_text(
        "".join(f"<s> {' '.join(refs[(p, m)])} </s>\n" for p, m in manifest["test"])
    )
    cfg = pipeline / "exp.ini"
    assert (
        _run(
            cfg,
            "score",
            "--predictions",
            f"participant_holdout={completions}@{split_dir / 'manifest.json'}",
        )
        == 0
    )
    with (pipeline / "out" / "scores.csv").open() as fh:
        rows = list(csv.DictReader(fh))
    assert rows and all(float(r["levenshtein"]) == 1.0 for r in rows)


def test_rerun_is_byte_identical(tmp_path):
    cfg = _write_config(tmp_path, participants=3, method_count=5, methods_per_participant=2)
    snapshots = []
    for _ in range(2):
        assert _run(cfg, "synth", "--gen-methods") == 0
        assert _run(cfg, "fixations") == 0
        assert _run(cfg, "scanpaths") == 0
        snapshots.append(
            (
                (tmp_path / "gaze.jsonl").read_bytes(),
                (tmp_path / "out" / "fixations.jsonl").read_bytes(),
                (tmp_path / "out" / "scanpaths.jsonl").read_bytes(),
            )
        )
    assert snapshots[0] == snapshots[1]


def test_empty_gaze_file_warns_not_fails(tmp_path, caplog):
    cfg = _write_config(tmp_path)
    gaze = tmp_path / "gaze.jsonl"
    gaze.write_text(
        json.dumps(
            {
                "header": {
                    "sampling_rate_hz": 60.0,
                    "screen": load_config(cfg).screen.to_dict(),
                }
            }
        )
        + "\n"
    )
    assert _run(cfg, "fixations") == 0


def test_missing_input_fails(tmp_path):
    cfg = _write_config(tmp_path)
    assert _run(cfg, "fixations") == 1


def test_score_without_predictions_fails(tmp_path):
    cfg = _write_config(tmp_path)
    assert _run(cfg, "score") == 1
