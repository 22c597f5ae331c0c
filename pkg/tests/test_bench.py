import json
import statistics

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rpreg.bench import cli
from rpreg.bench.experiment import (
    CSV_HEADER,
    ExperimentConfig,
    _best_time,
    baseline_entropy,
    cell_summaries,
    format_speedup_table,
    prepare_dataset,
    rows_to_csv,
    run_experiment,
    speedup_table,
)
from rpreg.bench.stats import box_stats, tukey_hinges
from rpreg.entropy import EstimatorSpec
from rpreg.errors import ChannelUnavailableError, ConfigError, DatasetError, EmptyInputError
from rpreg.features import FeatureSet


# box statistics

def test_box_constant():
    b = box_stats([2.5] * 7)
    assert (b.q1, b.q2, b.q3, b.whisker_lo, b.whisker_hi, b.outliers) == (2.5, 2.5, 2.5, 2.5, 2.5, ())


def test_box_one_to_nine():
    b = box_stats(range(1, 10))
    assert (b.q1, b.q2, b.q3) == (3.0, 5.0, 7.0)
    assert b.outliers == () and (b.whisker_lo, b.whisker_hi) == (1.0, 9.0)


def test_box_median_inclusive_halves_small_sample():
    # halves {1,2,3} and {3,4,100}; fence 4 + 1.5 * 2 = 7
    b = box_stats([1, 2, 3, 4, 100])
    assert (b.q1, b.q2, b.q3) == (2.0, 3.0, 4.0)
    assert b.outliers == (100.0,) and b.whisker_hi == 4.0


def test_box_even_count():
    # halves {1,2,3} and {4,5,6}
    assert tukey_hinges([6, 1, 5, 2, 4, 3]) == (2.0, 3.5, 5.0)


def test_box_empty():
    with pytest.raises(EmptyInputError):
        box_stats([])


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=1, max_size=60))
def test_box_against_reference(values):
    v = sorted(values)
    n = len(v)
    half = (n + 1) // 2
    q1, q3 = statistics.median(v[:half]), statistics.median(v[n - half:])
    b = box_stats(values)
    assert b.q1 == pytest.approx(q1) and b.q3 == pytest.approx(q3)
    assert b.q2 == pytest.approx(statistics.median(v))
    iqr = b.q3 - b.q1
    for x in values:
        outside = x < b.q1 - 1.5 * iqr or x > b.q3 + 1.5 * iqr
        assert (x in b.outliers) == outside
    inside = [x for x in values if x not in b.outliers]
    assert (b.whisker_lo, b.whisker_hi) == (min(inside), max(inside))
    assert b.whisker_lo <= b.q1 <= b.q2 <= b.q3 <= b.whisker_hi


# datasets

def test_lena_style_needs_colour(fixture_paths):
    cfg = ExperimentConfig(ref_path=str(fixture_paths["texture_gray"]))
    with pytest.raises(ChannelUnavailableError):
        prepare_dataset(cfg)


def test_mandrill_style_constant_image(tmp_path):
    from PIL import Image

    Image.fromarray(np.full((20, 20), 90, dtype=np.uint8)).save(tmp_path / "c.png")
    ref, test = prepare_dataset(ExperimentConfig(dataset="mandrill_style", ref_path=str(tmp_path / "c.png")))
    assert np.all(test.data == 0.0)
    # every angle degenerates, so the cell fails but is still reported
    cfg = ExperimentConfig(dataset="mandrill_style", ref_path=str(tmp_path / "c.png"), h_set=[1],
                           d_set=[2], G_set=[20], runs=1, angles="-1:1:1")
    rows = run_experiment(cfg)
    assert len(rows) == 1 and rows[0]["flags"].startswith("failed:")


def test_custom_identity_pairing(fixture_paths):
    p = str(fixture_paths["texture_gray"])
    ref, test = prepare_dataset(ExperimentConfig(dataset="custom", ref_path=p, test_path=p))
    assert ref == test


def test_dataset_errors(tmp_path):
    with pytest.raises(DatasetError):
        prepare_dataset(ExperimentConfig(ref_path=None))
    with pytest.raises(DatasetError):
        prepare_dataset(ExperimentConfig(ref_path=str(tmp_path / "missing.png")))


def test_config_validation():
    with pytest.raises(ConfigError):
        ExperimentConfig(ref_path="x", estimators=["nope"]).validate()
    with pytest.raises(ConfigError):
        ExperimentConfig(ref_path="x", runs=0).validate()
    with pytest.raises(ConfigError):
        ExperimentConfig(ref_path="x", alpha=1.0).validate()
    with pytest.raises(ConfigError):
        ExperimentConfig(ref_path="x", angles="3:1:1").validate()


# experiments

def _small(fixture_paths, **kw):
    base = dict(ref_path=str(fixture_paths["texture_rgb"]), h_set=[1], d_set=[2], G_set=[50], runs=1,
                angles="-1:1:0.5", max_samples=2000, record_timing=False)
    base.update(kw)
    return ExperimentConfig(**base)


def test_one_cell_one_row(fixture_paths):
    rows = run_experiment(_small(fixture_paths))
    assert len(rows) == 1
    assert tuple(rows[0]) == CSV_HEADER
    assert rows_to_csv(rows).count("\n") == 2


def test_row_count_matches_lattice(fixture_paths):
    cfg = _small(fixture_paths, estimators=["knn_k", "mst"], d_set=[1, 2], runs=2)
    rows = run_experiment(cfg)
    assert len(rows) == 2 * 1 * 2 * 1 * 2
    assert [(r["estimator"], r["d"], r["run"]) for r in rows] == [
        (e, str(d), str(r)) for e in ("knn_k", "mst") for d in (1, 2) for r in range(2)
    ]


def test_same_seed_same_table(fixture_paths):
    a = rows_to_csv(run_experiment(_small(fixture_paths, runs=2)))
    b = rows_to_csv(run_experiment(_small(fixture_paths, runs=2)))
    assert a == b
    c = rows_to_csv(run_experiment(_small(fixture_paths, runs=2, master_seed=1)))
    assert a != c


def test_resume_is_byte_identical(fixture_paths, tmp_path):
    out = tmp_path / "table.csv"
    cfg = _small(fixture_paths, runs=3, output_path=str(out))
    run_experiment(cfg)
    full = out.read_bytes()
    lines = full.decode().splitlines(keepends=True)
    out.write_text("".join(lines[:2]))
    run_experiment(cfg, resume=True)
    assert out.read_bytes() == full


def test_json_emission(fixture_paths, tmp_path):
    out = tmp_path / "t.json"
    run_experiment(_small(fixture_paths, runs=2, output_path=str(out), emit="json"))
    doc = json.loads(out.read_text())
    assert len(doc["records"]) == 2
    assert len(doc["cells"]) == 1 and doc["cells"][0]["runs"] == 2
    assert cell_summaries(doc["records"]) == doc["cells"]


@pytest.mark.slow
def test_desk_scale_lattice(fixture_paths):
    cfg = ExperimentConfig(ref_path=str(fixture_paths["texture_rgb"]), h_set=[1, 3], d_set=[2, 5],
                           G_set=[50, 100], runs=1, record_timing=False)
    rows = run_experiment(cfg)
    assert len(rows) == 8
    assert not any(r["flags"].startswith("failed") for r in rows)
    errs = [float(r["error_deg"]) for r in rows if r["d"] == "5"]
    assert all(e <= 1.0 for e in errs), errs


# speedup

def test_speedup_table_shape(fixture_paths):
    cfg = _small(fixture_paths, estimators=["knn_k", "kdp"], G_set=[50, 100])
    table = speedup_table(cfg, d_baseline=2)
    assert table["G"] == [50, 100]
    assert list(table["rows"]) == ["knn_k", "kdp"]
    assert all(len(r) == 2 and all(x > 0 for x in r) for r in table["rows"].values())
    text = format_speedup_table(table)
    assert text.splitlines()[0] == "estimator,G=50,G=100"


def test_self_comparison_ratio_near_one():
    X = FeatureSet(np.random.default_rng(0).normal(size=(2000, 4)))
    spec = EstimatorSpec()
    a = _best_time(lambda: baseline_entropy(X, spec), 5)
    b = _best_time(lambda: baseline_entropy(X, spec), 5)
    assert 0.5 < a / b < 2.0


# command line

def _cli(*args):
    return cli.main([str(a) for a in args])


def test_cli_register(fixture_paths, tmp_path, capsys):
    out = tmp_path / "r.json"
    code = _cli("register", "--ref", fixture_paths["texture_rgb"], "--angles=-1:1:1", "--h", 1,
                "--d", 2, "--G", 50, "--max-samples", 2000, "--emit", "json", "--out", out)
    assert code == 0
    doc = json.loads(out.read_text())
    assert len(doc["per_angle"]) == 3
    assert "theta_star=" in capsys.readouterr().out


def test_cli_register_norm(fixture_paths):
    assert _cli("register", "--dataset", "custom", "--ref", fixture_paths["texture_gray"],
                "--estimator", "l2", "--angles=-1:1:1", "--h", 1) == 0


def test_cli_bench_csv(fixture_paths, capsys):
    code = _cli("bench", "--ref", fixture_paths["texture_rgb"], "--angles=-1:1:1", "--h", "1",
                "--d", "1,2", "--G", "50", "--runs", 1, "--max-samples", 2000, "--no-timing")
    assert code == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == ",".join(CSV_HEADER) and len(lines) == 3


def test_cli_exit_codes(fixture_paths, tmp_path):
    with pytest.raises(SystemExit) as exc:
        _cli("bench", "--estimator")
    assert exc.value.code == 2
    assert _cli("bench", "--ref", fixture_paths["texture_rgb"], "--estimator", "bogus") == 2
    assert _cli("bench", "--ref", fixture_paths["texture_rgb"], "--runs", 0) == 2
    assert _cli("bench", "--ref", tmp_path / "missing.png") == 3
    assert _cli("bench", "--ref", fixture_paths["texture_gray"]) == 3
    # G beyond the sample count fails every angle of every cell
    assert _cli("bench", "--ref", fixture_paths["texture_rgb"], "--angles", "0", "--G", 100000,
                "--runs", 1, "--h", 1) == 4


def test_cli_speedup(fixture_paths, capsys):
    code = _cli("bench", "--ref", fixture_paths["texture_rgb"], "--speedup", 2, "--G", "50,100",
                "--estimator", "knn_k,mst", "--max-samples", 2000, "--h", 1)
    assert code == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "estimator,G=50,G=100" and len(lines) == 3
