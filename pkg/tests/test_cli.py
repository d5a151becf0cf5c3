import json

import pandas as pd
import pytest
import yaml
from click.testing import CliRunner

from bench import RAW_COLUMNS
from benchmark import cli
from datagen import read_csv
from scores import ORACLE
from utils.errors import PARTIAL_RUN_EXIT_CODE


@pytest.fixture
def runner():
    return CliRunner()


def _write_config(tmp_path, config_dict) -> str:
    config_dict = dict(config_dict, output_dir=str(tmp_path / "results"), log_dir=str(tmp_path / "logs"))
    path = tmp_path / "bench.yaml"
    path.write_text(yaml.safe_dump(config_dict))
    return str(path)


def test_generate_single_dataset(runner, tmp_path):
    out = tmp_path / "lin.csv"
    result = runner.invoke(cli, ["generate", "--family", "linear-heterogeneous", "--n", "100", "--d", "2",
                                 "--seed", "3", "--out", str(out)])
    assert result.exit_code == 0, result.output
    ds = read_csv(out)
    assert (ds.n, ds.d) == (100, 2)
    assert "Wrote 1 dataset(s)" in result.output


def test_generate_from_config(runner, tmp_path, small_config_dict):
    small_config_dict['seeds'] = [0, 1]
    config = _write_config(tmp_path, small_config_dict)
    result = runner.invoke(cli, ["generate", "--config", config, "--out-dir", str(tmp_path / "data")])
    assert result.exit_code == 0, result.output
    assert sorted(p.name for p in (tmp_path / "data").iterdir()) == ["lin_seed0.csv", "lin_seed1.csv"]


def test_generate_usage_errors(runner, tmp_path):
    assert runner.invoke(cli, ["generate"]).exit_code == 2
    assert runner.invoke(cli, ["generate", "--family", "linear-heterogeneous"]).exit_code == 2
    result = runner.invoke(cli, ["generate", "--family", "linear-heterogeneous", "--n", "5",
                                 "--out", str(tmp_path / "tiny.csv")])
    assert result.exit_code == 3
    assert "Error:" in result.output


def test_run_with_missing_config(runner, tmp_path):
    result = runner.invoke(cli, ["run", "--config", str(tmp_path / "missing.yaml")])
    assert result.exit_code == 2
    assert "Error:" in result.output


def test_run_with_invalid_config(runner, tmp_path, small_config_dict):
    small_config_dict['bank']['kinds'] = ["Q"]
    result = runner.invoke(cli, ["run", "--config", _write_config(tmp_path, small_config_dict)])
    assert result.exit_code == 2


@pytest.mark.slow
def test_run_writes_results(runner, tmp_path, small_config_dict):
    config = _write_config(tmp_path, small_config_dict)
    result = runner.invoke(cli, ["run", "--config", config, "--quiet"])
    assert result.exit_code in (0, PARTIAL_RUN_EXIT_CODE), result.output
    assert "Benchmark complete!" in result.output

    out = tmp_path / "results"
    report = json.loads((out / "report.json").read_text(encoding="utf-8"))
    assert len(report['meta']['config_hash']) == 64
    assert report['meta']['n_cells'] == 1
    raw = pd.read_csv(out / "raw_results.csv")
    assert list(raw.columns) == RAW_COLUMNS
    assert (tmp_path / "logs" / "cate_bench.db").is_file()


def test_aggregate_and_report(runner, tmp_path):
    rows = []
    for metric, values in ((ORACLE, [1.0, 2.0]), ("tau_t", [0.2, 0.1]), ("r_score", [0.1, 0.3])):
        for (label, kind), value in zip([("S|-|-", "S"), ("T|-|-", "T")], values):
            rows.append(["a", "g", 0, label, kind, metric, value, 20])
    raw_path = tmp_path / "raw_results.csv"
    pd.DataFrame(rows, columns=RAW_COLUMNS).to_csv(raw_path, index=False)

    result = runner.invoke(cli, ["aggregate", "--raw", str(raw_path), "--out", str(tmp_path / "out"),
                                 "--config-hash", "abc"])
    assert result.exit_code == 0, result.output
    report_path = tmp_path / "out" / "report.json"
    assert json.loads(report_path.read_text(encoding="utf-8"))['meta']['config_hash'] == "abc"

    result = runner.invoke(cli, ["report", "--report", str(report_path), "--table", "win_rate"])
    assert result.exit_code == 0, result.output
    assert "Win Rate" in result.output
    assert "Normalized Pehe" not in result.output

    result = runner.invoke(cli, ["report", "--report", str(report_path)])
    assert result.exit_code == 0
    assert "Top Frequency" in result.output


def test_aggregate_rejects_bad_raw_file(runner, tmp_path):
    raw_path = tmp_path / "raw.csv"
    raw_path.write_text("dataset,value\na,1\n")
    result = runner.invoke(cli, ["aggregate", "--raw", str(raw_path), "--out", str(tmp_path / "out")])
    assert result.exit_code == 3
    assert "Error:" in result.output


@pytest.mark.slow
def test_run_keeps_completed_cells_when_a_dataset_is_unreadable(runner, tmp_path, small_config_dict):
    bad = tmp_path / "bad.csv"
    bad.write_text("x0,w,y\n0,2,1\n")
    small_config_dict['datasets'].append({'path': str(bad), 'id': 'bad'})
    result = runner.invoke(cli, ["run", "--config", _write_config(tmp_path, small_config_dict)])
    assert result.exit_code == PARTIAL_RUN_EXIT_CODE, result.output
    assert "Run records" in result.output
    assert "Latest failures" in result.output

    raw = pd.read_csv(tmp_path / "results" / "raw_results.csv")
    assert set(raw["dataset"]) == {"lin"}
    records = pd.read_csv(tmp_path / "results" / "run_records.csv")
    assert records.loc[records["dataset"] == "bad", "operation"].tolist() == ["dataset"]
