"""CLI subcommand behavior, exit codes, and output determinism."""
import json

import pytest

from wqnet.cli import run
from wqnet.data import Sample, SyntheticConfig, Task, generate_synthetic, write_csv
from wqnet.models import load_artifact
from wqnet.service import predict_response


@pytest.fixture()
def data_csv(tmp_path):
    path = tmp_path / "data.csv"
    write_csv(generate_synthetic(SyntheticConfig(n=120, seed=3)), path)
    return path


@pytest.fixture()
def trained_regressor(tmp_path, data_csv):
    out = tmp_path / "reg_model"
    code = run(["train", "--task", "regress", "--data", str(data_csv),
                "--out", str(out), "--epochs", "2"])
    assert code == 0
    return out


class TestGenData:
    def test_writes_expected_line_count(self, tmp_path, capsys):
        out = tmp_path / "t.csv"
        assert run(["gen-data", "--n", "10", "--seed", "1", "--out", str(out)]) == 0
        lines = out.read_text().strip().splitlines()
        assert len(lines) == 11  # header + 10 rows
        assert lines[0] == "temperature,ph,ec,do,wqi"

    def test_stdout_deterministic(self, tmp_path, capsys):
        out = tmp_path / "t.csv"
        run(["gen-data", "--n", "25", "--seed", "9", "--out", str(out)])
        first = capsys.readouterr().out
        run(["gen-data", "--n", "25", "--seed", "9", "--out", str(out)])
        second = capsys.readouterr().out
        assert first == second

    def test_config_file_with_flag_override(self, tmp_path, capsys):
        cfg = tmp_path / "gen.json"
        cfg.write_text('{"n": 5, "seed": 2, "noise_sd": 0.0}')
        out = tmp_path / "cfg.csv"
        assert run(["gen-data", "--config", str(cfg), "--n", "8", "--out", str(out)]) == 0
        assert len(out.read_text().strip().splitlines()) == 9


class TestTrain:
    def test_writes_artifact_and_history(self, tmp_path, data_csv, capsys):
        out_dir = tmp_path / "reg_model"
        code = run(["train", "--task", "regress", "--data", str(data_csv),
                    "--out", str(out_dir), "--epochs", "2"])
        assert code == 0
        assert (out_dir / "manifest.json").is_file()
        assert (out_dir / "weights.bin").is_file()
        history = (out_dir / "history.csv").read_text().splitlines()
        assert history[0] == "epoch,train_loss,val_loss"
        assert len(history) >= 2
        out = capsys.readouterr().out
        assert "holdout" in out and "r2=" in out

    def test_classification_with_smote(self, tmp_path, data_csv, capsys):
        out = tmp_path / "cls_model"
        code = run(["train", "--task", "classify", "--data", str(data_csv),
                    "--out", str(out), "--smote", "--epochs", "2"])
        assert code == 0
        assert "accuracy=" in capsys.readouterr().out
        artifact = load_artifact(out)
        assert artifact.task is Task.CLASSIFICATION


class TestEval:
    def test_regression_metrics(self, data_csv, trained_regressor, capsys):
        assert run(["eval", "--model", str(trained_regressor), "--data", str(data_csv)]) == 0
        out = capsys.readouterr().out
        assert out.startswith("rmse=")
        assert "r2=" in out

    def test_classification_report_shape(self, tmp_path, data_csv, capsys):
        model = tmp_path / "cls"
        run(["train", "--task", "classify", "--data", str(data_csv),
             "--out", str(model), "--epochs", "2"])
        capsys.readouterr()
        assert run(["eval", "--model", str(model), "--data", str(data_csv)]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0].split() == ["Class", "Precision", "Recall", "F1-score", "Support"]
        assert lines[-1].startswith("Weighted Avg")


class TestPredictClassify:
    def test_predict_json_matches_service_schema(self, trained_regressor, capsys):
        code = run(["predict", "--model", str(trained_regressor),
                    "--temperature", "22", "--ph", "7", "--ec", "400", "--do", "6.5"])
        assert code == 0
        body = json.loads(capsys.readouterr().out)
        artifact = load_artifact(trained_regressor)
        expected = predict_response(artifact, Sample(22.0, 7.0, 400.0, 6.5))
        assert body == expected
        assert set(body) == {"wqi", "label"}

    def test_wrong_task_exits_one(self, trained_regressor, capsys):
        code = run(["classify", "--model", str(trained_regressor),
                    "--temperature", "22", "--ph", "7", "--ec", "400", "--do", "6.5"])
        assert code == 1
        assert "WrongTask" in capsys.readouterr().err


class TestCvCommands:
    def test_cv_writes_csv(self, tmp_path, monkeypatch, capsys):
        monkeypatch.chdir(tmp_path)
        path = tmp_path / "small.csv"
        write_csv(generate_synthetic(SyntheticConfig(n=60, seed=5)), path)
        code = run(["cv", "--task", "regress", "--data", str(path),
                    "--folds", "3", "--seed", "1"])
        assert code == 0
        out = capsys.readouterr().out
        assert "Mean" in out and "SD" in out
        lines = (tmp_path / "cv.csv").read_text().strip().splitlines()
        assert lines[0] == "fold,score"
        assert lines[-2].startswith("mean,") and lines[-1].startswith("sd,")

    def test_nested_cv_prints_table(self, tmp_path, capsys):
        path = tmp_path / "small.csv"
        write_csv(generate_synthetic(SyntheticConfig(n=60, seed=6)), path)
        code = run(["nested-cv", "--task", "regress", "--data", str(path),
                    "--outer", "2", "--inner", "2"])
        assert code == 0
        out = capsys.readouterr().out.strip().splitlines()
        assert out[0].split()[:4] == ["Fold", "R2", "Score", "RMSE"]
        assert out[-1].startswith("Mean +/- Std Dev")


class TestErrors:
    def test_usage_error_exits_two(self):
        with pytest.raises(SystemExit) as err:
            run(["train", "--bogus"])
        assert err.value.code == 2

    def test_missing_file_exits_one(self, capsys):
        assert run(["eval", "--model", "/nonexistent", "--data", "/nonexistent"]) == 1
        assert capsys.readouterr().err.startswith("error:")

    def test_parse_error_exits_one(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("temperature,ph,ec,do,wqi\n1,2,zzz,4,80\n")
        assert run(["eval", "--model", "/none", "--data", str(bad)]) == 1
