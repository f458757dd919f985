"""End-to-end lifecycle through the installed CLI: generate, train, evaluate,
serve, probe over HTTP, shut down. Every step must exit 0."""
import json
import signal
import subprocess
import sys
import time

import httpx
import pytest

CLI = [sys.executable, "-m", "wqnet.cli"]


def _run(*args, cwd=None):
    return subprocess.run(CLI + list(args), capture_output=True, text=True, cwd=cwd, timeout=300)


@pytest.mark.slow
def test_full_pipeline(tmp_path):
    data = tmp_path / "data.csv"
    reg_dir = tmp_path / "regressor"
    cls_dir = tmp_path / "classifier"

    step = _run("gen-data", "--n", "300", "--seed", "7", "--out", str(data))
    assert step.returncode == 0, step.stderr
    assert len(data.read_text().strip().splitlines()) == 301

    step = _run("train", "--task", "regress", "--data", str(data),
                "--out", str(reg_dir), "--epochs", "8")
    assert step.returncode == 0, step.stderr
    assert (reg_dir / "history.csv").is_file()

    step = _run("train", "--task", "classify", "--data", str(data),
                "--out", str(cls_dir), "--smote", "--epochs", "8")
    assert step.returncode == 0, step.stderr

    step = _run("eval", "--model", str(reg_dir), "--data", str(data))
    assert step.returncode == 0, step.stderr
    assert "r2=" in step.stdout

    step = _run("predict", "--model", str(reg_dir),
                "--temperature", "22", "--ph", "7", "--ec", "400", "--do", "6.5")
    assert step.returncode == 0, step.stderr
    cli_prediction = json.loads(step.stdout)
    assert set(cli_prediction) == {"wqi", "label"}

    server = subprocess.Popen(
        CLI + ["serve", "--classifier", str(cls_dir), "--regressor", str(reg_dir),
               "--addr", "127.0.0.1:0"],
        stdout=subprocess.PIPE, stderr=subprocess.PIPE, text=True,
    )
    try:
        banner = server.stdout.readline()
        assert banner.startswith("serving on http://")
        base = banner.split()[2].rstrip("/")

        health = httpx.get(f"{base}/api/health", timeout=10).json()
        assert health == {"status": "ok", "classifier_loaded": True, "regressor_loaded": True}

        body = {"temperature": 22, "ph": 7, "ec": 400, "do": 6.5}
        predicted = httpx.post(f"{base}/api/predict", json=body, timeout=10).json()
        # CLI and service surfaces share one schema and one model
        assert predicted == cli_prediction

        classified = httpx.post(f"{base}/api/classify", json=body, timeout=10)
        assert classified.status_code == 200
        assert abs(sum(classified.json()["probabilities"]) - 1.0) < 1e-9

        root = httpx.get(f"{base}/", timeout=10)
        assert root.status_code == 200
    finally:
        server.send_signal(signal.SIGINT)
        try:
            code = server.wait(timeout=15)
        except subprocess.TimeoutExpired:
            server.kill()
            raise AssertionError("serve did not shut down on SIGINT")
    assert code == 0
