import numpy as np
from typer.testing import CliRunner

from statusquo.distill.oracle import train_oracle
from statusquo.distill.storage import save_model
from statusquo.main import app

runner = CliRunner()


def write_config(tmp_path, text):
    path = tmp_path / "experiment.yaml"
    path.write_text(text)
    return path


def test_run_writes_results(tmp_path):
    path = write_config(tmp_path, "epochs: 2\nsq:\n  batch_size: 4\nenv:\n  episode_length: 10\n")
    out = tmp_path / "out"
    result = runner.invoke(app, ["run", str(path), "--seeds", "0-1", "--out", str(out), "--no-cache"])
    assert result.exit_code == 0, result.output
    assert (out / "metrics.csv").exists()
    assert (out / "summary.json").exists()


def test_invalid_config_exits_with_two(tmp_path):
    path = write_config(tmp_path, "sq:\n  gamma: 1.2\n")
    result = runner.invoke(app, ["run", str(path), "--out", str(tmp_path)])
    assert result.exit_code == 2
    assert "sq.gamma" in result.output


def test_eval_oracle(tmp_path, small_dataset):
    oracle = train_oracle(small_dataset.subset([0, 1]), "defection", np.random.default_rng(0), epochs=1)
    save_model(tmp_path / "oracle.npz", oracle)
    result = runner.invoke(app, ["eval-oracle", str(tmp_path / "oracle.npz"), "50"])
    assert result.exit_code == 0, result.output
    assert "Other-color pick rate" in result.output


def test_eval_oracle_rejects_other_files(tmp_path):
    bogus = tmp_path / "bogus.npz"
    bogus.write_bytes(b"nothing")
    result = runner.invoke(app, ["eval-oracle", str(bogus), "5"])
    assert result.exit_code == 1
