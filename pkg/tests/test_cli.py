import subprocess
import sys

import pytest
import tomli_w

from stackjam import experiments as ex
from stackjam.cli import main


@pytest.fixture
def quick_config(default_doc, tmp_path):
    default_doc["learning"]["epochs"] = 6
    default_doc["learning"]["slots_per_epoch"] = 10
    path = tmp_path / "quick.toml"
    path.write_text(tomli_w.dumps(default_doc))
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_oracle_defaults(capsys):
    code, out, err = run(capsys, "oracle")
    assert code == 0 and err == ""
    rows = {(r.config_param, r.config_value, r.metric): r.mean for r in ex.parse_csv(out)}
    # channels are reported 1-based
    assert rows[("stackelberg", "-", "jammer_channel")] == 3.0
    assert [rows[("stackelberg", "-", f"user_channel.{n}")] for n in (1, 2, 3)] == [1.0, 2.0, 3.0]
    assert rows[("stackelberg", "-", "jammer_utility")] == pytest.approx(0.75)
    assert rows[("jammer_channel", "2", "nash_count")] == 4.0
    grid = rows[("power_solver", "grid_oracle", "user_power")]
    search = rows[("power_solver", "leader_optimize", "user_power")]
    assert abs(grid - search) < 2 * 20.0 / 999


def test_power_command(capsys):
    code, out, _ = run(capsys, "power")
    assert code == 0
    rows = ex.parse_csv(out)
    assert [r.config_value for r in rows if r.metric == "bayesian.rate"] == ["-0.2", "0", "0.2"]
    rate = [r.mean for r in rows if r.metric == "bayesian.rate"]
    assert rate == pytest.approx([1.21883, 1.06258, 0.94534], rel=1e-4)
    assert all(r.reps == 1 for r in rows)


def test_power_custom_epsilons(capsys):
    code, out, _ = run(capsys, "power", "--epsilons", "0.1")
    assert code == 0
    assert {r.config_value for r in ex.parse_csv(out)} == {"0.1"}


def test_channel_command(capsys, quick_config):
    code, out, _ = run(capsys, "channel", "--config", quick_config, "--reps", "2", "--seed", "3")
    assert code == 0
    rows = ex.parse_csv(out)
    assert [r.metric for r in rows][:4] == ["hla.ewaij", "hla.rate", "hla.sum_rate", "hla.jammer_utility"]
    assert all(r.reps == 2 and r.config_param == "none" for r in rows)


def test_sweep_command_and_plot(capsys, quick_config, tmp_path):
    out_path = tmp_path / "sweep.csv"
    code, out, _ = run(capsys, "sweep", "--config", quick_config, "--reps", "1", "--param", "N",
                       "--values", "2,3", "--kind", "channel-random", "--out", str(out_path), "--plot")
    assert code == 0 and out == ""
    rows = ex.parse_csv(out_path.read_text())
    assert [r.config_value for r in rows] == ["2"] * 4 + ["3"] * 4
    assert (tmp_path / "sweep.png").stat().st_size > 0


def test_compare_command(capsys, quick_config, tmp_path):
    report = tmp_path / "c.csv"
    assert main(["channel", "--config", quick_config, "--reps", "1", "--out", str(report)]) == 0
    code, out, _ = run(capsys, "compare", str(report), str(report), "--metric", "hla.rate", "--metric-b", "random.rate")
    assert code == 0
    assert out.splitlines()[0] == "config_param,config_value,improvement,ci95"


def test_named_errors(capsys, tmp_path, default_doc):
    code, _, err = run(capsys, "channel", "--config", str(tmp_path / "nope.toml"))
    assert code != 0 and "ConfigError" in err

    del default_doc["network"]["bandwidth"]
    bad = tmp_path / "bad.toml"
    bad.write_text(tomli_w.dumps(default_doc))
    code, _, err = run(capsys, "channel", "--config", str(bad), "--reps", "1")
    assert code != 0 and "MissingFieldError" in err and "[network] bandwidth" in err

    code, _, err = run(capsys, "sweep", "--param", "volume", "--values", "1")
    assert code != 0 and "UnknownKindError" in err

    code, _, err = run(capsys, "power", "--plot")
    assert code != 0 and "--out" in err

    code, _, err = run(capsys, "power", "--out", str(tmp_path / "no" / "dir.csv"))
    assert code != 0 and "OutputError" in err


def test_too_large_oracle(capsys, tmp_path, default_doc):
    default_doc["network"]["num_users"] = 11
    default_doc.pop("power_game")
    path = tmp_path / "big.toml"
    path.write_text(tomli_w.dumps(default_doc))
    code, _, err = run(capsys, "oracle", "--config", str(path))
    assert code != 0 and "InstanceTooLargeError" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "stackjam", "oracle"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("config_param,config_value,metric")
