import json
import subprocess
import sys

import pytest

from qrvlab import __version__
from qrvlab.cli import ConfigError, list_scenarios, main, parse_config

BELL = """
[run]
seed = 7
samples = 5000

[bell]
scenario = tensor
state = bell
"""

MIXED = BELL + """
[spin]
scenario = functional

[osc]
scenario = harmonic
N = 32
alpha = 0.5
"""


def write(tmp_path, text, name="runs.ini"):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_list_scenarios_rows():
    text = list_scenarios()
    ids = [line.split()[0] for line in text.splitlines()[1:]]
    assert ids == ["harmonic", "free_particle", "functional", "tensor"]
    row = next(line for line in text.splitlines() if line.startswith("free_particle"))
    assert "t_over_m=1.0" in row
    assert text == list_scenarios()


def test_list_scenarios_command(capsys):
    assert main(["list-scenarios"]) == 0
    assert capsys.readouterr().out == list_scenarios()


def test_bell_run(tmp_path):
    out = tmp_path / "out"
    assert main(["run", "--config", str(write(tmp_path, BELL)), "--out", str(out)]) == 0
    report = json.loads((out / "bell.json").read_text())
    assert report["w1"] == pytest.approx(1.0, abs=1e-12)
    assert report["branch"] == "TensorEntangled"
    assert list(report)[:3] == ["name", "scenario", "branch"]
    assert report["seed"] == 7 and report["samples"] == 5000
    lines = (out / "bell.csv").read_text().splitlines()
    assert lines[0] == "value,weight_qm,weight_rv"
    rows = [[float(v) for v in line.split(",")] for line in lines[1:]]
    assert rows == [[-1.0, 0.0, pytest.approx(0.5)], [1.0, pytest.approx(1.0), pytest.approx(0.5)]]
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["version"] == __version__
    assert [r["name"] for r in manifest["runs"]] == ["bell"]
    for r in manifest["runs"]:
        assert (out / r["distributions"]).exists() and (out / r["report"]).exists()


def test_unknown_scenario(tmp_path):
    out = tmp_path / "out"
    cfg = write(tmp_path, BELL + "\n[x]\nscenario = foo\n")
    assert main(["run", "--config", str(cfg), "--out", str(out)]) == 2
    assert not out.exists()


@pytest.mark.parametrize(
    "text",
    [
        "not an ini",
        "[a]\nstate = bell\n",
        "[a]\nscenario = tensor\nbogus = 1\n",
        "[a]\nscenario = harmonic\nN = ten\n",
        "[a]\nscenario = tensor\nstate = ghz\n",
        "[run]\nseed = x\n[a]\nscenario = tensor\n",
        "[a]\nscenario = tensor\nequal = -1\n",
        "[run]\nseed = 1\n",
    ],
)
def test_parse_errors(tmp_path, text):
    with pytest.raises(ConfigError):
        parse_config(text)
    out = tmp_path / "out"
    assert main(["run", "--config", str(write(tmp_path, text)), "--out", str(out)]) == 2
    assert not out.exists()


def test_invalid_scenario_parameters_exit_2(tmp_path):
    out = tmp_path / "out"
    cfg = write(tmp_path, "[osc]\nscenario = harmonic\nN = 16\n")
    assert main(["run", "--config", str(cfg), "--out", str(out)]) == 2
    assert not out.exists()


def test_inconsistent_exit_1(tmp_path):
    # a huge equality threshold makes the Bell gap look like equality
    cfg = write(tmp_path, "[bell]\nscenario = tensor\nstate = bell\nequal = 10\n")
    out = tmp_path / "out"
    assert main(["run", "--config", str(cfg), "--out", str(out)]) == 1
    assert json.loads((out / "bell.json").read_text())["consistent"] is False


def test_io_failure_exit_3(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert main(["run", "--config", str(write(tmp_path, BELL)), "--out", str(blocker / "sub")]) == 3
    assert main(["run", "--config", str(tmp_path / "missing.ini"), "--out", str(tmp_path / "o")]) == 3


def test_byte_identical(tmp_path):
    cfg = write(tmp_path, MIXED)
    outs = [tmp_path / "a", tmp_path / "b"]
    for out in outs:
        assert main(["run", "--config", str(cfg), "--out", str(out), "--seed", "11"]) == 0
    for name in ("bell", "spin", "osc"):
        for ext in ("csv", "json"):
            assert (outs[0] / f"{name}.{ext}").read_bytes() == (outs[1] / f"{name}.{ext}").read_bytes()
    assert b"\r" not in (outs[0] / "osc.csv").read_bytes()


def test_cli_overrides(tmp_path):
    cfg = write(tmp_path, BELL)
    out = tmp_path / "out"
    assert main(["run", "--config", str(cfg), "--out", str(out), "--seed", "3", "--samples", "100"]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["runs"][0]["seed"] == 3 and manifest["runs"][0]["samples"] == 100


def test_seed_range(tmp_path):
    cfg = write(tmp_path, BELL)
    assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "o"), "--seed", str(2 ** 64)]) == 2


def test_version(capsys):
    assert main(["--version"]) == 0
    assert __version__ in capsys.readouterr().out


def test_missing_command():
    assert main([]) == 2


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "qrvlab", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and __version__ in res.stdout
