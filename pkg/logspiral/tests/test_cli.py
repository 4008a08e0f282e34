"""Test the command line and the output helpers."""

import json
import logging
import math
import sys

import pandas as pd
import pytest

from ..cli import main
from ..criticality import solve_critical_betas
from ..logspiralMain import (
    _check_arguments,
    _parse_arguments,
    _start_logging,
    run_logspiral,
)
from ..logspiralUtils import envelope, parse_grid, to_jsonable, write_csv


@pytest.fixture(autouse=True)
def restore_logging():
    """Undo the global logging setup of a command-line run."""
    root = logging.getLogger()
    handlers, level, hook = list(root.handlers), root.level, sys.excepthook
    yield
    for handler in root.handlers:
        if handler not in handlers:
            handler.close()
    root.handlers[:] = handlers
    root.setLevel(level)
    sys.excepthook = hook
    logging.captureWarnings(False)


def _json(capsys):
    return json.loads(capsys.readouterr().out)


def test_constants(capsys):
    assert main(["constants"]) == 0
    document = _json(capsys)
    assert document["schema_version"] == 1
    assert document["command"] == "constants"
    assert document["beta"] is None and document["band"] is None
    assert abs(document["beta0"] - 0.44) < 0.01
    assert abs(document["beta3"] - 1.55) < 0.01


def test_constants_with_beta(capsys):
    assert main(["constants", "--beta", "0.3"]) == 0
    document = _json(capsys)
    assert document["band"] == "(0,beta0)"
    assert document["angles"]["theta1"] == pytest.approx(0.807, abs=1e-3)


def test_constants_are_reproducible(tmp_path):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["constants", "--out", str(first)]) == 0
    assert main(["constants", "--out", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()


def test_classify(capsys):
    argv = ["classify", "--beta", "0.3", "--i1", "1", "--i2", "1", "--theta", "3.14159"]
    assert main(argv) == 0
    document = _json(capsys)
    assert document["case_id"] == "1"
    assert document["destination"] == "(1,pi)"
    assert document["input"] == {"i1": 1.0, "i2": 1.0, "theta": 3.14159}


def test_kernel_csv(capsys):
    assert main(["kernel", "--beta", "0.5", "--samples", "5"]) == 0
    lines = capsys.readouterr().out.splitlines()
    meta = [line for line in lines if line.startswith("# ")]
    body = [line for line in lines if not line.startswith("#")]
    assert "# command: kernel" in meta
    assert body[0] == "theta,K,K1,K2"
    assert len(body) == 6
    assert float(body[3].split(",")[0]) == pytest.approx(math.pi)


def test_simulate_to_file(tmp_path):
    out = tmp_path / "traj.csv"
    argv = [
        "simulate",
        "--beta", "0.5",
        "--i1", "1", "--i2", "1", "--theta", "2",
        "--t-max", "5",
        "--out", str(out),
    ]
    assert main(argv) == 0
    frame = pd.read_csv(out, comment="#")
    assert list(frame.columns) == ["t_or_s", "i1_or_r", "i2_or_a", "theta"]
    assert frame["t_or_s"].iloc[-1] == pytest.approx(5.0)
    assert "# system: original" in out.read_text()


def test_graph(capsys):
    assert main(["graph", "--beta", "1.2"]) == 0
    document = _json(capsys)
    assert document["band"] == "(1,beta3)"
    assert ["(0,theta3)", "(1,pi)"] in document["edges"]


def test_domain_error(capsys):
    assert main(["equilibria", "--beta", "0"]) == 3
    document = _json(capsys)
    assert document["error"] == "SpiralDomainError"
    assert "beta" in document["message"]


def test_near_critical_error(capsys):
    beta = solve_critical_betas()["beta3"] + 1e-5
    assert main(["graph", "--beta", repr(beta)]) == 3
    assert _json(capsys)["error"] == "NearCriticalError"


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["frobnicate"],
        ["kernel"],
        ["classify", "--beta", "0.3", "--i1", "1"],
        ["verify", "--beta-min", "1", "--beta-max", "0.5"],
        ["sweep", "--beta", "0.3", "--grid", "9by9"],
        ["sweep", "--beta", "0.3", "--n-jobs", "-5"],
        ["verify", "--n-jobs", "0"],
    ],
)
def test_usage_errors(argv):
    assert main(argv) == 2


def test_help(capsys):
    assert main(["--version"]) == 0
    assert main(["--more-help"]) == 0
    assert "logspiral" in capsys.readouterr().out


def test_parse_arguments():
    argsDict = _parse_arguments(["portrait", "--beta", "0.5", "--log"])
    assert argsDict["command"] == "portrait"
    assert argsDict["grid"] == "41x41"
    assert argsDict["log"] is True
    argsDict = _check_arguments(argsDict)
    assert (argsDict["width"], argsDict["height"]) == (41, 41)

    argsDict = _parse_arguments(["sweep", "--beta", "0.5", "--direction", "bwd"])
    assert argsDict["direction"] == "backward"
    assert argsDict["grid"] == "61x61"


def test_run_logspiral(tmp_path):
    out = tmp_path / "rates.json"
    argsDict = run_logspiral("rates", beta=1.2, out=str(out))
    assert argsDict["status"] == 0
    document = json.loads(out.read_text())
    assert document["command"] == "rates"
    assert document["c1"] > 1

    with pytest.raises(ValueError, match="argsDict"):
        run_logspiral("rates", argsDict={"command": "rates"}, beta=1.2)


def test_log_level_from_environment(monkeypatch, tmp_path):
    logfile = tmp_path / "run.log"
    monkeypatch.setenv("LOGSPIRAL_LOG", "debug")
    _start_logging({"logfile": str(logfile)})
    assert logging.getLogger().level == logging.DEBUG
    logging.debug("debug line")
    for handler in logging.getLogger().handlers:
        handler.flush()
    assert "debug line" in logfile.read_text()

    monkeypatch.setenv("LOGSPIRAL_LOG", "chatty")
    _start_logging({})
    assert logging.getLogger().level == logging.WARNING


def test_to_jsonable():
    import numpy as np

    value = to_jsonable(
        {"a": float("inf"), "b": -np.inf, "c": np.nan, "d": 1 + 2j, "e": (1, 2), "f": {3, 1}}
    )
    assert value == {
        "a": "+inf",
        "b": "-inf",
        "c": "nan",
        "d": {"re": 1.0, "im": 2.0},
        "e": [1, 2],
        "f": [1, 3],
    }
    assert to_jsonable(np.float64(0.5)) == 0.5
    assert to_jsonable(np.array([1.0, np.inf])) == [1.0, "+inf"]


def test_parse_grid():
    assert parse_grid("61x61") == (61, 61)
    assert parse_grid("3X4") == (3, 4)
    with pytest.raises(ValueError, match="WxH"):
        parse_grid("61")
    with pytest.raises(ValueError, match="positive"):
        parse_grid("0x5")


def test_envelope_keeps_header():
    document = envelope("graph", {"command": "other", "nodes": []}, beta=0.3)
    assert document["command"] == "graph"
    assert document["band"] == "(0,beta0)"
    assert document["nodes"] == []


def test_write_csv_metadata(capsys):
    frame = pd.DataFrame({"x": [0.1, 1.0 / 3.0]})
    write_csv(frame, metadata={"command": "kernel", "controls": {"rtol": 1e-9}})
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "# command: kernel"
    assert lines[1] == '# controls: {"rtol": 1e-09}'
    assert lines[2] == "x"
    assert float(lines[4]) == 1.0 / 3.0
