import json

import numpy as np
import pytest

from s2tos.cli import EXIT_USAGE, main


def _run(tmp_path, *args):
    rc = main([*args, "--out-dir", str(tmp_path)])
    return rc


def _json(tmp_path, name):
    return json.loads((tmp_path / name).read_text())


def test_front_simple_closed(tmp_path):
    assert _run(tmp_path, "front", "--alpha", "0.1496") == 0
    body = _json(tmp_path, "front.json")
    assert body["topology"] == "simple_closed"
    assert body["front"]["is_optimal"] is True
    assert body["glue_error"] <= 1e-10
    assert (tmp_path / "front.csv").exists() and (tmp_path / "front.timings.json").exists()


def test_front_self_intersecting(tmp_path):
    assert _run(tmp_path, "front", "--C", str(np.pi / 16), "--k", "40") == 0
    assert _json(tmp_path, "front.json")["topology"] == "self_intersecting"


def test_front_kmax_minus_one_optimal(tmp_path):
    assert _run(tmp_path, "front", "--r0", "--k", "20", "--k-index", "kM-1") == 0
    assert _json(tmp_path, "front.json")["front"]["is_optimal"] is True


def test_output_is_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert main(["front", "--rbar", "0.5", "--k", "10", "--n", "256", "--out-dir", str(d)]) == 0
    for name in ("front.csv", "front.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_classify_regimes(tmp_path):
    assert _run(tmp_path, "classify", "--C", str(np.pi / 16), "--k", "40") == 0
    rep = _json(tmp_path, "classify.json")["report"]
    assert rep["regime"] == "C2"
    assert rep["doubles"][0]["s1"] == pytest.approx(np.pi / 6, abs=0.01)
    assert _run(tmp_path, "classify", "--r0", "--k", "40") == 0
    assert _json(tmp_path, "classify.json")["report"]["s_alpha"] == pytest.approx(0.9553, abs=0.02)


def test_switching_curves_and_pendulum(tmp_path):
    assert _run(tmp_path, "switching-curves", "--alpha", "0.2", "--n", "17") == 0
    assert (tmp_path / "switching_curves.csv").exists()
    assert _run(tmp_path, "pendulum", "--rho", "1.0", "--n", "41", "--grid-h", "0.04") == 0
    assert (tmp_path / "pendulum_overlap.csv").exists()
    assert (tmp_path / "pendulum_value_map.csv").exists()


def test_cutlocus_small(tmp_path):
    assert _run(tmp_path, "cutlocus", "--rbar", "0.5", "--k-list", "10", "20") == 0
    assert (tmp_path / "cutlocus_rbar0.5_k10.csv").exists()


def test_oracle_pendulum(tmp_path):
    assert _run(tmp_path, "oracle", "--kind", "pendulum", "--grid-h", "0.02") == 0
    body = _json(tmp_path, "oracle.json")
    assert body["max_error"] <= 3 * (body["h"] + body["dt"])


def test_config_and_flag_precedence(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"rbar": 0.5, "k": 10, "n": 128}))
    assert _run(tmp_path, "front", "--config", str(cfg)) == 0
    assert _json(tmp_path, "front.json")["metadata"]["config"]["n"] == 128
    assert _run(tmp_path, "front", "--config", str(cfg), "--n", "64") == 0
    conf = _json(tmp_path, "front.json")["metadata"]["config"]
    assert conf["n"] == 64 and conf["rbar"] == 0.5
    # an alpha form on the command line replaces the config's form but keeps k
    assert _run(tmp_path, "front", "--config", str(cfg), "--r0") == 0
    conf = _json(tmp_path, "front.json")["metadata"]["config"]
    assert conf["r0"] is True and conf["rbar"] is None and conf["k"] == 10


@pytest.mark.parametrize(
    "args",
    [
        ["front"],
        ["front", "--alpha", "0.1", "--rbar", "0.5", "--k", "10"],
        ["front", "--rbar", "0.5"],
        ["front", "--alpha", "-1"],
        ["cutlocus"],
        ["nonsense"],
        ["verify", "--criteria", "9"],
    ],
)
def test_usage_errors(tmp_path, args):
    assert _run(tmp_path, *args) == EXIT_USAGE


def test_unknown_config_key(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"alpah": 0.1}))
    assert _run(tmp_path, "front", "--config", str(cfg)) == EXIT_USAGE


def test_verify_passing_criterion(tmp_path, capsys):
    assert _run(tmp_path, "verify", "--criteria", "1") == 0
    assert "[PASS] criterion 1" in capsys.readouterr().out
