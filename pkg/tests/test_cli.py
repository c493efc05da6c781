import json
import math

import pytest

from cornervoid import cli


def _run(tmp_path, *args):
    out = tmp_path / "run"
    code = cli.main([*args, "--out", str(out)])
    return code, out


def test_dimension_command(tmp_path):
    code, out = _run(tmp_path, "dimension", "--Lambda", "0.003", "--l0", "2e-9",
                     "--strain", "1e-3")
    assert code == 0
    info = json.loads((out / "dimension.json").read_text())
    assert info["void_size_um"] == pytest.approx(0.03)
    man = json.loads((out / "manifest.json").read_text())
    assert man["exit_code"] == 0 and man["command"] == "dimension"


def test_void_size_formula():
    assert cli.void_size(2e-9, 1e-3, 3.0) == pytest.approx(3e-3)
    with pytest.raises(cli.ConfigError):
        cli.void_size(2e-9, 0.0, 0.1)


def test_zero_strain_is_config_error(tmp_path):
    code, out = _run(tmp_path, "dimension", "--strain", "0")
    assert code == cli.EXIT_CONFIG
    assert json.loads((out / "manifest.json").read_text())["exit_code"] == 2


def test_bad_arguments(tmp_path):
    assert cli.main(["nonsense"]) == cli.EXIT_CONFIG
    assert _run(tmp_path, "dimension", "--N", "4")[0] == cli.EXIT_CONFIG
    assert _run(tmp_path, "dimension", "--epsilon", "1.5")[0] == cli.EXIT_CONFIG


def test_config_file(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"preset": "circle", "chi": 0.5, "N": 16}))
    code, out = _run(tmp_path, "elasticity", "--config", str(cfg))
    assert code == 0
    diag = json.loads((out / "diagnostics.json").read_text())
    assert diag["kirsch_l2_error"] < 1e-8
    assert (out / "trace.csv").exists()
    cfg.write_text(json.dumps({"bogus": 1}))
    assert _run(tmp_path, "elasticity", "--config", str(cfg))[0] == cli.EXIT_CONFIG
    assert _run(tmp_path, "elasticity", "--config",
                str(tmp_path / "missing.json"))[0] == cli.EXIT_IO


def test_equilibrate_command(tmp_path):
    code, out = _run(tmp_path, "equilibrate", "--epsilon", "0.08", "--N", "16")
    assert code == 0
    for name in ("solution.json", "shape.csv", "orientation_profile.csv", "energy.json"):
        assert (out / name).exists()
    info = json.loads((out / "energy.json").read_text())
    assert info["converged"]
    a0 = json.loads((out / "solution.json").read_text())["angles"][0]
    assert [abs(j) for j in info["orientation_jumps"]] == \
        pytest.approx([a0 - math.pi] * 4, abs=1e-6)


def test_wulff_command(tmp_path):
    code, out = _run(tmp_path, "wulff", "--epsilon", "0.08", "--ladder", "8,16")
    assert code == 0
    man = json.loads((out / "manifest.json").read_text())
    assert man["result"] is not None
