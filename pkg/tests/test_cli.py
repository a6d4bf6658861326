import json

import numpy as np
import pytest

from qbound import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_parse_grid_fractions():
    g = cli.parse_grid("0:4/3:25")
    assert len(g) == 25
    assert g[0] == 0.0
    assert g[-1] == pytest.approx(4 / 3)
    assert cli.parse_grid("0.5:0.5:1") == [0.5]
    with pytest.raises(ValueError):
        cli.parse_grid("0:1")
    with pytest.raises(ValueError):
        cli.parse_grid("0:1:0")


def test_capacity_erasure_csv(capsys):
    code, out, _ = run(capsys, "capacity", "--cell", "erasure",
                       "--d", "2", "--q-grid", "0:1:3")
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0].startswith("#")
    assert "quantity=covariant_cell_capacity" in lines[0]
    assert "base=bits" in lines[0]
    assert lines[1] == "q,value"
    vals = [float(l.split(",")[1]) for l in lines[2:]]
    assert vals[0] == pytest.approx(2.0, abs=1e-8)
    assert vals[1] == pytest.approx(1.0, abs=1e-8)
    assert vals[2] == pytest.approx(0.0, abs=1e-8)


def test_capacity_json_mirrors_csv(capsys):
    code, out, _ = run(capsys, "capacity", "--cell", "erasure",
                       "--format", "json", "--q-grid", "0:1:3")
    assert code == 0
    payload = json.loads(out)
    assert payload["meta"]["quantity"] == "covariant_cell_capacity"
    assert len(payload["rows"]) == 3
    assert payload["rows"][0]["value"] == pytest.approx(2.0, abs=1e-8)


def test_output_file_and_determinism(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        code = cli.main(["dynamics", "--preset", "gadc", "--omega", "5",
                         "--steps", "40", "--output", str(path)])
        assert code == 0
    capsys.readouterr()
    assert a.read_bytes() == b.read_bytes()  # byte-identical reruns


def test_dynamics_base_is_nats(capsys):
    code, out, _ = run(capsys, "dynamics", "--preset", "damping",
                       "--steps", "4", "--t-max", "1")
    assert code == 0
    assert "base=nats" in out.split("\n")[0]


def test_secure_read_csv(capsys):
    code, out, _ = run(capsys, "secure-read", "--kind", "depolarizing")
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[1] == "D_I,D_C,N_D_I,N_D_C"
    di, dc, ndi, ndc = (float(v) for v in lines[2].split(","))
    assert di == pytest.approx(dc, abs=1e-9)
    assert ndi == pytest.approx(1000 * di, abs=1e-12)


def test_rains_state_product(capsys):
    code, out, _ = run(capsys, "rains-state", "--state", "product")
    assert code == 0
    val = float(out.strip().split("\n")[-1].split(",")[-1])
    assert abs(val) < 1e-5


def test_private_rate_point(capsys):
    code, out, _ = run(capsys, "private-rate", "--q", "0.25")
    assert code == 0
    row = out.strip().split("\n")[-1].split(",")
    assert float(row[1]) == pytest.approx(1.5, abs=1e-8)
    assert float(row[2]) == pytest.approx(1.5, abs=1e-8)


def test_props_suite_passes(capsys):
    code, out, _ = run(capsys, "props")
    assert code == 0
    assert "fail" not in out


def test_parse_error_exit_code(capsys):
    with pytest.raises(SystemExit) as e:
        cli.main(["capacity", "--q-grid", "bogus"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        cli.main(["no-such-command"])
    assert e.value.code == 2


def test_numerical_failure_exit_code(monkeypatch, capsys):
    def boom(*a, **k):
        raise ArithmeticError("synthetic divergence")
    monkeypatch.setattr(cli.reading, "covariant_cell_capacity", boom)
    code, out, err = run(capsys, "capacity", "--cell", "erasure", "--q", "0")
    assert code == 3
    diag = json.loads(err.strip().split("\n")[-1])
    assert diag["error"] == "numerical_failure"
    assert diag["subcommand"] == "capacity"


def test_thread_cap_respected(monkeypatch, capsys):
    monkeypatch.setenv("QBOUND_THREADS", "2")
    code, out, _ = run(capsys, "capacity", "--cell", "erasure",
                       "--q-grid", "0:1:3")
    assert code == 0
    assert len(out.strip().split("\n")) == 5  # meta + header + 3 rows
