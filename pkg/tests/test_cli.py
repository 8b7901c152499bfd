import csv
import io
import json

import pytest

from sphesusy import cli
from sphesusy.symtrig import TrigForm


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_energy_examples(capsys):
    code, out, _ = run(capsys, "energy", "--m", "0", "--n", "0", "--alpha", "0.1", "--format", "json")
    assert code == 0
    obj = json.loads(out)
    assert obj["energy"] == ["0", "-1/3"]
    assert obj["values"][0]["E"] == pytest.approx(-0.0333333, abs=1e-7)
    _, out, _ = run(capsys, "energy", "--m", "1", "--n", "0", "--alpha", "0", "--format", "json")
    assert json.loads(out)["values"][0]["E"] == 2
    _, out, _ = run(capsys, "energy", "--m", "0", "--n", "1", "--alpha", "0.1")
    assert "E=1.94" in out and "(-3/5)" in out


def test_energy_csv_has_oracle(capsys):
    code, out, _ = run(capsys, "energy", "--m", "0", "--n", "1", "--alpha", "0.05,0.1", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == ["m", "n", "alpha", "E_pert", "E_oracle", "abs_err"]
    assert len(rows) == 2
    assert float(rows[1]["abs_err"]) < 5e-3


def test_state_text(capsys):
    code, out, _ = run(capsys, "state", "--m", "0", "--n", "0", "--alpha", "0", "--format", "text")
    assert code == 0
    assert out.strip() == "sin^{1/2}(θ) · [1]"


def test_state_json_roundtrip(capsys):
    code, out, _ = run(capsys, "state", "--m", "0", "--n", "1", "--format", "json")
    assert code == 0
    obj = json.loads(out)
    psi = TrigForm.from_json(obj["wavefunction"])
    assert json.dumps(psi.to_json()) == json.dumps(obj["wavefunction"])
    assert psi.coefficient(0).poly.terms[0].coeffs == (0, -2)
    assert len(obj["samples"]["theta"]) == 181
    assert 0 < obj["samples"]["theta"][0] and obj["samples"]["theta"][-1] < 3.1416


def test_ladder_rows(capsys):
    code, out, _ = run(capsys, "ladder", "--m", "0", "--n", "2", "--format", "json")
    assert code == 0
    rows = json.loads(out)["rows"]
    assert [r["A"] for r in rows] == ["1", "3", "5"]
    assert [r["B"] for r in rows] == ["1", "-1/5", "-1/35"]
    _, out, _ = run(capsys, "ladder", "--m", "1", "--n", "0", "--format", "json")
    assert json.loads(out)["rows"][0]["R"] == ["4", "-8/35"]


def test_oracle_csv(capsys):
    code, out, _ = run(capsys, "oracle", "--m", "0", "--n", "2", "--alpha", "0", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == ["m", "n", "alpha", "eigenvalue", "l_max", "residual"]
    assert [round(float(r["eigenvalue"]), 10) for r in rows] == [0, 2, 6]


def test_flammer_convention(capsys):
    _, native, _ = run(capsys, "oracle", "--m", "0", "--alpha", "-0.3", "--format", "json")
    _, flam, _ = run(capsys, "oracle", "--m", "0", "--alpha", "0.3", "--convention", "flammer",
                     "--format", "json")
    p, f = json.loads(native)[0], json.loads(flam)[0]
    assert f["c2"] == 0.3 and p["eigenvalue"] == f["eigenvalue"]


def test_sweep_spec():
    vals = cli.parse_alpha("0.0125:0.4:geometric:6")
    assert vals == pytest.approx([0.0125, 0.025, 0.05, 0.1, 0.2, 0.4])
    assert cli.parse_alpha("0:1:linear:3") == [0.0, 0.5, 1.0]
    with pytest.raises(cli.UsageError):
        cli.parse_alpha("0:1:cubic:3")


@pytest.mark.parametrize("argv", [
    ["energy", "--m", "-1"],
    ["energy", "--n", "1", "--order", "2"],
    ["energy", "--order", "3"],
    ["state", "--alpha", "0.1,0.2"],
    ["bogus"],
    ["energy", "--alpha", "x"],
])
def test_usage_errors(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2
    assert out == ""
    assert err.strip().count("\n") == 0 or "usage" in err


def test_config_file(tmp_path, capsys):
    cfgfile = tmp_path / "run.cfg"
    cfgfile.write_text("# energy run\nm = 0\nn = 1\nalpha = 0.1\nformat = json\n")
    code, out, _ = run(capsys, "energy", "--config", str(cfgfile))
    assert code == 0
    assert json.loads(out)["energy"] == ["2", "-3/5"]
    # flags override the file
    code, out, _ = run(capsys, "energy", "--config", str(cfgfile), "--n", "0")
    assert json.loads(out)["energy"] == ["0", "-1/3"]
    cfgfile.write_text("colour = red\n")
    code, _, err = run(capsys, "energy", "--config", str(cfgfile))
    assert code == 2 and "colour" in err


def test_output_file(tmp_path, capsys):
    target = tmp_path / "e.json"
    code, out, _ = run(capsys, "energy", "--format", "json", "--output", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["energy"] == ["0", "-1/3"]


def test_verify_minimal_and_mutation(tmp_path, capsys):
    code, out, _ = run(capsys, "verify", "--m-max", "0", "--n-max", "0", "--output", str(tmp_path / "a"))
    assert code == 0
    assert json.loads((tmp_path / "a" / "report.json").read_text())["passed"]
    code, out, _ = run(capsys, "verify", "--m-max", "1", "--n-max", "1", "--mutate", "b-numerator",
                       "--output", str(tmp_path / "b"))
    assert code == 1
    assert "FAIL  b_sum" in out


def test_verify_nonconvergence_exit(tmp_path, capsys, monkeypatch):
    from sphesusy import oracle
    monkeypatch.setattr(oracle, "L_MAX_CAP", 32)
    code, _, err = run(capsys, "verify", "--m-max", "0", "--n-max", "0", "--output", str(tmp_path))
    assert code == 3
    assert "non-convergence" in err


def test_verify_deterministic(tmp_path, capsys):
    for d in ("x", "y"):
        run(capsys, "verify", "--m-max", "1", "--n-max", "1", "--output", str(tmp_path / d))
    for name in ("report.json", "report.csv"):
        assert (tmp_path / "x" / name).read_bytes() == (tmp_path / "y" / name).read_bytes()
    assert (tmp_path / "x" / "report.meta.json").exists()
