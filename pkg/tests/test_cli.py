import json

import pytest

from hybridcap.cli import build_parser, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_regime(capsys):
    code, out, _ = run(capsys, "regime", "--beta", "0.5", "--gamma", "0.25")
    assert code == 0
    doc = json.loads(out)
    assert doc["regime"] == "B-1"
    assert doc["inequalities"]
    code, out, _ = run(capsys, "regime", "--beta", "0.2", "--gamma", "0.1")
    assert json.loads(out)["regime"] == "A-1"


def test_regime_domain_error(capsys):
    code, out, err = run(capsys, "regime", "--beta", "1.2", "--gamma", "0.1")
    assert code == 2
    assert "beta" in err and out == ""


def test_exponent_infinite(capsys):
    code, out, _ = run(capsys, "exponent", "--alpha", "2.2", "--beta", "0.5", "--gamma", "0.4")
    doc = json.loads(out)
    assert code == 0
    assert doc["exponent"] == pytest.approx(0.85, abs=1e-12)
    assert doc["scheme"] == "ISH"


def test_exponent_generalized(capsys):
    code, out, _ = run(capsys, "exponent", "--alpha", "3.0", "--beta", "0.5", "--gamma", "0.4", "--eta", "0.1")
    doc = json.loads(out)
    assert doc["exponent"] == pytest.approx(0.75, abs=1e-12)
    assert doc["scheme"] == "IMH"
    assert doc["infrastructure_limited"] is False
    imh = [b for b in doc["breakdown"] if b["scheme"] == "IMH"][0]
    assert len(imh["terms"]) == 5


def test_exponent_alpha_two_rejected(capsys):
    code, _, err = run(capsys, "exponent", "--alpha", "2.0", "--beta", "0.5", "--gamma", "0.4")
    assert code == 2 and "alpha" in err


def test_cbs_and_limited(capsys):
    _, out, _ = run(capsys, "cbs", "--beta", "0.4", "--gamma", "0.45")
    doc = json.loads(out)
    assert doc["cbs"]["exponent"] == 0.05
    assert set(doc["per_protocol"]) == {"ish", "imh"}
    _, out, _ = run(capsys, "limited", "--beta", "0.2", "--gamma", "0.45", "--eta", "0.1")
    assert json.loads(out)["infrastructure_limited"] is True


def test_unknown_flag_is_an_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["regime", "--beta", "0.5", "--gamma", "0.25", "--bogus", "1"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit):
        main(["regime", "--bet", "0.5", "--gamma", "0.25"])


def test_help_lists_flags(capsys):
    with pytest.raises(SystemExit):
        build_parser().parse_args(["sweep", "--help"])
    out = capsys.readouterr().out
    for flag in ("--config", "--out", "--seed", "--trials", "--verbose"):
        assert flag in out


def test_simulate(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"n": 256, "m": 4, "l": 2, "r_bs": 1.0}))
    code, out, _ = run(capsys, "simulate", "--config", str(cfg), "--seed", "3", "--traffic")
    doc = json.loads(out)
    assert code == 0
    assert doc["t_n"] == max(doc["t_ish"], doc["t_imh"])
    assert doc["config"]["seed"] == 3
    assert sum(map(sum, doc["traffic"])) == 256


def test_simulate_configuration_error(capsys):
    code, _, err = run(capsys, "simulate", "--n", "256", "--m", "15")
    assert code == 3 and "perfect square" in err


def test_sweep_packaged(capsys, tmp_path):
    out_csv = tmp_path / "f8.csv"
    code, out, _ = run(capsys, "sweep", "--config", "fig8_a35", "--out", str(out_csv), "--trials", "3")
    assert code == 0
    lines = out_csv.read_text().splitlines()
    assert lines[0] == "variable,value,t_ish_mean,t_imh_mean,t_n_mean,ci95,bottleneck_mode"
    assert len(lines) == 9
    t_n = [float(line.split(",")[4]) for line in lines[1:]]
    assert all(a <= b for a, b in zip(t_n, t_n[1:]))
    assert "knee" in json.loads(out)["outputs"][0]
    first = out_csv.read_bytes()
    run(capsys, "sweep", "--config", "fig8_a35", "--out", str(out_csv), "--trials", "3")
    assert out_csv.read_bytes() == first


def test_sweep_series_and_verbose(capsys, tmp_path):
    cfg = tmp_path / "exp.json"
    cfg.write_text(json.dumps({"base": {"n": 256, "m": 4, "l": 2}, "variable": "l",
                               "values": [1, 2], "series": [0.5, 5.0], "trials": 2}))
    code, out, _ = run(capsys, "sweep", "--config", str(cfg), "--out", str(tmp_path / "s.csv"), "--verbose")
    assert code == 0
    assert (tmp_path / "s_rbs0.5.csv").exists() and (tmp_path / "s_rbs5.csv").exists()
    doc = json.loads((tmp_path / "s_rbs5.json").read_text())
    assert len(doc["rows"][0]["trials"]) == 2


def test_sweep_errors(capsys, tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["sweep", "--config", "fig8_a35", "--out", str(tmp_path / "x.csv"), "--trials", "0"])
    assert exc.value.code == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, _ = run(capsys, "sweep", "--config", str(bad), "--out", str(tmp_path / "x.csv"))
    assert code == 2
    cfg = tmp_path / "exp.json"
    cfg.write_text(json.dumps({"base": {"n": 256, "m": 4, "l": 2}, "variable": "m", "values": [4, 5]}))
    code, _, err = run(capsys, "sweep", "--config", str(cfg), "--out", str(tmp_path / "x.csv"))
    assert code == 3 and "m=5" in err
    assert not (tmp_path / "x.csv").exists()


def test_verify_xki(capsys):
    code, out, _ = run(capsys, "verify", "xki", "--a", "0.7", "--b", "0.4",
                       "--n-values", "1024,4096,16384", "--trials", "20")
    doc = json.loads(out)
    assert code == 0 and doc["branch"] == "power"
    code, _, _ = run(capsys, "verify", "xki", "--a", "0.7", "--b", "0.4", "--trials", "5")
    assert code == 2


def test_verify_exponent(capsys):
    code, out, _ = run(capsys, "verify", "exponent", "--alpha", "3.5", "--beta", "0.25", "--gamma", "0.25",
                       "--eta", "-1", "--n-values", "256,1024,4096", "--trials", "2")
    doc = json.loads(out)
    assert code == 0
    assert doc["predicted"] == -0.5
    code, _, _ = run(capsys, "verify", "exponent", "--alpha", "3.5", "--beta", "0.25", "--gamma", "0.25",
                     "--eta", "-1", "--trials", "0")
    assert code == 2
