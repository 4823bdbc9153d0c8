import csv
import io
import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nearfield_dephasing import cli
from nearfield_dephasing.checks import CheckResult
from nearfield_dephasing.constants import SIGMA_SI_TO_CGS
from nearfield_dephasing.errors import QuadratureError


def run_cli(tmp_path, command, doc, *extra):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(doc))
    out = tmp_path / "out.csv"
    code = cli.main([command, "--config", str(cfg), "--out", str(out), *extra])
    rows = list(csv.reader(io.StringIO(out.read_text()))) if out.exists() else []
    return code, rows


def column(rows, name):
    i = rows[0].index(name)
    return np.array([float(r[i]) for r in rows[1:]])


SPECTRUM_IDEAL = {
    "command": "spectrum",
    "material": {"kind": "ideal"},
    "fixed": {"omega": 1e10},
    "sweep": {"axis": "d", "start": 0.01, "stop": 10.0, "points": 7},
}


def test_spectrum_ideal_matches_closed_form(tmp_path):
    code, rows = run_cli(tmp_path, "spectrum", SPECTRUM_IDEAL)
    assert code == 0
    assert rows[0] == cli.COLUMNS["spectrum"]
    assert len(rows) == 8
    np.testing.assert_allclose(column(rows, "S_p"), column(rows, "S_ideal"), rtol=1e-6)
    assert np.all(column(rows, "S_e") == 0)
    assert {r[rows[0].index("regime_tag")] for r in rows[1:]} == {"ideal"}


def test_spectrum_vacuum_has_no_evanescent_part(tmp_path):
    doc = dict(SPECTRUM_IDEAL, material={"kind": "vacuum"})
    code, rows = run_cli(tmp_path, "spectrum", doc)
    assert code == 0
    assert np.all(column(rows, "S_e") == 0.0)


def test_spectrum_conductor_slopes(tmp_path):
    # copper at 3.3e8 rad/s: skin depth about 9.3e-4 cm
    doc = {
        "material": {"kind": "conductor", "sigma": 5e17},
        "fixed": {"omega": 3.33e8},
        "sweep": {"axis": "d", "values": [1e-5, 2e-5, 0.03, 0.06]},
    }
    code, rows = run_cli(tmp_path, "spectrum", doc)
    assert code == 0
    d, s = column(rows, "d"), column(rows, "S_e")
    near = math.log(s[1] / s[0]) / math.log(d[1] / d[0])
    mid = math.log(s[3] / s[2]) / math.log(d[3] / d[2])
    assert near == pytest.approx(-3.0, abs=0.1)
    assert mid == pytest.approx(-2.0, abs=0.1)


def test_values_round_trip_exactly(tmp_path):
    code, rows = run_cli(tmp_path, "spectrum", SPECTRUM_IDEAL)
    text = (tmp_path / "out.csv").read_text()
    for r in rows[1:]:
        v = float(r[2])
        assert cli._fmt(v) == r[2]
        assert float(cli._fmt(v)) == v
    assert "\r" not in text


def test_kernel_columns_and_domains(tmp_path):
    doc = {
        "material": {"kind": "dielectric", "n": 3},
        "fixed": {"omega": 3e10, "d": 0.1},
        "sweep": {"axis": "k", "values": [0.5, 2.0]},
    }
    code, rows = run_cli(tmp_path, "kernel", doc)
    assert code == 0 and rows[0] == cli.COLUMNS["kernel"]
    assert [r[-1] for r in rows[1:]] == ["PW", "EW"]


def test_regimes_grid(tmp_path):
    doc = {
        "material": {"kind": "conductor", "sigma": 5e17},
        "beam": {"L": 10, "a": 0.01},
        "sweep": {"axis": "v", "values": [1e-4, 0.1]},
        "sweep2": {"axis": "sigma", "values": [1.0], "unit": "si"},
    }
    code, rows = run_cli(tmp_path, "regimes", doc)
    assert code == 0 and rows[0] == cli.COLUMNS["regimes"]
    assert len(rows) == 3
    np.testing.assert_allclose(column(rows, "sigma"), SIGMA_SI_TO_CGS)
    np.testing.assert_allclose(column(rows, "beta"), [1e-4, 0.1])


def test_regimes_copper(tmp_path):
    doc = {
        "material": {"kind": "conductor", "sigma": 5e17},
        "beam": {"L": 10, "a": 0.01},
        "sweep": {"axis": "v", "values": [1e-4]},
    }
    code, rows = run_cli(tmp_path, "regimes", doc)
    r = dict(zip(rows[0], rows[1]))
    assert r["regime"] == "B" and r["lower_B"] == "true"
    assert float(r["gamma"]) == pytest.approx(2.4e-10, rel=0.02)


DEPHASE = {
    "material": {"kind": "ideal"},
    "beam": {"L": 10, "a": 0.01, "beta": 1e-3},
    "methods": ["dipole"],
    "sweep": {"axis": "d", "values": [10.0, 20.0]},
}


def test_dephase_ideal(tmp_path):
    code, rows = run_cli(tmp_path, "dephase", DEPHASE)
    assert code == 0 and rows[0] == cli.COLUMNS["dephase"]
    k = column(rows, "K_dipole")
    assert np.all(np.isnan(column(rows, "K_full")))
    assert k[0] / k[1] == pytest.approx(0.25, rel=1e-3)


def test_threads_do_not_change_output(tmp_path):
    doc = dict(DEPHASE, sweep={"axis": "d", "values": [10.0, 1e3, 1e4, 5e4]})
    _, one = run_cli(tmp_path, "dephase", doc)
    _, two = run_cli(tmp_path, "dephase", doc, "--threads", "2")
    assert one == two


def test_tol_override(tmp_path):
    cfg = cli.load_config(DEPHASE, "dephase", {"tol": 1e-4, "threads": None})
    assert cfg.tol == 1e-4 and cfg.threads == 1


def test_out_to_stdout(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps(SPECTRUM_IDEAL))
    assert cli.main(["spectrum", "--config", str(cfg)]) == 0
    assert capsys.readouterr().out.startswith("omega,d,S_p")


@pytest.mark.parametrize(
    "doc, command",
    [
        ({**SPECTRUM_IDEAL, "bogus": 1}, "spectrum"),
        (SPECTRUM_IDEAL, "kernel"),
        ({**SPECTRUM_IDEAL, "sweep": {"axis": "k", "values": [1.0]}}, "spectrum"),
        ({**SPECTRUM_IDEAL, "sweep": {"axis": "d", "values": []}}, "spectrum"),
        ({**SPECTRUM_IDEAL, "sweep": {"axis": "d", "start": 1, "stop": 0.1, "points": 3}}, "spectrum"),
        ({**SPECTRUM_IDEAL, "sweep": {"axis": "d", "values": [1.0], "unit": "si"}}, "spectrum"),
        ({**SPECTRUM_IDEAL, "material": {"kind": "plasma"}}, "spectrum"),
        ({**SPECTRUM_IDEAL, "fixed": {}}, "spectrum"),
        ({**DEPHASE, "beam": {"L": 10, "a": 0.01}}, "dephase"),
        ({**DEPHASE, "beam": {"L": 10, "a": 0.01, "beta": 1e-3, "tau": 1e-6}}, "dephase"),
        ({**DEPHASE, "methods": ["exact"]}, "dephase"),
        ({**DEPHASE, "material": {"kind": "dielectric", "n": 2}, "sweep": {"axis": "sigma", "values": [1.0]}}, "dephase"),
        ({**DEPHASE, "sweep": {"axis": "v", "values": [1.5]}}, "dephase"),
        ({"material": {"kind": "ideal"}, "sweep": {"axis": "v", "values": [0.1]}, "beam": {"L": 1, "a": 0.01}}, "regimes"),
    ],
)
def test_config_errors_exit_2(tmp_path, doc, command):
    code, _ = run_cli(tmp_path, command, doc)
    assert code == cli.EXIT_CONFIG


def test_missing_config_and_bad_flags(tmp_path):
    assert cli.main(["dephase"]) == cli.EXIT_CONFIG
    assert cli.main(["dephase", "--config", str(tmp_path / "nope.json")]) == cli.EXIT_CONFIG
    assert cli.main(["frobnicate"]) == cli.EXIT_CONFIG
    assert cli.main(["spectrum", "--threads", "two"]) == cli.EXIT_CONFIG
    (tmp_path / "bad.json").write_text("{not json")
    assert cli.main(["spectrum", "--config", str(tmp_path / "bad.json")]) == cli.EXIT_CONFIG


def test_bad_tol_and_threads(tmp_path):
    assert run_cli(tmp_path, "spectrum", SPECTRUM_IDEAL, "--tol", "2")[0] == cli.EXIT_CONFIG
    assert run_cli(tmp_path, "spectrum", SPECTRUM_IDEAL, "--threads", "0")[0] == cli.EXIT_CONFIG


def test_numeric_failure_exit_3(tmp_path, monkeypatch):
    def boom(*a, **k):
        raise QuadratureError("did not converge", value=1.0, error=1.0)

    monkeypatch.setattr(cli, "K_dipole", boom)
    code, _ = run_cli(tmp_path, "dephase", DEPHASE)
    assert code == cli.EXIT_NUMERIC


def test_validation_failure_exit_1(tmp_path, monkeypatch):
    monkeypatch.setattr(cli, "run_validate", lambda: [CheckResult("x", False, {"e": 1.0}, "")])
    out = tmp_path / "v.json"
    assert cli.main(["validate", "--out", str(out)]) == cli.EXIT_VALIDATION
    assert json.loads(out.read_text())["passed"] is False


def test_reproduce_report(tmp_path):
    out = tmp_path / "r.json"
    assert cli.main(["reproduce", "--out", str(out)]) == cli.EXIT_OK
    rep = json.loads(out.read_text())
    assert rep["passed"] and len(rep["rows"]) == 7
    for row in rep["rows"]:
        assert set(row) == {"quantity", "reference_value", "computed_value", "ratio", "passed", "window"}


@given(
    st.floats(1e-6, 1e3),
    st.floats(1.001, 1e4),
    st.integers(1, 40),
)
def test_sweep_range(start, factor, n):
    s = cli.SweepSpec.from_dict({"axis": "d", "start": start, "stop": start * factor, "points": n})
    v = np.array(s.values)
    assert len(v) == n and v[0] == pytest.approx(start)
    assert np.all(np.diff(v) > 0)
    if n > 1:
        assert v[-1] == pytest.approx(start * factor)
        r = v[1:] / v[:-1]
        np.testing.assert_allclose(r, r[0], rtol=1e-9)


@given(st.lists(st.floats(1e-3, 1e3), min_size=1, max_size=5))
def test_si_sweep_scales(values):
    s = cli.SweepSpec.from_dict({"axis": "sigma", "values": values, "unit": "si"})
    np.testing.assert_allclose(s.values, np.array(values) * SIGMA_SI_TO_CGS)


@given(st.floats(allow_nan=True, allow_infinity=True))
def test_format_round_trip(x):
    text = cli._fmt(x)
    if math.isnan(x):
        assert text.lower() == "nan"
    else:
        assert float(text) == x + 0.0
