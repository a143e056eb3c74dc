import json

import pytest

from tmotive.cli import (EXIT_FAIL, EXIT_OK, EXIT_SCHEMA, EXIT_SINGULAR, main)
from tmotive.config import Config
from tmotive.cinf import CinfElem, t_uniformizer

PREC = 60


@pytest.fixture(scope="module")
def cfg():
    return Config(prec=PREC)


@pytest.fixture()
def a_file(tmp_path, cfg):
    spec = cfg.spec
    a = t_uniformizer(spec, cfg.ram, cfg.prec) ** 3
    path = tmp_path / "A.json"
    path.write_text(json.dumps([[a.to_json()]]))
    return str(path)


@pytest.fixture()
def gamma_file(tmp_path):
    # G = 0, H = identity: the omega-swap element
    path = tmp_path / "g.json"
    path.write_text(json.dumps({"k": 0, "G": [[[]]], "H": [[[[1, 0, 0, 0]]]]}))
    return str(path)


def run(capsys, *argv):
    rc = main(list(argv))
    out = capsys.readouterr().out
    return rc, json.loads(out) if out.strip() else None


def test_period(capsys):
    rc, rep = run(capsys, "period", "--q", "3", "--prec", str(PREC))
    assert rc == EXIT_OK
    assert rep["valuation"] == [-9, 8]
    assert rep["y0"]["ram"] == 8


def test_period_deterministic(capsys):
    rc1, rep1 = run(capsys, "period", "--q", "3", "--prec", str(PREC))
    rc2, rep2 = run(capsys, "period", "--q", "3", "--prec", str(PREC))
    assert rep1 == rep2


def test_exp_coeffs_zero_matrix(capsys):
    rc, rep = run(capsys, "exp-coeffs", "--q", "3", "--n", "1",
                  "--prec", str(PREC), "--imax", "4")
    assert rc == EXIT_OK
    assert rep["imax"] == 4
    assert rep["C"][0][0][0]["terms"] == [[0, [1, 0, 0, 0]]]
    assert rep["C"][1][0][0]["terms"] == []


def test_lattice_map(capsys, a_file):
    rc, rep = run(capsys, "lattice-map", "--A", a_file, "--prec", str(PREC))
    assert rc == EXIT_OK
    z = rep["siegel"][0][0]
    assert z["terms"][0][0] == 0  # leading omega term at exponent zero


def test_mobius_fixes_base(capsys, gamma_file, tmp_path, cfg):
    spec = cfg.spec
    w = CinfElem.const(spec, cfg.ram, cfg.prec_num, spec.omega)
    zpath = tmp_path / "Z.json"
    zpath.write_text(json.dumps([[w.to_json()]]))
    rc, rep = run(capsys, "mobius", "--gamma", gamma_file, "--Z", str(zpath),
                  "--prec", str(PREC))
    assert rc == EXIT_OK
    assert rep["Z"] == [[w.to_json()]]


def test_iso_solve(capsys, a_file, gamma_file, tmp_path):
    out = tmp_path / "report.json"
    rc = main(["iso-solve", "--A", a_file, "--gamma", gamma_file,
               "--prec", str(PREC), "--out", str(out)])
    assert rc == EXIT_OK
    rep = json.loads(out.read_text())
    assert all(rep["flags"].values())
    assert rep["residual_valuations"]["full"] == "inf"
    # B = -A for this gamma: the solved matrix has the same exponents
    assert rep["B"][0][0]["terms"][0][0] == 24


def test_slope_check(capsys):
    rc, rep = run(capsys, "slope-check", "--q", "3", "--prec", "100")
    assert rc == EXIT_OK and rep["passed"]


def test_accept_subset(capsys):
    rc, rep = run(capsys, "accept", "--q", "3", "--n", "1", "--only", "1,2,9")
    assert rc == EXIT_OK
    assert rep["all_pass"] and len(rep["criteria"]) == 3


def test_schema_error_exit_code(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"nope": 1}')
    rc = main(["lattice-map", "--A", str(bad)])
    assert rc == EXIT_SCHEMA


def test_neighborhood_exit_code(capsys, tmp_path):
    theta_entry = [[{"ram": 8, "prec": 480, "terms": [[-8, [1, 0, 0, 0]]]}]]
    path = tmp_path / "th.json"
    path.write_text(json.dumps(theta_entry))
    rc = main(["lattice-map", "--A", str(path), "--prec", str(PREC)])
    assert rc == EXIT_SINGULAR


def test_bad_gamma_exit_code(capsys, tmp_path, a_file):
    path = tmp_path / "g.json"
    path.write_text(json.dumps({"k": 0, "G": [[[]]], "H": [[[]]]}))  # singular
    rc = main(["iso-solve", "--A", a_file, "--gamma", str(path),
               "--prec", str(PREC)])
    assert rc == EXIT_SINGULAR


def test_config_file_roundtrip(capsys, tmp_path):
    cfgpath = tmp_path / "cfg.json"
    cfgpath.write_text(json.dumps(Config(prec=PREC).to_json()))
    rc, rep = run(capsys, "period", "--config", str(cfgpath))
    assert rc == EXIT_OK and rep["config"]["prec"] == PREC
