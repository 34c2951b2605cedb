"""Command-line interface: file formats, exit codes, artifact determinism."""

import json
import os

import numpy as np
import pytest

from spectral_cf import cli
from spectral_cf._serialize import (
    json_dumps,
    parse_matrix_text,
    parse_scalar,
    parse_state_text,
)
from spectral_cf.errors import ConstructionError, ParseError

SIGMA2 = """# second Pauli matrix
dim 2
0 -1i
1i 0
"""


# ------------------------------------------------------------- serialization

def test_parse_scalar_accepts_engineering_forms():
    assert parse_scalar("2.5", 1, 1) == 2.5
    assert parse_scalar("-1i", 1, 1) == -1j
    assert parse_scalar("3+4i", 1, 1) == 3 + 4j
    assert parse_scalar("1e-3", 1, 1) == 1e-3


def test_parse_scalar_rejects_junk():
    for bad in ("", "i,", "1 2", "nan"):
        with pytest.raises(ParseError):
            parse_scalar(bad, 2, 3)
    try:
        parse_scalar("zz", 2, 3)
    except ParseError as exc:
        assert "line 2" in str(exc) and "column 3" in str(exc)


def test_parse_state_text():
    amps = parse_state_text("0.6, 0.8i")
    assert np.allclose(amps, [0.6, 0.8j])


def test_parse_matrix_roundtrip():
    m = parse_matrix_text(SIGMA2)
    assert np.allclose(m, [[0, -1j], [1j, 0]])


def test_parse_matrix_rejects_non_hermitian():
    bad = "dim 2\n0 1\n0 0\n"
    with pytest.raises(ConstructionError) as info:
        parse_matrix_text(bad)
    assert "(1,2)" in str(info.value) or "(2,1)" in str(info.value)


def test_parse_matrix_reports_bad_row_width():
    with pytest.raises(ParseError):
        parse_matrix_text("dim 2\n0 1 0\n1 0\n")


def test_json_dumps_is_deterministic_and_finite_precision():
    doc = {"x": 0.1 + 0.2, "z": 1 + 2j, "arr": np.array([1.0, 2.0])}
    one, two = json_dumps(doc), json_dumps(doc)
    assert one == two
    parsed = json.loads(one)
    assert abs(parsed["x"] - 0.30000000000000004) == 0.0
    assert parsed["z"] == {"re": 1.0, "im": 2.0}


# ----------------------------------------------------------------- list

def test_list_text_names_every_entry(capsys):
    assert cli.main(["list"]) == 0
    out = capsys.readouterr().out
    for name in ("sl2-H", "pauli-2", "casimir-so3", "h3-H", "su11-boson"):
        assert name in out
    assert "[K0,K+] = K+" in out


def test_list_json_contains_closed_forms(capsys):
    assert cli.main(["list", "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert {e["name"] for e in doc["observables"]} >= {"sl2-H", "su11-H"}
    assert "sl2-H-vacuum" in {e["id"] for e in doc["closed_forms"]}


# ------------------------------------------------------------- decompose

def test_decompose_catalogue_csv(capsys):
    assert cli.main(["decompose", "--observable", "sl2-H", "--format", "csv"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "eigenvalue,multiplicity"
    lams = [float(row.split(",")[0]) for row in lines[1:]]
    assert np.allclose(sorted(lams), [-np.sqrt(2), np.sqrt(2)])


def test_decompose_matrix_file_json(tmp_path, capsys):
    path = tmp_path / "sigma2.txt"
    path.write_text(SIGMA2)
    assert cli.main(["decompose", "--observable", str(path)]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["kind"] == "decomposition"
    assert np.allclose(doc["eigenvalues_expanded"], [-1.0, 1.0])
    assert doc["identity_residual"] < 1e-12
    assert doc["reconstruction_residual"] < 1e-12


def test_decompose_rejects_non_hermitian_file(tmp_path, capsys):
    path = tmp_path / "bad.txt"
    path.write_text("dim 2\n0 1\n0 0\n")
    assert cli.main(["decompose", "--observable", str(path)]) == 3


# ------------------------------------------------------------------ charfun

def test_charfun_exact_csv_columns(capsys):
    rc = cli.main(["charfun", "--observable", "sl2-H", "--method", "exact",
                   "--t=-5:5:41", "--format", "csv"])
    assert rc == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "t,re_exact,im_exact"
    t0, re0, im0 = (float(x) for x in lines[1 + 20].split(","))
    assert t0 == 0.0 and abs(re0 - 1.0) < 1e-12 and abs(im0) < 1e-12


def test_charfun_both_reports_route_difference(tmp_path):
    out = tmp_path / "cf.csv"
    rc = cli.main(["charfun", "--observable", "sl2-H", "--method", "both",
                   "--t=-4:4:33", "--eps", "0.05",
                   "--format", "csv", "--output", str(out)])
    assert rc == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "t,re_exact,im_exact,re_stone,im_stone,abs_diff"
    diffs = [float(row.split(",")[-1]) for row in lines[1:]]
    # stone is damped by e^{-eps|t|}: difference grows away from t=0
    assert diffs[16] < 1e-5
    assert max(diffs) > 0.05


def test_charfun_json_and_figure(tmp_path, capsys):
    figdir = tmp_path / "figs"
    rc = cli.main(["charfun", "--observable", "sl2-H", "--method", "exact",
                   "--t=-3:3:25", "--format", "json",
                   "--figures", str(figdir)])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["kind"] == "charfun"
    assert doc["observable"] == "sl2-H"
    assert (figdir / "charfun_sl2-H.png").stat().st_size > 0


def test_charfun_requires_resolvable_state(capsys):
    rc = cli.main(["charfun", "--observable", "pauli-1", "--method", "exact"])
    assert rc == 2  # no catalogued vacuum and no explicit amplitudes


def test_charfun_explicit_state(capsys):
    rc = cli.main(["charfun", "--observable", "pauli-1", "--method", "exact",
                   "--state", "0.70710678118654752, 0.70710678118654752",
                   "--t=-3:3:25", "--format", "csv"])
    assert rc == 0
    lines = capsys.readouterr().out.strip().splitlines()
    res = [float(r.split(",")[1]) for r in lines[1:]]
    ts = np.linspace(-3, 3, 25)
    assert np.max(np.abs(np.array(res) - np.cos(ts))) < 1e-10


def test_charfun_bad_grid_is_usage_error(capsys):
    assert cli.main(["charfun", "--observable", "sl2-H", "--t=5:-5:41"]) == 2
    assert cli.main(["charfun", "--observable", "sl2-H", "--t", "x:y:z"]) == 2


# -------------------------------------------------------------------- stone

def test_stone_json_document(capsys):
    rc = cli.main(["stone", "--observable", "sl2-H",
                   "--eps", "0.004,0.002,0.001",
                   "--lambda=-30:30:1201", "--format", "json"])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["kind"] == "spectral-measure"
    atoms = {round(a["location"], 4): a["weight"] for a in doc["atoms"]}
    assert abs(atoms[round(np.sqrt(2), 4)] - (2 - np.sqrt(2)) / 4) < 1e-4
    assert abs(atoms[round(-np.sqrt(2), 4)] - (2 + np.sqrt(2)) / 4) < 1e-4


def test_stone_csv_writes_three_tables(tmp_path):
    base = tmp_path / "measure"
    rc = cli.main(["stone", "--observable", "sl2-H",
                   "--eps", "0.004,0.002,0.001",
                   "--lambda=-30:30:1201", "--format", "csv",
                   "--output", str(base), "--figures", str(tmp_path)])
    assert rc == 0
    for suffix in ("atoms", "density", "cdf"):
        text = (tmp_path / f"measure.{suffix}.csv").read_text()
        assert len(text.strip().splitlines()) > 1
    assert (tmp_path / "measure_sl2-H.png").stat().st_size > 0


def test_stone_csv_needs_output_path(capsys):
    rc = cli.main(["stone", "--observable", "sl2-H", "--format", "csv"])
    assert rc == 2


def test_stone_window_error_suggests_bounds(capsys):
    rc = cli.main(["stone", "--observable", "sl2-H",
                   "--eps", "0.01", "--lambda=-0.5:0.5:51"])
    assert rc == 4
    err = capsys.readouterr().err
    assert "suggested" in err


# ------------------------------------------------------------------- verify

def test_verify_quick_json(capsys):
    rc = cli.main(["verify", "--suite", "quick", "--format", "json"])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["passed"] is True and doc["suite"] == "quick"


def test_verify_text_table(capsys):
    rc = cli.main(["verify", "--suite", "quick"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "PASS" in out and "FAIL" not in out


# ------------------------------------------------------------------- report

def test_report_artifacts_and_determinism(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("SPECTRAL_CF_TIMESTAMP", "2026-01-01T00:00:00Z")
    out1, out2 = tmp_path / "one", tmp_path / "two"
    assert cli.main(["report", "--suite", "quick", "--output", str(out1)]) == 0
    assert cli.main(["report", "--suite", "quick", "--output", str(out2)]) == 0
    capsys.readouterr()

    manifest = json.loads((out1 / "report.json").read_text())
    listed = set(manifest["artifacts"])
    for relpath in ("verify.json", "verify.csv", "charfun_sl2-H.csv",
                    "measure_sl2-H.atoms.csv", "measure_sl2-H.cdf.csv",
                    "figures/verify.png", "figures/charfun_sl2-H.png",
                    "figures/measure_sl2-H.png"):
        assert relpath in listed
        assert (out1 / relpath).stat().st_size > 0

    for relpath in ("report.json", "verify.json", "verify.csv",
                    "charfun_sl2-H.csv", "measure_sl2-H.atoms.csv",
                    "measure_sl2-H.cdf.csv"):
        a = (out1 / relpath).read_bytes()
        b = (out2 / relpath).read_bytes()
        assert a == b, f"{relpath} differs between identical runs"


def test_entry_point_is_installed():
    import subprocess

    res = subprocess.run(["spectral-cf", "--version"], capture_output=True, text=True)
    assert res.returncode == 0
    assert "spectral-cf" in res.stdout
