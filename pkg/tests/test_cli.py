import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from rign import __version__, gn
from rign.cli import UsageError, main, parse_family
from rign.grid import sa_bump_profile


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def write_config(tmp_path, **cfg):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    return str(path)


@pytest.fixture(autouse=True)
def restore_tolerances():
    saved = {k: getattr(gn, k) for k in ("STABILITY_TOL", "MAZYA_FLOOR", "CFO_LIMIT",
                                         "BALANCE_TOL")}
    yield
    for k, v in saved.items():
        setattr(gn, k, v)


# -- family strings ------------------------------------------------------------------


@pytest.mark.parametrize("text,name", [
    ("chi:1.0", "indicator(1)"),
    ("indicator:measure=2", "indicator(2)"),
    ("gauss:0.5", "gaussian_bump(0.5)"),
    ("poly:1,4", "polynomial_bump(1,4)"),
    ("sa_bump:k=2", "sa_bump(2)"),
])
def test_parse_family(text, name):
    assert parse_family(text).name == name


@pytest.mark.parametrize("text,pos", [("blob:1", "position 0"), ("gauss:x", "position 6"),
                                      ("poly:1,k=2", "position 7")])
def test_parse_family_errors_name_position(text, pos):
    with pytest.raises(UsageError, match=pos):
        parse_family(text)


# -- rearrange ---------------------------------------------------------------------------


def test_rearrange_indicator_columns(tmp_path):
    out = tmp_path / "r.csv"
    assert main(["rearrange", "--family", "chi:1.0", "--half-width", "1.5", "--res", "600",
                 "--out", str(out)]) == 0
    header, rows = read_csv(out)
    assert header == ["t", "u_star", "u_star_star"]
    t, us, uss = (np.array([float(r[i]) for r in rows]) for i in range(3))
    np.testing.assert_allclose(uss, np.minimum(1.0, 1.0 / t), rtol=1e-9)
    np.testing.assert_array_equal(us, np.where(t < 1.0, 1.0, 0.0))


def test_rearrange_sa_bump_matches_profile(tmp_path):
    out = tmp_path / "r.csv"
    assert main(["rearrange", "--family", "sa_bump:k=2", "--res", "2048", "--out", str(out)]) == 0
    _, rows = read_csv(out)
    t = np.array([float(r[0]) for r in rows])
    us = np.array([float(r[1]) for r in rows])
    inside = (t > 0.05) & (t < 3.9)  # away from the peak and the support edge
    np.testing.assert_allclose(us[inside], sa_bump_profile(t[inside] / 2, 2), rtol=0.01)


def test_rearrange_from_array(tmp_path):
    arr = tmp_path / "u.npy"
    np.save(arr, np.array([0.0, 0.0, 3.0, 1.0, 2.0, 0.0, 0.0, 0.0, 0.0, 0.0]))
    out = tmp_path / "r.csv"
    assert main(["rearrange", "--input", str(arr), "--out", str(out)]) == 2
    assert main(["rearrange", "--input", str(arr), "--half-width", "2", "--out", str(out)]) == 0
    _, rows = read_csv(out)
    assert float(rows[0][1]) == 3.0
    np.save(arr, np.array([1.0, 2.0]))
    assert main(["rearrange", "--input", str(arr), "--half-width", "2", "--out", str(out)]) == 2


# -- verify --------------------------------------------------------------------------------


def test_verify_lorentz_pass_writes_reports(tmp_path):
    cfg = write_config(tmp_path, j=1, k=2, X="Lp:2", Y="Lp:2", Z="Lp:2", res=256,
                       families=["gauss:1", "poly:1"], s_range=[0.5, 2, 3], half_width=3.5,
                       tolerances={"stability": 0.25})
    out = tmp_path / "rep"
    assert main(["verify", cfg, "--mode", "lorentz", "--out", str(out)]) == 0
    body = json.loads((out / "report.json").read_text())
    assert body["version"] == __version__
    assert body["config"]["X"] == "Lp:2"
    assert body["tolerances"]["stability"] == 0.25
    assert body["verdict"] == "pass"
    assert "best constant" in (out / "report.txt").read_text()
    header, rows = read_csv(out / "curve.csv")
    assert header == ["family", "s", "ratio"] and len(rows) == 6


def test_verify_balance_failure_exit_1(tmp_path):
    cfg = write_config(tmp_path, j=1, k=2, X="Lp:2", Y="Lp:3", Z="Lp:3")
    out = tmp_path / "rep"
    assert main(["verify", cfg, "--mode", "lorentz", "--out", str(out)]) == 1
    body = json.loads((out / "report.json").read_text())
    assert body["marker"] == "hypothesis" and "1/P" in body["error"]


def test_verify_orlicz_cfo_divergent_exit_1(tmp_path):
    cfg = write_config(tmp_path, j=1, k=2, X="Orl:pow:2", Y="Orl:plog:4,-1", Z="Orl:pow:1.333333")
    out = tmp_path / "rep"
    assert main(["verify", cfg, "--mode", "orlicz", "--out", str(out)]) == 1
    assert json.loads((out / "report.json").read_text())["marker"] == "CFO divergent"


def test_verify_falsify_exit_1(tmp_path):
    cfg = write_config(tmp_path, j=1, k=2, X="Lp:1", Y="Lp:inf", Z="Lp:inf", res=256,
                       s_range=[0.01, 100, 17])
    out = tmp_path / "rep"
    assert main(["verify", cfg, "--mode", "falsify", "--out", str(out)]) == 1
    body = json.loads((out / "report.json").read_text())
    assert body["falsify"]["verdict"] == "falsified"
    header, rows = read_csv(out / "curve.csv")
    assert header == ["s", "analytic", "empirical"] and len(rows) == 17


@pytest.mark.parametrize("cfg,needle", [
    ({"j": 1, "k": 2, "X": "Lor:2", "Y": "Lp:2", "Z": "Lp:2"}, "Lor.p"),
    ({"j": 1, "k": 2, "X": "Lp:2", "Y": "Lp:2"}, "'Z'"),
    ({"j": 1, "k": 2, "X": "Lp:2", "Y": "Lp:2", "Z": "Lp:2", "bogus": 1}, "bogus"),
    ({"j": 2, "k": 2, "X": "Lp:2", "Y": "Lp:2", "Z": "Lp:2"}, "j < k"),
    ({"j": 1, "k": 2, "X": "Lp:2", "Y": "Lp:2", "Z": "Lp:2", "mode": "orlicz"}, "Orlicz"),
])
def test_verify_usage_errors_exit_2(tmp_path, capsys, cfg, needle):
    path = write_config(tmp_path, **cfg)
    assert main(["verify", path, "--out", str(tmp_path / "rep")]) == 2
    assert needle in capsys.readouterr().err


def test_support_overflow_exit_2(tmp_path, capsys):
    cfg = write_config(tmp_path, j=1, k=2, X="Lp:2", Y="Lp:2", Z="Lp:2", res=256,
                       families=["gauss:1"], s_range=[0.25, 1, 2])
    assert main(["verify", cfg, "--mode", "lorentz", "--out", str(tmp_path / "rep")]) == 2
    assert "does not fit" in capsys.readouterr().err


def test_missing_config_exit_2(tmp_path):
    assert main(["verify", str(tmp_path / "nope.json")]) == 2


# -- scan, holder, young-check ----------------------------------------------------------------


def test_scan_gnnc_exit_codes(tmp_path):
    out = str(tmp_path / "g.csv")
    assert main(["scan", "--what", "gnnc", "--X", "Lp:2", "--Y", "Lp:2", "--Z", "Lp:2",
                 "--out", out]) == 0
    assert main(["scan", "--what", "gnnc", "--X", "Lp:2", "--Y", "Lp:3", "--Z", "Lp:3",
                 "--out", out]) == 1
    assert main(["scan", "--what", "gnnc", "--X", "Lp:2", "--out", out]) == 2


def test_scan_riesz_herz_and_mazya(tmp_path):
    out = tmp_path / "rh.csv"
    assert main(["scan", "--what", "riesz-herz", "--family", "chi:1", "--res", "256",
                 "--out", str(out)]) == 0
    _, rows = read_csv(out)
    ratios = np.array([float(r[2]) for r in rows])
    assert ratios.min() >= 0.4 and ratios.max() <= 1.1
    out = tmp_path / "m.csv"
    assert main(["scan", "--what", "mazya", "--res", "256", "--out", str(out)]) == 0
    header, rows = read_csv(out)
    assert header == ["family", "res", "sup_ratio"] and len(rows) == 2


def test_scan_dilation_needs_config():
    assert main(["scan", "--what", "dilation"]) == 2


def test_holder_lorentz(capsys):
    assert main(["holder", "--P", "2", "--p", "2", "--R", "4", "--r", "2"]) == 0
    assert capsys.readouterr().out.strip() == "Q=4 q=inf"
    assert main(["holder", "--P", "4", "--p", "2", "--R", "2", "--r", "2"]) == 1
    assert main(["holder", "--P", "2"]) == 2


def test_holder_orlicz(capsys):
    assert main(["holder", "--orlicz", "pow:2", "pow:4", "pow:4", "--pairs", "10"]) == 0
    body = json.loads(capsys.readouterr().out)
    assert body["K_iii"] == pytest.approx(1.0)
    assert main(["holder", "--orlicz", "pow:2", "pow:4", "pow:3", "--pairs", "10"]) == 1


def test_young_check(capsys):
    assert main(["young-check", "plog:2,1"]) == 0
    body = json.loads(capsys.readouterr().out)
    assert body["valid"] and body["upper_index"] == pytest.approx(0.5, abs=0.02)
    # t^3 below 1 and t^2 above is not convex
    assert main(["young-check", "tab:0.001/1e-9;1/1;1000/1e6"]) == 1
    assert json.loads(capsys.readouterr().out)["valid"] is False
    assert main(["young-check", "pow:0.5"]) == 2


def test_bad_verb_exit_2():
    assert main(["frobnicate"]) == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "rign", "--version"], capture_output=True,
                          text=True)
    assert proc.returncode == 0 and __version__ in proc.stdout
