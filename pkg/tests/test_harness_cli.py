from __future__ import annotations

import csv
import io
import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from flmlab import harness as hs
from flmlab.cli import main
from flmlab.errors import ChecksumMismatch, InvalidParameter, UnknownExperiment
from flmlab.fitting import fit_line, fit_loglog


def test_fit_examples():
    fit = fit_loglog([(2, 8), (4, 64), (8, 512)])
    assert fit.slope == pytest.approx(3.0) and fit.r_squared == pytest.approx(1.0)
    assert fit.within(3.05, 0.1) and not fit.within(3.5, 0.1)
    with pytest.raises(InvalidParameter):
        fit_loglog([(1, 1), (2, 2)])
    with pytest.raises(InvalidParameter):
        fit_loglog([(1, 1), (2, -2), (3, 3)])
    with pytest.raises(InvalidParameter):
        fit_line([1, 1, 1], [1, 2, 3])


@given(st.floats(-3, 3), st.floats(-5, 5))
def test_fit_recovers_power_law(k, c):
    xs = np.array([2.0, 5.0, 11.0, 40.0])
    fit = fit_loglog(zip(xs, math.exp(c) * xs**k))
    assert fit.slope == pytest.approx(k, abs=1e-9)
    assert fit.intercept == pytest.approx(c, abs=1e-8)


def test_csv_format():
    text = hs.csv_text(("a", "b", "c"), [(1, 0.1, True), (2, 1 / 3, False)])
    assert text == "a,b,c\n1,0.10000000000000001,true\n2,0.33333333333333331,false\n"
    back = list(csv.reader(io.StringIO(text)))
    assert float(back[2][1]) == 1 / 3


def test_registry():
    assert {"hanner-exact", "lemma21", "geom-flm", "cross-section", "duality-suite"} <= set(hs.REGISTRY)
    with pytest.raises(UnknownExperiment):
        hs.get("no-such-thing")
    exp = hs.get("cross-section")
    with pytest.raises(InvalidParameter):
        exp.resolve({"bogus": 1})


def test_run_writes_csv_and_summary(tmp_path):
    out = tmp_path / "l21.csv"
    outcome = hs.run(hs.ExperimentSpec("lemma21", {}, 3, str(out)))
    assert outcome.passed
    summ = json.loads(hs.summary_path(out).read_text())
    assert summ["seed"] == 3 and summ["csv"] == "l21.csv" and summ["passed"] is True
    assert {"params", "version", "wall_time_s", "flags", "csv_sha256"} <= set(summ)
    table = hs.report([tmp_path])
    assert table.passed and table.rows


def test_report_detects_tampering(tmp_path):
    out = tmp_path / "h.csv"
    hs.run(hs.ExperimentSpec("hanner-family", {"a": "0.5", "max-exp": 12}, 0, str(out)))
    out.write_text(out.read_text() + "tampered\n")
    with pytest.raises(ChecksumMismatch):
        hs.report([out])
    assert main(["report", str(tmp_path)]) == 2


def test_byte_determinism(tmp_path):
    for d in ("a", "b"):
        hs.run_suite(tmp_path / d, 7, only={"hanner-padded", "lemma21", "simplex-mstar"})
    assert hs.compare_dirs(tmp_path / "a", tmp_path / "b") == []
    assert len(list((tmp_path / "a").glob("*.csv"))) == 3


def test_parse_growth():
    assert hs.parse_growth("log").kind == "log"
    assert hs.parse_growth("power:0.3").param == 0.3
    with pytest.raises(InvalidParameter):
        hs.parse_growth("weird")


# -- command line -------------------------------------------------------------


def test_cli_unknown_experiment_writes_nothing(tmp_path, capsys):
    out = tmp_path / "x.csv"
    assert main(["run", "nope", "--out", str(out)]) == 2
    assert "unknown experiment" in capsys.readouterr().err
    assert not any(tmp_path.iterdir())


def test_cli_usage_error():
    assert main(["frobnicate"]) == 2
    assert main(["run", "lemma21", "notapair"]) == 2


def test_cli_empty_report(tmp_path):
    assert main(["report", str(tmp_path)]) == 0


def test_cli_list(capsys):
    assert main(["list"]) == 0
    text = capsys.readouterr().out
    assert "cross-section" in text and "criterion=8" in text


def test_cli_enumerate(capsys):
    assert main(["enumerate", "--body", "cross:4"]) == 0
    text = capsys.readouterr().out
    assert "vertices: 8" in text and "facets: 16" in text
    assert main(["enumerate", "--body", "torus:3"]) == 2


def test_cli_estimate(tmp_path):
    out = tmp_path / "e.csv"
    assert main(["estimate", "--body", "ball:3", "--quantity", "mmstar", "--samples", "2000", "--out", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    assert rows[0]["quantity"] == "mmstar" and float(rows[0]["mean"]) == pytest.approx(1.0)
    assert list(rows[0]) == ["body", "quantity", "mean", "stderr", "samples", "seed"]


def test_cli_hanner(tmp_path):
    out = tmp_path / "fam.csv"
    assert main(["hanner", "--a", "0.5", "--max-exp", "4", "--out", str(out)]) == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["m", "dim", "logV", "logF"]
    assert float(rows[5][2]) == pytest.approx(math.log(1024))
    assert float(rows[4][3]) == pytest.approx(math.log(64))


def test_cli_experiment_and_config(tmp_path, monkeypatch):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("seed.master=99\n")
    monkeypatch.setenv("FLMLAB_CONFIG", str(cfg))
    out = tmp_path / "cs.csv"
    assert main(["experiment", "cross-section", "--n", "2", "--trials", "3", "--out", str(out)]) == 0
    summ = json.loads(hs.summary_path(out).read_text())
    assert summ["seed"] == 99
    out2 = tmp_path / "cs2.csv"
    assert main(["run", "cross-section", "n=2", "trials=3", "--seed", "99", "--out", str(out2)]) == 0
    assert out.read_bytes() == out2.read_bytes()
