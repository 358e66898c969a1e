from __future__ import annotations

import filecmp

import pytest

from cubenorms.errors import InvalidParameterError
from cubenorms.experiments import (
    CSV_COLUMNS,
    emit_report,
    render_csv,
    run_experiment,
)

SMALL21 = {"s": [2], "N": [8], "eta": [0.5, 0.2, 0.05], "seeds": 3, "variants": ["weak"]}
SMALL31 = {"s": [2], "V": [3], "eta": [0.5, 0.2, 0.05], "seeds": 3}


def test_prop21_small_grid_runs_green():
    report = run_experiment("prop21", SMALL21)
    assert report.passed
    per_seed = [a for a in report.assertions if a["name"] == "prop21-per-seed-nonincreasing"]
    assert len(per_seed) == 3
    families = {r["family"] for r in report.rows}
    assert families == {"sparse", "constant-one"}


def test_prop31_accepts_N_alias():
    report = run_experiment("prop31", {"s": [2], "N": [3], "eta": [0.5, 0.1], "seeds": 2})
    assert report.grid["V"] == [3]
    assert report.passed


def test_prop23_small_grid_runs_green():
    report = run_experiment("prop23", {"N": [8], "eta": [0.5, 0.1], "seeds": 2})
    assert report.passed
    assert all(r["cert_name"] == "psi_dev" for r in report.rows)


def test_appendix_runs_green():
    report = run_experiment("appendix", {"seeds": 3, "eta": [0.5, 0.1]})
    assert report.passed
    names = {a["name"] for a in report.assertions}
    assert "appendix-gcs-ell2" in names
    assert "appendix-gcs-ell4" in names
    assert "appendix-monotonicity-2-4" in names
    assert "appendix-bounded-comparison" in names
    assert "appendix-majorized-gap-median-nonincreasing" in names


def test_unknown_experiment_rejected():
    with pytest.raises(InvalidParameterError):
        run_experiment("prop99")


def test_eta_ladder_must_have_two_levels():
    with pytest.raises(InvalidParameterError):
        run_experiment("prop31", {"eta": [0.5], "seeds": 2})


def test_csv_is_byte_stable():
    a = render_csv(run_experiment("prop31", SMALL31))
    b = render_csv(run_experiment("prop31", SMALL31))
    assert a == b
    header = a.splitlines()[0]
    assert header == ",".join(CSV_COLUMNS)


def test_emit_report_csv_and_json(tmp_path):
    report = run_experiment("prop31", SMALL31)
    p1 = tmp_path / "a.csv"
    p2 = tmp_path / "b.csv"
    emit_report(report, str(p1), "csv")
    emit_report(run_experiment("prop31", SMALL31), str(p2), "csv")
    assert filecmp.cmp(p1, p2, shallow=False)
    pj = tmp_path / "a.json"
    emit_report(report, str(pj), "json")
    text = pj.read_text()
    assert '"experiment"' in text
    assert text.endswith("\n")
    with pytest.raises(InvalidParameterError):
        emit_report(report, str(tmp_path / "x.tsv"), "tsv")


def test_assertion_rows_present_in_csv():
    report = run_experiment("prop31", SMALL31)
    lines = render_csv(report).splitlines()
    kinds = {line.split(",")[0] for line in lines[1:]}
    assert kinds == {"measurement", "assertion"}
