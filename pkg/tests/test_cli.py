import csv

import numpy as np
import pytest

from cigfht.cli import main, sweep_header
from cigfht.density import read_curves_csv


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


@pytest.fixture
def out(tmp_path):
    return tmp_path / "out"


def test_density_writes_curves(out):
    assert main(["density", "fig4.scn", "--out", str(out), "--grid", "2000"]) == 0
    cig, ig = read_curves_csv(out / "fig4_density.csv")
    post = cig.grid >= 1.5
    assert np.all(cig.pdf[post] > 0)
    assert cig.grid.size == 2000


def test_simulate_writes_histogram_and_arrivals(out, tmp_path):
    scn = tmp_path / "tiny.scn"
    scn.write_text("name = tiny\n[drift]\nkind = constant\n[sim]\nn_trajectories = 2000\nt_max = 5\n[output]\nbins = 25\n")
    assert main(["simulate", str(scn), "--out", str(out), "--threads", "2", "--arrivals", "csv"]) == 0
    hist = rows(out / "tiny_hist.csv")
    assert hist[0] == ["bin_left", "bin_right", "density"] and len(hist) == 26
    assert len(rows(out / "tiny_arrivals.csv")) == 2001


def test_compare_outputs(out, capsys):
    assert main(["compare", "fig3.scn", "--out", str(out), "--threads", "1"]) == 0
    table = capsys.readouterr().out
    assert "L1" in table and "C-IG" in table
    data = rows(out / "fig3_compare.csv")
    assert data[0] == ["t", "f_cig", "f_ig", "f_mc"] and len(data) == 201
    report = (out / "fig3_report.txt").read_text()
    assert "[cig]" in report and "[ig]" in report and "l1 = " in report


def test_compare_is_reproducible(out, tmp_path):
    other = tmp_path / "again"
    assert main(["compare", "fig4.scn", "--out", str(out), "--threads", "1"]) == 0
    assert main(["compare", "fig4.scn", "--out", str(other), "--threads", "3"]) == 0
    assert (out / "fig4_compare.csv").read_bytes() == (other / "fig4_compare.csv").read_bytes()


def test_diagnose(out):
    assert main(["diagnose", "fig4.scn", "--out", str(out), "--paths", "7"]) == 0
    data = rows(out / "fig4_girsanov.csv")
    assert len(data) == 8
    assert max(float(r[-1]) for r in data[1:]) < 1e-9  # step: identity is exact on grid


def test_sweep_rows(out):
    assert main(["sweep", "fig3.scn", "--param", "drift.A", "--values", "0,1,2,3", "--out", str(out),
                 "--threads", "1"]) == 0
    data = rows(out / "fig3_sweep.csv")
    assert data[0] == sweep_header()
    assert [r[1] for r in data[1:]] == ["0", "1", "2", "3"]
    head = data[0]
    a0 = dict(zip(head, data[1]))
    assert abs(float(a0["cig_l1"]) - float(a0["ig_l1"])) < 0.01


def test_env_output_dir(monkeypatch, tmp_path):
    monkeypatch.setenv("CIGFHT_OUT", str(tmp_path / "env"))
    from cigfht.cli import build_parser

    assert build_parser().parse_args(["density", "fig3.scn"]).out == str(tmp_path / "env")


def test_errors_exit_nonzero(out, tmp_path, capsys):
    assert main(["density", "nope.scn", "--out", str(out)]) == 1
    bad = tmp_path / "bad.scn"
    bad.write_text("name = bad\n[drift]\nkind = step\nA = 2\n")
    assert main(["density", str(bad), "--out", str(out)]) == 1
    err = capsys.readouterr().err
    assert "drift.t_switch" in err and "bad" in err
    assert main(["sweep", "fig3.scn", "--param", "drift.A", "--values", ",", "--out", str(out)]) == 1
    assert main(["density", "fig3.scn", "--tmax", "-1", "--out", str(out)]) == 1
