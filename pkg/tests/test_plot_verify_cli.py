from __future__ import annotations

import json
import subprocess
import sys
import xml.etree.ElementTree as ET

import pytest

from mcco.bench import CSV_HEADER, BenchResultRow, rows_to_csv
from mcco.cli import main
from mcco.core import load_problem
from mcco.plot import render_svg
from mcco.verify import CHECK_HEADER, LEMMA_HEADER, run_suite

SVG = "{http://www.w3.org/2000/svg}"


def _row(method, n, d, h, trial=0):
    return BenchResultRow(method, method, n, trial, 0, 10.0, 10.0 - d, d, h, n)


def test_svg_empty_input_says_no_data():
    svg = render_svg([])
    root = ET.fromstring(svg)
    texts = [t.text for t in root.iter(f"{SVG}text")]
    assert texts.count("no data") == 3


def test_svg_single_point_series():
    root = ET.fromstring(render_svg([_row("quad", 50, 1.0, 2)]))
    assert len(list(root.iter(f"{SVG}circle"))) == 1
    assert not list(root.iter(f"{SVG}polyline"))


def test_svg_three_panels():
    rows = [_row(m, n, d, 1, t) for m in ("anneal", "quad") for n in (50, 300) for t, d in enumerate((0.0, 2.0))]
    root = ET.fromstring(render_svg(rows))
    titles = [t.text for t in root.iter(f"{SVG}text") if t.get("font-weight") == "bold"]
    assert titles == ["Mean distance to optimum", "Distance distribution", "Hamming distance"]
    assert len(list(root.iter(f"{SVG}polyline"))) == 2


@pytest.mark.parametrize("suite", ["proposition1", "transform", "threshold"])
def test_passing_suites(suite):
    checks, text = run_suite(suite)
    header = LEMMA_HEADER if suite == "transform" else CHECK_HEADER
    assert text.splitlines()[0] == ",".join(header)
    assert all(c.passed for c in checks)


def test_combinatorics_suite_reports_the_crossing():
    checks, _ = run_suite("combinatorics")
    failed = [(c.name, c.params) for c in checks if not c.passed]
    assert failed == [("p_realize_above_half", "N=25")]


def test_unknown_suite():
    with pytest.raises(ValueError):
        run_suite("rip")


# -- command line -------------------------------------------------------------

def test_gen_solve_anneal(tmp_path, capsys):
    prob = tmp_path / "p.json"
    assert main(["gen", "--seed", "7", "--out", str(prob)]) == 0
    rs = load_problem(prob)
    assert rs.n_bits == 12 and 3 <= len(rs.rules) <= 15
    capsys.readouterr()
    assert main(["solve", "--problem", str(prob), "--sketch", "quint", "--samples", "100", "--seed", "3"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == ",".join(CSV_HEADER) and lines[1].split(",")[9] == "100"
    assert main(["anneal", "--problem", str(prob), "--budget", "77", "--t0", "2", "--t1", "0.01"]) == 0
    assert capsys.readouterr().out.splitlines()[1].split(",")[9] == "77"


def test_bench_and_plot(tmp_path):
    prob = tmp_path / "p.json"
    main(["gen", "--n-bits", "10", "--out", str(prob)])
    out = tmp_path / "b.csv"
    assert main(["bench", "--problem", str(prob), "--methods", "anneal,quad", "--samples", "50,100",
                 "--trials", "3", "--out", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 1 + 2 * 2 * 3
    assert json.loads((tmp_path / "b.csv.summary.json").read_text())["baseline"] == "metropolis-geometric"
    svg = tmp_path / "b.svg"
    assert main(["plot", str(out), str(svg)]) == 0
    ET.parse(svg)


def test_bench_is_deterministic_from_cli(tmp_path):
    prob = tmp_path / "p.json"
    main(["gen", "--n-bits", "10", "--out", str(prob)])
    outs = []
    for name in ("a.csv", "b.csv"):
        main(["bench", "--problem", str(prob), "--methods", "quad,anneal", "--samples", "60",
              "--trials", "4", "--seed", "9", "--out", str(tmp_path / name)])
        outs.append((tmp_path / name).read_bytes())
    assert outs[0] == outs[1]


def test_exit_codes(tmp_path, capsys):
    assert main(["verify", "--suite", "proposition1", "--out", str(tmp_path / "v.csv")]) == 0
    assert main(["verify", "--suite", "combinatorics", "--out", str(tmp_path / "c.csv")]) == 2
    assert main(["solve", "--problem", str(tmp_path / "missing.json")]) == 1
    prob = tmp_path / "p.json"
    main(["gen", "--out", str(prob)])
    assert main(["bench", "--problem", str(prob), "--methods", "bp", "--out", str(tmp_path / "x.csv")]) == 1
    assert main(["gen", "--reward-range", "1"]) == 1
    with pytest.raises(SystemExit) as exc:
        main(["solve"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 1


def test_console_script_entry_point():
    result = subprocess.run([sys.executable, "-m", "mcco.cli", "verify", "--suite", "proposition1"],
                            capture_output=True, text=True)
    assert result.returncode == 0
    assert result.stdout.startswith(",".join(CHECK_HEADER))
