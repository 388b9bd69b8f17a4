import json

import numpy as np
import pytest

from phimax.cli import main
from phimax.engines import ConvergenceTrace
from phimax.geometry import PointSet, format_float, hausdorff
from phimax.output import from_pgm, table_from_csv, to_pgm


@pytest.fixture(autouse=True)
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def write_config(path, doc):
    path.write_text(json.dumps(doc))
    return str(path)


def test_check_exit_codes(capsys, workdir):
    assert run(capsys, "check", "cantor")[0] == 0
    assert run(capsys, "check", "convex_pair")[0] == 0
    code, out, _ = run(capsys, "check", "identity")
    assert code == 1
    assert "violated" in out and "phi(max_{w in V_p}" in out
    bad = write_config(workdir / "bad.json", {"box": [[0, 1]]})
    code, _, err = run(capsys, "check", bad)
    assert code == 2 and "maps" in err


def test_check_structured_report(capsys):
    code, out, _ = run(capsys, "check", "identity", "--report-format", "structured")
    doc = json.loads(out)
    assert code == 1 and doc["passed"] is False
    assert doc["checks"][0]["worst_margin"] == 0.5


def test_check_without_certificate_is_usage_error(capsys):
    assert run(capsys, "check", "ladder")[0] == 2


def test_yaml_config(capsys, workdir):
    (workdir / "c.yaml").write_text(
        "box: [[0, 1]]\nmaps:\n  - {type: affine, matrix: [[0.5]], offset: [0]}\nphi: {form: linear, c: 0.5}\np: 1\n"
    )
    assert run(capsys, "check", "c.yaml")[0] == 0


@pytest.mark.parametrize(
    "argv",
    [
        ["attract", "cantor", "--tol", "-1"],
        ["attract", "cantor", "--tol", "0"],
        ["attract", "cantor", "--max-iter", "0"],
        ["attract", "sierpinski", "--pgm", "0x5"],
        ["attract", "sierpinski", "--pgm", "big"],
        ["attract", "cantor", "--seed-point", "2"],
        ["attract", "cantor", "--seed-point", "0,0"],
        ["attract", "cantor", "--max-points", "0"],
        ["attract", "nonexistent"],
        ["codespace", "cantor", "--depth", "-1"],
        ["project", "cantor", "1(3)"],
        ["project", "cantor", "12"],
        ["frobnicate"],
    ],
)
def test_validation_failures_write_nothing(capsys, workdir, argv):
    assert run(capsys, *argv, *([] if argv[0] == "frobnicate" else ["--out", "o/x"]))[0] == 2
    assert list(workdir.iterdir()) == []


def test_attract_cantor(capsys, workdir):
    code, out, _ = run(capsys, "attract", "cantor", "--out", "c")
    assert code == 0
    assert "converged after 7 iterations" in out
    pts = PointSet.from_csv((workdir / "c.csv").read_text())
    assert pts.contains_near([0.0], 1e-3) and pts.contains_near([1.0], 1e-3)
    trace = ConvergenceTrace.from_tsv((workdir / "c.trace.tsv").read_text())
    assert len(trace) == 7


def test_attract_large_tol_one_iteration(capsys):
    code, out, _ = run(capsys, "attract", "cantor", "--tol", "5", "--out", "c")
    assert code == 0 and "after 1 iterations" in out


def test_attract_partial_outputs(capsys, workdir):
    code, out, _ = run(capsys, "attract", "cantor", "--tol", "1e-12", "--max-iter", "3", "--out", "c")
    assert code == 1
    assert sorted(p.name for p in workdir.iterdir()) == ["c.csv.partial", "c.trace.tsv.partial"]


def test_sierpinski_pgm_inside_triangle(capsys, workdir):
    code, _, _ = run(capsys, "attract", "sierpinski", "--out", "s", "--pgm", "512x512")
    assert code == 0
    grid = from_pgm((workdir / "s.pgm").read_text())
    assert grid.shape == (512, 512) and grid.any()
    rows, cols = np.nonzero(grid)
    x = (cols + 0.5) / 512
    y = 1 - (rows + 0.5) / 512
    assert np.all(x + y <= 1 + 2 / 512)
    # the three corners are occupied: bottom left, bottom right, top left
    assert grid[511, 0] and grid[511, 511] and grid[0, 0]


def test_codespace_cross_check(capsys, workdir):
    assert run(capsys, "attract", "cantor", "--out", "a")[0] == 0
    code, out, _ = run(capsys, "codespace", "cantor", "--depth", "7", "--against", "a.csv", "--out", "g")
    assert code == 0
    table = (workdir / "g.table.csv").read_text().splitlines()
    assert len(table) == 128
    printed = float(out.split("cross_check_hausdorff=")[1].split()[0])
    g = table_from_csv((workdir / "g.table.csv").read_text(), 2)
    a = PointSet.from_csv((workdir / "a.csv").read_text())
    assert printed == hausdorff(g.image(), a)
    assert printed <= 2e-3


def test_codespace_depth_zero(capsys, workdir):
    code, _, _ = run(capsys, "codespace", "cantor", "--depth", "0", "--seed-point", "0.25", "--out", "g")
    assert code == 0
    assert (workdir / "g.table.csv").read_text() == ",0.25\n"


def test_codespace_fixed_point_and_cap(capsys):
    code, out, _ = run(capsys, "codespace", "cantor", "--out", "g")
    assert code == 0 and "depth 7" in out
    code, _, err = run(capsys, "codespace", "sierpinski", "--depth", "14", "--out", "g")
    assert code == 1 and "depth" in err


@pytest.mark.parametrize(
    "config, word, expected",
    [("cantor", "(1)", [0.0]), ("cantor", "1(2)", [1 / 3]), ("sierpinski", "(1)", [0.0, 0.0]),
     ("sierpinski", "(3)", [0.0, 1.0])],
)
def test_project(capsys, config, word, expected):
    code, out, _ = run(capsys, "project", config, word)
    assert code == 0
    values = [float(v) for v in out.splitlines()[0].split()]
    assert values == pytest.approx(expected, abs=1e-9)
    residual = float(out.split("conjugacy_residual=")[1].split()[0])
    assert residual <= 1e-9


def test_conjecture_ladder(capsys, workdir):
    code, out, _ = run(capsys, "conjecture", "ladder", "--out", "l")
    assert code == 0
    lines = (workdir / "l.conjecture.tsv").read_text().splitlines()
    assert lines[0].startswith("# numerical evidence")
    rows = [line.split("\t") for line in lines[2:]]
    for level in ("2", "4", "8"):
        d = [float(r[2]) for r in rows if r[0] == level]
        assert len(d) == 7 and all(b <= a for a, b in zip(d, d[1:]))


def test_conjecture_slope_growth_names_clause_b(capsys, workdir):
    code, out, _ = run(capsys, "conjecture", "slope_growth", "--out", "l")
    assert code == 1
    assert "clause b" in out
    assert list(workdir.iterdir()) == []


def test_conjecture_single_level(capsys, workdir):
    doc = {
        "box": [[0, 1]],
        "family": [{"type": "affine", "matrix": [[1 / 3]], "offset": [0]},
                   {"type": "affine", "matrix": [[1 / 3]], "offset": [2 / 3]}],
        "levels": [2],
        "epsilon": 0.1,
        "run": {"tol": 1e-3, "depths": [7]},
    }
    cfg = write_config(workdir / "one.json", doc)
    code, _, _ = run(capsys, "conjecture", cfg, "--out", "l")
    assert code == 0
    row = (workdir / "l.conjecture.tsv").read_text().splitlines()[-1].split("\t")
    assert row[:2] == ["2", "7"] and float(row[2]) <= 2e-3


def test_compare(capsys, workdir):
    (workdir / "a.csv").write_text("0\n1\n")
    (workdir / "b.csv").write_text("0\n0.5\n")
    code, out, _ = run(capsys, "compare", "a.csv", "b.csv")
    assert code == 0 and out.strip() == "0.5"
    assert run(capsys, "compare", "a.csv", "missing.csv")[0] == 2


def test_determinism(capsys, workdir):
    for prefix in ("r1", "r2"):
        assert run(capsys, "attract", "sierpinski", "--tol", "0.01", "--pgm", "64x64", "--out", prefix)[0] == 0
        assert run(capsys, "codespace", "cantor", "--out", prefix)[0] == 0
        assert run(capsys, "conjecture", "ladder", "--depth", "3", "--out", prefix)[0] == 0
    for suffix in (".csv", ".trace.tsv", ".pgm", ".table.csv", ".code.trace.tsv", ".conjecture.tsv"):
        assert (workdir / f"r1{suffix}").read_bytes() == (workdir / f"r2{suffix}").read_bytes()


def test_outputs_round_trip(capsys, workdir):
    assert run(capsys, "attract", "sierpinski", "--tol", "0.01", "--pgm", "64x64", "--out", "s")[0] == 0
    assert run(capsys, "codespace", "cantor", "--out", "s")[0] == 0
    assert run(capsys, "conjecture", "ladder", "--depth", "2", "--out", "s")[0] == 0
    csv = (workdir / "s.csv").read_text()
    assert PointSet.from_csv(csv).to_csv() == csv
    pgm = (workdir / "s.pgm").read_text()
    assert to_pgm(from_pgm(pgm)) == pgm
    for name in ("s.trace.tsv", "s.code.trace.tsv"):
        text = (workdir / name).read_text()
        assert ConvergenceTrace.from_tsv(text).to_tsv(timing=False) == text
    table = (workdir / "s.table.csv").read_text()
    assert table_from_csv(table, 2).to_csv() == table
    lines = (workdir / "s.conjecture.tsv").read_text().splitlines()
    body = [f"{lv}\t{d}\t{format_float(float(x))}" for lv, d, x in (line.split("\t") for line in lines[2:])]
    assert lines[2:] == body
