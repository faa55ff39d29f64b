import math
import subprocess
import sys

import numpy as np
import pytest

from youngop import cli
from youngop.operator_young import SandwichCondition
from youngop.symcalc import SpdMatrix, read_matrix, write_matrix


def _run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def _rows(text, sep=None):
    return [ln.split(sep) for ln in text.splitlines() if ln and not ln.startswith("#")]


# -- verify -------------------------------------------------------------------


def test_verify_small_passes(capsys, tmp_path):
    path = tmp_path / "r.txt"
    code, _, _ = _run(capsys, "verify", "--seed", "1", "--dims", "1,2", "--trials", "4",
                      "-o", str(path))
    assert code == cli.EXIT_OK
    text = path.read_text()
    assert text.splitlines()[-1].startswith("overall: PASS")
    assert "nonordering-P" in text and "oracle-1x1" in text


def test_verify_csv_header(capsys, tmp_path):
    path = tmp_path / "out.csv"
    code, _, _ = _run(capsys, "verify", "--dims", "2", "--trials", "2", "--format", "csv",
                      "-o", str(path))
    assert code == cli.EXIT_OK
    lines = path.read_text().splitlines()
    assert lines[0] == "family,dim,trial,lower_margin,upper_margin,scale,pass"
    assert all(len(ln.split(",")) == 7 for ln in lines)


def test_verify_deterministic(capsys):
    _, out1, _ = _run(capsys, "verify", "--seed", "5", "--dims", "1,3", "--trials", "3")
    _, out2, _ = _run(capsys, "verify", "--seed", "5", "--dims", "1,3", "--trials", "3")
    assert out1 == out2
    _, out3, _ = _run(capsys, "verify", "--seed", "6", "--dims", "1,3", "--trials", "3",
                      "--format", "csv")
    _, out4, _ = _run(capsys, "verify", "--seed", "5", "--dims", "1,3", "--trials", "3",
                      "--format", "csv")
    assert out3 != out4


def test_verify_seed_from_environment(capsys, monkeypatch):
    args = ("verify", "--dims", "2", "--trials", "2", "--format", "csv")
    monkeypatch.setenv(cli.SEED_ENV, "8")
    _, from_env, _ = _run(capsys, *args)
    monkeypatch.delenv(cli.SEED_ENV)
    _, explicit, _ = _run(capsys, *args, "--seed", "8")
    assert from_env == explicit
    monkeypatch.setenv(cli.SEED_ENV, "eight")
    code, _, err = _run(capsys, *args)
    assert code == cli.EXIT_USAGE
    assert cli.SEED_ENV in err


def test_verify_negative_tolerance(capsys):
    code, _, _ = _run(capsys, "verify", "--tol", "-1", "--trials", "1")
    assert code == cli.EXIT_USAGE


def test_verify_reports_failing_families(capsys, monkeypatch):
    from youngop import verify as vf

    def fake(*args, **kwargs):
        return [vf.SuiteResult("amgm", 2, 1, failures=[vf.Failure(0, "x", -1.0, -1.0)])]

    monkeypatch.setattr(cli, "collect_verify", fake)
    code, out, err = _run(capsys, "verify", "--trials", "1")
    assert code == cli.EXIT_FAIL
    assert "failing families: amgm" in err
    assert out.startswith("FAIL amgm")


@pytest.mark.parametrize("argv", [
    ["verify", "--trials", "0"],
    ["verify", "--dims", "0"],
    ["verify", "--dims", "a,b"],
    ["verify", "--format", "xml"],
    ["nope"],
    [],
])
def test_usage_errors(capsys, argv):
    code, _, _ = _run(capsys, *argv)
    assert code == cli.EXIT_USAGE


def test_help_exits_ok(capsys):
    code, out, _ = _run(capsys, "--help")
    assert code == cli.EXIT_OK
    assert "verify" in out


def test_unwritable_output_is_io_error(capsys, tmp_path):
    code, _, err = _run(capsys, "surface", "--grid", "2x2", "-o", str(tmp_path / "no" / "x.csv"))
    assert code == cli.EXIT_IO
    assert "I/O error" in err


# -- compare ------------------------------------------------------------------


def test_compare_scalar_km_identity(capsys):
    code, out, _ = _run(capsys, "compare", "--a", "1", "--b", "4", "--nu", "0.5",
                        "--format", "csv")
    assert code == cli.EXIT_OK
    rows = {r[0]: r for r in _rows(out, ",")}
    assert float(rows["km"][2]) == pytest.approx(0.5, rel=1e-15)
    assert float(rows["km"][4]) == pytest.approx(0.5, rel=1e-15)
    assert len(rows) == 8


def test_compare_scalar_newdiff(capsys):
    _, out, _ = _run(capsys, "compare", "--a", "1", "--b", repr(math.e ** 2), "--format", "csv")
    row = {r[0]: r for r in _rows(out, ",")}["newdiff"]
    assert [float(v) for v in row[2:5]] == pytest.approx([0.5, 1.4762462, 3.6945280], rel=1e-7)


def test_compare_scalar_rows_sorted_by_form(capsys):
    _, out, _ = _run(capsys, "compare", "--a", "2", "--b", "3", "--nu", "0.3")
    forms = [r[1] for r in _rows(out)[1:]]
    assert forms == sorted(forms)


def test_compare_identical_matrices(capsys, tmp_path):
    a = SpdMatrix([[2.0, 0.5], [0.5, 1.0]])
    write_matrix(tmp_path / "A.txt", a)
    write_matrix(tmp_path / "B.txt", a)
    code, out, _ = _run(capsys, "compare", "--A", str(tmp_path / "A.txt"),
                        "--B", str(tmp_path / "B.txt"), "--format", "csv")
    assert code == cli.EXIT_OK
    rows = _rows(out, ",")
    assert rows[0][0] == "family"
    # no separation and no interior window around 1: sandwich families drop out
    inapplicable = [ln.split()[2] for ln in out.splitlines() if ln.startswith("# inapplicable")]
    assert {"thmA", "thmB", "cor31"} <= {t.rstrip(":") for t in inapplicable}
    for r in rows[1:]:
        assert r[4] == "PASS"
        for m in map(float, r[1:3]):
            # amgm has no upper bound and reports an infinite margin
            assert abs(m) <= 1e-12 or m == math.inf


def test_compare_dimension_mismatch(capsys, tmp_path):
    write_matrix(tmp_path / "A.txt", SpdMatrix(np.eye(2)))
    write_matrix(tmp_path / "B.txt", SpdMatrix(np.eye(3)))
    code, _, err = _run(capsys, "compare", "--A", str(tmp_path / "A.txt"),
                        "--B", str(tmp_path / "B.txt"))
    assert code == cli.EXIT_USAGE
    assert "mismatch" in err


def test_compare_parse_error(capsys, tmp_path):
    (tmp_path / "A.txt").write_text("2\n1 x\n0 1\n")
    write_matrix(tmp_path / "B.txt", SpdMatrix(np.eye(2)))
    code, _, _ = _run(capsys, "compare", "--A", str(tmp_path / "A.txt"),
                      "--B", str(tmp_path / "B.txt"))
    assert code == cli.EXIT_USAGE


def test_compare_missing_file_is_io_error(capsys, tmp_path):
    code, _, _ = _run(capsys, "compare", "--A", str(tmp_path / "none.txt"),
                      "--B", str(tmp_path / "none.txt"))
    assert code == cli.EXIT_IO


@pytest.mark.parametrize("argv", [
    ["compare"],
    ["compare", "--a", "1"],
    ["compare", "--A", "x.txt"],
    ["compare", "--a", "1", "--b", "2", "--nu", "1.5"],
])
def test_compare_usage(capsys, argv):
    assert _run(capsys, *argv)[0] == cli.EXIT_USAGE


# -- surface ------------------------------------------------------------------


@pytest.mark.parametrize("mode", ["P", "Q"])
def test_surface_both_signs(capsys, mode):
    code, out, _ = _run(capsys, "surface", "--mode", mode)
    assert code == cli.EXIT_OK
    lines = out.splitlines()
    assert lines[0] == "nu,x,first_bound,second_bound,difference"
    assert len(lines) == 1 + 200 * 200 + 1
    diff = np.array([float(ln.rsplit(",", 1)[1]) for ln in lines[1:-1]])
    assert (diff > 0).any() and (diff < 0).any()
    assert lines[-1].startswith(f"# witnesses mode={mode} positive")


def test_surface_single_cell(capsys):
    code, out, _ = _run(capsys, "surface", "--grid", "1x1")
    assert code == cli.EXIT_OK
    lines = out.splitlines()
    assert len(lines) == 3
    assert [float(v) for v in lines[1].split(",")[:2]] == [0.5, 1.0]
    assert "none" in lines[-1]


def test_surface_custom_range(capsys):
    _, out, _ = _run(capsys, "surface", "--grid", "2x2", "--x-range", "1,3")
    xs = sorted({float(ln.split(",")[1]) for ln in out.splitlines()[1:-1]})
    assert xs == [1.5, 2.5]


@pytest.mark.parametrize("argv", [
    ["surface", "--grid", "0x5"],
    ["surface", "--grid", "five"],
    ["surface", "--nu-range", "0,2"],
    ["surface", "--mode", "R"],
])
def test_surface_usage(capsys, argv):
    assert _run(capsys, *argv)[0] == cli.EXIT_USAGE


# -- gen --------------------------------------------------------------------------


@pytest.mark.parametrize("cond", ["i", "ii"])
def test_gen_writes_verified_pair(capsys, tmp_path, cond):
    pa, pb = tmp_path / "A.txt", tmp_path / "B.txt"
    code, out, _ = _run(capsys, "gen", "--cond", cond, "--mprime", "1", "--m", "2", "--M", "4",
                        "--Mprime", "8", "--dim", "3", "--seed", "7",
                        "--out-a", str(pa), "--out-b", str(pb))
    assert code == cli.EXIT_OK
    assert "verified" in out
    a, b = SpdMatrix(read_matrix(pa)), SpdMatrix(read_matrix(pb))
    assert a.dim == b.dim == 3
    assert SandwichCondition(1.0, 2.0, 4.0, 8.0, cond).satisfied_by(a, b)
    low = a if cond == "i" else b
    assert low.eig.hi <= 2.0 * (1 + 1e-12)


def test_gen_then_compare(capsys, tmp_path):
    pa, pb = tmp_path / "A.txt", tmp_path / "B.txt"
    _run(capsys, "gen", "--mprime", "1", "--m", "2", "--M", "4", "--Mprime", "8",
         "--seed", "3", "--out-a", str(pa), "--out-b", str(pb))
    code, out, _ = _run(capsys, "compare", "--A", str(pa), "--B", str(pb), "--nu", "0.3")
    assert code == cli.EXIT_OK
    tags = {r[0] for r in _rows(out)[1:]}
    assert {"thmA", "thmB", "cor31", "thm31", "thm32", "thm33"} <= tags


def test_gen_deterministic(capsys, tmp_path):
    outs = []
    for k in range(2):
        pa, pb = tmp_path / f"A{k}.txt", tmp_path / f"B{k}.txt"
        _run(capsys, "gen", "--mprime", "1", "--m", "2", "--M", "4", "--Mprime", "8",
             "--seed", "11", "--out-a", str(pa), "--out-b", str(pb))
        outs.append((pa.read_bytes(), pb.read_bytes()))
    assert outs[0] == outs[1]


@pytest.mark.parametrize("consts", [("2", "1", "4", "8"), ("1", "2", "2", "8"), ("-1", "2", "4", "8")])
def test_gen_invalid_condition(capsys, tmp_path, consts):
    mp, m, M, Mp = consts
    code, _, err = _run(capsys, "gen", "--mprime", mp, "--m", m, "--M", M, "--Mprime", Mp,
                        "--out-a", str(tmp_path / "A"), "--out-b", str(tmp_path / "B"))
    assert code == cli.EXIT_USAGE
    assert "sandwich" in err


def test_gen_dim_limit(capsys, tmp_path):
    code, _, _ = _run(capsys, "gen", "--mprime", "1", "--m", "2", "--M", "4", "--Mprime", "8",
                      "--dim", "100", "--out-a", str(tmp_path / "A"))
    assert code == cli.EXIT_USAGE


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "youngop", "compare", "--a", "1", "--b", "4"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("family form lower middle upper pass")
