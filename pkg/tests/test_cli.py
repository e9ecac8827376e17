import csv
import io
import json

from fractions import Fraction

import pytest

from egflab.cli import main, parse_matrix_arg, parse_series
from egflab.errors import DomainError
from egflab.riordan import TriMatrix, stirling_matrix, tri_mul
from egflab.series import Series


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def read_csv(text):
    return list(csv.reader(io.StringIO(text)))


def test_parse_series_catalog_and_lists():
    assert parse_series("exp", 4) == Series.exp_z(4)
    assert parse_series("1", 3) == Series.one(3)
    assert parse_series("0,1", 3) == Series.z(3)
    assert parse_series("1,1/2, 3", 3) == Series([1, Fraction(1, 2), 3, 0])
    with pytest.raises(DomainError):
        parse_series("1,2,3,4,5", 2)
    with pytest.raises(DomainError):
        parse_series("bogus-name", 3)


def test_parse_matrix_arg():
    assert parse_matrix_arg("2x2:1,0,0,1") == ((1, 0), (0, 1))
    assert parse_matrix_arg("1x3:4,5,6") == ((4, 5, 6),)
    for bad in ("2x2:1,2,3", "x:1", "2y2:1,2,3,4", "junk"):
        with pytest.raises(DomainError):
            parse_matrix_arg(bad)


def test_diagrams_csv_total_multiplicity(capsys):
    code, out, _ = run_cli(capsys, "diagrams", "--n", "3", "--format", "csv")
    assert code == 0
    rows = read_csv(out)
    assert rows[0] == ["n", "matrix", "mult", "alpha", "beta"]
    assert sum(int(r[2]) for r in rows[1:]) == 25
    assert len(rows) - 1 == 10


def test_diagrams_json_shape(capsys):
    code, out, _ = run_cli(capsys, "diagrams", "--n", "2", "--format", "json")
    assert code == 0
    obj = json.loads(out)
    assert obj["schema"] == "egflab.diagrams/1"
    assert obj["total_mult"] == 4
    assert obj["classes"] == 4


def test_power_half_squares_back(capsys):
    code, out, _ = run_cli(
        capsys, "power", "--g", "1", "--phi", "exp-1", "--t", "1/2", "--size", "6",
        "--format", "json",
    )
    assert code == 0
    half = TriMatrix.from_json_obj(json.loads(out))
    assert tri_mul(half, half) == stirling_matrix(6)


def test_riordan_binomial_rows(capsys):
    code, out, _ = run_cli(
        capsys, "riordan", "--g", "exp", "--phi", "z", "--size", "5", "--format", "csv"
    )
    assert code == 0
    rows = read_csv(out)
    assert rows[4] == ["1", "4", "6", "4", "1"]


def test_log_of_binomial_matrix(capsys):
    code, out, _ = run_cli(
        capsys, "log", "--g", "exp", "--phi", "z", "--size", "5", "--format", "csv"
    )
    assert code == 0
    rows = read_csv(out)
    # sub-diagonal n, zeros elsewhere
    for i, row in enumerate(rows):
        for j, v in enumerate(row):
            assert Fraction(v) == (i if j == i - 1 else 0)


def test_field_rows_for_block_substitution(capsys):
    code, out, _ = run_cli(
        capsys, "field", "--phi", "exp-1", "--size", "6", "--format", "csv"
    )
    assert code == 0
    rows = read_csv(out)
    assert rows[0] == ["n", "egf", "taylor"]
    assert rows[3] == ["2", "1", "1/2"]
    assert rows[1][1] == "0" and rows[2][1] == "0"


def test_hadamard_of_exponentials(capsys):
    code, out, _ = run_cli(
        capsys, "hadamard", "--f", "exp", "--g", "exp-1", "--order", "4",
        "--format", "json",
    )
    assert code == 0
    obj = json.loads(out)
    assert obj["schema"] == "egflab.series/1"
    assert obj["egf_coeffs"] == ["0", "1", "1", "1", "1"]


def test_mult_fast_and_brute_agree(capsys):
    code, out, _ = run_cli(
        capsys, "mult", "--matrix", "2x2:0,1,2,0", "--format", "json"
    )
    assert code == 0
    fastv = json.loads(out)
    code, out, _ = run_cli(
        capsys, "mult", "--matrix", "2x2:2,0,0,1", "--brute", "--format", "json"
    )
    assert code == 0
    brute = json.loads(out)
    assert fastv["mult"] == 3
    assert brute["mult"] == 3
    assert fastv["matrix"] == "2x2:0,1,2,0"
    # the second argument is a permuted representative of another class
    assert brute["matrix"] == "2x2:0,1,2,0" or brute["weight"] == 3


def test_expformula_matrix_and_oracle_side_by_side(capsys):
    code, out, _ = run_cli(
        capsys, "expformula", "--counts", "1,1,1,1", "--size", "5",
        "--oracle", "equivalence", "--format", "csv",
    )
    assert code == 0
    rows = read_csv(out)
    assert rows[0] == ["n", "k", "matrix", "oracle"]
    assert len(rows) == 1 + 1 + 2 + 3 + 4
    for _, _, mv, ov in rows[1:]:
        assert mv == ov


def test_montecarlo_run_json(capsys):
    code, out, _ = run_cli(
        capsys, "montecarlo", "--n", "4", "--r", "10", "--drawings", "275",
        "--seed", "42",
    )
    assert code == 0
    obj = json.loads(out)
    assert obj["schema"] == "egflab.experiment/1"
    assert obj["spec"]["n"] == 4 and obj["spec"]["seed"] == 42
    assert obj["bound"] == "1/10"
    assert 0 <= Fraction(obj["estimate"]) <= 1
    assert "elapsed_ms" in obj
    code, out2, _ = run_cli(
        capsys, "montecarlo", "--n", "4", "--r", "10", "--drawings", "275",
        "--seed", "42",
    )
    a, b = json.loads(out), json.loads(out2)
    a.pop("elapsed_ms"), b.pop("elapsed_ms")
    assert a == b


def test_montecarlo_csv_row(capsys):
    code, out, _ = run_cli(
        capsys, "montecarlo", "--n", "3", "--r", "10", "--drawings", "50",
        "--seed", "1", "--format", "csv",
    )
    assert code == 0
    rows = read_csv(out)
    assert rows[0][:6] == ["n", "r", "drawings", "seed", "mode", "hits"]
    assert rows[1][5] == "50" and rows[1][6] == "1"


def test_montecarlo_tolerance_flags(capsys):
    code, out, _ = run_cli(
        capsys, "montecarlo", "--n", "4", "--r", "10", "--drawings", "30",
        "--seed", "3", "--mode", "tolerance", "--eps", "1/2",
    )
    assert code == 0
    obj = json.loads(out)
    assert obj["spec"]["mode"] == "tolerance"
    assert obj["spec"]["eps"] == "1/2"


def test_montecarlo_table(capsys):
    code, out, _ = run_cli(
        capsys, "montecarlo", "table", "--ns", "3,4", "--rs", "2,10",
        "--format", "csv",
    )
    assert code == 0
    rows = read_csv(out)
    assert rows[0] == ["n", "r", "p_exact", "bound", "ratio"]
    table = {(r[0], r[1]): r for r in rows[1:]}
    assert table[("3", "2")][2] == "1"
    assert table[("4", "10")][2] == "3/125"
    for r in rows[1:]:
        assert Fraction(r[4]) <= 1


def test_decimal_rendering(capsys):
    code, out, _ = run_cli(
        capsys, "hadamard", "--f", "1/2,1/2", "--g", "1,1", "--order", "1",
        "--format", "csv", "--decimal",
    )
    assert code == 0
    rows = read_csv(out)
    assert rows[1][1] == "0.5" and rows[2][1] == "0.5"


def test_backend_subcommand(capsys):
    code, out, _ = run_cli(capsys, "backend")
    assert code == 0
    assert out.strip() in ("cython", "python")


def test_exit_code_domain_error(capsys):
    code, _, err = run_cli(
        capsys, "riordan", "--g", "2", "--phi", "z", "--size", "4"
    )
    assert code == 1
    assert "error:" in err


def test_exit_code_resource_guard(capsys):
    code, _, err = run_cli(capsys, "diagrams", "--n", "9")
    assert code == 3
    assert "error:" in err
    code, _, err = run_cli(
        capsys, "montecarlo", "table", "--ns", "5", "--rs", "50"
    )
    assert code == 3


def test_exit_code_usage_error():
    with pytest.raises(SystemExit) as ei:
        main(["no-such-command"])
    assert ei.value.code == 2
    with pytest.raises(SystemExit) as ei:
        main(["diagrams", "--unknown-flag", "1"])
    assert ei.value.code == 2
