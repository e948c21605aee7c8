import pytest

from app.main import run
from app.models import RunReport


def test_askey_wilson_table_output(capsys: pytest.CaptureFixture[str]) -> None:
    code = run(["zeros", "--family", "askey-wilson", "--n", "5", "--params", "0.3,-0.2,0.15,0.1,0.1"])
    assert code == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("bethe-zeros ") and lines[0].endswith(" zeros")
    assert lines[2].split()[:5] == ["1", "2.577", "2.000", "3.375", "2.577"]
    assert any(line.startswith("max_discrepancy: ") for line in lines)
    assert any(line.startswith("k_minus: ") for line in lines)


def test_wilson_csv_has_open_upper_bounds(capsys: pytest.CaptureFixture[str]) -> None:
    code = run(
        ["zeros", "--family", "wilson", "--n", "5", "--params", "1.15,1.1,1.0,0.9", "--format", "csv"]
    )
    assert code == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "j,root,lower,upper,oracle_root,bethe_residual,de_residual"
    cells = [line.split(",") for line in lines[1:]]
    assert [c[0] for c in cells] == ["1", "2", "3", "4", "5"]
    assert all(c[3] == "inf" for c in cells)
    for c in cells:
        assert float(c[1]) == pytest.approx(float(c[4]), abs=1e-8)


def test_continuous_hahn_reports_every_zero(capsys: pytest.CaptureFixture[str]) -> None:
    code = run(
        ["zeros", "--family", "continuous-hahn", "--n", "10", "--params", "1.1,0.9", "--format", "json"]
    )
    assert code == 0
    report = RunReport.model_validate_json(capsys.readouterr().out)
    roots = [row.root for row in report.rows]
    assert len(roots) == 10
    assert roots[:5] == pytest.approx([-r for r in reversed(roots[5:])], abs=1e-10)
    assert report.rows[9].lower == float("-inf")
    assert report.de_residual is not None and report.de_residual <= 1e-8


def test_conjugate_pair_parameters(capsys: pytest.CaptureFixture[str]) -> None:
    code = run(
        ["zeros", "--family", "wilson", "--n", "3", "--params", "1+0.5i,1-0.5i,0.8,1.2", "--format", "json"]
    )
    assert code == 0
    report = RunReport.model_validate_json(capsys.readouterr().out)
    assert report.max_discrepancy is not None and report.max_discrepancy <= 1e-8


def test_no_oracle_leaves_column_empty(capsys: pytest.CaptureFixture[str]) -> None:
    code = run(
        ["zeros", "--family", "continuous-hahn", "--n", "3", "--params", "0.5,0.7", "--no-oracle", "--format", "csv"]
    )
    assert code == 0
    for line in capsys.readouterr().out.splitlines()[1:]:
        assert line.split(",")[4] == ""


def test_negative_first_parameter(capsys: pytest.CaptureFixture[str]) -> None:
    code = run(["zeros", "--family", "askey-wilson", "--n", "2", "--params=-0.4,0.2,0.1,0.3,0.5"])
    assert code == 0
    assert "error" not in capsys.readouterr().err


def test_out_of_domain_parameters(capsys: pytest.CaptureFixture[str]) -> None:
    code = run(["zeros", "--family", "askey-wilson", "--n", "3", "--params", "0.3,0.2,0.1,0.1,1.5"])
    assert code == 1
    assert "real q in (-1, 1)" in capsys.readouterr().err


def test_wrong_parameter_count(capsys: pytest.CaptureFixture[str]) -> None:
    assert run(["zeros", "--family", "wilson", "--n", "3", "--params", "1,2"]) == 1
    assert "takes 4 parameters" in capsys.readouterr().err


def test_unknown_family_is_a_usage_error() -> None:
    with pytest.raises(SystemExit) as exc_info:
        run(["zeros", "--family", "jacobi", "--n", "3", "--params", "1,2"])
    assert exc_info.value.code == 1
