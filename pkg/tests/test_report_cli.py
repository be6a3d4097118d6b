import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from eisenkernel import __version__, cli, report
from eisenkernel.nonvanish import RegionSpec, scan_region
from eisenkernel.specfun import LogScaled


def test_zero_serializes_as_re_im():
    assert json.loads(report.dumps(0j)) == {"re": 0.0, "im": 0.0}
    assert json.loads(report.dumps(LogScaled(1.5, 0.25))) == {"log_modulus": 1.5, "phase": 0.25}


finite = st.floats(allow_nan=False, allow_infinity=False)
leaf = st.one_of(st.none(), st.booleans(), st.integers(), finite, st.text(max_size=5),
                 st.builds(complex, finite, finite),
                 st.builds(LogScaled, st.floats(-1e3, 1e3), st.floats(-3.1, 3.1)))
trees = st.recursive(leaf, lambda ch: st.one_of(st.lists(ch, max_size=4),
                                                st.dictionaries(st.text(max_size=4), ch, max_size=4)),
                     max_leaves=20)


@given(trees)
def test_json_round_trip(obj):
    plain = report.structure(obj)
    assert report.loads(report.dumps(plain)) == plain


def test_round_trip_of_scan_report():
    rep = scan_region(RegionSpec("R", 100, grid_step=0.1))
    plain = report.structure(rep)
    back = report.loads(report.dumps(rep))
    assert back == plain
    assert back["region"]["k"] == 100 and isinstance(back["N"][0], complex)


def test_csv_row_count_equals_grid_points(tmp_path):
    rep = scan_region(RegionSpec("R", 100, grid_step=0.1))
    path = tmp_path / "grid.csv"
    text = report.emit_report(report.scan_rows(rep), "csv", str(path))
    lines = path.read_text().splitlines()
    assert lines[0].split(",") == list(report.CSV_COLUMNS)
    assert len(lines) - 1 == rep.n_points == text.count("\n") - 1


def test_emit_report_errors(tmp_path):
    with pytest.raises(ValueError):
        report.emit_report({}, "xml")
    with pytest.raises(OSError):
        report.emit_report({}, "json", str(tmp_path / "missing" / "x.json"))
    with pytest.raises(TypeError):
        report.structure(object())


def test_numpy_scalars_and_tuples():
    plain = report.structure({"a": np.float64(1.5), "b": (np.int64(2), np.complex128(1j)), "c": np.bool_(True)})
    assert plain == {"a": 1.5, "b": [2, 1j], "c": True}


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cli_odd_weight(capsys):
    code, _, err = run(capsys, "eigenbasis", "--weight", "13")
    assert code == 2 and "weight must be even" in err


def test_cli_usage_errors(capsys):
    assert run(capsys, "bogus")[0] == 2
    assert run(capsys)[0] == 2
    assert run(capsys, "lvalue", "--weight", "12", "--s", "abc")[0] == 2
    assert run(capsys, "eigenbasis", "--weight", "12", "--format", "csv")[0] == 2


def test_cli_precondition_errors(capsys):
    code, _, err = run(capsys, "lvalue", "--weight", "12", "--s=-3+1i")
    assert code == 2 and "Re(s)" in err
    code, _, err = run(capsys, "kernel-coeff", "--weight", "12", "--s", "6.4", "--w", "6.3")
    assert code == 2 and "region" in err
    code, _, err = run(capsys, "assumption-check", "--t0", "0", "--z0", "0.6+0.5i", "--radius", "0.05")
    assert code == 2 and "t0" in err
    code, _, err = run(capsys, "lvalue", "--weight", "14", "--s", "7")
    assert code == 2 and "S_14" in err


def test_cli_eigenbasis_and_metadata(capsys):
    code, out, _ = run(capsys, "eigenbasis", "--weight", "24", "--n-coeffs", "5")
    assert code == 0
    doc = report.loads(out)
    meta = doc["metadata"]
    assert meta["version"] == __version__ and meta["convention"] and "truncation" in meta and "tolerances" in meta
    assert len(doc["result"]["forms"]) == 2


def test_cli_lvalue_and_norm(capsys):
    code, out, _ = run(capsys, "lvalue", "--weight", "12", "--s", "6+0.5j")
    assert code == 0
    assert abs(report.loads(out)["result"]["lstar"] - 0.0015233252328121682) < 1e-14
    code, out, _ = run(capsys, "norm", "--weight", "12")
    assert code == 0 and report.loads(out)["result"]["norms"][0]["norm"] == pytest.approx(1.0353620568e-6)


def test_cli_kernel_coeff_and_continuation(capsys):
    code, out, _ = run(capsys, "kernel-coeff", "-k", "20", "--s", "9.5+0.5i", "--w=-1.5-0.25i", "--spectral")
    assert code == 0
    res = report.loads(out)["result"]
    assert abs(res["completed"] / res["spectral"]["value"] - 1) < 1e-6
    code, out, _ = run(capsys, "continuation-eval", "-k", "16", "--s", "7.6+0.5i", "--w", "7.9-0.5i")
    assert code == 0 and report.loads(out)["result"]["value"]["normalization"] == "lemma_F1"


def test_cli_convergence_failure_exit_1(capsys):
    code, _, err = run(capsys, "kernel-coeff", "-k", "12", "--s", "5.5+0.5i", "--w=-1.5-0.25i",
                       "--rel-tol", "1e-14", "--c-cap", "16")
    assert code == 1 and "did not settle" in err


def test_cli_verify_identity(capsys):
    code, out, _ = run(capsys, "verify-identity", "--weight", "16", "--m", "1")
    doc = report.loads(out)
    assert code == 0 and doc["result"]["passed"] and doc["result"]["max_rel_err"] < 1e-4
    code, out, _ = run(capsys, "verify-identity", "--weight", "16", "--m", "1", "--point", "8.5+0.5i,-1.5")
    assert code == 0
    # an inadmissible point is reported per entry and fails the verification
    code, out, _ = run(capsys, "verify-identity", "--weight", "16", "--m", "1", "--point", "8.5,8.4")
    assert code == 1 and not report.loads(out)["result"]["passed"]


def test_cli_scan(capsys, tmp_path):
    code, out, _ = run(capsys, "scan", "--weight", "300", "--T", "1", "--delta", "0.25")
    res = report.loads(out)["result"]
    assert code == 0 and res["certified"] is True and res["min_modulus"] > 0
    path = tmp_path / "g.csv"
    code, _, _ = run(capsys, "scan", "-k", "100", "--grid-step", "0.1", "--format", "csv", "-o", str(path))
    assert code == 0 and len(path.read_text().splitlines()) == 1 + (2 * 21) ** 2
    assert (tmp_path / "g.csv.meta.json").exists()


def test_cli_uncertified_scan_exit_1(capsys):
    code, out, _ = run(capsys, "scan", "-k", "14", "--grid-step", "0.1")
    assert code == 1 and report.loads(out)["result"]["certified"] is False


def test_cli_estimate_theorem34_assumption(capsys):
    code, out, _ = run(capsys, "estimate-c", "--k-min", "100", "--k-max", "102", "--grid-step", "0.1")
    assert code == 0 and report.loads(out)["result"]["report"]["k0"] == 100
    code, out, _ = run(capsys, "estimate-c", "--k-min", "12", "--k-max", "14", "--grid-step", "0.1")
    assert code == 1 and report.loads(out)["result"]["report"]["k0"] is None
    code, out, _ = run(capsys, "theorem34", "--s", "0.4+1i", "--w", "0.3+0.5i")
    assert code == 0 and len(report.loads(out)["result"]["rows"]) == 4
    code, out, _ = run(capsys, "assumption-check", "--t0", "1", "--z0", "0.6+0.5i", "--radius", "0.05")
    assert code == 0 and report.loads(out)["result"]["consistent"]


def test_parse_complex():
    assert cli.parse_complex("1-2i") == 1 - 2j
    assert cli.parse_complex(" 3 + 0.5j ") == 3 + 0.5j
    assert cli.parse_point("1+i,2") == (1 + 1j, 2)
