import csv
import io

import numpy as np
import pytest

from spheredpp import report
from spheredpp.cli import build_parser, main


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_sample_spiral(tmp_path, capsys):
    out = tmp_path / "s.csv"
    code, _, _ = run(["sample", "--method", "spiral", "--n", "10", "--seed", "7", "--out", str(out)], capsys)
    assert code == 0
    r = rows(out.read_text())
    assert len(r) == 10
    assert list(r[0]) == ["x", "y", "z", "weight"]
    assert all(float(x["weight"]) == 0.1 for x in r)
    p = np.array([[float(x[k]) for k in "xyz"] for x in r])
    np.testing.assert_allclose(np.linalg.norm(p, axis=1), 1.0, atol=1e-12)


def test_sample_jacobi_needs_square(capsys):
    code, out, err = run(["sample", "--method", "jacobi", "--n", "10"], capsys)
    assert code == 2
    assert err.startswith("error:") and len(err.strip().splitlines()) == 1
    assert out == ""


@pytest.mark.parametrize("method", ["iid", "spiral", "spherical", "jacobi"])
def test_sample_repeatable(tmp_path, capsys, method):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for p in paths:
        assert run(["sample", "--method", method, "--n", "16", "--seed", "3", "--out", str(p)], capsys)[0] == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_sample_to_stdout(capsys):
    code, out, _ = run(["sample", "--method", "iid", "--n", "4"], capsys)
    assert code == 0 and len(rows(out)) == 4


def test_estimate_rows(capsys):
    argv = ["estimate", "--method", "spherical", "--n", "64", "--integrand", "f1", "--reps", "5", "--seed", "1"]
    code, out, _ = run(argv, capsys)
    assert code == 0
    r = rows(out)
    assert len(r) == 5
    assert list(r[0]) == list(report.RAW_FIELDS)
    assert [int(x["rep"]) for x in r] == list(range(5))
    assert len({x["seed"] for x in r}) == 5


def test_estimate_expression_matches_builtin(capsys):
    base = ["estimate", "--method", "jacobi", "--n", "16", "--reps", "4", "--seed", "5"]
    _, out1, _ = run(base + ["--integrand", "f1"], capsys)
    _, out2, _ = run(base + ["--integrand", "expr:z*z*step(z)"], capsys)
    a = [float(x["estimate"]) for x in rows(out1)]
    b = [float(x["estimate"]) for x in rows(out2)]
    assert np.max(np.abs(np.subtract(a, b))) <= 1e-15
    assert rows(out2)[0]["integrand"] == "expr:z*z*step(z)"


def test_estimate_bad_expression(capsys):
    code, _, err = run(["estimate", "--n", "4", "--integrand", "expr:1+"], capsys)
    assert code == 2
    assert err.startswith("error:") and "offset 2" in err


def test_estimate_unknown_integrand(capsys):
    assert run(["estimate", "--n", "4", "--integrand", "f7"], capsys)[0] == 2


def test_estimate_runtime_failure_exit_1(capsys):
    code, _, err = run(["estimate", "--method", "iid", "--n", "8", "--integrand", "expr:log(z)", "--reps", "2"], capsys)
    assert code == 1
    assert err.startswith("error: IntegrandEvaluationError")
    assert len(err.strip().splitlines()) == 1


def test_variance_study_not_ascending(tmp_path, capsys):
    code, _, err = run(["variance-study", "--methods", "iid", "--n-list", "8,4", "--out-dir", str(tmp_path / "o")], capsys)
    assert code == 2 and err.startswith("error:")
    assert not (tmp_path / "o").exists()


def test_variance_study_outputs(tmp_path, capsys):
    outdir = tmp_path / "deep" / "out"
    argv = ["variance-study", "--methods", "iid,spiral", "--n-list", "4,9,16", "--reps", "3", "--out-dir", str(outdir)]
    code, out, _ = run(argv, capsys)
    assert code == 0
    for name in ("raw.csv", "summary.csv", "slopes.csv", "plot.svg"):
        assert (outdir / name).is_file()
    assert len(report.read_csv(outdir / "raw.csv")) == 2 * 3 * 3
    assert len(report.read_csv(outdir / "summary.csv")) == 2 * 3
    assert "iid" in out and "spiral" in out and "slope" in out


def test_variance_study_deterministic(tmp_path, capsys):
    dirs = [tmp_path / "a", tmp_path / "b"]
    for d in dirs:
        argv = ["variance-study", "--methods", "spherical,jacobi", "--n-list", "4,9", "--reps", "3", "--seed", "11"]
        assert run(argv + ["--out-dir", str(d)], capsys)[0] == 0
    for name in ("raw.csv", "summary.csv", "slopes.csv", "plot.svg"):
        assert (dirs[0] / name).read_bytes() == (dirs[1] / name).read_bytes()


def test_slope_subcommand(tmp_path, capsys):
    d = tmp_path / "o"
    run(["variance-study", "--methods", "iid", "--n-list", "4,9,16", "--reps", "3", "--out-dir", str(d)], capsys)
    code, out, _ = run(["slope", "--summary", str(d / "summary.csv"), "--out", str(tmp_path / "s.csv")], capsys)
    assert code == 0 and "iid" in out
    assert report.read_csv(tmp_path / "s.csv") == report.read_csv(d / "slopes.csv")


def test_slope_missing_file(tmp_path, capsys):
    code, _, err = run(["slope", "--summary", str(tmp_path / "nope.csv")], capsys)
    assert code == 1 and err.startswith("error:")


def test_config_file_defaults_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# study manifest\nmethod = spiral\nn = 10\nseed = 7\n")
    code, out, _ = run(["sample", "--config", str(cfg)], capsys)
    assert code == 0
    _, ref, _ = run(["sample", "--method", "spiral", "--n", "10", "--seed", "7"], capsys)
    assert out == ref
    _, over, _ = run(["sample", "--config", str(cfg), "--n", "5"], capsys)
    assert len(rows(over)) == 5


@pytest.mark.parametrize("body", ["bogus = 1\n", "n = ten\n", "method = halton\n", "just text\n"])
def test_bad_config(tmp_path, capsys, body):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text(body)
    assert run(["sample", "--config", str(cfg), "--n", "4"], capsys)[0] == 2


def test_missing_config(tmp_path, capsys):
    assert run(["sample", "--config", str(tmp_path / "none.cfg"), "--n", "4"], capsys)[0] == 2


@pytest.mark.parametrize("argv", [[], ["frobnicate"], ["sample"], ["sample", "--n", "x"], ["sample", "--n", "0"]])
def test_usage_errors(capsys, argv):
    code, _, err = run(argv, capsys)
    assert code == 2 and err.startswith("error:")


@pytest.mark.parametrize("command", ["sample", "estimate", "variance-study", "slope"])
def test_help_lists_defaults(command):
    parser = build_parser()
    sub = parser.subcommands[command]
    text = sub.format_help()
    for action in sub._actions:
        if action.dest == "help":
            continue
        assert action.option_strings[0] in text
        if action.default is not None and not action.required:
            assert "default:" in text
    assert text.count("(default:") >= sum(1 for a in sub._actions if a.dest != "help" and a.help and not a.required)
