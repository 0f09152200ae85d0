import json
import subprocess
import sys

import pytest

from yangvir.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out.strip(), err.strip()


@pytest.mark.parametrize(
    "argv, expected",
    [
        (["eval", "comm(b[1], b[-1])", "--profile", "example"], "2*b[0] - 1/3*a[0]^3"),
        (["eval", "comm(H, b[5])"], "5*b[5]"),
        (["eval", "comm(a[0], b[7])"], "0"),
        (["eval", "comm(b[1], b[-1])", "--param", "eps=2/3"], "2*b[0] - 4/27*a[0]^3"),
        (["eval", "comm(b[1], b[-1])", "--profile", "general", "--param", "f=-5", "--param", "g=4"], "2*b[0] - 1/3*a[0]^3"),
    ],
)
def test_eval(capsys, argv, expected):
    code, out, _ = run(capsys, *argv)
    assert (code, out) == (0, expected)


def test_eval_json(capsys):
    code, out, _ = run(capsys, "eval", "a[1]*a[-1]", "--format", "json")
    assert code == 0
    assert json.loads(out) == {"expression": "a[1]*a[-1]", "result": "a[-1]*a[1] + a[0]", "grade": 0}


@pytest.mark.parametrize(
    "argv, code",
    [
        (["check", "bialgebra", "--profile", "example", "--window", "4", "--format", "json"], 0),
        (["check", "jacobi", "--profile", "example", "--window", "4"], 0),
        (["check", "bialgebra", "--window", "0"], 0),
        (["check", "casimir", "--window", "6"], 0),
        (["check", "bialgebra", "--profile", "general", "--param", "f=0", "--param", "g=0", "--window", "1"], 1),
        (["check", "bialgebra", "--param", "eps={1:1,2:2,3:4}", "--profile", "general", "--window", "2"], 1),
        (["derive", "central", "--window", "6"], 0),
        (["derive", "fg-epsilon", "--e1", "1", "--e2", "1"], 0),
        (["derive", "fg-epsilon", "--e1", "1", "--e2", "4", "--window", "3"], 0),
        (["derive", "gamma", "--window", "3"], 0),
        (["derive", "delta-prime"], 0),
        (["derive", "delta-prime", "--target", "a[1] (x) a[0]"], 1),
        (["derive", "central", "--window", "2"], 2),
        (["derive", "delta-prime", "--target", "a[1]"], 2),
        (["derive", "fg-epsilon", "--e1", "0.5"], 2),
        (["eval", "a[1] +"], 2),
        (["eval", "q[1]"], 2),
        (["eval", "a[x]"], 2),
        (["eval", "H", "--param", "nope=1"], 2),
        (["eval", "H", "--param", "eps"], 2),
        (["check", "jacobi", "--window", "-1"], 2),
        (["check", "everything"], 2),
        (["check", "jacobi", "--presentation", "/nonexistent.lba"], 2),
        (["check", "jacobi", "--profile", "example", "--presentation", "x.lba"], 2),
        (["bogus"], 2),
        ([], 2),
        (["parse", "/nonexistent.lba"], 2),
    ],
)
def test_exit_codes(capsys, argv, code):
    assert run(capsys, *argv)[0] == code


def test_check_json_is_stable(capsys):
    argv = ["check", "bialgebra", "--window", "2", "--format", "json", "--no-timing"]
    first = run(capsys, *argv)[1]
    second = run(capsys, *argv, "--jobs", "2")[1]
    assert first == second
    d = json.loads(first)
    assert list(d) == ["check", "window", "status", "cases", "counterexamples"]
    assert d["status"] == "pass"


def test_check_failure_lists_counterexample(capsys):
    code, out, _ = run(capsys, "check", "bialgebra", "--profile", "general", "--param", "f=0", "--param", "g=0",
                       "--window", "1", "--format", "json", "--no-timing")
    assert code == 1
    ce = json.loads(out)["counterexamples"][0]
    assert ce == {"inputs": ["hom", "b[1]", "b[-1]"], "residual": "-a[0] (x) a[0]^2 - a[0]^2 (x) a[0]"}


def test_derive_outputs(capsys):
    code, out, _ = run(capsys, "derive", "central", "--window", "6", "--format", "json", "--no-timing")
    d = json.loads(out)
    assert d["result"]["dimension"] == 2 and d["result"]["closed_forms"] == ["m", "m^3"]
    code, out, _ = run(capsys, "derive", "fg-epsilon", "--e1", "1", "--e2", "4", "--window", "3", "--format", "json")
    d = json.loads(out)["result"]
    assert (d["f"], d["g"], d["e"]["3"]) == ("-5", "4", "41/9")
    assert d["printed_sum_residual"]["1"] == "1"
    code, out, _ = run(capsys, "derive", "fg-epsilon", "--e1", "1", "--e2", "1", "--format", "json")
    d = json.loads(out)["result"]
    assert (d["f"], d["g"]) == ("-1", "0") and set(d["e"].values()) == {"1"}


def test_parse_command(capsys, tmp_path):
    good = tmp_path / "good.lba"
    good.write_text("generator L : mode\nbracket [L[m], L[n]] = (m-n)*L[m+n]\n")
    code, out, _ = run(capsys, "parse", str(good))
    assert code == 0 and "[L[m], L[n]]" in out
    bad = tmp_path / "bad.lba"
    bad.write_text("generator L : mode\nbracket [L[m], L[n]] = m * L[0]\n")
    code, _, err = run(capsys, "parse", str(bad))
    assert code == 2 and "2:24" in err and "grading" in err


def test_presentation_flag_and_output(capsys, tmp_path):
    src = tmp_path / "w.lba"
    src.write_text("generator a : mode\ngenerator b : mode\nbracket [a[m], b[n]] = m * a[m+n]\n")
    out_file = tmp_path / "out.txt"
    code, out, _ = run(capsys, "eval", "comm(a[2], b[1])", "--presentation", str(src), "--output", str(out_file))
    assert code == 0 and out == "" and out_file.read_text() == "2*a[3]\n"


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "yangvir.cli", "eval", "comm(b[2], b[-2])"], capture_output=True, text=True
    )
    assert proc.returncode == 0 and proc.stdout.strip() == "4*b[0] - 8/3*a[0]^3"
