import json
from pathlib import Path

import pytest

from lampar.cli import EXIT_DEADLOCK, EXIT_ERROR, EXIT_FUEL, EXIT_OK, RunConfig, main

ROOT = Path(__file__).resolve().parent.parent
PROGRAMS = ROOT / "programs"
GOLDEN = Path(__file__).resolve().parent / "golden"


@pytest.fixture(autouse=True)
def no_color(monkeypatch):
    monkeypatch.setenv("LAMPAR_COLOR", "0")


def lampar(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize(
    "name,ty",
    [("or", "Bool"), ("pi", "Q"), ("pi4", "Q"), ("fw3", "Row"), ("buyer_vendor", "Bool"), ("deadlock", "Bool"), ("em", "Bool")],
)
def test_check_prints_the_type(capsys, name, ty):
    code, out, _ = lampar(capsys, "check", PROGRAMS / f"{name}.lpar")
    assert code == EXIT_OK and out.strip() == ty


def test_check_reports_nested_binder(capsys):
    code, _, err = lampar(capsys, "check", PROGRAMS / "nested_nu.lpar")
    assert code == EXIT_ERROR and "5:7: [1-depth]" in err


def test_check_reports_parse_errors(capsys, tmp_path):
    f = tmp_path / "bad.lpar"
    f.write_text("nu a : {1: Bool ~ []} . (a! tt\n")
    code, _, err = lampar(capsys, "check", f)
    assert code == EXIT_ERROR and "2:1: expected ')', found 'end of input'" in err


def test_missing_file(capsys):
    code, _, err = lampar(capsys, "check", "does-not-exist.lpar")
    assert code == EXIT_ERROR and err.startswith("error:")


@pytest.mark.parametrize(
    "x,y,want", [("ff", "ff", "ff"), ("tt", "unknown", "tt"), ("unknown", "tt", "tt"), ("ff", "unknown", "if unknown then tt else ff")]
)
def test_run_or_with_lets(capsys, x, y, want):
    code, out, _ = lampar(capsys, "run", PROGRAMS / "or.lpar", "--let", f"x={x}", "--let", f"y={y}")
    assert code == EXIT_OK
    assert out.splitlines()[-1] == want


def test_run_rejects_unknown_let(capsys):
    code, _, err = lampar(capsys, "run", PROGRAMS / "or.lpar", "--let", "q=tt")
    assert code == EXIT_ERROR and "not a free variable" in err


def test_run_pi(capsys):
    code, out, _ = lampar(capsys, "run", PROGRAMS / "pi.lpar", "--let", "l=8")
    assert code == EXIT_OK
    assert out.splitlines()[-1] == "1466009848053965824/466452100431764525"


def test_run_deadlock(capsys):
    code, out, _ = lampar(capsys, "run", PROGRAMS / "deadlock.lpar")
    assert code == EXIT_DEADLOCK
    assert out.startswith("deadlock after 0 steps: receiver 1: process 1 has no senders")


def test_run_out_of_fuel(capsys):
    code, out, _ = lampar(capsys, "run", PROGRAMS / "fw3.lpar", "--fuel", "3")
    assert code == EXIT_FUEL and out.startswith("fuel exhausted after 3 steps")


def test_run_numeric_matrix(capsys):
    code, out, _ = lampar(capsys, "run", PROGRAMS / "fw3.lpar", "--matrix", PROGRAMS / "fw3.matrix")
    assert code == EXIT_OK
    assert out.splitlines()[-1] == "I1(3)[0, 4, 5] || I2(3)[3, 0, 1] || I3(3)[2, 6, 0]"


@pytest.mark.parametrize("name", ["fw3", "buyer_vendor"])
def test_text_traces_match_golden_files(capsys, name):
    code, out, _ = lampar(capsys, "run", PROGRAMS / f"{name}.lpar", "--trace", "text")
    assert code == EXIT_OK
    assert out == (GOLDEN / f"{name}.trace").read_text()


def test_structured_trace_is_json_lines(capsys):
    code, out, _ = lampar(capsys, "run", PROGRAMS / "em.lpar", "--trace", "structured")
    lines = out.splitlines()
    events = [json.loads(line) for line in lines[:-2]]
    assert code == EXIT_OK
    assert [e["step"] for e in events] == list(range(1, len(events) + 1))
    assert events[0]["kind"] == "cross" and events[0]["location"] == "receiver 2 <- 1"


def test_receiver_flag(capsys):
    code, out, _ = lampar(capsys, "run", PROGRAMS / "em.lpar", "--receiver", "2", "--trace", "text")
    assert code == EXIT_OK
    code, _, err = lampar(capsys, "run", PROGRAMS / "em.lpar", "--receiver", "0")
    assert code == EXIT_ERROR and "receiver" in err


def test_random_strategy_flag(capsys):
    a = lampar(capsys, "run", PROGRAMS / "fw3.lpar", "--strategy", "random", "--seed", "4", "--trace", "text")
    b = lampar(capsys, "run", PROGRAMS / "fw3.lpar", "--strategy", "random", "--seed", "4", "--trace", "text")
    assert a == b


def test_prims_flag_overrides_pragma(capsys):
    code, _, err = lampar(capsys, "check", PROGRAMS / "fw3.lpar", "--prims", "bool")
    assert code == EXIT_ERROR and "unbound name f" in err


def test_topo2axiom(capsys):
    code, out, err = lampar(capsys, "topo2axiom", PROGRAMS / "example4.topo")
    assert code == EXIT_OK and err == "note: added self-loops at nodes 1, 2, 3, 4\n"
    assert out.splitlines() == [
        r"(A1 -> A1 /\ A2 /\ A4) \/ (A2 -> A2 /\ A1) \/ (A3 -> A3 /\ A1 /\ A2) \/ (A4 -> A4 /\ Bot)",
        "nu a : {1: A1 ~ [2, 4]; 2: A2 ~ [1]; 3: A3 ~ [1, 2]; 4: A4 ~ []} .",
    ]


def test_topo2axiom_notices_and_errors(capsys, tmp_path):
    code, out, err = lampar(capsys, "topo2axiom", PROGRAMS / "single.topo")
    assert code == EXIT_OK and out.splitlines()[0] == r"(A1 -> A1 /\ Bot)"
    assert "self-loops" in err
    bad = tmp_path / "bad.topo"
    bad.write_text("nodes 2\nedge 1 5\n")
    code, _, err = lampar(capsys, "topo2axiom", bad)
    assert code == EXIT_ERROR and "outside nodes" in err


@pytest.mark.parametrize(
    "argv,summary",
    [
        (["subject-reduction", "5"], "subject-reduction: 5 cases, pass"),
        (["termination", "5"], "termination: 5 cases, pass"),
        (["nd-termination", "5"], "nd-termination: 5 cases, pass"),
        (["topology", "10", "--exhaustive", "2"], "topology: 15 cases, pass"),
    ],
)
def test_fuzz(capsys, argv, summary):
    code, out, _ = lampar(capsys, "fuzz", *argv)
    assert code == EXIT_OK and out.splitlines()[-1] == summary


def test_run_config_validation():
    with pytest.raises(ValueError):
        RunConfig(fuel=0)
    with pytest.raises(ValueError):
        RunConfig(receiver=0)


def test_module_entry_point():
    import subprocess
    import sys

    proc = subprocess.run(
        [sys.executable, "-m", "lampar.cli", "check", str(PROGRAMS / "or.lpar")],
        capture_output=True,
        text=True,
        env={"LAMPAR_COLOR": "0", "PATH": ""},
    )
    assert proc.returncode == EXIT_OK and proc.stdout.strip() == "Bool"
