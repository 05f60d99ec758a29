from pathlib import Path

import pytest

from lampar.core import BOT, TOP, App, Arrow, Atom, AxiomSchema, Conj, Efq, Lam, TermError, Var
from lampar.prims import RAT, ROW, register_program_constants
from lampar.programs import buyer_vendor, floyd_warshall, parallel_or, pi_program
from lampar.syntax import parse_program
from lampar.typecheck import (
    Context,
    check_program,
    check_step_preserves_type,
    infer_simply_typed,
    instantiate,
    program_context,
)

BOOL = Atom("Bool")
PROGRAMS = Path(__file__).resolve().parent.parent / "programs"
REG = register_program_constants("bool")


def test_example_programs_have_their_types():
    assert check_program(parallel_or()).formula == BOOL
    assert check_program(pi_program(2)).formula == RAT
    assert check_program(floyd_warshall(3)).formula == ROW
    assert check_program(buyer_vendor()).formula == BOOL


def test_nested_binder_is_rejected_with_position():
    text = (PROGRAMS / "nested_nu.lpar").read_text()
    report = check_program(parse_program(text, REG))
    assert not report.ok
    assert report.diagnostic.rule == "1-depth"
    assert report.diagnostic.render().startswith("5:7: [1-depth]")


@pytest.mark.parametrize(
    "src,rule",
    [
        ("tt ff", "app"),
        ("(\\x:Bool. x) (\\y:Bool. y)", "app"),
        ("tt.0", "proj"),
        ("efq[Bool] tt", "efq"),
        ("nu a : {1: Bool ~ []; 2: Bool ~ [1]} . tt || \\x:Bool. x", "axiom"),
        ("nu a : {1: Bool ~ []; 2: Bool ~ [1]} . tt | \\x:Bool. x || tt", "contr"),
    ],
)
def test_ill_typed_programs(src, rule):
    report = check_program(parse_program(src, REG))
    assert not report.ok and report.diagnostic.rule == rule


def test_process_count_must_match_the_axiom():
    t = parallel_or()
    from lampar.core import Nu

    bad = Nu(t.chan, t.instance, t.processes[:1])
    assert check_program(bad).diagnostic.rule == "axiom"


def test_channel_outside_binder_is_rejected():
    t = parallel_or()
    thread = t.processes[0].threads[0]
    assert check_program(thread).diagnostic.message.startswith("channel a occurs outside")


def test_wrong_disjunct_index_is_rejected():
    from lampar.core import Nu, ParThreads

    t = parallel_or()
    swapped = Nu(t.chan, t.instance, (t.processes[1], t.processes[0]))
    assert check_program(swapped).diagnostic.rule in {"axiom", "contr"}


def test_efq_rules():
    b = Var("b", BOT)
    assert infer_simply_typed({"b": BOT}, Efq(BOOL, b)).formula == BOOL
    assert not infer_simply_typed({"b": BOT}, Efq(Arrow(BOOL, BOOL), b)).ok


def test_strict_context():
    x = Var("x", BOOL)
    assert infer_simply_typed(None, x).ok
    assert not infer_simply_typed({}, x).ok
    assert infer_simply_typed(Context().extend("x", BOOL), Lam("y", BOOL, x)).formula == Arrow(BOOL, BOOL)


def test_inconsistent_annotations():
    t = App(Var("f", Arrow(BOOL, BOOL)), Var("f", BOOL))
    with pytest.raises(TermError):
        program_context(t)
    assert not check_program(t).ok


def test_instantiate():
    s = AxiomSchema.of(None, [1])
    inst = instantiate(s, {1: BOOL, 2: TOP})
    assert inst.channel_type(2) == Arrow(TOP, Conj(TOP, BOOL))
    assert instantiate(s, [BOOL, TOP]) == inst
    with pytest.raises(TermError):
        instantiate(s, {1: BOOL})
    with pytest.raises(TermError):
        instantiate(s, {1: BOOL, 2: TOP, 3: BOOL})


def test_step_preservation_check():
    x = Var("x", BOOL)
    before = App(Lam("y", BOOL, Var("y", BOOL)), x)
    assert check_step_preserves_type(before, x)
    assert not check_step_preserves_type(before, Var("z", BOOL))
    assert not check_step_preserves_type(before, Lam("y", BOOL, x))
