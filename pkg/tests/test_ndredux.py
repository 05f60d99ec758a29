import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lampar.core import (
    BOT,
    App,
    Arrow,
    Atom,
    AxiomInstance,
    AxiomSchema,
    Chan,
    Conj,
    Efq,
    Lam,
    Pair,
    Polarity,
    Proj,
    TermError,
    Var,
    binders_on_path,
    contains_chan,
    subterm_at,
    type_of,
)
from lampar.engine import CROSS, SIMPLIFY, enumerate_steps
from lampar.generators import generator_registry, random_program, random_thread
from lampar.ndredux import (
    NdBudget,
    canonical_inhabitant,
    input_candidates,
    is_deterministic,
    nd_replace_input,
    nd_run_random,
    nd_successors,
    simulate_receive,
)

P, R = Atom("P"), Atom("R")
REG = generator_registry()
INST = AxiomInstance(AxiomSchema.of([2], [1]), (P, R))


def chan(pol, i=1):
    return Chan("a", pol, i, INST)


def test_deterministic_terms():
    assert is_deterministic(Lam("x", P, Var("x", P)))
    assert not is_deterministic(Proj(0, App(chan(Polarity.OUT), REG.const("p0"))))


@pytest.mark.parametrize("f", [P, Arrow(P, R), Conj(P, Arrow(R, P)), Arrow(BOT, P)])
def test_canonical_inhabitants_have_their_type(f):
    t = canonical_inhabitant(f, REG)
    assert type_of(t) == f and not contains_chan(t)


def test_canonical_inhabitant_uses_falsity_in_scope():
    t = canonical_inhabitant(Atom("Q"), None, {"b": BOT})
    assert t == Efq(Atom("Q"), Var("b", BOT))
    with pytest.raises(TermError):
        canonical_inhabitant(Atom("Q"))
    with pytest.raises(TermError):
        canonical_inhabitant(BOT)


def test_output_flips_and_input_is_replaced():
    p0 = REG.const("p0")
    out = Proj(0, App(chan(Polarity.OUT), p0))
    succ = nd_successors(out, NdBudget(), REG)
    assert Proj(0, App(chan(Polarity.IN), p0)) in succ
    inp = Proj(0, App(chan(Polarity.IN), p0))
    succ = nd_successors(inp, NdBudget(), REG)
    replaced = [s for s in succ if not contains_chan(s)]
    assert replaced and all(type_of(s) == P for s in replaced)


def test_injector_candidates_reuse_subterms():
    r0 = REG.const("r0")
    t = Pair(Proj(0, App(chan(Polarity.IN), REG.const("p0"))), r0)
    cands = input_candidates(t, (0, 0, 0), NdBudget(), REG)
    assert any(isinstance(c, Lam) and c.body == Pair(Var(c.var, P), r0) for c in cands)


def test_replacement_checks():
    t = Proj(0, App(chan(Polarity.IN), REG.const("p0")))
    with pytest.raises(TermError):
        nd_replace_input(t, (0, 0), Var("q", Arrow(P, Conj(P, P))))
    with pytest.raises(TermError):
        nd_replace_input(t, (0,), REG.const("p0"))


def test_parallel_terms_are_rejected():
    from lampar.core import ParThreads

    with pytest.raises(TermError):
        nd_successors(ParThreads((REG.const("p0"), REG.const("p0"))))


def test_budget_validation():
    with pytest.raises(TermError):
        NdBudget(max_size=0)
    with pytest.raises(TermError):
        NdBudget(seed=-1)


def test_optional_successors_respect_the_budget():
    t = random_thread(7, registry=REG)
    small = nd_successors(t, NdBudget(max_successors=1), REG)
    everything = nd_successors(t, NdBudget(max_successors=10**6), REG)
    # mandatory successors come first and are never dropped
    assert small and everything[: len(small)] == small


def _relative(path, thread_prefix):
    return path[len(thread_prefix):]


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6))
def test_deliveries_are_simulated_by_the_oracle(seed):
    """Each receiving thread after a cross equals an injector replacement plus a beta step."""
    t = random_program(seed, registry=REG)
    for _ in range(15):
        steps = enumerate_steps(t, REG)
        for desc, after in steps:
            if desc.kind != CROSS:
                continue
            msgs = [subterm_at(t, sp).arg for sp in desc.sender_paths]
            for rp in desc.receiver_paths:
                prefix = rp[:2]
                if binders_on_path(t, rp) != binders_on_path(after, rp):
                    continue
                got = simulate_receive(subterm_at(t, prefix), _relative(rp, prefix), msgs)
                assert got == subterm_at(after, prefix)
        busy = [s for s in steps if s[0].kind != SIMPLIFY]
        if not busy:
            break
        t = busy[seed % len(busy)][1]


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_random_oracle_runs_terminate(seed):
    done, steps = nd_run_random(random_thread(seed, registry=REG), NdBudget(seed=seed), 10_000, REG)
    assert done


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_oracle_successors_keep_the_type(seed):
    t = random_thread(seed, registry=REG)
    ty = type_of(t)
    for u in nd_successors(t, NdBudget(seed=seed), REG):
        assert type_of(u) == ty


def test_every_floyd_warshall_delivery_is_simulated():
    from lampar.engine import run
    from lampar.prims import register_program_constants
    from lampar.programs import floyd_warshall

    reg = register_program_constants("floyd-warshall")
    start = floyd_warshall(3, registry=reg)
    out = run(start, registry=reg)
    before = start
    checked = 0
    for ev in out.trace:
        if ev.kind == CROSS:
            d = ev.descriptor
            msgs = [subterm_at(before, sp).arg for sp in d.sender_paths]
            for rp in d.receiver_paths:
                got = simulate_receive(subterm_at(before, rp[:2]), rp[2:], msgs)
                assert got == subterm_at(ev.term, rp[:2])
                checked += 1
        before = ev.term
    assert checked >= 12
