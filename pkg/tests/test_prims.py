import math
from fractions import Fraction

import pytest

from lampar.core import App, Arrow, Pair, TermError, Var, app
from lampar.prims import (
    BOOL,
    NAT,
    RAT,
    ROW,
    RowValue,
    delta_step,
    fw_f,
    nat,
    pi_partial,
    rat,
    register_program_constants,
    row,
    shortest_paths,
)
from lampar.programs import pi_oracle, read_matrix


def test_if_reduces_on_literals_only():
    reg = register_program_constants("bool")
    tt, ff, unknown = reg.const("tt"), reg.const("ff"), reg.const("unknown")
    if_bool = reg.const("if", BOOL)
    assert delta_step(app(if_bool, tt, tt, ff), reg) == tt
    assert delta_step(app(if_bool, ff, tt, ff), reg) == ff
    assert delta_step(app(if_bool, unknown, tt, ff), reg) is None
    assert delta_step(app(if_bool, tt, tt), reg) is None


def test_if_family_instances():
    reg = register_program_constants("bool")
    assert reg.is_family("if")
    assert reg.const("if", NAT).ty == Arrow(BOOL, Arrow(NAT, Arrow(NAT, NAT)))


def test_profiles():
    reg = register_program_constants("pi:4,floyd-warshall")
    assert "tt" in reg and "f4" in reg and "f" in reg
    with pytest.raises(TermError):
        register_program_constants("nonsense")
    with pytest.raises(TermError):
        register_program_constants("pi:x")
    with pytest.raises(TermError):
        register_program_constants("bool:2")


def test_pi_partial_sums():
    assert pi_partial(1, 1, 1) == Fraction(16, 5)
    for l in (4, 8, 16):
        for p in (1, 2, 4):
            assert sum(pi_partial(k, l, p) for k in range(1, p + 1)) / l == pi_oracle(l)
    with pytest.raises(TermError):
        pi_partial(1, 6, 4)


def test_pi_oracle_approaches_pi():
    assert abs(float(pi_oracle(64)) - math.pi) < 1e-4


def test_sum_needs_a_full_tuple_of_literals():
    reg = register_program_constants("pi:2")
    s = reg.const("sum")
    both = Pair(rat(Fraction(1, 2)), rat(Fraction(3, 2)))
    assert delta_step(app(s, both, nat(4)), reg) == rat(Fraction(1, 2))
    assert delta_step(app(s, Pair(rat(1), Var("q", RAT)), nat(4)), reg) is None


def test_fw_f_symbolic_stages():
    first, second = RowValue(3, 1), RowValue(2, 1)
    assert fw_f(first, second).label() == "I3(2)"
    # the receiver's own row comes first; any other pairing leaves it unchanged
    assert fw_f(RowValue(2, 0), RowValue(1, 0)).label() == "I2(1)"
    assert fw_f(RowValue(2, 1), RowValue(1, 0)).label() == "I2(1)"


def test_fw_f_numeric_relaxation():
    inf = math.inf
    mine = RowValue(3, 0, (2, inf, 0))
    pivot = RowValue(1, 0, (0, 4, 9))
    # at stage s the pivot is row s + 1
    assert fw_f(mine, pivot) == RowValue(3, 1, (2, 6, 0))
    assert fw_f(mine, RowValue(2, 0, (inf, 0, 1))) == mine


def test_f_delta_reduces_pairs_of_rows():
    reg = register_program_constants("floyd-warshall")
    t = App(reg.const("f"), Pair(row(2, 0), row(1, 0)))
    got = delta_step(t, reg)
    assert got.ty == ROW and got.value.label() == "I2(1)"


def test_buyer_vendor_tables():
    reg = register_program_constants("buyer-vendor")
    assert delta_step(App(reg.const("cost"), reg.const("prod")), reg) == reg.const("price")
    assert delta_step(App(reg.const("pay_for"), reg.const("price")), reg) == reg.const("card")
    assert delta_step(App(reg.const("use"), reg.const("card")), reg) is None


def test_shortest_paths_oracle():
    m = read_matrix("0 4 9\ninf 0 1\n2 inf 0\n")
    assert shortest_paths(m) == [[0, 4, 5], [3, 0, 1], [2, 6, 0]]


def test_row_labels():
    assert row(1, 0).value.label() == "I1(0)"
    assert row(1, 2, [0, 4, math.inf]).value.label() == "I1(2)[0, 4, inf]"
