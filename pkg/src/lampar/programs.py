"""Builders for the example programs and probes used by tests and scripts."""

from __future__ import annotations

import math
from typing import Sequence

from .core import (
    BOT,
    TOP,
    App,
    Arrow,
    AxiomInstance,
    AxiomSchema,
    Chan,
    Conj,
    Const,
    Lam,
    Nu,
    ParThreads,
    Polarity,
    Proj,
    Term,
    TermError,
    Var,
    app,
)
from .prims import BOOL, NAT, RAT, ROW, STRING, Registry, register_program_constants, row
from .topology import ring_schema

OUT, IN = Polarity.OUT, Polarity.IN


def _chan(inst: AxiomInstance, i: int, pol: Polarity, name: str = "a") -> Chan:
    return Chan(name, pol, i, inst)


def parallel_or(registry: Registry | None = None) -> Term:
    """Two processes deciding ``x or y``; the second waits for the first's ``ff``."""
    reg = registry or register_program_constants("bool")
    inst = AxiomInstance(AxiomSchema.of(None, [1]), (BOOL, TOP))
    x, y = Var("x", BOOL), Var("y", BOOL)
    tt, ff = reg.const("tt"), reg.const("ff")
    if_bool = reg.const("if", BOOL)
    left = app(if_bool, x, tt, Proj(0, App(_chan(inst, 1, OUT), ff)))
    z = Lam("z", BOT, Var("z", BOT))
    right = app(if_bool, y, tt, Proj(1, App(_chan(inst, 2, IN), z)))
    return Nu("a", inst, (ParThreads((left,)), ParThreads((right,))))


def pi_program(p: int, registry: Registry | None = None) -> Term:
    """p workers send partial midpoint sums to a collector that averages them."""
    reg = registry or register_program_constants(f"pi:{p}")
    schema = AxiomSchema.of(*([None] * p), list(range(1, p + 1)))
    inst = AxiomInstance(schema, (RAT,) * p + (TOP,))
    l = Var("l", NAT)
    procs = []
    for k in range(1, p + 1):
        msg = App(reg.const(f"f{k}"), l)
        procs.append(ParThreads((Proj(0, App(_chan(inst, k, OUT), msg)),)))
    ident = Lam("x", BOT, Var("x", BOT))
    got = Proj(1, App(_chan(inst, p + 1, IN), ident))
    procs.append(ParThreads((app(reg.const("sum"), got, l),)))
    return Nu("a", inst, tuple(procs))


def buyer_vendor(registry: Registry | None = None) -> Term:
    """The vendor prices the product; the buyer answers with a card number."""
    reg = registry or register_program_constants("buyer-vendor")
    inst = AxiomInstance(AxiomSchema.of([2], [1]), (STRING, NAT))
    buyer = Var("buyer", Arrow(Conj(STRING, NAT), BOOL))
    vendor = Var("vendor", Arrow(NAT, BOOL))
    first = App(_chan(inst, 1, OUT), reg.const("prod"))
    paid = App(reg.const("pay_for"), Proj(1, first))
    b = App(buyer, App(_chan(inst, 1, OUT), paid))
    asked = Proj(1, App(_chan(inst, 2, IN), Const("0", NAT, 0)))
    quote = App(_chan(inst, 2, OUT), App(reg.const("cost"), asked))
    v = App(vendor, App(reg.const("use"), Proj(1, quote)))
    return Nu("a", inst, (ParThreads((b,)), ParThreads((v,))))


# --------------------------------------------------------------------------
# Ring Floyd-Warshall


def _alt(u, v, n: int, s: Term) -> Term:
    """u (v (u (v ... (u (v s))))) with n copies of each."""
    for _ in range(n):
        s = App(u, App(v, s))
    return s


def _alt_proj(u, i: int, n: int, s: Term) -> Term:
    """u ((u (... (u (s.i)) ...)).i) with n copies of u."""
    for _ in range(n):
        s = App(u, Proj(i, s))
    return s


def floyd_warshall(
    n: int,
    matrix: Sequence[Sequence[float]] | None = None,
    registry: Registry | None = None,
) -> Term:
    """One process per row of the distance matrix, wired as a ring.

    Without a matrix the rows are symbolic ``Ii(0)`` tags.
    """
    if n < 2:
        raise TermError("the ring algorithm needs at least two rows")
    if matrix is not None and (len(matrix) != n or any(len(r) != n for r in matrix)):
        raise TermError(f"expected a {n}x{n} matrix")
    reg = registry or register_program_constants("floyd-warshall")
    inst = AxiomInstance(ring_schema(n), (ROW,) * n)
    f = reg.const("f")

    def start(i: int) -> Const:
        return row(i, 0, None if matrix is None else matrix[i - 1])

    procs = []
    for i in range(1, n + 1):
        send, recv = _chan(inst, i, OUT), _chan(inst, i, IN)
        s = start(i)
        if i == 1:
            threads = [
                _alt(f, recv, n, s),
                Proj(0, _alt_proj(send, 1, n, App(recv, s))),
                Proj(0, App(send, s)),
            ]
        elif i < n:
            forwarded = _alt_proj(recv, 1, i, App(recv, s))
            threads = [
                _alt(f, recv, n + 1, s),
                Proj(0, _alt_proj(send, 1, n + 1 - i, forwarded)),
                Proj(0, App(send, _alt(f, recv, i, s))),
                Proj(0, _alt_proj(send, 1, i - 1, App(recv, s))),
            ]
        else:
            threads = [
                _alt(f, recv, n + 1, s),
                Proj(0, App(send, _alt(f, recv, n, s))),
                Proj(0, _alt_proj(send, 1, n - 1, App(recv, s))),
            ]
        procs.append(ParThreads(tuple(threads)))
    return Nu("a", inst, tuple(procs))


def fw_rows(t: Term) -> list:
    """Row values of a finished Floyd-Warshall run, ordered by source node."""
    threads = t.threads if isinstance(t, ParThreads) else (t,)
    rows = []
    for u in threads:
        if not (isinstance(u, Const) and u.ty == ROW):
            raise TermError("result is not a parallel composition of rows")
        rows.append(u.value)
    return sorted(rows, key=lambda r: r.source)


def read_matrix(text: str) -> list[list[float]]:
    """Row-per-line whitespace or comma separated entries; ``inf`` for no edge."""
    out = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].replace(",", " ").strip()
        if not line:
            continue
        out.append([math.inf if w == "inf" else int(w) for w in line.split()])
    return out


# --------------------------------------------------------------------------
# Probes


def deadlock_program(registry: Registry | None = None) -> Term:
    """Both processes wait for input and nobody sends."""
    inst = AxiomInstance(AxiomSchema.of(None, [1]), (BOOL, BOOL))
    x = Var("x", Arrow(Conj(BOOL, BOT), BOOL))
    y = Var("y", Arrow(Conj(BOOL, BOOL), BOOL))
    reg = registry or register_program_constants("bool")
    s, t = reg.const("tt"), reg.const("ff")
    return Nu(
        "a",
        inst,
        (ParThreads((App(x, App(_chan(inst, 1, IN), s)),)), ParThreads((App(y, App(_chan(inst, 2, IN), t)),))),
    )


def topology_probe(schema: AxiomSchema, receiver: int, atom=BOOL, registry: Registry | None = None) -> Term:
    """Process ``receiver`` waits on one input, every other process offers one output."""
    reg = registry or register_program_constants("bool")
    inst = AxiomInstance(schema, (atom,) * schema.m)
    c = reg.default_inhabitant(atom)
    procs = []
    for i in range(1, schema.m + 1):
        pol = IN if i == receiver else OUT
        procs.append(ParThreads((Proj(0, App(_chan(inst, i, pol), c)),)))
    return Nu("a", inst, tuple(procs))


def pi_oracle(l: int):
    """The midpoint rule for 4/(1+x^2) on [0, 1] with l intervals, summed sequentially."""
    from fractions import Fraction

    total = Fraction(0)
    for i in range(1, l + 1):
        x = Fraction(2 * i - 1, 2 * l)
        total += Fraction(4) / (1 + x * x)
    return total / l

