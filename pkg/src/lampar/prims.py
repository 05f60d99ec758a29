"""Primitive types, constants and their delta rules.

A registry maps constant names to signatures.  A signature has either a fixed
formula or a *family* (a function from a parameter formula to the full type,
used by ``if``), an arity and an optional delta callable that receives exactly
``arity`` argument terms and returns the contractum or None.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .core import (
    App,
    Arrow,
    Atom,
    Conj,
    Const,
    Formula,
    Pair,
    Term,
    TermError,
    conj_all,
    type_of,
)

BOOL = Atom("Bool")
NAT = Atom("Nat")
RAT = Atom("Q")
STRING = Atom("String")
ROW = Atom("Row")

Delta = Callable[[Sequence[Term]], "Term | None"]


@dataclass(frozen=True)
class PrimSignature:
    name: str
    ty: Formula | None = None
    family: Callable[[Formula], Formula] | None = None
    param_of: Callable[[Formula], Formula] | None = None
    arity: int = 0
    delta: Delta | None = None

    def instance(self, param: Formula | None = None) -> Formula:
        if self.family is not None:
            if param is None:
                raise TermError(f"constant {self.name} needs a type parameter")
            return self.family(param)
        assert self.ty is not None
        return self.ty


@dataclass(frozen=True)
class RowValue:
    """Row ``source`` of the distance matrix after ``stage`` rounds.

    ``entries`` is None for symbolic rows, otherwise a tuple of ints or
    ``math.inf``.
    """

    source: int
    stage: int
    entries: tuple[float, ...] | None = None

    def label(self) -> str:
        base = f"I{self.source}({self.stage})"
        if self.entries is None:
            return base
        return base + "[" + ", ".join(_fmt_entry(e) for e in self.entries) + "]"


def _fmt_entry(e: float) -> str:
    return "inf" if e == math.inf else str(int(e))


# --------------------------------------------------------------------------
# Literal constructors


def nat(n: int) -> Const:
    if n < 0:
        raise TermError("naturals are nonnegative")
    return Const(str(n), NAT, n)


def rat(q: Fraction | int) -> Const:
    q = Fraction(q)
    return Const(f"{q.numerator}/{q.denominator}", RAT, q)


def string(s: str) -> Const:
    return Const('"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"', STRING, s)


def row(source: int, stage: int, entries: Iterable[float] | None = None) -> Const:
    rv = RowValue(source, stage, None if entries is None else tuple(entries))
    return Const(rv.label(), ROW, rv)


def literal_value(t: Term, atom: Atom | None = None):
    if isinstance(t, Const) and t.value is not None and (atom is None or t.ty == atom):
        return t.value
    return None


def _tuple_values(t: Term, n: int, atom: Atom) -> list | None:
    out = []
    for i in range(n):
        if i < n - 1:
            if not isinstance(t, Pair):
                return None
            v = literal_value(t.left, atom)
            t = t.right
        else:
            v = literal_value(t, atom)
        if v is None:
            return None
        out.append(v)
    return out


# --------------------------------------------------------------------------
# Semantic helpers


def fw_f(first: RowValue, second: RowValue) -> RowValue:
    """One relaxation step of a row, or the first row when stages do not match."""
    if second.stage == first.stage and second.source == first.stage + 1:
        k = second.source
        if first.entries is None or second.entries is None:
            if first.entries is not None or second.entries is not None:
                raise TermError("mixing symbolic and numeric rows")
            return RowValue(first.source, k)
        if len(first.entries) != len(second.entries):
            raise TermError("rows of different length")
        if k > len(first.entries):
            raise TermError(f"row I{k} is out of range for a {len(first.entries)}-node graph")
        via = first.entries[k - 1]
        new = tuple(min(e, via + s) for e, s in zip(first.entries, second.entries))
        return RowValue(first.source, k, new)
    return first


def pi_integrand(x: Fraction) -> Fraction:
    return Fraction(4) / (1 + x * x)


def pi_partial(k: int, l: int, p: int) -> Fraction:
    """Midpoint sum of 4/(1+x^2) over the k-th of p equal blocks of l intervals."""
    if p <= 0 or l <= 0 or l % p:
        raise TermError(f"block count {p} must divide the interval count {l}")
    if not 1 <= k <= p:
        raise TermError(f"block index {k} out of range 1..{p}")
    lo = (k - 1) * l // p + 1
    hi = k * l // p
    return sum((pi_integrand(Fraction(2 * i - 1, 2 * l)) for i in range(lo, hi + 1)), Fraction(0))


def shortest_paths(matrix: Sequence[Sequence[float]]) -> list[list[float]]:
    """Textbook sequential all-pairs shortest paths."""
    n = len(matrix)
    d = [list(r) for r in matrix]
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if d[i][k] + d[k][j] < d[i][j]:
                    d[i][j] = d[i][k] + d[k][j]
    return d


# --------------------------------------------------------------------------
# Registry


@dataclass
class Registry:
    profiles: tuple[str, ...] = ()
    signatures: dict[str, PrimSignature] = field(default_factory=dict)
    defaults: dict[Formula, Term] = field(default_factory=dict)

    def add(self, sig: PrimSignature) -> None:
        if sig.name in self.signatures:
            raise TermError(f"constant {sig.name} registered twice")
        self.signatures[sig.name] = sig

    def __contains__(self, name: str) -> bool:
        return name in self.signatures

    def get(self, name: str) -> PrimSignature | None:
        return self.signatures.get(name)

    def const(self, name: str, param: Formula | None = None) -> Const:
        sig = self.signatures.get(name)
        if sig is None:
            raise TermError(f"unknown constant {name}")
        return Const(name, sig.instance(param))

    def is_family(self, name: str) -> bool:
        sig = self.signatures.get(name)
        return sig is not None and sig.family is not None

    def delta_redex(self, t: Term) -> Term | None:
        """The contractum if ``t`` is a saturated constant application that fires."""
        args: list[Term] = []
        head = t
        while isinstance(head, App):
            args.append(head.arg)
            head = head.fun
        if not isinstance(head, Const) or not args:
            return None
        sig = self.signatures.get(head.name)
        if sig is None or sig.delta is None or len(args) != sig.arity:
            return None
        args.reverse()
        return sig.delta(args)

    def default_inhabitant(self, f: Formula) -> Term | None:
        return self.defaults.get(f)


def _bool_profile(reg: Registry) -> None:
    tt = Const("tt", BOOL)
    ff = Const("ff", BOOL)

    def if_delta(args: Sequence[Term]) -> Term | None:
        c = args[0]
        if c == tt:
            return args[1]
        if c == ff:
            return args[2]
        return None

    reg.add(PrimSignature("tt", BOOL))
    reg.add(PrimSignature("ff", BOOL))
    # a boolean no rule ever inspects, for runs where one input stays undecided
    reg.add(PrimSignature("unknown", BOOL))
    reg.add(
        PrimSignature(
            "if",
            family=lambda t: Arrow(BOOL, Arrow(t, Arrow(t, t))),
            param_of=lambda ty: ty.right.left,
            arity=3,
            delta=if_delta,
        )
    )
    reg.defaults[BOOL] = tt


def _pi_profile(reg: Registry, p: int) -> None:
    if p < 1:
        raise TermError("the pi profile needs at least one block")
    for k in range(1, p + 1):

        def fk(args: Sequence[Term], k: int = k) -> Term | None:
            l = literal_value(args[0], NAT)
            if l is None:
                return None
            return rat(pi_partial(k, l, p))

        reg.add(PrimSignature(f"f{k}", Arrow(NAT, RAT), arity=1, delta=fk))

    def sum_delta(args: Sequence[Term]) -> Term | None:
        vals = _tuple_values(args[0], p, RAT)
        l = literal_value(args[1], NAT)
        if vals is None or l is None or l == 0:
            return None
        return rat(sum(vals, Fraction(0)) / l)

    tuple_ty = conj_all([RAT] * p)
    reg.add(PrimSignature("sum", Arrow(tuple_ty, Arrow(NAT, RAT)), arity=2, delta=sum_delta))
    reg.defaults.setdefault(NAT, nat(0))
    reg.defaults.setdefault(RAT, rat(0))


def _fw_profile(reg: Registry) -> None:
    def f_delta(args: Sequence[Term]) -> Term | None:
        a = args[0]
        if not isinstance(a, Pair):
            return None
        x, y = literal_value(a.left, ROW), literal_value(a.right, ROW)
        if x is None or y is None:
            return None
        r = fw_f(x, y)
        return Const(r.label(), ROW, r)

    reg.add(PrimSignature("f", Arrow(Conj(ROW, ROW), ROW), arity=1, delta=f_delta))
    reg.defaults.setdefault(ROW, row(1, 0))


def _buyer_vendor_profile(reg: Registry) -> None:
    prod = Const("prod", STRING)
    price = Const("price", NAT)
    card = Const("card", STRING)

    def table(src: Const, dst: Const) -> Delta:
        return lambda args: dst if args[0] == src else None

    reg.add(PrimSignature("prod", STRING))
    reg.add(PrimSignature("price", NAT))
    reg.add(PrimSignature("card", STRING))
    reg.add(PrimSignature("cost", Arrow(STRING, NAT), arity=1, delta=table(prod, price)))
    reg.add(PrimSignature("pay_for", Arrow(NAT, STRING), arity=1, delta=table(price, card)))
    # charging a card is an external effect, so it stays an uninterpreted constant
    reg.add(PrimSignature("use", Arrow(STRING, NAT)))
    reg.defaults.setdefault(NAT, nat(0))
    reg.defaults.setdefault(STRING, string(""))


def _test_profile(reg: Registry) -> None:
    """Two opaque atoms with defaults, used by the random program generator."""
    for atom, name in ((Atom("P"), "p0"), (Atom("R"), "r0")):
        reg.add(PrimSignature(name, atom))
        reg.defaults[atom] = Const(name, atom)
    reg.add(PrimSignature("g", Arrow(Atom("P"), Atom("R"))))


_PROFILES: Mapping[str, Callable[..., None]] = {
    "bool": _bool_profile,
    "pi": _pi_profile,
    "floyd-warshall": _fw_profile,
    "buyer-vendor": _buyer_vendor_profile,
    "test": _test_profile,
}


def register_program_constants(profile: str = "bool") -> Registry:
    """Build a registry from a comma-separated list of profiles.

    ``bool`` is always included.  ``pi`` takes a block count: ``pi:4``.
    """
    names = [p.strip() for p in profile.split(",") if p.strip()]
    if "bool" not in names:
        names.insert(0, "bool")
    reg = Registry(tuple(names))
    for name in names:
        base, _, arg = name.partition(":")
        builder = _PROFILES.get(base)
        if builder is None:
            raise TermError(f"unknown primitive profile {base!r}")
        if base == "pi":
            try:
                p = int(arg) if arg else 2
            except ValueError:
                raise TermError(f"bad block count in {name!r}") from None
            builder(reg, p)
        elif arg:
            raise TermError(f"profile {base!r} takes no parameter")
        else:
            builder(reg)
    _check_deltas(reg)
    return reg


def _check_deltas(reg: Registry) -> None:
    for sig in reg.signatures.values():
        if sig.delta is not None and sig.family is None:
            ty = sig.ty
            for _ in range(sig.arity):
                if not isinstance(ty, Arrow):
                    raise TermError(f"constant {sig.name} has arity {sig.arity} but type {sig.ty}")
                ty = ty.right


def delta_step(t: Term, registry: Registry) -> Term | None:
    """Contract the leftmost-outermost delta redex anywhere in ``t``."""
    from .core import iter_nodes, replace_at

    for path, u in iter_nodes(t):
        r = registry.delta_redex(u)
        if r is not None:
            if type_of(r) != type_of(u):
                raise TermError(f"delta rule for {u} changed the type")
            return replace_at(t, path, r)
    return None
