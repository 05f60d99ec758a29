"""Formulas, axiom schemata and the term language.

Everything here is an immutable value.  Terms are intrinsically typed: a
variable carries its formula, a channel occurrence carries its polarity, the
index of the disjunct it was typed with and the axiom instance of its binder.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Iterator, Sequence, Union


class TermError(ValueError):
    """Raised for malformed terms or ill-typed term manipulation."""


# --------------------------------------------------------------------------
# Formulas


@dataclass(frozen=True, slots=True)
class Atom:
    name: str

    def __str__(self) -> str:
        from .syntax import pretty_formula

        return pretty_formula(self)


@dataclass(frozen=True, slots=True)
class Bottom:
    def __str__(self) -> str:
        return "Bot"


@dataclass(frozen=True, slots=True)
class Arrow:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        from .syntax import pretty_formula

        return pretty_formula(self)


@dataclass(frozen=True, slots=True)
class Conj:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        from .syntax import pretty_formula

        return pretty_formula(self)


Formula = Union[Atom, Bottom, Arrow, Conj]

BOT = Bottom()
TOP = Arrow(BOT, BOT)


def neg(a: Formula) -> Formula:
    return Arrow(a, BOT)


def conj_all(items: Sequence[Formula]) -> Formula:
    """Right-nested conjunction of a nonempty list."""
    if not items:
        raise TermError("empty conjunction")
    out = items[-1]
    for f in reversed(items[:-1]):
        out = Conj(f, out)
    return out


def is_atomic(f: Formula) -> bool:
    return isinstance(f, Atom)


# --------------------------------------------------------------------------
# Axiom schemata


@dataclass(frozen=True, slots=True)
class AxiomSchema:
    """(A1 -> A1 /\\ B1) \\/ ... \\/ (Am -> Am /\\ Bm).

    ``outlinks[i-1]`` is None when Bi is falsity, otherwise the strictly
    increasing 1-based indices k1 < ... < kp with Bi = A_k1 /\\ ... /\\ A_kp.
    """

    outlinks: tuple[tuple[int, ...] | None, ...]

    def __post_init__(self) -> None:
        m = len(self.outlinks)
        if m < 1:
            raise TermError("an axiom schema needs at least one disjunct")
        for i, ks in enumerate(self.outlinks, start=1):
            if ks is None:
                continue
            if not ks:
                raise TermError(f"disjunct {i}: empty outlink list (use None for Bot)")
            if any(k < 1 or k > m for k in ks):
                raise TermError(f"disjunct {i}: outlink index out of range 1..{m}")
            if i in ks:
                raise TermError(f"disjunct {i} lists itself as an outlink")
            if any(a >= b for a, b in zip(ks, ks[1:])):
                raise TermError(f"disjunct {i}: outlinks must be strictly increasing")

    @classmethod
    def of(cls, *disjuncts: Sequence[int] | None) -> "AxiomSchema":
        return cls(tuple(None if d is None or len(d) == 0 else tuple(d) for d in disjuncts))

    @property
    def m(self) -> int:
        return len(self.outlinks)

    def outlinks_of(self, i: int) -> tuple[int, ...]:
        ks = self.outlinks[i - 1]
        return () if ks is None else ks


@dataclass(frozen=True, slots=True)
class AxiomInstance:
    schema: AxiomSchema
    assignment: tuple[Formula, ...]

    def __post_init__(self) -> None:
        if len(self.assignment) != self.schema.m:
            raise TermError(
                f"instance assigns {len(self.assignment)} formulas to a schema with "
                f"{self.schema.m} disjuncts"
            )

    @property
    def m(self) -> int:
        return self.schema.m

    def formula(self, i: int) -> Formula:
        return self.assignment[i - 1]

    def b_formula(self, i: int) -> Formula:
        ks = self.schema.outlinks[i - 1]
        if ks is None:
            return BOT
        return conj_all([self.assignment[k - 1] for k in ks])

    def channel_type(self, i: int) -> Formula:
        a = self.formula(i)
        return Arrow(a, Conj(a, self.b_formula(i)))


# --------------------------------------------------------------------------
# Terms


class Polarity(enum.Enum):
    OUT = "!"
    IN = "?"

    def flip(self) -> "Polarity":
        return Polarity.IN if self is Polarity.OUT else Polarity.OUT


def _span() -> Any:
    return field(default=None, compare=False, repr=False, kw_only=True)


@dataclass(frozen=True, slots=True)
class Var:
    name: str
    ty: Formula
    span: Any = _span()


@dataclass(frozen=True, slots=True)
class Chan:
    name: str
    polarity: Polarity
    index: int
    instance: AxiomInstance
    span: Any = _span()

    @property
    def ty(self) -> Formula:
        return self.instance.channel_type(self.index)


@dataclass(frozen=True, slots=True)
class Lam:
    var: str
    var_ty: Formula
    body: "Term"
    span: Any = _span()


@dataclass(frozen=True, slots=True)
class App:
    fun: "Term"
    arg: "Term"
    span: Any = _span()


@dataclass(frozen=True, slots=True)
class Pair:
    left: "Term"
    right: "Term"
    span: Any = _span()


@dataclass(frozen=True, slots=True)
class Proj:
    index: int
    term: "Term"
    span: Any = _span()


@dataclass(frozen=True, slots=True)
class Efq:
    target: Formula
    term: "Term"
    span: Any = _span()


@dataclass(frozen=True, slots=True)
class Const:
    """A primitive constant.  ``value`` holds the payload of literals."""

    name: str
    ty: Formula
    value: Any = None
    span: Any = _span()


@dataclass(frozen=True, slots=True)
class Hole:
    ty: Formula
    span: Any = _span()


@dataclass(frozen=True, slots=True)
class ParThreads:
    threads: tuple["Term", ...]
    span: Any = _span()

    def __post_init__(self) -> None:
        if not self.threads:
            raise TermError("a parallel composition needs at least one thread")


@dataclass(frozen=True, slots=True)
class Nu:
    chan: str
    instance: AxiomInstance
    processes: tuple[ParThreads, ...]
    span: Any = _span()

    def __post_init__(self) -> None:
        if not self.processes:
            raise TermError("nu needs at least one process")


Term = Union[Var, Chan, Lam, App, Pair, Proj, Efq, Const, Hole, ParThreads, Nu]
Path = tuple[int, ...]


def app(f: Term, *args: Term) -> Term:
    for a in args:
        f = App(f, a)
    return f


# --------------------------------------------------------------------------
# Generic traversal


def children(t: Term) -> tuple[Term, ...]:
    match t:
        case Lam(body=b):
            return (b,)
        case App(fun=f, arg=a):
            return (f, a)
        case Pair(left=l, right=r):
            return (l, r)
        case Proj(term=u) | Efq(term=u):
            return (u,)
        case ParThreads(threads=ts):
            return ts
        case Nu(processes=ps):
            return ps
        case _:
            return ()


def with_children(t: Term, kids: Sequence[Term]) -> Term:
    match t:
        case Lam():
            return Lam(t.var, t.var_ty, kids[0])
        case App():
            return App(kids[0], kids[1])
        case Pair():
            return Pair(kids[0], kids[1])
        case Proj():
            return Proj(t.index, kids[0])
        case Efq():
            return Efq(t.target, kids[0])
        case ParThreads():
            return ParThreads(tuple(kids))
        case Nu():
            procs = tuple(k if isinstance(k, ParThreads) else ParThreads((k,)) for k in kids)
            return Nu(t.chan, t.instance, procs)
        case _:
            return t


def subterm_at(t: Term, path: Path) -> Term:
    for i in path:
        kids = children(t)
        if not 0 <= i < len(kids):
            raise TermError(f"path {path} does not resolve")
        t = kids[i]
    return t


def replace_at(t: Term, path: Path, new: Term) -> Term:
    if not path:
        return new
    kids = list(children(t))
    i = path[0]
    if not 0 <= i < len(kids):
        raise TermError(f"path {path} does not resolve")
    kids[i] = replace_at(kids[i], path[1:], new)
    return with_children(t, kids)


def iter_nodes(t: Term, path: Path = ()) -> Iterator[tuple[Path, Term]]:
    """Pre-order, left to right."""
    stack = [(path, t)]
    while stack:
        p, u = stack.pop()
        yield p, u
        kids = children(u)
        for i in range(len(kids) - 1, -1, -1):
            stack.append((p + (i,), kids[i]))


def binders_on_path(t: Term, path: Path) -> list[str]:
    """Names of the lambdas crossed when walking ``path`` from ``t``."""
    out = []
    for i in path:
        if isinstance(t, Lam):
            out.append(t.var)
        t = children(t)[i]
    return out


def size(t: Term) -> int:
    return sum(1 for _ in iter_nodes(t))


def contains_chan(t: Term, name: str | None = None) -> bool:
    for _, u in iter_nodes(t):
        if isinstance(u, Chan) and (name is None or u.name == name):
            return True
    return False


def is_simple(t: Term) -> bool:
    """A simply typed term: no parallel composition and no binder inside."""
    return not any(isinstance(u, (ParThreads, Nu)) for _, u in iter_nodes(t))


# --------------------------------------------------------------------------
# Types by synthesis (terms are annotated, so this is a structural read-off)


def type_of(t: Term) -> Formula:
    match t:
        case Var(ty=ty) | Const(ty=ty) | Hole(ty=ty):
            return ty
        case Chan():
            return t.ty
        case Lam(var_ty=a, body=b):
            return Arrow(a, type_of(b))
        case App(fun=f):
            ft = type_of(f)
            if not isinstance(ft, Arrow):
                raise TermError(f"application of a term of type {ft}")
            return ft.right
        case Pair(left=l, right=r):
            return Conj(type_of(l), type_of(r))
        case Proj(index=i, term=u):
            ut = type_of(u)
            if not isinstance(ut, Conj):
                raise TermError(f"projection of a term of type {ut}")
            return ut.left if i == 0 else ut.right
        case Efq(target=p):
            return p
        case ParThreads(threads=ts):
            return type_of(ts[0])
        case Nu(processes=ps):
            return type_of(ps[0])
    raise TermError(f"not a term: {t!r}")


# --------------------------------------------------------------------------
# Free and bound names


def free_vars(t: Term) -> set[str]:
    match t:
        case Var(name=n):
            return {n}
        case Lam(var=x, body=b):
            return free_vars(b) - {x}
        case _:
            out: set[str] = set()
            for k in children(t):
                out |= free_vars(k)
            return out


def free_var_types(t: Term) -> dict[str, set[Formula]]:
    """Every free variable with the formulas it is annotated with."""
    out: dict[str, set[Formula]] = {}

    def go(u: Term, bound: frozenset[str]) -> None:
        match u:
            case Var(name=n, ty=ty):
                if n not in bound:
                    out.setdefault(n, set()).add(ty)
            case Lam(var=x, body=b):
                go(b, bound | {x})
            case _:
                for k in children(u):
                    go(k, bound)

    go(t, frozenset())
    return out


def free_chans(t: Term) -> set[tuple[str, Polarity, int]]:
    match t:
        case Chan(name=n, polarity=p, index=i):
            return {(n, p, i)}
        case Nu(chan=a, processes=ps):
            out: set[tuple[str, Polarity, int]] = set()
            for p in ps:
                out |= free_chans(p)
            return {c for c in out if c[0] != a}
        case _:
            out = set()
            for k in children(t):
                out |= free_chans(k)
            return out


def all_var_names(t: Term) -> set[str]:
    out = set()
    for _, u in iter_nodes(t):
        if isinstance(u, Var):
            out.add(u.name)
        elif isinstance(u, Lam):
            out.add(u.var)
    return out


def fresh_name(base: str, avoid: set[str]) -> str:
    stem = base.rstrip("0123456789") or "x"
    k = 1
    while f"{stem}{k}" in avoid:
        k += 1
    return f"{stem}{k}"


# --------------------------------------------------------------------------
# Substitution


def substitute(t: Term, x: str, v: Term) -> Term:
    """Capture-avoiding ``t[v/x]``."""
    return substitute_many(t, {x: v})


def substitute_many(t: Term, sub: dict[str, Term]) -> Term:
    vtypes = {x: type_of(v) for x, v in sub.items()}
    vfree: set[str] = set()
    vchans: set[str] = set()
    for v in sub.values():
        vfree |= free_vars(v)
        vchans |= {c[0] for c in free_chans(v)}
    return _subst(t, dict(sub), vtypes, vfree, vchans)


def _subst(t, sub, vtypes, vfree, vchans):
    match t:
        case Var(name=n):
            if n in sub:
                if t.ty != vtypes[n]:
                    raise TermError(
                        f"substituting a term of type {vtypes[n]} for {n} : {t.ty}"
                    )
                return sub[n]
            return t
        case Chan() | Const() | Hole():
            return t
        case Lam(var=y, var_ty=a, body=b):
            inner = {k: v for k, v in sub.items() if k != y}
            if not inner:
                return t
            body_free = free_vars(b)
            if not (body_free & inner.keys()):
                return t
            if y in vfree:
                y2 = fresh_name(y, vfree | body_free | set(inner) | all_var_names(b))
                b = _subst(b, {y: Var(y2, a)}, {y: a}, {y2}, set())
                y = y2
            return Lam(y, a, _subst(b, inner, vtypes, vfree, vchans))
        case Nu(chan=c) if c in vchans:
            raise TermError(f"substitution would capture channel {c}")
        case _:
            kids = children(t)
            new = [_subst(k, sub, vtypes, vfree, vchans) for k in kids]
            if all(a is b for a, b in zip(new, kids)):
                return t
            return with_children(t, new)


def rename_binder(lam: Lam, new_name: str) -> Lam:
    body = substitute(lam.body, lam.var, Var(new_name, lam.var_ty))
    return Lam(new_name, lam.var_ty, body)


def context_fill(ctx: Term, u: Term) -> Term:
    """Replace the unique hole of ``ctx`` by ``u`` without renaming binders."""
    holes = [(p, h) for p, h in iter_nodes(ctx) if isinstance(h, Hole)]
    if len(holes) != 1:
        raise TermError(f"a context has exactly one hole, found {len(holes)}")
    path, hole = holes[0]
    if type_of(u) != hole.ty:
        raise TermError(f"hole of type {hole.ty} filled with a term of type {type_of(u)}")
    return replace_at(ctx, path, u)


# --------------------------------------------------------------------------
# Tuples


def mk_tuple(items: Sequence[Term]) -> Term:
    if not items:
        raise TermError("mk_tuple needs at least one component")
    out = items[-1]
    for t in reversed(items[:-1]):
        out = Pair(t, out)
    return out


def tuple_select(t: Term, i: int, length: int | None = None) -> Term:
    """The (i+1)-th component of a right-nested tuple value."""
    if i < 0 or (length is not None and i >= length):
        raise TermError(f"tuple index {i} out of range")
    for _ in range(i):
        if not isinstance(t, Pair):
            raise TermError(f"tuple index {i} out of range")
        t = t.right
    last = length is not None and i == length - 1
    if isinstance(t, Pair) and not last:
        return t.left
    return t


def tuple_proj(t: Term, i: int, length: int) -> Term:
    """The projection chain pi_1 ... pi_1 pi_0 selecting component ``i``."""
    if not 0 <= i < length:
        raise TermError(f"tuple index {i} out of range")
    for _ in range(i):
        t = Proj(1, t)
    if i < length - 1:
        t = Proj(0, t)
    return t


# --------------------------------------------------------------------------
# Alpha equivalence


def alpha_eq(a: Term, b: Term) -> bool:
    return _aeq(a, b, {}, {}, 0)


def _aeq(a, b, ea, eb, d) -> bool:
    if type(a) is not type(b):
        return False
    match a:
        case Var():
            la, lb = ea.get(("v", a.name)), eb.get(("v", b.name))
            if la is None and lb is None:
                return a.name == b.name and a.ty == b.ty
            return la == lb and a.ty == b.ty
        case Chan():
            la, lb = ea.get(("c", a.name)), eb.get(("c", b.name))
            same = a.name == b.name if la is None and lb is None else la == lb
            return (
                same
                and a.polarity == b.polarity
                and a.index == b.index
                and a.instance == b.instance
            )
        case Lam():
            if a.var_ty != b.var_ty:
                return False
            return _aeq(a.body, b.body, {**ea, ("v", a.var): d}, {**eb, ("v", b.var): d}, d + 1)
        case Nu():
            if a.instance != b.instance or len(a.processes) != len(b.processes):
                return False
            ea2 = {**ea, ("c", a.chan): d}
            eb2 = {**eb, ("c", b.chan): d}
            return all(_aeq(x, y, ea2, eb2, d + 1) for x, y in zip(a.processes, b.processes))
        case Const():
            return a == b
        case Hole():
            return a.ty == b.ty
        case Proj():
            return a.index == b.index and _aeq(a.term, b.term, ea, eb, d)
        case Efq():
            return a.target == b.target and _aeq(a.term, b.term, ea, eb, d)
        case _:
            ka, kb = children(a), children(b)
            return len(ka) == len(kb) and all(_aeq(x, y, ea, eb, d) for x, y in zip(ka, kb))
