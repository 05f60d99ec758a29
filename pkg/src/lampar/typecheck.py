"""Type checking for simply typed threads, parallel threads and the channel binder."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .core import (
    Arrow,
    Atom,
    AxiomInstance,
    AxiomSchema,
    Bottom,
    Chan,
    Conj,
    Const,
    Efq,
    Formula,
    Hole,
    Lam,
    App,
    Nu,
    Pair,
    ParThreads,
    Path,
    Proj,
    Term,
    TermError,
    Var,
    free_var_types,
    free_vars,
)


class Context(dict):
    """Ordered variable-to-formula map."""

    def extend(self, name: str, ty: Formula) -> "Context":
        c = Context(self)
        c.pop(name, None)
        c[name] = ty
        return c


@dataclass(frozen=True)
class Diagnostic:
    path: Path
    rule: str
    message: str
    expected: Formula | None = None
    found: Formula | None = None
    span: object = None

    def render(self) -> str:
        where = f"{self.span}: " if self.span is not None else ""
        s = f"{where}[{self.rule}] {self.message}"
        if self.expected is not None or self.found is not None:
            from .syntax import pretty_formula

            exp = pretty_formula(self.expected) if self.expected is not None else "-"
            fnd = pretty_formula(self.found) if self.found is not None else "-"
            s += f" (expected {exp}, found {fnd})"
        return s


@dataclass(frozen=True)
class TypeReport:
    formula: Formula | None = None
    diagnostic: Diagnostic | None = None

    def __post_init__(self) -> None:
        if (self.formula is None) == (self.diagnostic is None):
            raise ValueError("a report holds exactly one of formula and diagnostic")

    @property
    def ok(self) -> bool:
        return self.diagnostic is None


class _Fail(Exception):
    def __init__(self, diag: Diagnostic):
        self.diag = diag


def _fail(path, rule, msg, t=None, expected=None, found=None):
    raise _Fail(Diagnostic(path, rule, msg, expected, found, getattr(t, "span", None)))


def _simple(ctx: Mapping[str, Formula], t: Term, path: Path, strict: bool) -> Formula:
    match t:
        case Var(name=x, ty=ty):
            if x in ctx:
                if ctx[x] != ty:
                    _fail(path, "var", f"variable {x} annotated inconsistently", t, ctx[x], ty)
            elif strict:
                _fail(path, "var", f"unbound variable {x}", t)
            return ty
        case Const(ty=ty) | Hole(ty=ty):
            return ty
        case Chan():
            return t.ty
        case Lam(var=x, var_ty=a, body=b):
            inner = dict(ctx)
            inner[x] = a
            return Arrow(a, _simple(inner, b, path + (0,), strict))
        case App(fun=f, arg=u):
            ft = _simple(ctx, f, path + (0,), strict)
            ut = _simple(ctx, u, path + (1,), strict)
            if not isinstance(ft, Arrow):
                _fail(path, "app", "applying a term that is not a function", t, None, ft)
            if ft.left != ut:
                _fail(path, "app", "argument type mismatch", u, ft.left, ut)
            return ft.right
        case Pair(left=l, right=r):
            return Conj(_simple(ctx, l, path + (0,), strict), _simple(ctx, r, path + (1,), strict))
        case Proj(index=i, term=u):
            ut = _simple(ctx, u, path + (0,), strict)
            if i not in (0, 1):
                _fail(path, "proj", f"projection index {i}", t)
            if not isinstance(ut, Conj):
                _fail(path, "proj", "projecting a term that is not a pair", t, None, ut)
            return ut.left if i == 0 else ut.right
        case Efq(target=p, term=u):
            ut = _simple(ctx, u, path + (0,), strict)
            if not isinstance(p, Atom):
                _fail(path, "efq", "efq target must be an atom other than Bot", t, None, p)
            if not isinstance(ut, Bottom):
                _fail(path, "efq", "efq applied to a term not of type Bot", u, Bottom(), ut)
            return p
        case ParThreads() | Nu():
            _fail(path, "1-depth", "parallel composition or nu nested inside a thread", t)
    _fail(path, "term", f"not a term: {t!r}", t)


def infer_simply_typed(ctx: Mapping[str, Formula] | None, t: Term) -> TypeReport:
    """Type of a thread.  With a context every free variable must be bound in it."""
    try:
        return TypeReport(_simple(ctx or {}, t, (), ctx is not None))
    except _Fail as f:
        return TypeReport(diagnostic=f.diag)


def _threads(ctx, p: ParThreads, path: Path, strict: bool) -> Formula:
    ty = None
    for j, u in enumerate(p.threads):
        uty = _simple(ctx, u, path + (j,), strict)
        if ty is None:
            ty = uty
        elif uty != ty:
            _fail(path + (j,), "contr", "threads have different types", u, ty, uty)
    return ty


def _check_chans(p: ParThreads, nu: Nu, i: int, path: Path) -> None:
    from .core import iter_nodes

    want = nu.instance.channel_type(i)
    for sub, u in iter_nodes(p, path):
        if isinstance(u, Chan):
            if u.name != nu.chan:
                _fail(sub, "axiom", f"channel {u.name} is not bound", u)
            if u.index != i:
                _fail(sub, "axiom", f"occurrence in process {i} typed with disjunct {u.index}", u)
            if u.instance != nu.instance:
                _fail(sub, "axiom", "occurrence typed with another axiom instance", u)
            if u.ty != want:
                _fail(sub, "axiom", "channel type", u, want, u.ty)


def _program(ctx, p: Term, strict: bool) -> Formula:
    match p:
        case Nu(instance=inst, processes=ps):
            if len(ps) != inst.m:
                _fail((), "axiom", f"{len(ps)} processes for a {inst.m}-disjunct axiom", p)
            ty = None
            for i, proc in enumerate(ps, start=1):
                if not isinstance(proc, ParThreads):
                    _fail((i - 1,), "axiom", "a process must be a parallel composition", proc)
                pty = _threads(ctx, proc, (i - 1,), strict)
                _check_chans(proc, p, i, (i - 1,))
                if ty is None:
                    ty = pty
                elif pty != ty:
                    _fail((i - 1,), "axiom", "processes have different types", proc, ty, pty)
            return ty
        case ParThreads():
            for j, u in enumerate(p.threads):
                _no_free_chan(u, (j,))
            return _threads(ctx, p, (), strict)
        case _:
            _no_free_chan(p, ())
            return _simple(ctx, p, (), strict)


def _no_free_chan(t: Term, path: Path) -> None:
    from .core import iter_nodes

    for sub, u in iter_nodes(t, path):
        if isinstance(u, Chan):
            _fail(sub, "axiom", f"channel {u.name} occurs outside any nu", u)


def program_context(p: Term) -> Context:
    """The free variables of ``p`` with their annotated types."""
    ctx = Context()
    for name, tys in sorted(free_var_types(p).items()):
        if len(tys) != 1:
            raise TermError(f"free variable {name} is used at several types")
        ctx[name] = next(iter(tys))
    return ctx


def check_program(p: Term, ctx: Mapping[str, Formula] | None = None) -> TypeReport:
    try:
        if ctx is None:
            try:
                ctx = program_context(p)
            except TermError as exc:
                return TypeReport(diagnostic=Diagnostic((), "var", str(exc)))
        return TypeReport(_program(ctx, p, True))
    except _Fail as f:
        return TypeReport(diagnostic=f.diag)


def instantiate(s: AxiomSchema, assignment) -> AxiomInstance:
    """``assignment`` is a 1-based mapping or a sequence of m formulas."""
    if isinstance(assignment, Mapping):
        missing = [i for i in range(1, s.m + 1) if i not in assignment]
        if missing:
            raise TermError(f"no formula for disjuncts {missing}")
        extra = set(assignment) - set(range(1, s.m + 1))
        if extra:
            raise TermError(f"disjuncts {sorted(extra)} do not exist")
        forms = tuple(assignment[i] for i in range(1, s.m + 1))
    else:
        forms = tuple(assignment)
    return AxiomInstance(s, forms)


def check_step_preserves_type(before: Term, after: Term, ctx: Mapping[str, Formula] | None = None) -> bool:
    if ctx is None:
        try:
            ctx = program_context(before)
        except TermError:
            return False
    b = check_program(before, ctx)
    a = check_program(after, ctx)
    if not (a.ok and b.ok):
        return False
    return a.formula == b.formula and free_vars(after) <= free_vars(before)
