"""ASCII concrete syntax: lexer, parser and pretty-printer.

Types::

    T ::= P | Bot | Top | T -> T | T /\\ T | (T)

Terms::

    t ::= \\x:T. t | if t then t else t | t t | <t, ..., t> | t.0 | t.1
        | efq[P] t | a! | a? | x | constant | literal | (t)

Programs are ``var x : T;`` declarations followed by either threads separated
by ``|``/``||`` or a single ``nu a : {1: T ~ [k, ...]; ...} . P1 || ... || Pm``
where each process is threads separated by ``|``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .core import (
    BOT,
    App,
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
    Nu,
    Pair,
    ParThreads,
    Polarity,
    Proj,
    Term,
    TermError,
    Var,
    free_var_types,
    mk_tuple,
    type_of,
)
from .prims import NAT, RAT, ROW, STRING, Registry, RowValue


@dataclass(frozen=True)
class SourceSpan:
    begin: int
    end: int
    line: int
    col: int

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


class ParseError(TermError):
    def __init__(self, message: str, span: SourceSpan | None = None):
        self.span = span
        self.bare = message
        super().__init__(f"{span}: {message}" if span else message)


# --------------------------------------------------------------------------
# Lexer

KEYWORDS = {"nu", "var", "if", "then", "else", "efq", "Bot", "Top"}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+|--[^\n]*)
  | (?P<row>I(?P<rsrc>\d+)\((?P<rstage>\d+)\)(?:\[(?P<rents>[^\]]*)\])?)
  | (?P<chan>[A-Za-z_][A-Za-z0-9_']*[!?])
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<frac>\d+/\d+)
  | (?P<int>\d+)
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<proj>\.[01](?![0-9]))
  | (?P<sym>\|\||->|/\\|\\/|[\\:.<>,()\[\]{};~|])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    span: SourceSpan
    value: object = None


def tokenize(text: str) -> list[Token]:
    out: list[Token] = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            span = SourceSpan(pos, pos + 1, line, pos - line_start + 1)
            raise ParseError(f"unexpected character {text[pos]!r}", span)
        kind = m.lastgroup
        if m.group("row"):
            kind = "row"
        elif m.group("chan"):
            kind = "chan"
        span = SourceSpan(pos, m.end(), line, pos - line_start + 1)
        tok_text = m.group(0)
        if kind != "ws":
            value: object = None
            if kind == "row":
                ents = m.group("rents")
                entries = None
                if ents is not None:
                    entries = tuple(_row_entry(e, span) for e in ents.split(",") if e.strip())
                value = RowValue(int(m.group("rsrc")), int(m.group("rstage")), entries)
            elif kind == "int":
                value = int(tok_text)
            elif kind == "frac":
                n, d = tok_text.split("/")
                if int(d) == 0:
                    raise ParseError("zero denominator", span)
                value = Fraction(int(n), int(d))
            elif kind == "string":
                value = re.sub(r"\\(.)", r"\1", tok_text[1:-1])
            elif kind == "proj":
                value = int(tok_text[1])
            elif kind == "chan":
                value = (tok_text[:-1], Polarity(tok_text[-1]))
            out.append(Token(kind, tok_text, span, value))
        nl = tok_text.count("\n")
        if nl:
            line += nl
            line_start = pos + tok_text.rindex("\n") + 1
        pos = m.end()
    out.append(Token("eof", "", SourceSpan(pos, pos, line, pos - line_start + 1)))
    return out


def _row_entry(s: str, span: SourceSpan) -> float:
    s = s.strip()
    if s == "inf":
        return math.inf
    if s.isdigit():
        return int(s)
    raise ParseError(f"bad row entry {s!r}", span)


# --------------------------------------------------------------------------
# Parser


@dataclass
class _ChanScope:
    name: str
    instance: AxiomInstance
    process: int


class _Parser:
    def __init__(self, text: str, registry: Registry | None):
        self.toks = tokenize(text)
        self.i = 0
        self.reg = registry
        self.scope: list[tuple[str, Formula]] = []
        self.chan: _ChanScope | None = None
        self.decls: dict[str, Formula] = {}

    # token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def at(self, *texts: str) -> bool:
        t = self.tok
        return t.kind in ("sym", "ident") and t.text in texts

    def advance(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        return self.advance()

    def expect_kind(self, kind: str, what: str) -> Token:
        if self.tok.kind != kind:
            self.fail(f"expected {what}, found {self.tok.text or 'end of input'!r}")
        return self.advance()

    def fail(self, msg: str, span: SourceSpan | None = None):
        raise ParseError(msg, span or self.tok.span)

    def span_from(self, start: Token) -> SourceSpan:
        prev = self.toks[self.i - 1] if self.i > 0 else start
        s = start.span
        return SourceSpan(s.begin, max(s.end, prev.span.end), s.line, s.col)

    def ident(self) -> Token:
        t = self.tok
        if t.kind != "ident" or t.text in KEYWORDS:
            self.fail(f"expected a name, found {t.text or 'end of input'!r}")
        return self.advance()

    # types
    def formula(self) -> Formula:
        left = self.conj_formula()
        if self.at("->"):
            self.advance()
            return Arrow(left, self.formula())
        return left

    def conj_formula(self) -> Formula:
        left = self.atomic_formula()
        if self.at("/\\"):
            self.advance()
            return Conj(left, self.conj_formula())
        return left

    def atomic_formula(self) -> Formula:
        t = self.tok
        if self.at("("):
            self.advance()
            f = self.formula()
            self.expect(")")
            return f
        if self.at("Bot"):
            self.advance()
            return BOT
        if self.at("Top"):
            self.advance()
            return Arrow(BOT, BOT)
        if t.kind == "ident" and t.text not in KEYWORDS:
            self.advance()
            return Atom(t.text)
        self.fail(f"expected a type, found {t.text or 'end of input'!r}")

    # programs
    def program(self) -> Term:
        while self.at("var"):
            self.advance()
            name = self.ident()
            self.expect(":")
            ty = self.formula()
            self.expect(";")
            if name.text in self.decls:
                self.fail(f"variable {name.text} declared twice", name.span)
            self.decls[name.text] = ty
        self.scope = list(self.decls.items())
        body = self.body(top=True)
        if self.tok.kind != "eof":
            self.fail(f"unexpected {self.tok.text!r}")
        return body

    def body(self, top: bool) -> Term:
        start = self.tok
        if self.at("nu"):
            return self.nu()
        threads = [self.term()]
        seps = ("|", "||")
        while self.at(*seps):
            self.advance()
            threads.append(self.term())
        if len(threads) == 1:
            return threads[0]
        return ParThreads(tuple(threads), span=self.span_from(start))

    def schema_header(self) -> AxiomInstance:
        self.expect("{")
        entries: list[tuple[Formula, tuple[int, ...] | None]] = []
        while True:
            idx = self.expect_kind("int", "a disjunct index")
            if idx.value != len(entries) + 1:
                self.fail(f"disjunct {idx.value} out of order, expected {len(entries) + 1}", idx.span)
            self.expect(":")
            ty = self.formula()
            self.expect("~")
            self.expect("[")
            ks: list[int] = []
            if not self.at("]"):
                ks.append(self.expect_kind("int", "an outlink index").value)
                while self.at(","):
                    self.advance()
                    ks.append(self.expect_kind("int", "an outlink index").value)
            self.expect("]")
            entries.append((ty, tuple(ks) if ks else None))
            if self.at(";"):
                self.advance()
                if self.at("}"):
                    break
                continue
            break
        end = self.expect("}")
        try:
            schema = AxiomSchema(tuple(e[1] for e in entries))
            return AxiomInstance(schema, tuple(e[0] for e in entries))
        except TermError as exc:
            raise ParseError(str(exc), end.span) from None

    def nu(self) -> Term:
        start = self.expect("nu")
        name = self.ident().text
        self.expect(":")
        inst = self.schema_header()
        self.expect(".")
        outer = self.chan
        procs = []
        while True:
            pstart = self.tok
            self.chan = _ChanScope(name, inst, len(procs) + 1)
            threads = [self.term()]
            while self.at("|"):
                self.advance()
                threads.append(self.term())
            procs.append(ParThreads(tuple(threads), span=self.span_from(pstart)))
            if self.at("||"):
                self.advance()
                continue
            break
        self.chan = outer
        return Nu(name, inst, tuple(procs), span=self.span_from(start))

    # terms
    def term(self) -> Term:
        start = self.tok
        if self.at("\\"):
            self.advance()
            x = self.ident().text
            self.expect(":")
            ty = self.formula()
            self.expect(".")
            self.scope.append((x, ty))
            try:
                body = self.term()
            finally:
                self.scope.pop()
            return Lam(x, ty, body, span=self.span_from(start))
        if self.at("if") and not self._family_next():
            self.advance()
            c = self.term()
            self.expect("then")
            a = self.term()
            self.expect("else")
            b = self.term()
            if self.reg is None or "if" not in self.reg:
                self.fail("if-then-else needs the bool primitives", start.span)
            try:
                head = self.reg.const("if", type_of(a))
            except TermError as exc:
                raise ParseError(str(exc), start.span) from None
            sp = self.span_from(start)
            return App(App(App(Const(head.name, head.ty, span=start.span), c), a), b, span=sp)
        return self.application()

    def _family_next(self) -> bool:
        return self.toks[self.i + 1].text == "["

    def _starts_atom(self) -> bool:
        t = self.tok
        if t.kind in ("chan", "int", "frac", "string", "row"):
            return True
        if t.kind == "ident":
            return t.text not in KEYWORDS or t.text == "efq" or (t.text == "if" and self._family_next())
        return t.kind == "sym" and t.text in ("(", "<")

    def application(self) -> Term:
        start = self.tok
        if self.at("efq"):
            self.advance()
            self.expect("[")
            target = self.formula()
            self.expect("]")
            head: Term = Efq(target, self.postfix(), span=self.span_from(start))
        else:
            head = self.postfix()
        while True:
            if self.at("\\") or (self.at("if") and not self._family_next()):
                head = App(head, self.term(), span=self.span_from(start))
                break
            if not self._starts_atom():
                break
            if self.at("efq"):
                arg = self.application()
                head = App(head, arg, span=self.span_from(start))
                break
            head = App(head, self.postfix(), span=self.span_from(start))
        return head

    def postfix(self) -> Term:
        start = self.tok
        t = self.atom()
        while self.tok.kind == "proj":
            idx = self.advance().value
            t = Proj(idx, t, span=self.span_from(start))
        return t

    def atom(self) -> Term:
        t = self.tok
        sp = t.span
        if t.kind == "chan":
            self.advance()
            name, pol = t.value
            if self.chan is None or self.chan.name != name:
                self.fail(f"channel {name} is not bound by an enclosing nu", sp)
            c = self.chan
            return Chan(name, pol, c.process, c.instance, span=sp)
        if t.kind == "int":
            self.advance()
            return Const(t.text, NAT, t.value, span=sp)
        if t.kind == "frac":
            self.advance()
            q = t.value
            return Const(f"{q.numerator}/{q.denominator}", RAT, q, span=sp)
        if t.kind == "string":
            self.advance()
            return Const(t.text, STRING, t.value, span=sp)
        if t.kind == "row":
            self.advance()
            return Const(t.value.label(), ROW, t.value, span=sp)
        if self.at("<"):
            self.advance()
            items = [self.term()]
            while self.at(","):
                self.advance()
                items.append(self.term())
            self.expect(">")
            tup = mk_tuple(items)
            if isinstance(tup, Pair):
                tup = Pair(tup.left, tup.right, span=self.span_from(t))
            return tup
        if self.at("("):
            self.advance()
            if self.at("nu"):
                saved = self.chan
                inner = self.nu()
                self.chan = saved
            else:
                inner = self.body(top=False)
                if isinstance(inner, ParThreads):
                    inner = ParThreads(inner.threads, span=self.span_from(t))
            self.expect(")")
            return inner
        if t.kind == "ident" and t.text not in KEYWORDS:
            self.advance()
            for name, ty in reversed(self.scope):
                if name == t.text:
                    return Var(name, ty, span=sp)
            if self.reg is not None and t.text in self.reg:
                param = None
                if self.reg.is_family(t.text):
                    self.expect("[")
                    param = self.formula()
                    self.expect("]")
                c = self.reg.const(t.text, param)
                return Const(c.name, c.ty, c.value, span=self.span_from(t))
            self.fail(f"unbound name {t.text}", sp)
        if self.at("if") and self.toks[self.i + 1].text == "[":
            self.advance()
            self.expect("[")
            param = self.formula()
            self.expect("]")
            if self.reg is None or "if" not in self.reg:
                self.fail("if needs the bool primitives", sp)
            c = self.reg.const("if", param)
            return Const(c.name, c.ty, span=self.span_from(t))
        self.fail(f"expected a term, found {t.text or 'end of input'!r}")


def parse_program(
    text: str, registry: Registry | None = None, free_vars: dict[str, Formula] | None = None
) -> Term:
    """Parse a whole program.  ``free_vars`` adds declarations from outside the text."""
    p = _Parser(text, registry)
    if free_vars:
        p.decls.update(free_vars)
    return p.program()


def parse_term(text: str, registry: Registry | None = None, env: dict[str, Formula] | None = None) -> Term:
    return parse_program(text, registry, env)


def parse_formula(text: str) -> Formula:
    p = _Parser(text, None)
    f = p.formula()
    if p.tok.kind != "eof":
        p.fail(f"unexpected {p.tok.text!r}")
    return f


def declared_vars(text: str) -> dict[str, Formula]:
    p = _Parser(text, None)
    while p.at("var"):
        p.advance()
        name = p.ident().text
        p.expect(":")
        p.decls[name] = p.formula()
        p.expect(";")
    return p.decls


# --------------------------------------------------------------------------
# Pretty printing


def pretty_formula(f: Formula, level: int = 0) -> str:
    match f:
        case Atom(name=n):
            return n
        case Bottom():
            return "Bot"
        case Arrow(left=Bottom(), right=Bottom()):
            return "Top"
        case Arrow(left=l, right=r):
            s = f"{pretty_formula(l, 1)} -> {pretty_formula(r, 0)}"
            return f"({s})" if level > 0 else s
        case Conj(left=l, right=r):
            s = f"{pretty_formula(l, 2)} /\\ {pretty_formula(r, 1)}"
            return f"({s})" if level > 1 else s
    raise TermError(f"not a formula: {f!r}")


def pretty_instance(inst: AxiomInstance) -> str:
    entries = []
    for i in range(1, inst.m + 1):
        ks = ", ".join(map(str, inst.schema.outlinks_of(i)))
        entries.append(f"{i}: {pretty_formula(inst.formula(i))} ~ [{ks}]")
    return "{" + "; ".join(entries) + "}"


def _if_parts(t: Term):
    if (
        isinstance(t, App)
        and isinstance(t.fun, App)
        and isinstance(t.fun.fun, App)
        and isinstance(t.fun.fun.fun, Const)
        and t.fun.fun.fun.name == "if"
    ):
        return t.fun.fun.arg, t.fun.arg, t.arg
    return None


def _tuple_items(t: Pair) -> list[Term]:
    items = []
    while isinstance(t, Pair):
        items.append(t.left)
        t = t.right
    items.append(t)
    return items


def pretty(t: Term, level: int = 0) -> str:
    """Canonical text of a term; the top level prints parallel threads with ``||``."""
    if isinstance(t, ParThreads) and level == 0:
        return " || ".join(_thread(u) for u in t.threads)
    return _pp(t, level)


def _thread(u: Term) -> str:
    # a binder inside a thread must not swallow the threads after it
    return _paren(_pp(u, 0), isinstance(u, Nu))


def _paren(s: str, cond: bool) -> str:
    return f"({s})" if cond else s


def _pp(t: Term, level: int) -> str:
    match t:
        case Var(name=n):
            return n
        case Const(name=n, ty=ty):
            if n == "if" and isinstance(ty, Arrow) and isinstance(ty.right, Arrow):
                return f"if[{pretty_formula(ty.right.left)}]"
            return n
        case Chan(name=n, polarity=p):
            return f"{n}{p.value}"
        case Hole():
            return "[]"
        case Lam(var=x, var_ty=a, body=b):
            return _paren(f"\\{x}:{pretty_formula(a)}. {_pp(b, 0)}", level > 0)
        case App():
            parts = _if_parts(t)
            if parts is not None:
                c, a, b = parts
                return _paren(f"if {_pp(c, 0)} then {_pp(a, 0)} else {_pp(b, 0)}", level > 0)
            return _paren(f"{_pp(t.fun, 1)} {_pp(t.arg, 2)}", level > 1)
        case Efq(target=p, term=u):
            return _paren(f"efq[{pretty_formula(p)}] {_pp(u, 2)}", level > 1)
        case Proj(index=i, term=u):
            return f"{_pp(u, 2)}.{i}"
        case Pair():
            return "<" + ", ".join(_pp(u, 0) for u in _tuple_items(t)) + ">"
        case ParThreads(threads=ts):
            return "(" + " | ".join(_thread(u) for u in ts) + ")"
        case Nu(chan=a, instance=inst, processes=ps):
            procs = " || ".join(" | ".join(_thread(u) for u in p.threads) for p in ps)
            s = f"nu {a} : {pretty_instance(inst)} . {procs}"
            return _paren(s, level > 0)
    raise TermError(f"cannot print {t!r}")


def pretty_program(t: Term) -> str:
    """Text that parses back to ``t``, with declarations for its free variables."""
    lines = []
    for name, tys in sorted(free_var_types(t).items()):
        if len(tys) != 1:
            raise TermError(f"free variable {name} is used at several types")
        (ty,) = tys
        lines.append(f"var {name} : {pretty_formula(ty)};")
    lines.append(pretty(t))
    return "\n".join(lines)


# --------------------------------------------------------------------------
# Topology files


def parse_topology(text: str, notices: list[str] | None = None):
    """``nodes k`` then ``edge s d`` lines; ``#`` starts a comment."""
    from .topology import TopologyGraph

    k = None
    edges: set[tuple[int, int]] = set()
    offset = 0
    for lineno, raw in enumerate(text.splitlines(keepends=True), start=1):
        line = raw.split("#", 1)[0].strip()
        span = SourceSpan(offset, offset + len(raw.rstrip("\n")), lineno, 1)
        offset += len(raw)
        if not line:
            continue
        words = line.split()
        try:
            nums = [int(w) for w in words[1:]]
        except ValueError:
            raise ParseError(f"expected integers in {line!r}", span) from None
        if words[0] == "nodes" and len(nums) == 1:
            if k is not None:
                raise ParseError("nodes given twice", span)
            if nums[0] < 1:
                raise ParseError("a graph needs at least one node", span)
            k = nums[0]
        elif words[0] == "edge" and len(nums) == 2:
            if k is None:
                raise ParseError("edge before nodes", span)
            s, d = nums
            if not (1 <= s <= k and 1 <= d <= k):
                raise ParseError(f"edge {s} {d} outside nodes 1..{k}", span)
            edges.add((s, d))
        else:
            raise ParseError(f"cannot read line {line!r}", span)
    if k is None:
        raise ParseError("missing 'nodes' line", SourceSpan(0, 0, 1, 1))
    missing = [n for n in range(1, k + 1) if (n, n) not in edges]
    if missing and notices is not None:
        notices.append("added self-loops at nodes " + ", ".join(map(str, missing)))
    return TopologyGraph.build(k, edges)


def format_topology(g) -> str:
    lines = [f"nodes {g.node_count}"]
    lines += [f"edge {s} {d}" for s, d in sorted(g.edges) if s != d]
    return "\n".join(lines) + "\n"


def iter_literals(t: Term) -> Iterable[Const]:
    from .core import iter_nodes

    return (u for _, u in iter_nodes(t) if isinstance(u, Const) and u.value is not None)
