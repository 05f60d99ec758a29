"""Reduction relations and the deterministic evaluation strategy.

Three families of steps act on programs:

* intuitionistic steps (beta, projection, delta for registered constants),
  closed under every context;
* communication across the bound channel, where every process outlinked to a
  receiver delivers the message of its rightmost output occurrence at once;
* simplification, which keeps some channel-free threads and drops the binder.

``run`` drives these with a fixed strategy: normalize every thread, try the
receivers in rotation, and extract the leftmost channel-free thread of each
process once no receiver can make progress.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field, replace
from typing import Iterator, Sequence

from .core import (
    App,
    Chan,
    Lam,
    Nu,
    Pair,
    ParThreads,
    Path,
    Polarity,
    Proj,
    Term,
    TermError,
    all_var_names,
    binders_on_path,
    children,
    contains_chan,
    free_vars,
    fresh_name,
    iter_nodes,
    mk_tuple,
    rename_binder,
    replace_at,
    subterm_at,
    substitute,
)
from .prims import Registry

BETA, PROJ, DELTA, CROSS, SIMPLIFY = "beta", "proj", "delta", "cross", "simplify"


# --------------------------------------------------------------------------
# Descriptors and traces


@dataclass(frozen=True)
class RedexDescriptor:
    kind: str
    path: Path = ()
    receiver: int | None = None
    senders: tuple[int, ...] = ()
    receiver_paths: tuple[Path, ...] = ()
    sender_paths: tuple[Path, ...] = ()
    selection: tuple[tuple[int, int], ...] = ()

    def location(self) -> str:
        if self.kind == CROSS:
            snd = ",".join(map(str, self.senders))
            return f"receiver {self.receiver} <- {snd}"
        if self.kind == SIMPLIFY:
            return "keep " + " ".join(f"{p}.{t}" for p, t in self.selection)
        return "@" + ".".join(map(str, self.path)) if self.path else "@root"


@dataclass(frozen=True)
class TraceEvent:
    step: int
    descriptor: RedexDescriptor
    term: Term

    @property
    def kind(self) -> str:
        return self.descriptor.kind

    @property
    def snapshot(self) -> str:
        from .syntax import pretty

        return pretty(self.term)

    def text(self) -> str:
        return f"{self.step:>5} {self.kind:<8} {self.descriptor.location():<22} {self.snapshot}"

    def structured(self) -> dict:
        return {
            "step": self.step,
            "kind": self.kind,
            "location": self.descriptor.location(),
            "term": self.snapshot,
        }


@dataclass(frozen=True)
class NormalForm:
    term: Term
    trace: tuple[TraceEvent, ...] = ()
    kind = "normal-form"


@dataclass(frozen=True)
class Deadlock:
    term: Term
    explanation: str
    trace: tuple[TraceEvent, ...] = ()
    kind = "deadlock"


@dataclass(frozen=True)
class FuelExhausted:
    term: Term
    trace: tuple[TraceEvent, ...] = ()
    kind = "fuel-exhausted"


Outcome = NormalForm | Deadlock | FuelExhausted


@dataclass(frozen=True)
class StrategyParams:
    start_receiver: int = 1
    strategy: str = "leftmost"  # "leftmost" | "random"
    seed: int = 0
    record: bool = True
    check_types: bool = False


@dataclass(frozen=True)
class MachineState:
    term: Term
    receiver: int = 1
    fuel: int = 100_000
    params: StrategyParams = StrategyParams()
    trace: list = field(default_factory=list, compare=False)
    outcome: Outcome | None = None
    rng: random.Random | None = field(default=None, compare=False)

    @property
    def done(self) -> bool:
        return self.outcome is not None


# --------------------------------------------------------------------------
# Intuitionistic reductions


def redex_kind(u: Term, registry: Registry | None) -> str | None:
    if isinstance(u, App) and isinstance(u.fun, Lam):
        return BETA
    if isinstance(u, Proj) and isinstance(u.term, Pair):
        return PROJ
    if registry is not None and isinstance(u, App) and registry.delta_redex(u) is not None:
        return DELTA
    return None


def contract(u: Term, registry: Registry | None) -> Term:
    if isinstance(u, App) and isinstance(u.fun, Lam):
        return substitute(u.fun.body, u.fun.var, u.arg)
    if isinstance(u, Proj) and isinstance(u.term, Pair):
        return u.term.left if u.index == 0 else u.term.right
    if registry is not None:
        r = registry.delta_redex(u)
        if r is not None:
            return r
    raise TermError("not a redex")


def enumerate_redexes(t: Term, registry: Registry | None = None) -> list[tuple[Path, str]]:
    """Every intuitionistic redex, in pre-order (leftmost-outermost first)."""
    return [(p, k) for p, u in iter_nodes(t) if (k := redex_kind(u, registry)) is not None]


def apply_redex(t: Term, path: Path, registry: Registry | None = None) -> Term:
    return replace_at(t, path, contract(subterm_at(t, path), registry))


def intuitionistic_step(t: Term, registry: Registry | None = None) -> tuple[Term, RedexDescriptor] | None:
    """Contract the leftmost-outermost beta, projection or delta redex."""
    for p, u in iter_nodes(t):
        k = redex_kind(u, registry)
        if k is not None:
            return replace_at(t, p, contract(u, registry)), RedexDescriptor(k, p)
    return None


def thread_paths(t: Term) -> list[Path]:
    """Paths of the threads of a program, left to right."""
    match t:
        case Nu(processes=ps):
            return [(i, j) for i, p in enumerate(ps) for j in range(len(p.threads))]
        case ParThreads(threads=ts):
            return [(j,) for j in range(len(ts))]
        case _:
            return [()]


# --------------------------------------------------------------------------
# Channel occurrences


@dataclass(frozen=True)
class ChannelSite:
    path: Path  # to the Chan node, relative to the scope
    polarity: Polarity
    argument: Term | None  # the message or input argument when applied

    @property
    def app_path(self) -> Path:
        return self.path[:-1]


def rightmost_channel(scope: Term, chan: str) -> ChannelSite | None:
    """The last occurrence of ``chan`` in pre-order, with its argument if applied."""
    last: Path | None = None
    node = None
    for p, u in iter_nodes(scope):
        if isinstance(u, Chan) and u.name == chan:
            last, node = p, u
    if last is None:
        return None
    arg = None
    if last and last[-1] == 0:
        parent = subterm_at(scope, last[:-1])
        if isinstance(parent, App):
            arg = parent.arg
    return ChannelSite(last, node.polarity, arg)


@dataclass(frozen=True)
class CrossPlan:
    source: Nu
    receiver: int
    receiver_sites: tuple[tuple[int, Path, Term], ...]  # (thread, app path in thread, v)
    sender_sites: tuple[tuple[int, Path, Term], ...]  # (process, app path in process, w)

    @property
    def messages(self) -> tuple[Term, ...]:
        return tuple(w for _, _, w in self.sender_sites)

    def descriptor(self) -> RedexDescriptor:
        r = self.receiver
        return RedexDescriptor(
            CROSS,
            receiver=r,
            senders=tuple(j for j, _, _ in self.sender_sites),
            receiver_paths=tuple((r - 1, k) + p for k, p, _ in self.receiver_sites),
            sender_paths=tuple((j - 1,) + p for j, p, _ in self.sender_sites),
        )


def _term_of(x) -> Term:
    return x.term if isinstance(x, MachineState) else x


def explain_cross(t, receiver: int) -> tuple[CrossPlan | None, str]:
    """The plan for a communication into ``receiver`` or the reason it is blocked."""
    t = _term_of(t)
    if not isinstance(t, Nu):
        return None, "the program has no channel binder"
    a, inst = t.chan, t.instance
    if not 1 <= receiver <= inst.m:
        raise TermError(f"receiver {receiver} out of range 1..{inst.m}")
    senders = inst.schema.outlinks_of(receiver)
    if not senders:
        return None, f"process {receiver} has no senders"
    sites = []
    for j in senders:
        proc = t.processes[j - 1]
        site = rightmost_channel(proc, a)
        if site is None:
            return None, f"sender {j} has no occurrence of {a}"
        if site.polarity is not Polarity.OUT:
            return None, f"rightmost occurrence in sender {j} is an input"
        if site.argument is None:
            return None, f"rightmost occurrence in sender {j} carries no message"
        captured = set(binders_on_path(proc, site.app_path)) & free_vars(site.argument)
        if captured:
            return None, f"message of sender {j} mentions bound {', '.join(sorted(captured))}"
        sites.append((j, site.app_path, site.argument))
    recv = []
    for k, thread in enumerate(t.processes[receiver - 1].threads):
        site = rightmost_channel(thread, a)
        if site is None:
            continue
        if site.polarity is not Polarity.IN:
            return None, f"thread {k + 1} of process {receiver} ends with an output"
        if site.argument is None:
            return None, f"thread {k + 1} of process {receiver} has a bare input occurrence"
        recv.append((k, site.app_path, site.argument))
    if not recv:
        return None, f"process {receiver} has no thread waiting for input"
    return CrossPlan(t, receiver, tuple(recv), tuple(sites)), "ready"


def cross_ready(t, receiver: int) -> CrossPlan | None:
    return explain_cross(t, receiver)[0]


def _rename_capturing(thread: Term, path: Path, avoid: set[str]) -> Term:
    """Alpha-rename the lambdas on ``path`` whose variable is in ``avoid``."""
    node, prefix = thread, ()
    for i in path:
        if isinstance(node, Lam) and node.var in avoid:
            taken = avoid | all_var_names(thread)
            renamed = rename_binder(node, fresh_name(node.var, taken))
            thread = replace_at(thread, prefix, renamed)
            node = renamed
        node = children(node)[i]
        prefix = prefix + (i,)
    return thread


def cross_reduce(t, plan: CrossPlan) -> Term:
    t = _term_of(t)
    if t is not plan.source and t != plan.source:
        raise TermError("stale communication plan")
    msgs = list(plan.messages)
    msg_free: set[str] = set()
    for w in msgs:
        msg_free |= free_vars(w)
    procs = list(t.processes)
    r = plan.receiver
    threads = list(procs[r - 1].threads)
    for k, p, _ in plan.receiver_sites:
        th = _rename_capturing(threads[k], p, msg_free)
        v = subterm_at(th, p).arg  # renaming may have touched the argument
        threads[k] = replace_at(th, p, mk_tuple([v, *msgs]))
    procs[r - 1] = ParThreads(tuple(threads))
    for j, p, _ in plan.sender_sites:
        ch = subterm_at(procs[j - 1], p + (0,))
        flipped = Chan(ch.name, Polarity.IN, ch.index, ch.instance)
        procs[j - 1] = replace_at(procs[j - 1], p + (0,), flipped)
    return Nu(t.chan, t.instance, tuple(procs))


# --------------------------------------------------------------------------
# Simplification


def chan_free_threads(t: Nu) -> list[tuple[int, int]]:
    """1-based (process, thread) pairs of the threads without the bound channel."""
    return [
        (i, j)
        for i, p in enumerate(t.processes, start=1)
        for j, u in enumerate(p.threads, start=1)
        if not contains_chan(u, t.chan)
    ]


def simplify(t: Nu, selection: Sequence[tuple[int, int]]) -> Term:
    if not isinstance(t, Nu):
        raise TermError("simplification applies to a channel binder")
    sel = list(selection)
    if not sel:
        raise TermError("empty selection")
    if any(a >= b for a, b in zip(sel, sel[1:])):
        raise TermError("selection must be strictly increasing")
    out = []
    for i, j in sel:
        if not (1 <= i <= len(t.processes) and 1 <= j <= len(t.processes[i - 1].threads)):
            raise TermError(f"no thread {j} in process {i}")
        u = t.processes[i - 1].threads[j - 1]
        if contains_chan(u, t.chan):
            raise TermError(f"thread {j} of process {i} still uses {t.chan}")
        out.append(u)
    return out[0] if len(out) == 1 else ParThreads(tuple(out))


def leftmost_free_selection(t: Nu) -> list[tuple[int, int]]:
    seen: set[int] = set()
    sel = []
    for i, j in chan_free_threads(t):
        if i not in seen:
            seen.add(i)
            sel.append((i, j))
    return sel


# --------------------------------------------------------------------------
# One-step relation


def enumerate_steps(t: Term, registry: Registry | None = None) -> list[tuple[RedexDescriptor, Term]]:
    """Every one-step successor: redexes anywhere, each ready receiver, each simplification."""
    out = [
        (RedexDescriptor(k, p), apply_redex(t, p, registry)) for p, k in enumerate_redexes(t, registry)
    ]
    if isinstance(t, Nu):
        for r in range(1, t.instance.m + 1):
            plan = cross_ready(t, r)
            if plan is not None:
                out.append((plan.descriptor(), cross_reduce(t, plan)))
        free = chan_free_threads(t)
        for q in range(1, len(free) + 1):
            for sel in itertools.combinations(free, q):
                out.append((RedexDescriptor(SIMPLIFY, selection=sel), simplify(t, sel)))
    return out


# --------------------------------------------------------------------------
# Strategy


class _OutOfFuel(Exception):
    pass


class _Recorder:
    def __init__(self, state: MachineState):
        self.fuel = state.fuel
        self.trace = state.trace
        self.params = state.params

    def emit(self, desc: RedexDescriptor, before: Term, after: Term) -> None:
        if self.fuel <= 0:
            raise _OutOfFuel
        self.fuel -= 1
        step = (self.trace[-1].step + 1) if self.trace else 1
        if self.params.check_types:
            from .typecheck import check_step_preserves_type

            if not check_step_preserves_type(before, after):
                raise TermError(f"step {step} ({desc.kind}) broke typing")
        if self.params.record:
            self.trace.append(TraceEvent(step, desc, after))
        else:
            self.trace.append(TraceEvent(step, desc, None))


def normalize(t: Term, rec: _Recorder, registry: Registry | None) -> Term:
    """Normalize each thread in turn, leftmost-outermost within a thread."""
    for tp in thread_paths(t):
        thread = subterm_at(t, tp)
        while True:
            r = intuitionistic_step(thread, registry)
            if r is None:
                break
            thread, desc = r
            new = replace_at(t, tp, thread)
            rec.emit(replace(desc, path=tp + desc.path), t, new)
            t = new
    return t


def _finish(state: MachineState, rec: _Recorder, term: Term, outcome) -> MachineState:
    return replace(state, term=term, fuel=rec.fuel, outcome=outcome)


def strategy_step(state: MachineState, registry: Registry | None = None) -> MachineState:
    if state.done:
        return state
    if state.params.strategy == "random":
        return _random_step(state, registry)
    rec = _Recorder(state)
    t = state.term
    trace = lambda: tuple(rec.trace)  # noqa: E731
    try:
        t = normalize(t, rec, registry)
        if not isinstance(t, Nu):
            return _finish(state, rec, t, NormalForm(t, trace()))
        m = t.instance.m
        reasons = []
        for off in range(m):
            r = (state.receiver - 1 + off) % m + 1
            plan, why = explain_cross(t, r)
            if plan is not None:
                new = cross_reduce(t, plan)
                rec.emit(plan.descriptor(), t, new)
                return replace(state, term=new, receiver=r % m + 1, fuel=rec.fuel)
            reasons.append(f"receiver {r}: {why}")
        sel = leftmost_free_selection(t)
        if not sel:
            expl = "; ".join(reasons + ["no extractable result"])
            return _finish(state, rec, t, Deadlock(t, expl, trace()))
        new = simplify(t, sel)
        rec.emit(RedexDescriptor(SIMPLIFY, selection=tuple(sel)), t, new)
        return replace(state, term=new, fuel=rec.fuel)
    except _OutOfFuel:
        return _finish(state, rec, t, FuelExhausted(t, trace()))


def _random_step(state: MachineState, registry: Registry | None) -> MachineState:
    rec = _Recorder(state)
    t = state.term
    succ = enumerate_steps(t, registry)
    if not succ:
        tr = tuple(rec.trace)
        if isinstance(t, Nu):
            return _finish(state, rec, t, Deadlock(t, "no rule applies", tr))
        return _finish(state, rec, t, NormalForm(t, tr))
    rng = state.rng or random.Random(state.params.seed)
    desc, new = succ[rng.randrange(len(succ))]
    try:
        rec.emit(desc, t, new)
    except _OutOfFuel:
        return _finish(state, rec, t, FuelExhausted(t, tuple(rec.trace)))
    return replace(state, term=new, fuel=rec.fuel, rng=rng)


def initial_state(p: Term, fuel: int = 100_000, params: StrategyParams | None = None) -> MachineState:
    params = params or StrategyParams()
    if fuel <= 0:
        raise TermError("fuel must be positive")
    if params.start_receiver < 1:
        raise TermError("receiver index starts at 1")
    receiver = params.start_receiver
    if isinstance(p, Nu) and receiver > p.instance.m:
        raise TermError(f"receiver {receiver} out of range 1..{p.instance.m}")
    return MachineState(p, receiver, fuel, params, [], None, random.Random(params.seed))


def iterate(p: Term, fuel: int = 100_000, params: StrategyParams | None = None, registry=None) -> Iterator[MachineState]:
    state = initial_state(p, fuel, params)
    while not state.done:
        state = strategy_step(state, registry)
        yield state


def run(
    p: Term,
    fuel: int = 100_000,
    params: StrategyParams | None = None,
    registry: Registry | None = None,
) -> Outcome:
    """Type-check ``p`` and evaluate it to an outcome carrying the full trace."""
    from .typecheck import check_program

    report = check_program(p)
    if not report.ok:
        raise TermError("ill-typed program: " + report.diagnostic.render())
    state = initial_state(p, fuel, params)
    while not state.done:
        state = strategy_step(state, registry)
    return state.outcome
