"""A non-deterministic reduction on single threads, used as a test oracle.

Besides beta and projection steps, an output occurrence may turn into an
input occurrence, and an input occurrence may be replaced by any channel-free
term of its type.  The last rule has infinitely many instances; a budget
restricts it to canonical inhabitants and tuple injectors ``\\x. <x, w>``
whose ``w`` is a channel-free subterm already present in the term.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .core import (
    Arrow,
    Atom,
    Bottom,
    Chan,
    Conj,
    Efq,
    Formula,
    Lam,
    Nu,
    Pair,
    ParThreads,
    Polarity,
    Term,
    TermError,
    Var,
    binders_on_path,
    children,
    contains_chan,
    free_vars,
    fresh_name,
    iter_nodes,
    mk_tuple,
    replace_at,
    size,
    subterm_at,
    type_of,
)
from .engine import apply_redex, enumerate_redexes
from .prims import Registry


@dataclass(frozen=True)
class NdBudget:
    max_size: int = 40
    max_successors: int = 16
    seed: int = 0

    def __post_init__(self) -> None:
        if self.max_size <= 0 or self.max_successors <= 0 or self.seed < 0:
            raise TermError("budget needs positive sizes and a nonnegative seed")


def _require_simple(t: Term) -> None:
    for _, u in iter_nodes(t):
        if isinstance(u, (ParThreads, Nu)):
            raise TermError("expected a single thread, found a parallel term")


def is_deterministic(t: Term) -> bool:
    _require_simple(t)
    return not contains_chan(t)


def canonical_inhabitant(
    f: Formula, registry: Registry | None = None, env: dict[str, Formula] | None = None
) -> Term:
    """A small channel-free term of type ``f``.

    Variables in ``env`` may be used; atoms otherwise need a registered default.
    """
    env = dict(env or {})
    for name, ty in reversed(list(env.items())):
        if ty == f:
            return Var(name, ty)
    match f:
        case Arrow(left=a, right=b):
            x = fresh_name("x", set(env))
            env[x] = a
            return Lam(x, a, canonical_inhabitant(b, registry, env))
        case Conj(left=a, right=b):
            return Pair(canonical_inhabitant(a, registry, env), canonical_inhabitant(b, registry, env))
        case Atom():
            d = registry.default_inhabitant(f) if registry is not None else None
            if d is not None:
                return d
            bottoms = [n for n, ty in env.items() if isinstance(ty, Bottom)]
            if bottoms:
                return Efq(f, Var(bottoms[-1], Bottom()))
            raise TermError(f"no default constant for {f}")
        case Bottom():
            raise TermError("Bot has no closed inhabitant")
    raise TermError(f"not a formula: {f!r}")


def _scope_types(t: Term, path) -> dict[str, Formula]:
    env: dict[str, Formula] = {}
    node = t
    for i in path:
        if isinstance(node, Lam):
            env[node.var] = node.var_ty
        node = children(node)[i]
    return env


def input_candidates(t: Term, path, budget: NdBudget, registry: Registry | None = None) -> list[Term]:
    """Replacements for the input occurrence at ``path``, canonical one first."""
    chan = subterm_at(t, path)
    ty = chan.ty
    env = _scope_types(t, path)
    out: list[Term] = []
    try:
        out.append(canonical_inhabitant(ty, registry, env))
    except TermError:
        pass
    if isinstance(ty, Arrow) and isinstance(ty.right, Conj) and ty.right.left == ty.left:
        a, b = ty.left, ty.right.right
        bound = set(binders_on_path(t, path))
        outer_free = free_vars(t)
        seen = set()
        for _, w in iter_nodes(t):
            if isinstance(w, (ParThreads, Nu)) or contains_chan(w):
                continue
            try:
                if type_of(w) != b:
                    continue
            except TermError:
                continue
            fv = free_vars(w)
            if fv & bound or not fv <= outer_free:
                continue
            x = fresh_name("x", fv | set(env))
            cand = Lam(x, a, Pair(Var(x, a), w))
            if cand not in seen and size(cand) <= budget.max_size:
                seen.add(cand)
                out.append(cand)
    return out


def nd_successors(t: Term, budget: NdBudget = NdBudget(), registry: Registry | None = None) -> list[Term]:
    _require_simple(t)
    mandatory = [apply_redex(t, p, registry) for p, _ in enumerate_redexes(t, registry)]
    optional: list[Term] = []
    for p, u in iter_nodes(t):
        if not isinstance(u, Chan):
            continue
        if u.polarity is Polarity.OUT:
            mandatory.append(replace_at(t, p, Chan(u.name, Polarity.IN, u.index, u.instance)))
        else:
            cands = input_candidates(t, p, budget, registry)
            if cands:
                mandatory.append(replace_at(t, p, cands[0]))
                optional += [replace_at(t, p, c) for c in cands[1:]]
    room = budget.max_successors - len(mandatory)
    if len(optional) > room:
        rng = random.Random(budget.seed)
        optional = rng.sample(optional, max(room, 0))
    return mandatory + optional


def nd_replace_input(t: Term, path, replacement: Term) -> Term:
    """One replacement step with a caller-chosen channel-free term."""
    chan = subterm_at(t, path)
    if not (isinstance(chan, Chan) and chan.polarity is Polarity.IN):
        raise TermError("no input occurrence at that path")
    if contains_chan(replacement):
        raise TermError("replacement must be channel-free")
    if type_of(replacement) != chan.ty:
        raise TermError("replacement has the wrong type")
    return replace_at(t, path, replacement)


def simulate_receive(thread: Term, app_path, messages: list[Term]) -> Term:
    """Reproduce a delivery into ``thread`` by an injector replacement then a beta step."""
    chan = subterm_at(thread, app_path + (0,))
    a = chan.ty.left
    avoid = set()
    for w in messages:
        avoid |= free_vars(w)
    x = fresh_name("x", avoid)
    inj = Lam(x, a, Pair(Var(x, a), mk_tuple(messages)))
    step1 = nd_replace_input(thread, app_path + (0,), inj)
    return apply_redex(step1, app_path)


def nd_run_random(
    t: Term, budget: NdBudget = NdBudget(), fuel: int = 100_000, registry: Registry | None = None
) -> tuple[bool, int]:
    """Follow a seeded random path; returns (reached a normal form, steps taken)."""
    rng = random.Random(budget.seed)
    steps = 0
    while True:
        succ = nd_successors(t, NdBudget(budget.max_size, budget.max_successors, rng.randrange(1 << 30)), registry)
        if not succ:
            return True, steps
        if steps >= fuel:
            return False, steps
        t = succ[rng.randrange(len(succ))]
        steps += 1
