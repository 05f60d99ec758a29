"""Executable metatheory checks shared by the test suite and ``lampar fuzz``."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .engine import CROSS, SIMPLIFY, StrategyParams, enumerate_steps, run
from .generators import random_program, random_thread, generator_registry
from .ndredux import NdBudget, nd_run_random
from .topology import TopologyGraph, extract_axiom, schema_to_graph
from .programs import topology_probe
from .typecheck import check_program, check_step_preserves_type, program_context


@dataclass(frozen=True)
class Violation:
    seed: int
    message: str
    term: object = None

    def render(self) -> str:
        from .syntax import pretty_program

        s = f"seed {self.seed}: {self.message}"
        if self.term is not None:
            s += "\n  " + pretty_program(self.term).replace("\n", "\n  ")
        return s


def subject_reduction(seed: int, walk: int = 60) -> list[Violation]:
    """Check every successor along a seeded walk that postpones simplification."""
    reg = generator_registry()
    t = random_program(seed, registry=reg)
    if not check_program(t).ok:
        return [Violation(seed, "generator produced an ill-typed program", t)]
    ctx = program_context(t)
    rng = random.Random(seed)
    out = []
    for _ in range(walk):
        succ = enumerate_steps(t, reg)
        if not succ:
            break
        for desc, u in succ:
            if not check_step_preserves_type(t, u, ctx):
                out.append(Violation(seed, f"{desc.kind} step {desc.location()} broke typing", t))
        busy = [s for s in succ if s[0].kind != SIMPLIFY] or succ
        t = busy[rng.randrange(len(busy))][1]
    return out


def termination(seed: int, fuel: int = 100_000) -> list[Violation]:
    reg = generator_registry()
    t = random_program(seed, registry=reg)
    params = StrategyParams(strategy="random", seed=seed, record=False)
    o = run(t, fuel, params, reg)
    if o.kind == "fuel-exhausted":
        return [Violation(seed, f"no normal form within {fuel} steps", t)]
    return []


def nd_termination(seed: int, fuel: int = 100_000, budget: NdBudget | None = None) -> list[Violation]:
    reg = generator_registry()
    t = random_thread(seed, registry=reg)
    b = budget or NdBudget(seed=seed)
    done, steps = nd_run_random(t, b, fuel, reg)
    if not done:
        return [Violation(seed, f"no normal form within {fuel} steps", t)]
    return []


def communication_pairs(g: TopologyGraph) -> set[tuple[int, int]]:
    """Sender/receiver pairs of every communication enabled by the probes of ``g``."""
    schema = extract_axiom(g)
    pairs = set()
    for y in range(1, schema.m + 1):
        probe = topology_probe(schema, y)
        for desc, _ in enumerate_steps(probe):
            if desc.kind == CROSS:
                pairs |= {(x, desc.receiver) for x in desc.senders}
    return pairs


def topology(g: TopologyGraph) -> list[str]:
    """Mismatches between the graph, its schema and the enabled communications."""
    problems = []
    if schema_to_graph(extract_axiom(g)) != g:
        problems.append("schema does not round-trip to the graph")
    want = {(s, d) for s, d in g.edges if s != d}
    got = communication_pairs(g)
    for s, d in sorted(want - got):
        problems.append(f"edge {s}->{d} enables no communication")
    for s, d in sorted(got - want):
        problems.append(f"communication {s}->{d} without an edge")
    return problems
