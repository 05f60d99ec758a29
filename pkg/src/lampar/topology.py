"""Communication graphs and the axiom schemata that encode them."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator

from .core import AxiomSchema, TermError


@dataclass(frozen=True)
class TopologyGraph:
    node_count: int
    edges: frozenset[tuple[int, int]]

    @classmethod
    def build(cls, k: int, edges, reflexive: bool = True) -> "TopologyGraph":
        es = set(edges)
        if reflexive:
            es |= {(n, n) for n in range(1, k + 1)}
        return cls(k, frozenset(es))

    def sources_into(self, n: int) -> list[int]:
        return sorted(s for s, d in self.edges if d == n and s != n)


@dataclass(frozen=True)
class GraphDiagnostic:
    kind: str  # "missing-self-loop" | "out-of-range" | "empty"
    edge: tuple[int, int] | None
    message: str


def validate_graph(g: TopologyGraph) -> list[GraphDiagnostic]:
    """Empty list when the graph is reflexive with all endpoints in range."""
    out = []
    if g.node_count < 1:
        out.append(GraphDiagnostic("empty", None, "a graph needs at least one node"))
    for s, d in sorted(g.edges):
        if not (1 <= s <= g.node_count and 1 <= d <= g.node_count):
            out.append(
                GraphDiagnostic("out-of-range", (s, d), f"edge {s} -> {d} leaves 1..{g.node_count}")
            )
    for n in range(1, g.node_count + 1):
        if (n, n) not in g.edges:
            out.append(GraphDiagnostic("missing-self-loop", (n, n), f"node {n} has no self-loop"))
    return out


def extract_axiom(g: TopologyGraph) -> AxiomSchema:
    diags = validate_graph(g)
    if diags:
        raise TermError("; ".join(d.message for d in diags))
    outlinks = []
    for n in range(1, g.node_count + 1):
        srcs = g.sources_into(n)
        outlinks.append(tuple(srcs) if srcs else None)
    return AxiomSchema(tuple(outlinks))


def outlinked(s: AxiomSchema, i: int, j: int) -> bool:
    """Whether process ``i`` may send to process ``j``."""
    if i == j:
        raise TermError("a process is never outlinked to itself")
    if not (1 <= i <= s.m and 1 <= j <= s.m):
        raise TermError(f"index out of range 1..{s.m}")
    return i in s.outlinks_of(j)


def schema_to_graph(s: AxiomSchema) -> TopologyGraph:
    edges = {(i, j) for j in range(1, s.m + 1) for i in s.outlinks_of(j)}
    return TopologyGraph.build(s.m, edges)


def ring_schema(n: int) -> AxiomSchema:
    """Disjunct 1 listens to n, disjunct i to i-1."""
    if n == 1:
        return AxiomSchema((None,))
    return AxiomSchema(tuple((n,) if i == 1 else (i - 1,) for i in range(1, n + 1)))


def all_reflexive_graphs(k: int) -> Iterator[TopologyGraph]:
    """Every reflexive digraph on k nodes (2 ** (k*(k-1)) of them)."""
    pairs = [(s, d) for s in range(1, k + 1) for d in range(1, k + 1) if s != d]
    for bits in itertools.product((False, True), repeat=len(pairs)):
        yield TopologyGraph.build(k, (p for p, b in zip(pairs, bits) if b))


def format_schema(s: AxiomSchema) -> str:
    """``(A1 -> A1 /\\ A2) \\/ (A2 -> A2 /\\ Bot)`` style rendering."""
    parts = []
    for i in range(1, s.m + 1):
        ks = s.outlinks[i - 1]
        rhs = " /\\ ".join(f"A{k}" for k in ks) if ks else "Bot"
        parts.append(f"(A{i} -> A{i} /\\ {rhs})")
    return " \\/ ".join(parts)


def nu_header(s: AxiomSchema, atoms: list[str] | None = None, chan: str = "a") -> str:
    atoms = atoms or [f"A{i}" for i in range(1, s.m + 1)]
    entries = "; ".join(
        f"{i}: {atoms[i - 1]} ~ [{', '.join(map(str, s.outlinks_of(i)))}]" for i in range(1, s.m + 1)
    )
    return f"nu {chan} : {{{entries}}} ."
