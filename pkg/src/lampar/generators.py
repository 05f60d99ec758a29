"""Seeded random generation of well-typed programs and threads."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .core import (
    BOT,
    App,
    Arrow,
    Atom,
    AxiomInstance,
    AxiomSchema,
    Chan,
    Conj,
    Efq,
    Formula,
    Lam,
    Nu,
    Pair,
    ParThreads,
    Polarity,
    Proj,
    Term,
    Var,
    size,
)
from .prims import Registry, register_program_constants

P, R = Atom("P"), Atom("R")


@dataclass(frozen=True)
class GenConfig:
    max_size: int = 60
    max_depth: int = 4
    max_processes: int = 4
    max_threads: int = 3
    max_free_vars: int = 2
    nu_probability: float = 0.8
    chan_probability: float = 0.5


def generator_registry() -> Registry:
    return register_program_constants("test")


def random_formula(rng: random.Random, depth: int = 2) -> Formula:
    """Formulas over P and R; falsity only as the domain of an arrow."""
    if depth <= 0 or rng.random() < 0.5:
        return rng.choice((P, R))
    roll = rng.random()
    if roll < 0.4:
        return Conj(random_formula(rng, depth - 1), random_formula(rng, depth - 1))
    if roll < 0.85:
        return Arrow(random_formula(rng, depth - 1), random_formula(rng, depth - 1))
    return Arrow(BOT, random_formula(rng, depth - 1))


@dataclass
class _Chans:
    name: str
    instance: AxiomInstance
    index: int
    out_bias: float = 0.5


class _Gen:
    def __init__(self, rng: random.Random, cfg: GenConfig, reg: Registry):
        self.rng = rng
        self.cfg = cfg
        self.reg = reg
        self.counter = 0

    def fresh(self) -> str:
        self.counter += 1
        return f"v{self.counter}"

    def chan(self, ch: _Chans) -> Chan:
        pol = Polarity.OUT if self.rng.random() < ch.out_bias else Polarity.IN
        return Chan(ch.name, pol, ch.index, ch.instance)

    def term(self, ty: Formula, env: list[tuple[str, Formula]], depth: int, ch: _Chans | None) -> Term:
        rng = self.rng
        options = []
        hits = [n for n, t in env if t == ty]
        if hits:
            options.append(("var", 3))
        if depth > 0:
            options.append(("beta", 1))
            options.append(("proj", 1))
        if isinstance(ty, Arrow):
            options.append(("lam", 3))
        elif isinstance(ty, Conj):
            options.append(("pair", 3))
        elif isinstance(ty, Atom):
            options.append(("const", 2))
            if ty == R and depth > 0:
                options.append(("g", 1))
            if depth > 0 and any(t == BOT for _, t in env):
                options.append(("efq", 1))
        if ch is not None and depth > 0:
            inst = ch.instance
            if inst.formula(ch.index) == ty or inst.b_formula(ch.index) == ty:
                options.append(("chan", 4))
            if isinstance(ty, Atom) and inst.b_formula(ch.index) == BOT:
                options.append(("chan-efq", 2))
        kinds = [k for k, _ in options]
        weights = [w for _, w in options]
        if not kinds:
            return self.closed(ty, env)
        if "chan" in kinds and rng.random() < self.cfg.chan_probability:
            kind = "chan"
        else:
            kind = rng.choices(kinds, weights)[0]
        d = depth - 1
        if kind == "var":
            name = rng.choice(hits)
            return Var(name, ty)
        if kind == "lam":
            x = self.fresh()
            return Lam(x, ty.left, self.term(ty.right, env + [(x, ty.left)], d, ch))
        if kind == "pair":
            return Pair(self.term(ty.left, env, d, ch), self.term(ty.right, env, d, ch))
        if kind == "const":
            return self.reg.default_inhabitant(ty)
        if kind == "g":
            return App(self.reg.const("g"), self.term(P, env, d, ch))
        if kind == "efq":
            x = rng.choice([n for n, t in env if t == BOT])
            return Efq(ty, Var(x, BOT))
        if kind == "beta":
            a = random_formula(rng, 1)
            x = self.fresh()
            body = self.term(ty, env + [(x, a)], d, ch)
            return App(Lam(x, a, body), self.term(a, env, d, ch))
        if kind == "proj":
            other = random_formula(rng, 1)
            if rng.random() < 0.5:
                return Proj(0, Pair(self.term(ty, env, d, ch), self.term(other, env, d, ch)))
            return Proj(1, Pair(self.term(other, env, d, ch), self.term(ty, env, d, ch)))
        if kind in ("chan", "chan-efq"):
            inst = ch.instance
            a = inst.formula(ch.index)
            call = App(self.chan(ch), self.term(a, env, d, ch))
            if kind == "chan-efq":
                return Efq(ty, Proj(1, call))
            if inst.formula(ch.index) == ty and (inst.b_formula(ch.index) != ty or rng.random() < 0.5):
                return Proj(0, call)
            return Proj(1, call)
        return self.closed(ty, env)

    def closed(self, ty: Formula, env) -> Term:
        """Smallest term of ``ty`` without further randomness."""
        for n, t in reversed(env):
            if t == ty:
                return Var(n, ty)
        if isinstance(ty, Arrow):
            x = self.fresh()
            return Lam(x, ty.left, self.closed(ty.right, env + [(x, ty.left)]))
        if isinstance(ty, Conj):
            return Pair(self.closed(ty.left, env), self.closed(ty.right, env))
        d = self.reg.default_inhabitant(ty)
        if d is None:
            raise ValueError(f"no inhabitant for {ty}")
        return d


def random_schema(rng: random.Random, m: int) -> AxiomSchema:
    outs = []
    for i in range(1, m + 1):
        others = [k for k in range(1, m + 1) if k != i and rng.random() < 0.5]
        outs.append(tuple(others) if others else None)
    return AxiomSchema(tuple(outs))


def random_program(seed: int, cfg: GenConfig = GenConfig(), registry: Registry | None = None) -> Term:
    """A well-typed program of at most ``cfg.max_size`` nodes, determined by ``seed``."""
    rng = random.Random(seed)
    reg = registry or generator_registry()
    for _ in range(200):
        g = _Gen(rng, cfg, reg)
        free = [(f"y{k}", random_formula(rng, 1)) for k in range(rng.randint(0, cfg.max_free_vars))]
        ty = random_formula(rng, 1)
        depth = rng.randint(1, cfg.max_depth)
        if rng.random() < cfg.nu_probability:
            m = rng.randint(2, cfg.max_processes) if rng.random() < 0.85 else 1
            schema = random_schema(rng, m)
            forms = tuple(ty if rng.random() < 0.6 else random_formula(rng, 1) for _ in range(m))
            inst = AxiomInstance(schema, forms)
            procs = []
            for i in range(1, m + 1):
                # processes lean towards sending or towards receiving
                ch = _Chans("a", inst, i, rng.choice((0.2, 0.8)))
                n = rng.randint(1, cfg.max_threads)
                procs.append(ParThreads(tuple(g.term(ty, free, depth, ch) for _ in range(n))))
            t: Term = Nu("a", inst, tuple(procs))
        elif rng.random() < 0.5:
            n = rng.randint(2, cfg.max_threads)
            t = ParThreads(tuple(g.term(ty, free, depth, None) for _ in range(n)))
        else:
            t = g.term(ty, free, depth, None)
        if size(t) <= cfg.max_size:
            return t
    raise RuntimeError(f"could not generate a small program for seed {seed}")


def random_thread(seed: int, max_size: int = 40, registry: Registry | None = None) -> Term:
    """A single thread that may use a free channel, for the non-deterministic relation."""
    rng = random.Random(seed)
    reg = registry or generator_registry()
    cfg = GenConfig(max_size=max_size)
    for _ in range(200):
        g = _Gen(rng, cfg, reg)
        m = rng.randint(1, 3)
        inst = AxiomInstance(random_schema(rng, m), tuple(random_formula(rng, 1) for _ in range(m)))
        ch = _Chans("a", inst, rng.randint(1, m))
        t = g.term(random_formula(rng, 1), [], rng.randint(1, cfg.max_depth), ch)
        if size(t) <= max_size:
            return t
    raise RuntimeError(f"could not generate a small thread for seed {seed}")
