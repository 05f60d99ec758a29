"""Command line entry point: ``lampar check|run|topo2axiom|fuzz``.

Exit codes: 0 success or normal form, 1 error or counterexample,
2 deadlock, 3 fuel exhausted.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from dataclasses import dataclass

from .core import Const, Term, TermError, iter_nodes, replace_at, substitute
from .engine import StrategyParams, run
from .prims import ROW, register_program_constants, row
from .syntax import ParseError, parse_program, parse_term, parse_topology, pretty, pretty_formula
from .topology import all_reflexive_graphs, extract_axiom, format_schema, nu_header, validate_graph
from .typecheck import check_program

EXIT_OK, EXIT_ERROR, EXIT_DEADLOCK, EXIT_FUEL = 0, 1, 2, 3


@dataclass(frozen=True)
class RunConfig:
    fuel: int = 100_000
    receiver: int = 1
    prims: str = "bool"
    trace: str = "off"
    seed: int = 0
    strategy: str = "leftmost"

    def __post_init__(self) -> None:
        if self.fuel <= 0:
            raise ValueError("fuel must be positive")
        if self.receiver < 1:
            raise ValueError("receiver index starts at 1")


def _color(code: str, s: str, stream=sys.stdout) -> str:
    if os.environ.get("LAMPAR_COLOR", "1") == "0" or not stream.isatty():
        return s
    return f"\033[{code}m{s}\033[0m"


def _err(msg: str) -> None:
    print(_color("31", "error", sys.stderr) + ": " + msg, file=sys.stderr)


_PRIMS_PRAGMA = re.compile(r"^--\s*prims:\s*(\S+)", re.MULTILINE)


def _profile(text: str, flag: str | None) -> str:
    if flag:
        return flag
    m = _PRIMS_PRAGMA.search(text)
    return m.group(1) if m else "bool"


def _load(path: str, prims: str | None):
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    profile = _profile(text, prims)
    reg = register_program_constants(profile)
    return parse_program(text, reg), reg, profile


def cmd_check(args) -> int:
    try:
        t, _, _ = _load(args.file, args.prims)
    except (OSError, TermError) as exc:
        _err(str(exc))
        return EXIT_ERROR
    report = check_program(t)
    if not report.ok:
        _err(report.diagnostic.render())
        return EXIT_ERROR
    print(pretty_formula(report.formula))
    return EXIT_OK


def _apply_lets(t: Term, lets: list[str], reg) -> Term:
    from .core import free_var_types

    types = free_var_types(t)
    for item in lets:
        name, sep, value = item.partition("=")
        name = name.strip()
        if not sep or not name:
            raise TermError(f"--let expects NAME=VALUE, got {item!r}")
        if name not in types:
            raise TermError(f"{name} is not a free variable of the program")
        v = parse_term(value, reg)
        t = substitute(t, name, v)
    return t


def _apply_matrix(t: Term, path: str) -> Term:
    from .programs import read_matrix

    with open(path, encoding="utf-8") as fh:
        m = read_matrix(fh.read())
    for p, u in list(iter_nodes(t)):
        if isinstance(u, Const) and u.ty == ROW and u.value.stage == 0 and u.value.entries is None:
            i = u.value.source
            if not 1 <= i <= len(m):
                raise TermError(f"matrix has no row {i}")
            t = replace_at(t, p, row(i, 0, m[i - 1]))
    return t


def cmd_run(args) -> int:
    try:
        t, reg, profile = _load(args.file, args.prims)
        cfg = RunConfig(args.fuel, args.receiver, profile, args.trace, args.seed, args.strategy)
        t = _apply_lets(t, args.let or [], reg)
        if args.matrix:
            t = _apply_matrix(t, args.matrix)
        params = StrategyParams(
            start_receiver=cfg.receiver,
            strategy=cfg.strategy,
            seed=cfg.seed,
            record=cfg.trace != "off",
        )
        outcome = run(t, cfg.fuel, params, reg)
    except (OSError, ValueError) as exc:
        _err(str(exc))
        return EXIT_ERROR
    if cfg.trace == "text":
        for ev in outcome.trace:
            print(ev.text())
    elif cfg.trace == "structured":
        for ev in outcome.trace:
            print(json.dumps(ev.structured()))
    steps = len(outcome.trace)
    if outcome.kind == "normal-form":
        print(_color("32", f"normal form after {steps} steps"))
        code = EXIT_OK
    elif outcome.kind == "deadlock":
        print(_color("33", f"deadlock after {steps} steps: {outcome.explanation}"))
        code = EXIT_DEADLOCK
    else:
        print(_color("33", f"fuel exhausted after {steps} steps"))
        code = EXIT_FUEL
    print(pretty(outcome.term))
    return code


def cmd_topo2axiom(args) -> int:
    notices: list[str] = []
    try:
        with open(args.file, encoding="utf-8") as fh:
            g = parse_topology(fh.read(), notices)
    except (OSError, ParseError) as exc:
        _err(str(exc))
        return EXIT_ERROR
    for n in notices:
        print("note: " + n, file=sys.stderr)
    diags = validate_graph(g)
    if diags:
        for d in diags:
            _err(d.message)
        return EXIT_ERROR
    schema = extract_axiom(g)
    print(format_schema(schema))
    print(nu_header(schema))
    return EXIT_OK


def cmd_fuzz(args) -> int:
    from . import properties

    failures = 0
    checked = 0
    if args.kind == "topology":
        sizes = range(1, args.exhaustive + 1) if args.exhaustive else []
        for k in sizes:
            for g in all_reflexive_graphs(k):
                checked += 1
                for p in properties.topology(g):
                    failures += 1
                    print(f"{sorted(g.edges)}: {p}")
        if args.count:
            import random

            rng = random.Random(args.seed)
            from .topology import TopologyGraph

            for _ in range(args.count):
                k = rng.randint(1, 6)
                es = {(s, d) for s in range(1, k + 1) for d in range(1, k + 1) if rng.random() < 0.3}
                g = TopologyGraph.build(k, es)
                checked += 1
                for p in properties.topology(g):
                    failures += 1
                    print(f"{sorted(g.edges)}: {p}")
    else:
        check = {
            "subject-reduction": properties.subject_reduction,
            "termination": lambda s: properties.termination(s, args.fuel),
            "nd-termination": lambda s: properties.nd_termination(s, args.fuel),
        }[args.kind]
        for i in range(args.count):
            seed = args.seed * 1_000_003 + i
            checked += 1
            for v in check(seed):
                failures += 1
                print(v.render())
    status = "pass" if failures == 0 else f"{failures} counterexamples"
    print(f"{args.kind}: {checked} cases, {status}")
    return EXIT_OK if failures == 0 else EXIT_ERROR


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lampar", description="typed parallel lambda calculus toolkit")
    sub = ap.add_subparsers(dest="cmd", required=True)

    c = sub.add_parser("check", help="type-check a program")
    c.add_argument("file")
    c.add_argument("--prims", help="primitive profiles, e.g. bool or floyd-warshall")
    c.set_defaults(func=cmd_check)

    r = sub.add_parser("run", help="evaluate a program")
    r.add_argument("file")
    r.add_argument("--prims")
    r.add_argument("--let", action="append", metavar="NAME=VALUE", help="substitute a free variable")
    r.add_argument("--fuel", type=int, default=100_000)
    r.add_argument("--receiver", type=int, default=1, help="first process allowed to receive")
    r.add_argument("--trace", choices=("text", "structured", "off"), default="off")
    r.add_argument("--strategy", choices=("leftmost", "random"), default="leftmost")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--matrix", help="distance matrix replacing symbolic rows Ii(0)")
    r.set_defaults(func=cmd_run)

    t = sub.add_parser("topo2axiom", help="compile a communication graph to an axiom")
    t.add_argument("file")
    t.set_defaults(func=cmd_topo2axiom)

    f = sub.add_parser("fuzz", help="property checks on random instances")
    f.add_argument("kind", choices=("subject-reduction", "termination", "nd-termination", "topology"))
    f.add_argument("count", type=int)
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--exhaustive", type=int, default=0, metavar="N", help="all graphs up to N nodes")
    f.add_argument("--fuel", type=int, default=100_000)
    f.set_defaults(func=cmd_fuzz)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
