"""Type-check and run every bundled program, printing its type, step count and result."""

import argparse
from pathlib import Path

from lampar.cli import _load
from lampar.engine import NormalForm, run
from lampar.syntax import pretty
from lampar.typecheck import check_program

PROGRAMS = Path(__file__).resolve().parent.parent / "programs"


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--fuel", type=int, default=100_000)
    args = ap.parse_args()
    for path in sorted(PROGRAMS.glob("*.lpar")):
        term, reg, _ = _load(str(path), None)
        report = check_program(term)
        if not report.ok:
            print(f"{path.name:20} ill-typed: {report.diagnostic.render()}")
            continue
        out = run(term, fuel=args.fuel, registry=reg)
        if isinstance(out, NormalForm):
            status = f"{len(out.trace)} steps -> {pretty(out.term)}"
        else:
            status = f"{out.kind} after {len(out.trace)} steps"
        print(f"{path.name:20} {report.formula!s:6} {status}")


if __name__ == "__main__":
    main()
