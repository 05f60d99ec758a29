"""Time Floyd-Warshall rings of growing size and compare each result with the oracle."""

import argparse
import random
import time

from lampar.engine import NormalForm, run
from lampar.prims import register_program_constants, shortest_paths
from lampar.programs import floyd_warshall, fw_rows


def random_matrix(n: int, rng: random.Random) -> list[list[float]]:
    return [[0 if i == j else (rng.randint(1, 20) if rng.random() < 0.6 else float("inf")) for j in range(n)] for i in range(n)]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[2, 3, 4, 5, 6])
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    reg = register_program_constants("floyd-warshall")
    print(f"{'n':>3} {'steps':>7} {'seconds':>9}  ok")
    for n in args.sizes:
        m = random_matrix(n, rng)
        t0 = time.perf_counter()
        out = run(floyd_warshall(n, m, reg), fuel=10**6, registry=reg)
        dt = time.perf_counter() - t0
        ok = isinstance(out, NormalForm) and [list(r.entries) for r in fw_rows(out.term)] == shortest_paths(m)
        print(f"{n:>3} {len(out.trace):>7} {dt:>9.3f}  {ok}")


if __name__ == "__main__":
    main()
