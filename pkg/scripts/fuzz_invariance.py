"""Oracle sweep over many seeds in parallel, with a verdict and closure-rule breakdown.

Each worker owns its theories, so seeds are checked in separate processes.
"""

from __future__ import annotations

import argparse
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor

from evlogic.engine import run_procedure
from evlogic.oracle import GenConfig, conformance_problems, generate_theory


def check_seed(args: tuple[int, float | None, int]) -> tuple[int, float, str, list[str]]:
    seed, bias, orders = args
    cfg = GenConfig(conflict_bias=(seed % 5) / 4 if bias is None else bias, seed=seed)
    theory = generate_theory(cfg)
    out = run_procedure(theory)
    label = "sat" if out.sat else out.witness.rule
    return seed, cfg.conflict_bias, label, conformance_problems(theory, orders=orders, seed=seed)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=2000)
    ap.add_argument("--bias", type=float, default=None)
    ap.add_argument("--orders", type=int, default=5)
    ap.add_argument("--jobs", type=int, default=None)
    args = ap.parse_args()

    start = time.perf_counter()
    by_bias: dict[float, Counter] = {}
    failures = []
    with ProcessPoolExecutor(args.jobs) as pool:
        jobs = ((s, args.bias, args.orders) for s in range(args.seeds))
        for seed, bias, label, problems in pool.map(check_seed, jobs, chunksize=32):
            by_bias.setdefault(bias, Counter())[label] += 1
            if problems:
                failures.append((seed, problems))

    for bias in sorted(by_bias):
        counts = by_bias[bias]
        print(f"bias {bias:.2f}: " + ", ".join(f"{k} {v}" for k, v in counts.most_common()))
    for seed, problems in failures[:10]:
        print(f"FAIL seed {seed}: {problems[0]}")
    print(f"{args.seeds} seeds, {len(failures)} failing, {time.perf_counter() - start:.1f}s")
    return 1 if failures else 0


if __name__ == "__main__":
    raise SystemExit(main())
