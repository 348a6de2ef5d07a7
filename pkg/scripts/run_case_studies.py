"""Run the bundled case studies and print model, trace and golden check for each."""

from __future__ import annotations

import argparse

from evlogic.goldens import (
    CLOSURE_CASES,
    attribution_problems,
    cascade_problems,
    closure_problems,
    dnc_problems,
    run_corpus,
)

CASES = {
    "dnc.el": dnc_problems,
    "attribution.el": attribution_problems,
    "cascade.el": cascade_problems,
    **{rel: (lambda out, rule=rule: closure_problems(rule, out)) for rule, rel in CLOSURE_CASES.items()},
}


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trace", action="store_true", help="print every rule application")
    args = ap.parse_args()

    failed = 0
    for rel, check in CASES.items():
        out = run_corpus(rel)
        verdict = "sat" if out.sat else f"unsat (closed by {out.witness.rule})"
        print(f"== {rel}: {verdict}, {len(out.trace)} steps")
        for fact in sorted(map(str, out.model)):
            print(f"   {fact}")
        if args.trace:
            for entry in out.trace:
                print("   " + entry.render())
        problems = check(out)
        failed += bool(problems)
        print("   golden: " + ("ok" if not problems else "; ".join(problems)))
    return 1 if failed else 0


if __name__ == "__main__":
    raise SystemExit(main())
