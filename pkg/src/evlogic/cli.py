"""`evlogic` command line: run, check and fuzz evidence theories.

Exit codes: ``run`` gives 0 when every input is sat, 1 when some input is
unsat and 2 when some input fails to parse. ``check`` gives 0 or 2.
``fuzz`` gives 0 when every check passes and 1 otherwise.

JSON output (``run --json``) is one object per input and per line, keys in
the order of ``REPORT_KEYS`` (or ``ERROR_KEYS`` for inputs that do not parse).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .engine import RULES, run_procedure
from .goldens import corpus_path, golden_problems
from .model import TemporalFact
from .oracle import CAPS, GenConfig, conformance_problems, generate_theory, minimize
from .parser import TheoryError, parse_file, render_theory

REPORT_KEYS = ("input", "verdict", "closed_by", "model", "plausible", "trace", "stats", "duration_ms")
ERROR_KEYS = ("input", "verdict", "errors")


def _fact_key(f: TemporalFact):
    return (f.time.index, f.time.name, str(f))


@dataclass
class RunReport:
    """Outcome of one `run` on one file.

    `model` splits the final temporal facts into ``positive`` and ``negative``;
    `plausible` repeats the positive ones. An unsat report has an empty model.
    """

    input: str
    verdict: str
    closed_by: str | None = None
    model: dict[str, list[str]] = field(default_factory=lambda: {"positive": [], "negative": []})
    plausible: list[str] = field(default_factory=list)
    trace: list[str] = field(default_factory=list)
    stats: dict[str, int] = field(default_factory=dict)
    duration_ms: float = 0.0

    def __post_init__(self):
        if self.verdict not in ("sat", "unsat"):
            raise ValueError(f"verdict must be sat or unsat, got {self.verdict!r}")
        if self.verdict == "unsat" and (self.model["positive"] or self.model["negative"]):
            raise ValueError("an unsat report cannot carry a model")

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in REPORT_KEYS}

    @classmethod
    def from_dict(cls, data: dict) -> RunReport:
        return cls(**{k: data[k] for k in REPORT_KEYS})

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False)


@dataclass
class ErrorReport:
    """An input that could not be read or did not validate; `errors` are rendered with spans."""

    input: str
    errors: list[str]

    def to_dict(self) -> dict:
        return {"input": self.input, "verdict": "error", "errors": list(self.errors)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False)


def resolve_input(name: str) -> Path:
    """A path as given, or a bundled corpus file when named ``corpus/...``."""
    path = Path(name)
    if not path.exists() and path.parts[:1] == ("corpus",):
        bundled = corpus_path(str(Path(*path.parts[1:])))
        if bundled.exists():
            return bundled
    return path


def _load(name: str):
    try:
        return parse_file(resolve_input(name))
    except OSError as exc:
        return ErrorReport(name, [f"{name}: cannot read: {exc.strerror or exc}"])
    except TheoryError as exc:
        return ErrorReport(name, [str(e) for e in exc.errors])


def run_file(name: str, with_trace: bool = False) -> RunReport | ErrorReport:
    loaded = _load(name)
    if isinstance(loaded, ErrorReport):
        return loaded
    start = time.perf_counter()
    outcome = run_procedure(loaded)
    elapsed = (time.perf_counter() - start) * 1000
    facts = sorted(outcome.model, key=_fact_key)
    positive = [str(f) for f in facts if f.lit.positive]
    stats = {rule: n for rule, n in outcome.stats().items() if n}
    return RunReport(
        input=name,
        verdict="sat" if outcome.sat else "unsat",
        closed_by=None if outcome.sat else outcome.witness.rule,
        model={"positive": positive, "negative": [str(f) for f in facts if not f.lit.positive]},
        plausible=positive,
        trace=[e.render() for e in outcome.trace] if with_trace else [],
        stats={rule: stats[rule] for rule in RULES if rule in stats},
        duration_ms=round(elapsed, 3),
    )


class _Style:
    CODES = {"green": "32", "red": "31", "yellow": "33", "dim": "2", "bold": "1"}

    def __init__(self, stream):
        mode = os.environ.get("EVLOGIC_COLOR", "auto").lower()
        if mode not in ("auto", "always", "never"):
            print(f"evlogic: ignoring EVLOGIC_COLOR={mode!r} (use auto, always or never)", file=sys.stderr)
            mode = "auto"
        if mode == "auto":
            self.on = hasattr(stream, "isatty") and stream.isatty() and "NO_COLOR" not in os.environ
        else:
            self.on = mode == "always"

    def __call__(self, text: str, color: str) -> str:
        return f"\x1b[{self.CODES[color]}m{text}\x1b[0m" if self.on else text


def format_text(report: RunReport | ErrorReport, style: _Style, plausible_only: bool = False) -> str:
    if isinstance(report, ErrorReport):
        lines = [f"{report.input}: {style('error', 'red')}"]
        lines += [f"  {e}" for e in report.errors]
        return "\n".join(lines)
    if report.verdict == "sat":
        lines = [f"{report.input}: {style('sat', 'green')}"]
    else:
        lines = [f"{report.input}: {style('unsat', 'red')} (closed by {report.closed_by})"]
    if report.verdict == "sat":
        lines.append("plausible:" if plausible_only else "model:")
        lines += [f"  {f}" for f in report.model["positive"]]
        if not plausible_only:
            lines += [f"  {f}  {style('(negative)', 'dim')}" for f in report.model["negative"]]
    if report.trace:
        lines.append("trace:")
        lines += [f"  {line}" for line in report.trace]
    return "\n".join(lines)


def cmd_run(args, out=None) -> int:
    out = out or sys.stdout
    style = _Style(out)
    with ThreadPoolExecutor(max_workers=min(8, len(args.files))) as pool:
        reports = list(pool.map(lambda f: run_file(f, args.trace), args.files))
    for report in reports:
        if args.json:
            print(report.to_json(), file=out)
        else:
            print(format_text(report, style, args.plausible), file=out)
    if any(isinstance(r, ErrorReport) for r in reports):
        return 2
    return 1 if any(r.verdict == "unsat" for r in reports) else 0


def cmd_check(args, out=None) -> int:
    out = out or sys.stdout
    style = _Style(out)
    status = 0
    for name in args.files:
        loaded = _load(name)
        if isinstance(loaded, ErrorReport):
            print(format_text(loaded, style), file=out)
            status = 2
        else:
            n = len(loaded.formulas)
            print(f"{name}: {style('ok', 'green')} ({n} formulas)", file=out)
    return status


def _fuzz_config(args, seed: int) -> GenConfig:
    bias = args.bias if args.bias is not None else (seed % 5) / 4
    return GenConfig(
        agent_count=args.agents,
        time_count=args.times,
        simple_var_count=args.simple_vars,
        derived_var_count=args.derived_vars,
        reasoning_count=args.reasonings,
        conflict_bias=bias,
        seed=seed,
    )


def cmd_fuzz(args, out=None) -> int:
    out = out or sys.stdout
    try:
        configs = [_fuzz_config(args, s) for s in range(args.start, args.start + args.seeds)]
    except ValueError as exc:
        print(f"evlogic fuzz: {exc}", file=sys.stderr)
        return 2

    problems = golden_problems()
    for p in problems:
        print(f"golden: {p}", file=out)
    if not problems:
        print("goldens: ok", file=out)

    sat = 0
    for cfg in configs:
        theory = generate_theory(cfg)
        found = conformance_problems(theory, orders=args.orders, seed=cfg.seed)
        if found:
            print(f"FAIL seed {cfg.seed} (bias {cfg.conflict_bias:g})", file=out)
            for p in found:
                print(f"  {p}", file=out)
            small = minimize(theory, lambda t: bool(conformance_problems(t, args.orders, cfg.seed)))
            print("minimized theory:", file=out)
            print(render_theory(small).rstrip(), file=out)
            return 1
        sat += run_procedure(theory).sat
    n = len(configs)
    print(f"seeds {args.start}..{args.start + n - 1}: {n} checked, {sat} sat, {n - sat} unsat, 0 failing", file=out)
    return 1 if problems else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="evlogic", description="Evidence logic rewriting engine.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="rewrite theories to a model or to a contradiction")
    run.add_argument("files", nargs="+", metavar="file")
    run.add_argument("--json", action="store_true", help="one JSON report per input")
    run.add_argument("--trace", action="store_true", help="include every rule application")
    run.add_argument("--plausible", action="store_true", help="print only the positive facts")
    run.set_defaults(func=cmd_run)

    check = sub.add_parser("check", help="parse and validate without rewriting")
    check.add_argument("files", nargs="+", metavar="file")
    check.set_defaults(func=cmd_check)

    fuzz = sub.add_parser("fuzz", help="compare the engine against the oracle on random theories")
    fuzz.add_argument("--seeds", type=int, default=100, help="number of seeds (default 100)")
    fuzz.add_argument("--start", type=int, default=0, help="first seed (default 0)")
    fuzz.add_argument("--bias", type=float, default=None,
                      help="conflict bias in [0, 1]; by default cycles 0, .25, .5, .75, 1 over seeds")
    fuzz.add_argument("--orders", type=int, default=5, help="random schedules per seed (default 5)")
    for flag, key in (("--agents", "agent_count"), ("--times", "time_count"),
                      ("--simple-vars", "simple_var_count"), ("--derived-vars", "derived_var_count"),
                      ("--reasonings", "reasoning_count")):
        fuzz.add_argument(flag, type=int, default=CAPS[key], help=f"at most {CAPS[key]}")
    fuzz.set_defaults(func=cmd_fuzz)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
