"""Tableau rewriting of evidence theories.

Every rule is a matcher that lists rule instances against the current
formula set. A phase either saturates insertion rules, fires one batch of an
elimination rule, or checks closure rules. `run_procedure` walks the phases in
the fixed order below and stops at the first closure.

Two conventions keep a run finite and independent of the order in which
instances of the same phase fire:

* a formula removed by an elimination rule is remembered in
  `Theory.eliminated` and never inserted again;
* an elimination phase computes all of its instances on the state it starts
  from and then removes all their targets, so one defeat cannot hide another.
"""

from __future__ import annotations

import itertools
import random
from collections import defaultdict
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .model import (
    AgentTrust,
    DerivedEvidence,
    Formula,
    Implication,
    Kind,
    ReasoningFact,
    ReasoningTrust,
    SimpleEvidence,
    TemporalFact,
    Theory,
    TraceEntry,
    Verdict,
    negate,
    sorted_formulas,
)

RULES = (
    "T1", "T1p", "T2", "Arrow", "ArrowP", "TransAgent", "TransReasoning",
    "D1", "D1p", "D1pp", "D2", "D2p", "D2pp", "XC", "XpC", "XT", "XpT", "XP",
)
CLOSURE_RULES = ("XC", "XpC", "XT", "XpT", "XP")


@dataclass(frozen=True)
class Instance:
    rule: str
    consumed: tuple[Formula, ...]
    inserted: tuple[Formula, ...] = ()
    removed: tuple[Formula, ...] = ()

    @property
    def key(self) -> tuple:
        return (self.rule, tuple(str(f) for f in self.consumed))

    @property
    def closes(self) -> bool:
        return self.rule in CLOSURE_RULES

    def applicable(self, theory: Theory) -> bool:
        if self.closes:
            return True
        if any(f not in theory.formulas and f not in theory.eliminated for f in self.inserted):
            return True
        return any(f in theory.formulas for f in self.removed)


# ---------------------------------------------------------------------------
# matchers


def _trans(pairs: Iterable[tuple], make) -> list[Instance]:
    facts = list(pairs)
    by_less = defaultdict(list)
    for f, (lo, hi) in facts:
        by_less[lo].append((f, hi))
    out = []
    for f1, (lo, mid) in facts:
        for f2, hi in by_less.get(mid, ()):
            out.append((f1, f2, make(lo, hi, f1)))
    return out


def match_trans_agent(th: Theory) -> list[Instance]:
    out = []
    by_subject = defaultdict(list)
    for f in th.of_type(AgentTrust):
        by_subject[f.subject].append((f, (f.less, f.more)))
    for subject, facts in by_subject.items():
        for f1, f2, new in _trans(facts, lambda lo, hi, f: AgentTrust(lo, hi, f.subject)):
            out.append(Instance("TransAgent", (f1, f2), (new,)))
    return out


def match_trans_reasoning(th: Theory) -> list[Instance]:
    facts = [(f, (f.less, f.more)) for f in th.of_type(ReasoningTrust)]
    return [
        Instance("TransReasoning", (f1, f2), (new,))
        for f1, f2, new in _trans(facts, lambda lo, hi, f: ReasoningTrust(lo, hi))
    ]


def match_XT(th: Theory) -> list[Instance]:
    return [Instance("XT", (f,)) for f in th.of_type(AgentTrust) if f.less == f.more]


def match_XpT(th: Theory) -> list[Instance]:
    return [Instance("XpT", (f,)) for f in th.of_type(ReasoningTrust) if f.less == f.more]


def match_T2(th: Theory) -> list[Instance]:
    out = []
    for d in th.of_type(DerivedEvidence):
        simple = tuple(
            SimpleEvidence(p.agent, p.time, p.lit) for p in d.premises if p.lit.kind is Kind.SIMPLE
        )
        imp = Implication(
            tuple((p.time, p.lit) for p in d.premises), d.reasoning, (d.time, d.lit)
        )
        out.append(Instance("T2", (d,), simple + (imp,)))
    return out


def _pairs_by(facts, key):
    groups = defaultdict(list)
    for f in facts:
        groups[key(f)].append(f)
    for group in groups.values():
        group.sort(key=str)
        yield from itertools.combinations(group, 2)


def match_D1(th: Theory) -> list[Instance]:
    out = []
    for x, y in _pairs_by(th.of_type(SimpleEvidence), lambda f: f.lit):
        if x.time != y.time and x.agent != y.agent:
            neg = negate(x.lit)
            out.append(Instance(
                "D1", (x, y),
                (SimpleEvidence(x.agent, y.time, neg), SimpleEvidence(y.agent, x.time, neg)),
            ))
    return out


def _trusted_over(th: Theory) -> dict:
    """(subject var, less agent) -> agents more trusted about that var."""
    more = defaultdict(list)
    for f in th.of_type(AgentTrust):
        more[(f.subject, f.less)].append(f)
    return more


def match_D2(th: Theory) -> list[Instance]:
    out = []
    evidence = set(th.of_type(SimpleEvidence))
    trust = _trusted_over(th)
    for weak in evidence:
        for tr in trust.get((weak.lit.var, weak.agent), ()):
            strong = SimpleEvidence(tr.more, weak.time, negate(weak.lit))
            if strong in evidence:
                out.append(Instance("D2", (tr, strong, weak), removed=(weak,)))
    return out


def match_XC(th: Theory) -> list[Instance]:
    return [
        Instance("XC", (x, y))
        for x, y in _pairs_by(th.of_type(SimpleEvidence), lambda f: (f.agent, f.lit))
        if x.time != y.time
    ]


def match_T1(th: Theory) -> list[Instance]:
    return [Instance("T1", (f,), (TemporalFact(f.time, f.lit),)) for f in th.of_type(SimpleEvidence)]


def match_arrow(th: Theory) -> list[Instance]:
    out = []
    temporal = set(th.of_type(TemporalFact))
    for imp in th.of_type(Implication):
        if any(lit.kind is not Kind.SIMPLE for _, lit in imp.premises):
            continue
        premises = [TemporalFact(t, lit) for t, lit in imp.premises]
        if all(p in temporal for p in premises):
            t, lit = imp.head
            out.append(Instance("Arrow", (imp, *premises), (ReasoningFact(t, lit, (imp.reasoning,)),)))
    return out


def match_arrow_prime(th: Theory) -> list[Instance]:
    out = []
    temporal = set(th.of_type(TemporalFact))
    facts_at = defaultdict(list)
    for rf in th.of_type(ReasoningFact):
        facts_at[(rf.time, rf.lit)].append(rf)
    for imp in th.of_type(Implication):
        if all(lit.kind is Kind.SIMPLE for _, lit in imp.premises):
            continue
        options = []
        for t, lit in imp.premises:
            if lit.kind is Kind.SIMPLE:
                fact = TemporalFact(t, lit)
                options.append([fact] if fact in temporal else [])
            else:
                options.append(sorted(facts_at.get((t, lit), ()), key=str))
        for choice in itertools.product(*options):
            reasonings = [imp.reasoning]
            for f in choice:
                if isinstance(f, ReasoningFact):
                    reasonings.extend(r for r in f.reasonings if r not in reasonings)
            t, lit = imp.head
            new = ReasoningFact(t, lit, tuple(reasonings))
            out.append(Instance("ArrowP", (imp, *choice), (new,)))
    return out


def _match_D1_reasoning(th: Theory, rule: str, singleton_only: bool) -> list[Instance]:
    facts = th.of_type(ReasoningFact)
    if singleton_only:
        facts = [f for f in facts if len(f.reasonings) == 1]
    out = []
    for x, y in _pairs_by(facts, lambda f: f.lit):
        if x.time != y.time and x.head != y.head:
            neg = negate(x.lit)
            out.append(Instance(
                rule, (x, y),
                (ReasoningFact(y.time, neg, x.reasonings), ReasoningFact(x.time, neg, y.reasonings)),
            ))
    return out


def match_D1p(th: Theory) -> list[Instance]:
    return _match_D1_reasoning(th, "D1p", singleton_only=True)


def match_D1pp(th: Theory) -> list[Instance]:
    return _match_D1_reasoning(th, "D1pp", singleton_only=False)


def delta_set(facts: Iterable[ReasoningFact], defeated: str) -> list[ReasoningFact]:
    """Every reasoning fact that relies on the defeated reasoning anywhere."""
    return [f for f in facts if defeated in f.reasonings]


def _match_D2_reasoning(th: Theory, rule: str, cascade: bool) -> list[Instance]:
    facts = th.of_type(ReasoningFact)
    if not cascade:
        facts = [f for f in facts if len(f.reasonings) == 1]
    by_slot = defaultdict(list)
    for f in facts:
        by_slot[(f.time, f.lit)].append(f)
    trust = defaultdict(list)
    for tr in th.of_type(ReasoningTrust):
        trust[tr.less].append(tr)
    out = []
    for weak in facts:
        for tr in trust.get(weak.head, ()):
            for strong in by_slot.get((weak.time, negate(weak.lit)), ()):
                if strong.head != tr.more:
                    continue
                removed = [weak]
                if cascade:
                    removed += sorted(
                        (f for f in delta_set(th.of_type(ReasoningFact), weak.head) if f != weak),
                        key=str,
                    )
                out.append(Instance(rule, (tr, strong, weak), removed=tuple(removed)))
    return out


def match_D2p(th: Theory) -> list[Instance]:
    return _match_D2_reasoning(th, "D2p", cascade=False)


def match_D2pp(th: Theory) -> list[Instance]:
    return _match_D2_reasoning(th, "D2pp", cascade=True)


def match_XpC(th: Theory) -> list[Instance]:
    return [
        Instance("XpC", (x, y))
        for x, y in _pairs_by(th.of_type(ReasoningFact), lambda f: (f.head, f.lit))
        if x.time != y.time
    ]


def match_T1p(th: Theory) -> list[Instance]:
    return [Instance("T1p", (f,), (TemporalFact(f.time, f.lit),)) for f in th.of_type(ReasoningFact)]


def match_XP(th: Theory) -> list[Instance]:
    temporal = set(th.of_type(TemporalFact))
    return [
        Instance("XP", (f, TemporalFact(f.time, negate(f.lit))))
        for f in temporal
        if f.lit.positive and TemporalFact(f.time, negate(f.lit)) in temporal
    ]


MATCHERS: dict[str, Callable[[Theory], list[Instance]]] = {
    "TransAgent": match_trans_agent,
    "TransReasoning": match_trans_reasoning,
    "XT": match_XT,
    "XpT": match_XpT,
    "T2": match_T2,
    "D1": match_D1,
    "D2": match_D2,
    "XC": match_XC,
    "T1": match_T1,
    "Arrow": match_arrow,
    "D1p": match_D1p,
    "D2p": match_D2p,
    "ArrowP": match_arrow_prime,
    "D1pp": match_D1pp,
    "D2pp": match_D2pp,
    "XpC": match_XpC,
    "T1p": match_T1p,
    "XP": match_XP,
}
assert set(MATCHERS) == set(RULES)


def applicable_instances(theory: Theory, rules: Sequence[str] = RULES) -> list[Instance]:
    return [i for r in rules for i in MATCHERS[r](theory) if i.applicable(theory)]


# ---------------------------------------------------------------------------
# phases

# (kind, rules); "loop" repeats its sub-steps until none of them changes anything
PHASES = (
    ("saturate", ("TransAgent", "TransReasoning")),
    ("close", ("XT", "XpT")),
    ("saturate", ("T2",)),
    ("loop", (("saturate", ("D1",)), ("eliminate", ("D2",)))),
    ("close", ("XC",)),
    ("saturate", ("T1",)),
    ("saturate", ("Arrow",)),
    ("loop", (("saturate", ("D1p",)), ("eliminate", ("D2p",)))),
    ("loop", (("saturate", ("ArrowP",)), ("saturate", ("D1pp",)), ("eliminate", ("D2pp",)))),
    ("close", ("XpC",)),
    ("saturate", ("T1p",)),
    ("close", ("XP",)),
)

Order = Callable[[list[Instance]], list[Instance]]


def lexicographic(instances: list[Instance]) -> list[Instance]:
    return sorted(instances, key=lambda i: i.key)


def shuffled(rng: random.Random) -> Order:
    def order(instances: list[Instance]) -> list[Instance]:
        instances = lexicographic(instances)
        rng.shuffle(instances)
        return instances
    return order


class Rewriter:
    """Applies rules to one theory it owns. `order` decides intra-phase firing order."""

    def __init__(self, theory: Theory, order: Order = lexicographic):
        self.theory = theory
        self.order = order

    def _record(self, rule, consumed, inserted=(), removed=()) -> TraceEntry:
        entry = TraceEntry(len(self.theory.trace) + 1, rule, tuple(consumed),
                           tuple(inserted), tuple(removed))
        self.theory.trace.append(entry)
        return entry

    def fire(self, inst: Instance) -> bool:
        th = self.theory
        if inst.closes:
            everything = sorted_formulas(th.formulas)
            th.formulas.clear()
            th.verdict = Verdict.CLOSED
            self._record(inst.rule, inst.consumed, removed=everything)
            return True
        new = [f for f in inst.inserted if f not in th.formulas and f not in th.eliminated]
        gone = [f for f in inst.removed if f in th.formulas]
        if not new and not gone:
            return False
        th.formulas.update(new)
        th.formulas.difference_update(gone)
        th.eliminated.update(gone)
        self._record(inst.rule, inst.consumed, new, gone)
        return True

    def saturate(self, rules: Sequence[str]) -> bool:
        changed = False
        while True:
            batch = applicable_instances(self.theory, rules)
            if not batch:
                return changed
            for inst in self.order(batch):
                changed |= self.fire(inst)

    def eliminate(self, rules: Sequence[str]) -> bool:
        # all instances are matched on the same snapshot before any removal
        batch = applicable_instances(self.theory, rules)
        changed = False
        for inst in self.order(batch):
            changed |= self.fire(inst)
        return changed

    def close(self, rules: Sequence[str]) -> bool:
        for rule in rules:
            found = MATCHERS[rule](self.theory)
            if found:
                self.fire(self.order(found)[0])
                return True
        return False

    def step(self, kind: str, rules) -> bool:
        if kind == "saturate":
            return self.saturate(rules)
        if kind == "eliminate":
            return self.eliminate(rules)
        if kind == "close":
            return self.close(rules)
        if kind == "loop":
            changed = False
            while True:
                round_changed = False
                for sub_kind, sub_rules in rules:
                    round_changed |= self.step(sub_kind, sub_rules)
                if not round_changed:
                    return changed
                changed = True
        raise ValueError(kind)

    def run(self) -> None:
        for kind, rules in PHASES:
            self.step(kind, rules)
            if self.theory.closed:
                return


@dataclass
class Outcome:
    verdict: Verdict
    theory: Theory
    witness: TraceEntry | None = None

    @property
    def trace(self) -> list[TraceEntry]:
        return self.theory.trace

    @property
    def model(self) -> set[TemporalFact]:
        if self.verdict is Verdict.CLOSED:
            return set()
        return set(self.theory.of_type(TemporalFact))

    @property
    def sat(self) -> bool:
        return self.verdict is Verdict.OPEN

    def stats(self) -> dict[str, int]:
        counts = {r: 0 for r in RULES}
        for e in self.trace:
            counts[e.rule] += 1
        return counts


def _outcome(theory: Theory) -> Outcome:
    if theory.closed:
        return Outcome(Verdict.CLOSED, theory, theory.trace[-1])
    return Outcome(Verdict.OPEN, theory)


def run_procedure(theory: Theory, order: Order = lexicographic) -> Outcome:
    """Rewrite a copy of `theory` to an exhausted open theory or to the empty closed one."""
    work = theory.copy()
    if not work.closed:
        Rewriter(work, order).run()
    return _outcome(work)


def run_randomized(theory: Theory, seed: int) -> Outcome:
    """Same phases as run_procedure, instances within a phase fired in random order."""
    return run_procedure(theory, shuffled(random.Random(seed)))


def exhaustion_violations(theory: Theory) -> list[Instance]:
    """Rule instances that would still change an open theory (empty once exhausted)."""
    if theory.closed:
        return []
    return applicable_instances(theory)


def extract_model(theory: Theory) -> set[TemporalFact]:
    if theory.closed:
        raise ValueError("a closed theory has no model")
    pending = exhaustion_violations(theory)
    if pending:
        raise ValueError(f"theory is not exhausted: {pending[0].rule} still applies")
    return set(theory.of_type(TemporalFact))


def plausible(model: Iterable[TemporalFact]) -> set[TemporalFact]:
    """The positive facts of a model."""
    return {f for f in model if f.lit.positive}


# ---------------------------------------------------------------------------
# single-rule entry points; each returns a rewritten copy


def _apply(theory: Theory, kind: str, rules) -> Theory:
    work = theory.copy()
    if not work.closed:
        Rewriter(work).step(kind, rules)
    return work


def trans_closure_agents(theory: Theory) -> Theory:
    return _apply(theory, "saturate", ("TransAgent",))


def trans_closure_reasonings(theory: Theory) -> Theory:
    return _apply(theory, "saturate", ("TransReasoning",))


def check_trust_irreflexivity(theory: Theory) -> Theory:
    return _apply(theory, "close", ("XT", "XpT"))


def apply_T2(theory: Theory) -> Theory:
    return _apply(theory, "saturate", ("T2",))


def apply_D1(theory: Theory) -> Theory:
    return _apply(theory, "saturate", ("D1",))


def apply_D2(theory: Theory) -> Theory:
    return _apply(theory, "eliminate", ("D2",))


def check_XC(theory: Theory) -> Theory:
    return _apply(theory, "close", ("XC",))


def apply_T1(theory: Theory) -> Theory:
    return _apply(theory, "saturate", ("T1",))


def apply_arrow(theory: Theory) -> Theory:
    return _apply(theory, "saturate", ("Arrow",))


def apply_arrow_prime(theory: Theory) -> Theory:
    return _apply(theory, "saturate", ("ArrowP",))


def apply_D1_reasoning(theory: Theory, singleton_only: bool = False) -> Theory:
    return _apply(theory, "saturate", ("D1p",) if singleton_only else ("D1pp",))


def apply_D2_reasoning(theory: Theory, cascade: bool = True) -> Theory:
    return _apply(theory, "eliminate", ("D2pp",) if cascade else ("D2p",))


def check_XpC(theory: Theory) -> Theory:
    return _apply(theory, "close", ("XpC",))


def apply_T1_prime(theory: Theory) -> Theory:
    return _apply(theory, "saturate", ("T1p",))


def check_XP(theory: Theory) -> Theory:
    return _apply(theory, "close", ("XP",))
