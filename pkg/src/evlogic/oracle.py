"""Independent checks for the rewriting engine.

The semantics of the logic is given by the rewriting itself, so the checks
here are of two kinds: running the same phases with random intra-phase
instance order and comparing outcomes, and verifying the model conditions
directly on the output (one time per literal for each agent and each head
reasoning, trust relations irreflexive and antisymmetric, no t:p next to t:~p).
"""

from __future__ import annotations

import random
from collections import defaultdict
from dataclasses import dataclass, field

import networkx as nx

from .engine import Outcome, exhaustion_violations, run_procedure, run_randomized
from .model import (
    AgentTrust,
    DerivedEvidence,
    Kind,
    Literal,
    Premise,
    PropVar,
    ReasoningFact,
    ReasoningTrust,
    SimpleEvidence,
    TemporalFact,
    Theory,
    TimeLabel,
    Verdict,
    negate,
)
from .parser import TheoryError, parse_theory, render_theory

__all__ = [
    "GenConfig",
    "Violation",
    "check_model_conditions",
    "conformance_problems",
    "generate_closing_theory",
    "generate_theory",
    "minimize",
    "run_randomized",
]

CAPS = {
    "agent_count": 4,
    "time_count": 3,
    "simple_var_count": 4,
    "derived_var_count": 3,
    "reasoning_count": 4,
}


@dataclass(frozen=True)
class GenConfig:
    agent_count: int = 4
    time_count: int = 3
    simple_var_count: int = 4
    derived_var_count: int = 3
    reasoning_count: int = 4
    conflict_bias: float = 0.5
    seed: int = 0

    def __post_init__(self):
        for name, cap in CAPS.items():
            value = getattr(self, name)
            if not 1 <= value <= cap:
                raise ValueError(f"{name} must be in 1..{cap}, got {value}")
        if not 0.0 <= self.conflict_bias <= 1.0:
            raise ValueError(f"conflict_bias must be in [0, 1], got {self.conflict_bias}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned value")


def generate_theory(config: GenConfig) -> Theory:
    """A random valid theory, fully determined by `config`."""
    return _Generator(config).theory()


class _Generator:
    def __init__(self, config: GenConfig, with_trust: bool = True):
        self.cfg = config
        self.rng = random.Random(config.seed)
        self.with_trust = with_trust
        self.agents = [f"a{i + 1}" for i in range(config.agent_count)]
        self.times = [TimeLabel(f"t{i + 1}", i) for i in range(config.time_count)]
        self.simple = [PropVar(f"p{i + 1}", Kind.SIMPLE) for i in range(config.simple_var_count)]
        self.derived = [PropVar(f"d{i + 1}", Kind.DERIVED) for i in range(config.derived_var_count)]
        self.rids = [f"r{i + 1}" for i in range(config.reasoning_count)]
        # with no conflict bias every literal is only ever asserted at its home time
        # opposite literals get different home times whenever there are two times
        self.home = {}
        for v in self.simple + self.derived:
            pos, neg = self.rng.sample(self.times, 2) if len(self.times) > 1 else self.times * 2
            self.home[Literal(v, True)], self.home[Literal(v, False)] = pos, neg
        self.formulas: set = set()
        self.asserted: dict = {}
        self.concluded: set[PropVar] = set()

    def biased(self) -> bool:
        return self.rng.random() < self.cfg.conflict_bias

    def time_for(self, lit: Literal, agent: str | None = None) -> TimeLabel:
        """Home time, or with the bias a random one; an agent keeps its first choice."""
        if agent is not None and (agent, lit) in self.asserted:
            return self.asserted[(agent, lit)]
        t = self.rng.choice(self.times) if self.biased() else self.home[lit]
        if agent is not None:
            self.asserted[(agent, lit)] = t
        return t

    def literal(self, pool) -> Literal:
        return Literal(self.rng.choice(pool), self.rng.random() < 0.7)

    def theory(self) -> Theory:
        rng = self.rng
        for _ in range(rng.randint(1, 2 * len(self.simple))):
            lit = self.literal(self.simple)
            agent = rng.choice(self.agents)
            self.formulas.add(SimpleEvidence(agent, self.time_for(lit, agent), lit))
            if self.biased():
                # somebody else says the opposite
                other = rng.choice(self.agents)
                self.formulas.add(SimpleEvidence(other, self.time_for(negate(lit), other), negate(lit)))

        for rid in self.rids:
            if rng.random() < 0.85:
                self.derived_evidence(rid)

        if self.with_trust:
            self.trust()
        if self.cfg.conflict_bias >= 1.0:
            self.ensure_temporal_discordance()
        return self.build()

    def derived_evidence(self, rid: str):
        rng = self.rng
        rank = rng.randrange(len(self.derived))
        head = Literal(self.derived[rank], rng.random() < 0.6)
        # only lower-ranked derived vars that something already concludes: keeps the
        # derivation graph acyclic and every derived premise var a derived head
        pool = self.simple + [v for v in self.derived[:rank] if v in self.concluded]
        premises = []
        for _ in range(rng.randint(1, 3)):
            lit = self.literal(pool)
            agent = rng.choice(self.agents)
            p = Premise(agent, self.time_for(lit, agent), lit)
            if p not in premises:
                premises.append(p)
        users = rng.sample(self.agents, k=min(len(self.agents), rng.choice((1, 1, 2))))
        self.concluded.add(head.var)
        for agent in users:
            self.formulas.add(
                DerivedEvidence(agent, self.time_for(head, agent), head, rid, tuple(premises))
            )

    def trust(self):
        rng = self.rng
        used = sorted(
            {f.reasoning for f in self.formulas if isinstance(f, DerivedEvidence)}
        ) or self.rids[:1]
        for _ in range(rng.randint(0, 3)):
            subject = rng.choice(self.simple)
            if len(self.agents) < 2:
                break
            if rng.random() < 0.1:
                less, more = rng.choice(self.agents), rng.choice(self.agents)
            else:
                # consistent with a fixed ranking of the agents
                less, more = sorted(rng.sample(self.agents, 2))
            self.formulas.add(AgentTrust(less, more, subject))
        for _ in range(rng.randint(0, 3)):
            if len(used) < 2:
                break
            if rng.random() < 0.1:
                less, more = rng.choice(used), rng.choice(used)
            else:
                less, more = rng.sample(used, 2)
                if self.rids.index(less) > self.rids.index(more):
                    less, more = more, less
            self.formulas.add(ReasoningTrust(less, more))

    def ensure_temporal_discordance(self):
        if len(self.agents) < 2 or len(self.times) < 2:
            return
        if _temporal_discordances(self.formulas):
            return
        lit = self.literal(self.simple)
        a1, a2 = self.rng.sample(self.agents, 2)
        t1, t2 = self.rng.sample(self.times, 2)
        self.formulas.add(SimpleEvidence(a1, t1, lit))
        self.formulas.add(SimpleEvidence(a2, t2, lit))

    def build(self) -> Theory:
        vars_, reasonings = set(), set()
        for f in self.formulas:
            if isinstance(f, (SimpleEvidence, DerivedEvidence)):
                vars_.add(f.lit.var)
            if isinstance(f, DerivedEvidence):
                vars_.update(p.lit.var for p in f.premises)
                reasonings.add(f.reasoning)
            if isinstance(f, AgentTrust):
                vars_.add(f.subject)
            if isinstance(f, ReasoningTrust):
                reasonings.update((f.less, f.more))
        return Theory(
            agents=set(self.agents),
            times=list(self.times),
            vars=vars_,
            reasonings=reasonings,
            formulas=set(self.formulas),
        )


def _temporal_discordances(formulas) -> list[tuple[SimpleEvidence, SimpleEvidence]]:
    by_lit = defaultdict(list)
    for f in formulas:
        if isinstance(f, SimpleEvidence):
            by_lit[f.lit].append(f)
    return [
        (x, y)
        for group in by_lit.values()
        for x in group
        for y in group
        if x.agent != y.agent and x.time != y.time
    ]


def generate_closing_theory(rule: str, seed: int) -> Theory:
    """A random theory with one planted contradiction that `rule` must catch.

    The background theory has no trust facts and no conflict bias, so nothing
    else can close it before the planted contradiction is reached.
    """
    rng = random.Random(seed)
    cfg = GenConfig(
        agent_count=rng.randint(2, 4),
        time_count=rng.randint(2, 3),
        simple_var_count=rng.randint(1, 4),
        derived_var_count=rng.randint(1, 3),
        reasoning_count=rng.randint(1, 4),
        conflict_bias=0.0,
        seed=seed,
    )
    gen = _Generator(cfg, with_trust=False)
    gen.theory()
    a1, a2 = gen.agents[0], gen.agents[1]
    t1, t2 = gen.times[0], gen.times[1]
    q = Literal(PropVar("q", Kind.SIMPLE))
    planted = {
        "XT": [AgentTrust(a1, a2, q.var), AgentTrust(a2, a1, q.var), SimpleEvidence(a1, t1, q)],
        "XpT": [ReasoningTrust("rx", "ry"), ReasoningTrust("ry", "rx")],
        "XC": [SimpleEvidence(a1, t1, q), SimpleEvidence(a1, t2, q)],
        "XpC": [
            DerivedEvidence(a1, t1, Literal(PropVar("e", Kind.DERIVED)), "rz", (Premise(a1, t1, q),)),
            DerivedEvidence(a2, t2, Literal(PropVar("e", Kind.DERIVED)), "rz", (Premise(a1, t1, q),)),
        ],
        "XP": [SimpleEvidence(a1, t1, q), SimpleEvidence(a2, t1, negate(q))],
    }
    if rule not in planted:
        raise ValueError(f"not a closure rule: {rule}")
    gen.formulas.update(planted[rule])
    return gen.build()


@dataclass
class Violation:
    condition: str
    witnesses: list = field(default_factory=list)

    def __str__(self) -> str:
        return f"{self.condition}: " + ", ".join(map(str, self.witnesses))


def _closure_graph(pairs) -> nx.DiGraph:
    g = nx.DiGraph()
    g.add_edges_from(pairs)
    return nx.transitive_closure(g, reflexive=False)


def _relation_problems(name: str, pairs) -> list[Violation]:
    closure = _closure_graph(pairs)
    out = []
    loops = sorted(n for n in closure if closure.has_edge(n, n))
    if loops:
        out.append(Violation(f"{name} not irreflexive", loops))
    both = sorted((a, b) for a, b in closure.edges if a < b and closure.has_edge(b, a))
    if both:
        out.append(Violation(f"{name} not antisymmetric", both))
    return out


def check_model_conditions(theory_before: Theory, outcome: Outcome) -> list[Violation]:
    """Violations of the model conditions by the engine's output (empty list = pass)."""
    final = outcome.theory
    if outcome.verdict is Verdict.CLOSED:
        if final.formulas:
            return [Violation("closed theory is not empty", sorted(map(str, final.formulas)))]
        return []

    out = []
    times = defaultdict(set)
    for f in final.of_type(SimpleEvidence):
        times[(f.agent, f.lit)].add(f.time.name)
    for (agent, lit), ts in sorted(times.items(), key=str):
        if len(ts) > 1:
            out.append(Violation("agent asserts a literal at several times",
                                 [f"{agent}:{lit}@{sorted(ts)}"]))

    times = defaultdict(set)
    for f in final.of_type(ReasoningFact):
        times[(f.head, f.lit)].add(f.time.name)
    for (head, lit), ts in sorted(times.items(), key=str):
        if len(ts) > 1:
            out.append(Violation("reasoning concludes a literal at several times",
                                 [f"{head}:{lit}@{sorted(ts)}"]))

    by_subject = defaultdict(list)
    for f in theory_before.of_type(AgentTrust):
        by_subject[f.subject.name].append((f.less, f.more))
    for subject, pairs in sorted(by_subject.items()):
        out += _relation_problems(f"agent trust about {subject}", pairs)
        closure = _closure_graph(pairs)
        got = {(f.less, f.more) for f in final.of_type(AgentTrust) if f.subject.name == subject}
        if got != set(closure.edges):
            out.append(Violation(f"agent trust about {subject} is not the transitive closure",
                                 sorted(got ^ set(closure.edges))))
    pairs = [(f.less, f.more) for f in theory_before.of_type(ReasoningTrust)]
    out += _relation_problems("reasoning trust", pairs)
    got = {(f.less, f.more) for f in final.of_type(ReasoningTrust)}
    if pairs and got != set(_closure_graph(pairs).edges):
        out.append(Violation("reasoning trust is not the transitive closure",
                             sorted(got ^ set(_closure_graph(pairs).edges))))

    model = outcome.model
    clashes = sorted(str(f) for f in model if f.lit.positive and TemporalFact(f.time, negate(f.lit)) in model)
    if clashes:
        out.append(Violation("model holds t:p and t:~p", clashes))

    # a defeated reasoning must not survive inside any other reasoning fact
    defeated = {e.consumed[2].head for e in outcome.trace if e.rule == "D2pp"}
    leftovers = sorted(str(f) for f in final.of_type(ReasoningFact) if defeated & set(f.reasonings))
    if leftovers:
        out.append(Violation("reasoning fact still relies on a defeated reasoning", leftovers))
    return out


def conformance_problems(theory: Theory, orders: int = 5, seed: int = 0) -> list[str]:
    """Everything the oracle can find wrong with the engine on one theory."""
    problems = []
    det = run_procedure(theory)
    pending = exhaustion_violations(det.theory)
    if pending:
        problems.append(f"open theory not exhausted: {pending[0].rule} {pending[0].key}")
    for i in range(orders):
        rnd = run_randomized(theory, seed * 1000 + i)
        if rnd.verdict is not det.verdict:
            problems.append(f"random order {i} gives {rnd.verdict.value}, expected {det.verdict.value}")
        elif rnd.theory.formulas != det.theory.formulas:
            diff = rnd.theory.formulas ^ det.theory.formulas
            problems.append(f"random order {i} ends with a different formula set: "
                            + ", ".join(sorted(map(str, diff))[:5]))
    problems += [str(v) for v in check_model_conditions(theory, det)]
    try:
        back = parse_theory(render_theory(theory))
    except TheoryError as exc:
        problems.append(f"rendered theory does not parse: {exc}")
    else:
        if back != theory:
            problems.append("parse(render(T)) differs from T")
    return problems


def minimize(theory: Theory, still_fails) -> Theory:
    """Greedily drop layer-1 formulas while `still_fails` keeps holding."""
    current = theory
    changed = True
    while changed:
        changed = False
        for f in sorted(current.formulas, key=str):
            smaller = current.copy()
            smaller.formulas.discard(f)
            try:
                smaller = parse_theory(render_theory(smaller))
            except TheoryError:
                continue
            if still_fails(smaller):
                current = smaller
                changed = True
                break
    return current
