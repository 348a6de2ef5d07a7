"""Formula types for the three layers of the evidence logic.

Layer 1 (evidence): SimpleEvidence, DerivedEvidence, AgentTrust, ReasoningTrust.
Layer 2 (interpretation): TemporalFact, Implication.
Layer 3 (reasoning): ReasoningFact.

All formulas are immutable and hashable so a Theory can hold them in a set.
Agents and reasoning ids are plain strings.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Union

AgentId = str
ReasoningId = str


class Kind(enum.Enum):
    SIMPLE = "simple"
    DERIVED = "derived"


@dataclass(frozen=True)
class TimeLabel:
    """A point of the declared time stream. Equality is by name only."""

    name: str
    index: int = field(default=0, compare=False)

    def __lt__(self, other: TimeLabel) -> bool:
        return (self.index, self.name) < (other.index, other.name)

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class PropVar:
    name: str
    kind: Kind

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Literal:
    var: PropVar
    positive: bool = True

    @property
    def kind(self) -> Kind:
        return self.var.kind

    def __neg__(self) -> Literal:
        return negate(self)

    def __str__(self) -> str:
        return self.var.name if self.positive else "~" + self.var.name


def negate(lit: Literal) -> Literal:
    return Literal(lit.var, not lit.positive)


@dataclass(frozen=True)
class Premise:
    """One `agent@time:lit` entry in the body of a derived evidence."""

    agent: AgentId
    time: TimeLabel
    lit: Literal

    def __str__(self) -> str:
        return f"{self.agent}@{self.time}:{self.lit}"


@dataclass(frozen=True)
class SimpleEvidence:
    agent: AgentId
    time: TimeLabel
    lit: Literal

    def __str__(self) -> str:
        return f"{self.agent}@{self.time}:{self.lit}"


@dataclass(frozen=True)
class DerivedEvidence:
    agent: AgentId
    time: TimeLabel
    lit: Literal
    reasoning: ReasoningId
    premises: tuple[Premise, ...]

    def shape(self) -> tuple:
        """What a reasoning id commits to: head literal and premise multiset."""
        return (self.lit, tuple(sorted(self.premises, key=str)))

    def __str__(self) -> str:
        body = " | ".join(str(p) for p in self.premises)
        return f"{self.agent}@{self.time}:{self.lit} <- {self.reasoning} [{body}]"


@dataclass(frozen=True)
class AgentTrust:
    """`less` is less trusted than `more` about `subject`."""

    less: AgentId
    more: AgentId
    subject: PropVar

    def __str__(self) -> str:
        return f"trust({self.subject}): {self.less} < {self.more}"


@dataclass(frozen=True)
class ReasoningTrust:
    less: ReasoningId
    more: ReasoningId

    def __str__(self) -> str:
        return f"{self.less} < {self.more}"


@dataclass(frozen=True)
class TemporalFact:
    time: TimeLabel
    lit: Literal

    def __str__(self) -> str:
        return f"{self.time}:{self.lit}"


@dataclass(frozen=True, eq=False)
class Implication:
    """Conjunction of timed literals implying a timed derived literal via a reasoning.

    Premise order is kept for display; equality treats the conjunction as a set.
    """

    premises: tuple[tuple[TimeLabel, Literal], ...]
    reasoning: ReasoningId
    head: tuple[TimeLabel, Literal]

    def _key(self):
        return (frozenset(self.premises), self.reasoning, self.head)

    def __eq__(self, other):
        if not isinstance(other, Implication):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __str__(self) -> str:
        body = " & ".join(f"{t}:{lit}" for t, lit in self.premises)
        t, lit = self.head
        return f"{body} ->[{self.reasoning}] {t}:{lit}"


@dataclass(frozen=True, eq=False)
class ReasoningFact:
    """`(t:lit)` tagged with the reasonings behind it; reasonings[0] is the head."""

    time: TimeLabel
    lit: Literal
    reasonings: tuple[ReasoningId, ...]

    def __post_init__(self):
        if not self.reasonings:
            raise ValueError("a reasoning fact needs at least one reasoning")
        if len(set(self.reasonings)) != len(self.reasonings):
            raise ValueError(f"duplicate reasonings in {self.reasonings}")

    @property
    def head(self) -> ReasoningId:
        return self.reasonings[0]

    def _key(self):
        return (self.time, self.lit, self.reasonings[0], frozenset(self.reasonings[1:]))

    def __eq__(self, other):
        if not isinstance(other, ReasoningFact):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __str__(self) -> str:
        return f"({self.time}:{self.lit})_{{{','.join(self.reasonings)}}}"


EvidenceFormula = Union[SimpleEvidence, DerivedEvidence, AgentTrust, ReasoningTrust]
Formula = Union[
    SimpleEvidence,
    DerivedEvidence,
    AgentTrust,
    ReasoningTrust,
    TemporalFact,
    Implication,
    ReasoningFact,
]
EVIDENCE_TYPES = (SimpleEvidence, DerivedEvidence, AgentTrust, ReasoningTrust)

_TYPE_RANK = {
    AgentTrust: 0,
    ReasoningTrust: 1,
    SimpleEvidence: 2,
    DerivedEvidence: 3,
    TemporalFact: 4,
    Implication: 5,
    ReasoningFact: 6,
}


def formula_sort_key(f: Formula) -> tuple:
    return (_TYPE_RANK[type(f)], str(f))


def sorted_formulas(formulas: Iterable[Formula]) -> list[Formula]:
    return sorted(formulas, key=formula_sort_key)


class Verdict(enum.Enum):
    OPEN = "open"
    CLOSED = "closed"


@dataclass
class TraceEntry:
    step: int
    rule: str
    consumed: tuple[Formula, ...]
    inserted: tuple[Formula, ...] = ()
    removed: tuple[Formula, ...] = ()

    def render(self) -> str:
        parts = [f"{self.step:>4} {self.rule}"]
        if self.consumed:
            parts.append("from " + ", ".join(map(str, self.consumed)))
        if self.inserted:
            parts.append("+ " + ", ".join(map(str, self.inserted)))
        if self.removed:
            parts.append("- " + ", ".join(map(str, self.removed)))
        return "  ".join(parts)


@dataclass(eq=False)
class Theory:
    """Working set of formulas plus the alphabets they are built from.

    `eliminated` records every formula removed by an elimination rule during a
    run; such formulas are never inserted again.
    """

    agents: set[AgentId] = field(default_factory=set)
    times: list[TimeLabel] = field(default_factory=list)
    vars: set[PropVar] = field(default_factory=set)
    reasonings: set[ReasoningId] = field(default_factory=set)
    formulas: set = field(default_factory=set)
    verdict: Verdict = Verdict.OPEN
    trace: list[TraceEntry] = field(default_factory=list)
    eliminated: set = field(default_factory=set)

    def __eq__(self, other):
        if not isinstance(other, Theory):
            return NotImplemented
        return (
            self.agents == other.agents
            and [t.name for t in self.times] == [t.name for t in other.times]
            and self.vars == other.vars
            and self.reasonings == other.reasonings
            and self.formulas == other.formulas
            and self.verdict == other.verdict
        )

    __hash__ = None

    def copy(self) -> Theory:
        return Theory(
            agents=set(self.agents),
            times=list(self.times),
            vars=set(self.vars),
            reasonings=set(self.reasonings),
            formulas=set(self.formulas),
            verdict=self.verdict,
            trace=list(self.trace),
            eliminated=set(self.eliminated),
        )

    def of_type(self, *types) -> list:
        return [f for f in self.formulas if isinstance(f, types)]

    @property
    def closed(self) -> bool:
        return self.verdict is Verdict.CLOSED

    def var(self, name: str) -> PropVar:
        for v in self.vars:
            if v.name == name:
                return v
        raise KeyError(name)

    def time(self, name: str) -> TimeLabel:
        for t in self.times:
            if t.name == name:
                return t
        raise KeyError(name)

    def vars_of(self, kind: Kind) -> set[PropVar]:
        return {v for v in self.vars if v.kind is kind}


def universe_bound(theory: Theory) -> int:
    """Upper bound on how many distinct formulas rewriting can ever produce.

    Counts every slot a rule could fill from the theory's alphabets. A reasoning
    fact is fixed by its time, literal, head reasoning and the set of the other
    reasonings, hence the |R| * 2**(|R|-1) factor.
    """
    n_ag = len(theory.agents)
    n_t = len(theory.times)
    n_vars = len(theory.vars)
    n_simple = len(theory.vars_of(Kind.SIMPLE))
    n_derived = len(theory.vars_of(Kind.DERIVED))
    n_r = len(theory.reasonings)

    simple_slots = n_ag * n_t * 2 * n_vars
    temporal_slots = n_t * 2 * n_vars
    reasoning_slots = n_t * 2 * n_derived * (n_r * 2 ** (n_r - 1) if n_r else 0)
    trust_slots = n_ag * n_ag * n_simple + n_r * n_r
    derived = theory.of_type(DerivedEvidence)
    # one implication per derived evidence at most, plus the derived evidence itself
    return simple_slots + temporal_slots + reasoning_slots + trust_slots + 2 * len(derived)
