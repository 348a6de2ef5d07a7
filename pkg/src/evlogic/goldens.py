"""Expected outcomes for the bundled case studies.

`golden_problems` is what `evlogic fuzz` runs before the random seeds, so an
engine regression that happens to be invisible on small generated theories
still fails the fuzz run.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .engine import Outcome, run_procedure
from .parser import parse_file

DNC_MODEL = frozenset({
    "t1:Attack", "t1:SucPhish", "t1:SpPhish", "t1:LinkCl",
    "t1:FFill", "t1:DStolen", "t2:MetaC", "t2:SpeedTr",
})
DNC_ABSENT = frozenset({"t2:Attack", "t2:PhysA"})
DNC_REMOVALS = (("D2", "TF@t2:~SpeedTr"),)

ATTRIBUTION_MODEL = frozenset({
    "t1:Admit(C,Attack')", "t:Cap(C,Attack)", "t:Culprit(C,Attack)",
    "t:EConf(C,Victim)", "t:Geoloc(IP,C)", "t:Motive(C,Attack)",
    "t:Sim(Attack,Attack')", "t:Spoofed(IP)", "t:sIP(Attack,IP)", "t:~Fin(C,Attack)",
})
ATTRIBUTION_TRANS = frozenset({"r1 < r2", "r1 < r3", "r4 < r3"})
ATTRIBUTION_REMOVALS = (
    ("D2", "S5@t:~Sim(Attack,Attack')"),
    ("D2pp", "(t:Culprit(C,Attack))_{r1,r5}"),
    ("D2pp", "(t:~Culprit(C,Attack))_{r4}"),
)

CASCADE_MODEL = frozenset({"t:Alert", "t:CleanAudit", "t:Intrusion", "t:~Breach"})
CASCADE_REMOVALS = (("D2pp", "(t:Exfil)_{r2,r1,r0}"),)

CLOSURE_CASES = {
    "XC": "closures/xc.el",
    "XpC": "closures/xpc.el",
    "XT": "closures/xt.el",
    "XpT": "closures/xpt.el",
    "XP": "closures/xp.el",
}


def corpus_path(relative: str) -> Path:
    """Filesystem path of a bundled corpus file, e.g. ``corpus_path("dnc.el")``."""
    return Path(str(resources.files("evlogic") / "corpus" / relative))


def run_corpus(relative: str) -> Outcome:
    return run_procedure(parse_file(corpus_path(relative)))


def removals_in_order(outcome: Outcome, expected) -> bool:
    """True when each (rule, formula) removal shows up in the trace, in this order."""
    wanted = list(expected)
    for entry in outcome.trace:
        if wanted and entry.rule == wanted[0][0] and wanted[0][1] in map(str, entry.removed):
            wanted.pop(0)
    return not wanted


def dnc_problems(outcome: Outcome) -> list[str]:
    out = []
    if not outcome.sat:
        return ["dnc: expected sat"]
    model = {str(f) for f in outcome.model}
    if model != DNC_MODEL:
        out.append(f"dnc: model differs: {sorted(model ^ DNC_MODEL)}")
    if model & DNC_ABSENT:
        out.append(f"dnc: model holds {sorted(model & DNC_ABSENT)}")
    if not removals_in_order(outcome, DNC_REMOVALS):
        out.append("dnc: missing D2 removal of TF@t2:~SpeedTr")
    return out


def attribution_problems(outcome: Outcome) -> list[str]:
    if not outcome.sat:
        return ["attribution: expected sat"]
    out = []
    model = {str(f) for f in outcome.model}
    if model != ATTRIBUTION_MODEL:
        out.append(f"attribution: model differs: {sorted(model ^ ATTRIBUTION_MODEL)}")
    trans = [str(f) for e in outcome.trace if e.rule == "TransReasoning" for f in e.inserted]
    if set(trans) != ATTRIBUTION_TRANS or len(trans) != len(ATTRIBUTION_TRANS):
        out.append(f"attribution: TransReasoning inserted {trans}")
    last_trans = max((e.step for e in outcome.trace if e.rule == "TransReasoning"), default=0)
    first_removal = min((e.step for e in outcome.trace if e.removed), default=last_trans + 1)
    if first_removal < last_trans:
        out.append("attribution: a removal precedes the trust closure")
    if not removals_in_order(outcome, ATTRIBUTION_REMOVALS):
        out.append("attribution: expected removals missing or out of order")
    return out


def cascade_problems(outcome: Outcome) -> list[str]:
    if not outcome.sat:
        return ["cascade: expected sat"]
    out = []
    model = {str(f) for f in outcome.model}
    if model != CASCADE_MODEL:
        out.append(f"cascade: model differs: {sorted(model ^ CASCADE_MODEL)}")
    if not removals_in_order(outcome, CASCADE_REMOVALS):
        out.append("cascade: D2pp did not take (t:Exfil)_{r2,r1,r0} along")
    return out


def closure_problems(rule: str, outcome: Outcome) -> list[str]:
    out = []
    if outcome.sat:
        out.append(f"{rule}: expected unsat")
    elif outcome.theory.formulas:
        out.append(f"{rule}: closed theory is not empty")
    elif outcome.witness is None or outcome.witness.rule != rule:
        got = outcome.witness.rule if outcome.witness else None
        out.append(f"{rule}: closed by {got}")
    return out


def golden_problems() -> list[str]:
    """Every deviation of the engine from the expected case-study outcomes."""
    out = dnc_problems(run_corpus("dnc.el"))
    out += attribution_problems(run_corpus("attribution.el"))
    out += cascade_problems(run_corpus("cascade.el"))
    for rule, rel in CLOSURE_CASES.items():
        out += closure_problems(rule, run_corpus(rel))
    return out
