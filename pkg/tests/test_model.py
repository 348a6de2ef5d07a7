import pytest
from hypothesis import given
from hypothesis import strategies as st

from evlogic.model import (
    Implication,
    Kind,
    Literal,
    PropVar,
    ReasoningFact,
    SimpleEvidence,
    Theory,
    TimeLabel,
    negate,
    universe_bound,
)

from .conftest import dlit, lit, times

names = st.text(alphabet="abcXYZ_1(),'", min_size=1, max_size=8)
literals = st.builds(Literal, st.builds(PropVar, names, st.sampled_from(Kind)), st.booleans())


def test_negate_speed_transfer():
    p = lit("SpeedTr(23MB/s)")
    assert negate(p) == Literal(p.var, False)
    assert str(negate(p)) == "~SpeedTr(23MB/s)"


def test_negate_of_negative_cap_is_positive():
    assert negate(lit("Cap(C,Attack)", False)) == lit("Cap(C,Attack)")


@given(literals)
def test_negate_is_an_involution(p):
    assert negate(negate(p)) == p
    assert negate(p) != p
    assert -p == negate(p)


def test_time_labels_compare_by_name_and_order_by_index():
    assert TimeLabel("t", 0) == TimeLabel("t", 5)
    t2, t1 = TimeLabel("t2", 0), TimeLabel("t1", 1)
    assert sorted([t1, t2]) == [t2, t1]


def test_implication_ignores_premise_order():
    t1, = times("t1")
    a, b = (t1, lit("a")), (t1, lit("b"))
    x = Implication((a, b), "r", (t1, dlit("h")))
    y = Implication((b, a), "r", (t1, dlit("h")))
    assert x == y and hash(x) == hash(y)
    assert x != Implication((a, b), "s", (t1, dlit("h")))


def test_reasoning_fact_head_matters_tail_order_does_not():
    t, = times("t")
    h = dlit("Culprit")
    assert ReasoningFact(t, h, ("r2", "r7", "r5")) == ReasoningFact(t, h, ("r2", "r5", "r7"))
    assert ReasoningFact(t, h, ("r2", "r7")) != ReasoningFact(t, h, ("r7", "r2"))
    assert str(ReasoningFact(t, h, ("r1", "r5"))) == "(t:Culprit)_{r1,r5}"


@pytest.mark.parametrize("bad", [(), ("r1", "r1")])
def test_reasoning_fact_rejects_empty_or_repeated_reasonings(bad):
    with pytest.raises(ValueError):
        ReasoningFact(TimeLabel("t"), dlit("x"), bad)


def test_theory_equality_ignores_trace():
    t1, = times("t1")
    a = Theory({"a"}, [t1], {PropVar("p", Kind.SIMPLE)}, set(), {SimpleEvidence("a", t1, lit("p"))})
    b = a.copy()
    b.trace.append("anything")
    assert a == b
    b.formulas.clear()
    assert a != b


def test_universe_bound_covers_dnc_simple_slots(dnc):
    assert (len(dnc.agents), len(dnc.times), len(dnc.vars), len(dnc.reasonings)) == (3, 2, 9, 4)
    assert universe_bound(dnc) >= 3 * 2 * 2 * 9


def test_universe_bound_single_pair():
    t1, = times("t1")
    th = Theory({"a"}, [t1], {PropVar("p", Kind.SIMPLE)}, set(), set())
    assert universe_bound(th) >= 2


def test_universe_bound_is_finite_on_attribution(attribution):
    assert 0 < universe_bound(attribution) < 10**9
