import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from evlogic.model import (
    AgentTrust,
    DerivedEvidence,
    Kind,
    ReasoningTrust,
    SimpleEvidence,
    Theory,
    Verdict,
)
from evlogic.oracle import GenConfig, generate_theory
from evlogic.parser import ErrorKind, TheoryError, parse_theory, quote_name, render_theory

from .conftest import parse


def kinds_of(source: str) -> set:
    with pytest.raises(TheoryError) as info:
        parse_theory(source)
    return info.value.kinds


def test_single_simple_evidence():
    th = parse_theory("agents CS, TF, FE; times t1, t2; evidence FE @ t2 : SpeedTr23.")
    (f,) = th.formulas
    assert isinstance(f, SimpleEvidence)
    assert (f.agent, f.time.name, str(f.lit)) == ("FE", "t2", "SpeedTr23")
    assert th.times[1].index == 1


def test_empty_source_is_an_empty_theory():
    assert kinds_of("") == {ErrorKind.EMPTY_THEORY}


def test_declarations_alone_are_an_empty_theory():
    assert ErrorKind.EMPTY_THEORY in kinds_of("agents a; times t;")


def test_mutual_derivation_is_a_cycle():
    src = """agents a; times t;
    evidence a @ t : A <- r [a @ t : B | a @ t : p].
    evidence a @ t : B <- s [a @ t : A]."""
    assert kinds_of(src) == {ErrorKind.DERIVATION_CYCLE}


def test_attribution_counts(attribution):
    evidence = attribution.of_type(SimpleEvidence, DerivedEvidence)
    assert len(evidence) == 9
    assert len(attribution.of_type(AgentTrust)) == 1
    assert len(attribution.of_type(ReasoningTrust)) == 3
    trust, = attribution.of_type(AgentTrust)
    assert (trust.less, trust.more, trust.subject.name) == ("S5", "S1", "Sim(Attack,Attack')")


def test_kinds_are_inferred_from_heads(dnc):
    assert {v.name for v in dnc.vars_of(Kind.DERIVED)} == {"Attack", "SucPhish", "PhysA"}
    assert "SpeedTr" in {v.name for v in dnc.vars_of(Kind.SIMPLE)}


def test_derived_head_used_as_simple_evidence_conflicts():
    src = "evidence a1 @ t1 : A <- r [a1 @ t1 : p]. evidence a2 @ t1 : A."
    assert kinds_of("agents a1, a2; times t1;" + src) == {ErrorKind.KIND_CONFLICT}


def test_trust_about_a_derived_variable_conflicts():
    src = "agents a, b; times t; evidence a @ t : A <- r [a @ t : p]. trust(A) : a < b."
    assert kinds_of(src) == {ErrorKind.KIND_CONFLICT}


def test_reasoning_reused_with_another_shape():
    src = """agents a, b; times t;
    evidence a @ t : A <- r [a @ t : p].
    evidence b @ t : A <- r [a @ t : q]."""
    assert kinds_of(src) == {ErrorKind.REASONING_SHAPE_MISMATCH}


def test_same_reasoning_by_two_agents_is_fine():
    th = parse("evidence a1 @ t1 : A <- r [a3 @ t1 : p]. evidence a2 @ t2 : A <- r [a3 @ t1 : p].")
    assert len(th.of_type(DerivedEvidence)) == 2


def test_undeclared_and_duplicate_symbols():
    assert kinds_of("agents a; times t; evidence b @ t : p.") == {ErrorKind.UNKNOWN_SYMBOL}
    assert kinds_of("agents a, a; times t; evidence a @ t : p.") == {ErrorKind.DUPLICATE_DECL}


def test_errors_carry_spans_and_parsing_recovers():
    with pytest.raises(TheoryError) as info:
        parse_theory("agents a; times t;\nevidence a @ t p.\nevidence a @ t : q @", file="x.el")
    errors = info.value.errors
    assert len(errors) == 2
    assert all(e.kind is ErrorKind.SYNTAX for e in errors)
    assert [(e.span.file, e.span.line) for e in errors] == [("x.el", 2), ("x.el", 3)]
    assert str(errors[0]).startswith("x.el:2:")


def test_unknown_character_is_lexical():
    assert ErrorKind.LEXICAL in kinds_of("agents a; times t; evidence a @ t : p $.")


def test_comments_negation_alias_and_quoting():
    th = parse_theory('# note\nagents "Crowd Strike"; times t1;\nevidence "Crowd Strike" @ t1 : ¬"p q".')
    (f,) = th.formulas
    assert f.agent == "Crowd Strike" and not f.lit.positive and f.lit.var.name == "p q"


def test_render_single_evidence():
    text = render_theory(parse("evidence a1 @ t1 : p."))
    assert [ln for ln in text.splitlines() if ln.startswith("evidence")] == ["evidence a1 @ t1 : p."]


def test_render_closed_theory_is_the_banner():
    text = render_theory(Theory(verdict=Verdict.CLOSED))
    assert "⊥ (closed theory)" in text
    assert "evidence" not in text


def test_corpus_round_trips(dnc, attribution):
    for th in (dnc, attribution):
        assert parse_theory(render_theory(th)) == th


@pytest.mark.parametrize("name", ["p", "Sim(Attack,Attack')", "p q", "agents", "a<b", "x'"])
def test_quote_name_relexes(name):
    th = parse_theory(f"agents a; times t; evidence a @ t : {quote_name(name)}.")
    (f,) = th.formulas
    assert f.lit.var.name == name


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32), st.floats(0, 1), st.integers(1, 4), st.integers(1, 3))
def test_generated_theories_round_trip(seed, bias, agents, time_count):
    th = generate_theory(GenConfig(agent_count=agents, time_count=time_count,
                                   conflict_bias=bias, seed=seed))
    assert parse_theory(render_theory(th)) == th
