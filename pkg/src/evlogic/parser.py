"""Reader and writer for `.el` evidence theories.

    agents CS, TF, FE;
    times t1, t2;
    evidence FE @ t2 : SpeedTr.
    evidence CS @ t1 : Attack <- r1 [CS @ t1 : SpPhish | CS @ t1 : SucPhish].
    trust(SpeedTr) : TF < FE.
    rtrust : r1 < r4.

Names may carry a parenthesised argument list (`Cap(C, Attack)`); whitespace
inside the parentheses is dropped. Anything else can be written in double
quotes. `#` starts a line comment.
"""

from __future__ import annotations

import enum
import graphlib
from dataclasses import dataclass
from pathlib import Path

from .model import (
    AgentTrust,
    DerivedEvidence,
    Kind,
    Literal,
    Premise,
    PropVar,
    ReasoningTrust,
    SimpleEvidence,
    Theory,
    TimeLabel,
)

KEYWORDS = {"agents", "times", "evidence", "trust", "rtrust"}
_NAME_START = set("ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz_")
_NAME_CHARS = _NAME_START | set("0123456789/'")
_ARG_CHARS = _NAME_CHARS | set(",")
_PUNCT = {";", ",", "@", ":", ".", "<", "[", "]", "|", "(", ")", "~"}


class ErrorKind(enum.Enum):
    LEXICAL = "Lexical"
    SYNTAX = "Syntax"
    DUPLICATE_DECL = "DuplicateDecl"
    UNKNOWN_SYMBOL = "UnknownSymbol"
    KIND_CONFLICT = "KindConflict"
    DERIVATION_CYCLE = "DerivationCycle"
    REASONING_SHAPE_MISMATCH = "ReasoningShapeMismatch"
    EMPTY_THEORY = "EmptyTheory"


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


@dataclass(frozen=True)
class ParseError:
    span: SourceSpan
    kind: ErrorKind
    message: str

    def __str__(self) -> str:
        return f"{self.span}: {self.kind.value}: {self.message}"


class TheoryError(Exception):
    """Raised by parse_theory; carries every error found."""

    def __init__(self, errors: list[ParseError]):
        self.errors = errors
        super().__init__("\n".join(map(str, errors)))

    @property
    def kinds(self) -> set[ErrorKind]:
        return {e.kind for e in self.errors}


@dataclass(frozen=True)
class Token:
    kind: str  # "name", "kw", "punct", "eof"
    value: str
    line: int
    col: int
    quoted: bool = False


class _LexError(Exception):
    def __init__(self, message, line, col):
        self.message, self.line, self.col = message, line, col


def tokenize(text: str) -> list[Token]:
    tokens = []
    i, line, col = 0, 1, 1
    n = len(text)

    def advance(k=1):
        nonlocal i, line, col
        for _ in range(k):
            if text[i] == "\n":
                line, col = line + 1, 1
            else:
                col += 1
            i += 1

    while i < n:
        c = text[i]
        if c in " \t\r\n﻿":
            advance()
        elif c == "#":
            while i < n and text[i] != "\n":
                advance()
        elif c == '"':
            start_line, start_col = line, col
            advance()
            buf = []
            while i < n and text[i] not in '"\n':
                buf.append(text[i])
                advance()
            if i >= n or text[i] != '"':
                raise _LexError("unterminated quoted name", start_line, start_col)
            advance()
            if not buf:
                raise _LexError("empty quoted name", start_line, start_col)
            tokens.append(Token("name", "".join(buf), start_line, start_col, quoted=True))
        elif c in _NAME_START:
            start_line, start_col = line, col
            buf = []
            while i < n:
                ch = text[i]
                if ch in _NAME_CHARS:
                    buf.append(ch)
                    advance()
                elif ch == "(" and "".join(buf) not in KEYWORDS:
                    args, width = _lex_args(text, i, line, col)
                    buf.append(args)
                    advance(width)
                else:
                    break
            word = "".join(buf)
            tokens.append(Token("kw" if word in KEYWORDS else "name", word, start_line, start_col))
        elif text.startswith("<-", i):
            tokens.append(Token("punct", "<-", line, col))
            advance(2)
        elif c == "¬":
            tokens.append(Token("punct", "~", line, col))
            advance()
        elif c in _PUNCT:
            tokens.append(Token("punct", c, line, col))
            advance()
        else:
            raise _LexError(f"unexpected character {c!r}", line, col)
    tokens.append(Token("eof", "", line, col))
    return tokens


def _lex_args(text: str, i: int, line: int, col: int) -> tuple[str, int]:
    """Read a balanced `( ... )` group at text[i]; return it without blanks, and its width."""
    depth = 0
    out = []
    j = i
    while j < len(text):
        ch = text[j]
        if ch == "(":
            depth += 1
            out.append(ch)
        elif ch == ")":
            depth -= 1
            out.append(ch)
            if depth == 0:
                return "".join(out), j + 1 - i
        elif ch in " \t":
            pass
        elif ch in _ARG_CHARS:
            out.append(ch)
        else:
            raise _LexError(f"unexpected character {ch!r} inside name arguments", line, col)
        j += 1
    raise _LexError("unbalanced parenthesis in name", line, col)


# ---------------------------------------------------------------------------
# raw statements, before symbol resolution


@dataclass
class _RawLit:
    name: str
    positive: bool


@dataclass
class _RawPremise:
    agent: Token
    time: Token
    lit: _RawLit


@dataclass
class _RawSimple:
    span: SourceSpan
    agent: Token
    time: Token
    lit: _RawLit


@dataclass
class _RawDerived:
    span: SourceSpan
    agent: Token
    time: Token
    lit: _RawLit
    reasoning: str
    premises: list[_RawPremise]


@dataclass
class _RawAgentTrust:
    span: SourceSpan
    subject: str
    less: Token
    more: Token


@dataclass
class _RawReasoningTrust:
    span: SourceSpan
    less: str
    more: str


class _SyntaxError(Exception):
    def __init__(self, token: Token, message: str):
        self.token, self.message = token, message


class _Parser:
    def __init__(self, tokens: list[Token], file: str):
        self.tokens = tokens
        self.pos = 0
        self.file = file
        self.agent_decls: list[Token] = []
        self.time_decls: list[Token] = []
        self.statements: list = []
        self.errors: list[ParseError] = []

    def span(self, tok: Token) -> SourceSpan:
        return SourceSpan(self.file, tok.line, tok.col)

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def expect(self, value: str) -> Token:
        tok = self.tok
        if tok.kind in ("punct", "kw") and tok.value == value:
            return self.next()
        raise _SyntaxError(tok, f"expected {value!r}, found {_describe(tok)}")

    def name(self, what: str) -> Token:
        tok = self.tok
        if tok.kind == "name":
            return self.next()
        raise _SyntaxError(tok, f"expected {what}, found {_describe(tok)}")

    def at(self, value: str) -> bool:
        return self.tok.kind in ("punct", "kw") and self.tok.value == value

    def parse(self):
        while self.tok.kind != "eof":
            start = self.tok
            try:
                self.statement()
            except _SyntaxError as exc:
                self.errors.append(
                    ParseError(self.span(exc.token), ErrorKind.SYNTAX, exc.message)
                )
                self.recover(start)

    def recover(self, start: Token):
        # skip past the next statement terminator
        if self.tok is start:
            self.next()
        while self.tok.kind != "eof":
            tok = self.next()
            if tok.kind == "punct" and tok.value in (".", ";"):
                return

    def statement(self):
        tok = self.tok
        if tok.kind != "kw":
            raise _SyntaxError(tok, f"expected a statement, found {_describe(tok)}")
        if tok.value in ("agents", "times"):
            self.next()
            names = [self.name("a name")]
            while self.at(","):
                self.next()
                names.append(self.name("a name"))
            self.expect(";")
            (self.agent_decls if tok.value == "agents" else self.time_decls).extend(names)
        elif tok.value == "evidence":
            self.next()
            agent, time, lit = self.assertion()
            if self.at("<-"):
                self.next()
                rid = self.name("a reasoning name")
                self.expect("[")
                premises = [_RawPremise(*self.assertion())]
                while self.at("|"):
                    self.next()
                    premises.append(_RawPremise(*self.assertion()))
                self.expect("]")
                self.expect(".")
                self.statements.append(
                    _RawDerived(self.span(tok), agent, time, lit, rid.value, premises)
                )
            else:
                self.expect(".")
                self.statements.append(_RawSimple(self.span(tok), agent, time, lit))
        elif tok.value == "trust":
            self.next()
            self.expect("(")
            subject = self.name("a variable")
            self.expect(")")
            self.expect(":")
            less = self.name("an agent")
            self.expect("<")
            more = self.name("an agent")
            self.expect(".")
            self.statements.append(_RawAgentTrust(self.span(tok), subject.value, less, more))
        elif tok.value == "rtrust":
            self.next()
            self.expect(":")
            less = self.name("a reasoning name")
            self.expect("<")
            more = self.name("a reasoning name")
            self.expect(".")
            self.statements.append(_RawReasoningTrust(self.span(tok), less.value, more.value))

    def assertion(self) -> tuple[Token, Token, _RawLit]:
        agent = self.name("an agent")
        self.expect("@")
        time = self.name("a time")
        self.expect(":")
        positive = True
        while self.at("~"):
            self.next()
            positive = not positive
        var = self.name("a variable")
        return agent, time, _RawLit(var.value, positive)


def _describe(tok: Token) -> str:
    if tok.kind == "eof":
        return "end of input"
    return repr(tok.value)


# ---------------------------------------------------------------------------


def parse_theory(source: str, file: str = "<input>") -> Theory:
    """Parse and validate a theory. Raises TheoryError listing every problem."""
    try:
        tokens = tokenize(source)
    except _LexError as exc:
        raise TheoryError(
            [ParseError(SourceSpan(file, exc.line, exc.col), ErrorKind.LEXICAL, exc.message)]
        ) from None
    p = _Parser(tokens, file)
    p.parse()
    if p.errors:
        raise TheoryError(p.errors)
    return _build(p, file)


def parse_file(path) -> Theory:
    path = Path(path)
    return parse_theory(path.read_text(encoding="utf-8"), str(path))


def _build(p: _Parser, file: str) -> Theory:
    errors: list[ParseError] = []

    def err(span, kind, msg):
        errors.append(ParseError(span, kind, msg))

    agents: set[str] = set()
    for tok in p.agent_decls:
        if tok.value in agents:
            err(p.span(tok), ErrorKind.DUPLICATE_DECL, f"agent {tok.value} declared twice")
        agents.add(tok.value)
    times: dict[str, TimeLabel] = {}
    for tok in p.time_decls:
        if tok.value in times:
            err(p.span(tok), ErrorKind.DUPLICATE_DECL, f"time {tok.value} declared twice")
            continue
        times[tok.value] = TimeLabel(tok.value, len(times))

    def agent(tok: Token) -> str:
        if tok.value not in agents:
            err(p.span(tok), ErrorKind.UNKNOWN_SYMBOL, f"undeclared agent {tok.value}")
        return tok.value

    def time(tok: Token) -> TimeLabel:
        if tok.value not in times:
            err(p.span(tok), ErrorKind.UNKNOWN_SYMBOL, f"undeclared time {tok.value}")
            return TimeLabel(tok.value, -1)
        return times[tok.value]

    # var kinds: heads of derived evidence are derived, everything else simple
    derived_names = {s.lit.name for s in p.statements if isinstance(s, _RawDerived)}
    for s in p.statements:
        if isinstance(s, _RawSimple) and s.lit.name in derived_names:
            err(s.span, ErrorKind.KIND_CONFLICT,
                f"{s.lit.name} is the head of a derived evidence but is used as simple evidence")
        if isinstance(s, _RawAgentTrust) and s.subject in derived_names:
            err(s.span, ErrorKind.KIND_CONFLICT,
                f"trust subject {s.subject} must be a simple variable")

    def var(name: str) -> PropVar:
        return PropVar(name, Kind.DERIVED if name in derived_names else Kind.SIMPLE)

    def lit(raw: _RawLit) -> Literal:
        return Literal(var(raw.name), raw.positive)

    formulas: set = set()
    reasonings: set[str] = set()
    first_shape: dict[str, DerivedEvidence] = {}
    for s in p.statements:
        if isinstance(s, _RawSimple):
            formulas.add(SimpleEvidence(agent(s.agent), time(s.time), lit(s.lit)))
        elif isinstance(s, _RawDerived):
            premises = tuple(
                Premise(agent(pr.agent), time(pr.time), lit(pr.lit)) for pr in s.premises
            )
            d = DerivedEvidence(agent(s.agent), time(s.time), lit(s.lit), s.reasoning, premises)
            seen = first_shape.setdefault(s.reasoning, d)
            if seen.shape() != d.shape():
                err(s.span, ErrorKind.REASONING_SHAPE_MISMATCH,
                    f"reasoning {s.reasoning} is used with a different conclusion or premises "
                    f"than in {seen}")
            reasonings.add(s.reasoning)
            formulas.add(d)
        elif isinstance(s, _RawAgentTrust):
            formulas.add(AgentTrust(agent(s.less), agent(s.more), var(s.subject)))
        elif isinstance(s, _RawReasoningTrust):
            reasonings.update((s.less, s.more))
            formulas.add(ReasoningTrust(s.less, s.more))

    _check_cycles(p, errors)

    if not any(isinstance(f, (SimpleEvidence, DerivedEvidence)) for f in formulas) and not errors:
        end = p.tokens[-1]
        err(SourceSpan(file, end.line, end.col), ErrorKind.EMPTY_THEORY,
            "a theory needs at least one evidence statement")
    if errors:
        raise TheoryError(errors)

    vars_ = set()
    for f in formulas:
        if isinstance(f, (SimpleEvidence, DerivedEvidence)):
            vars_.add(f.lit.var)
        if isinstance(f, DerivedEvidence):
            vars_.update(pr.lit.var for pr in f.premises)
        if isinstance(f, AgentTrust):
            vars_.add(f.subject)
    return Theory(
        agents=agents,
        times=sorted(times.values()),
        vars=vars_,
        reasonings=reasonings,
        formulas=formulas,
    )


def _check_cycles(p: _Parser, errors: list[ParseError]) -> None:
    derived = [s for s in p.statements if isinstance(s, _RawDerived)]
    heads = {s.lit.name for s in derived}
    graph: dict[tuple, set] = {}
    spans: dict[tuple, SourceSpan] = {}
    for s in derived:
        node = (s.lit.name, s.lit.positive)
        spans.setdefault(node, s.span)
        deps = graph.setdefault(node, set())
        deps.update((pr.lit.name, pr.lit.positive) for pr in s.premises if pr.lit.name in heads)
    try:
        tuple(graphlib.TopologicalSorter(graph).static_order())
    except graphlib.CycleError as exc:
        cycle = exc.args[1]
        names = " -> ".join(("" if pos else "~") + name for name, pos in reversed(cycle))
        span = spans.get(cycle[0]) or next(iter(spans.values()))
        errors.append(ParseError(span, ErrorKind.DERIVATION_CYCLE, f"cyclic derivation {names}"))


# ---------------------------------------------------------------------------


def quote_name(name: str) -> str:
    """Render a symbol so that tokenize() reads it back unchanged."""
    try:
        toks = tokenize(name)
    except _LexError:
        toks = []
    if len(toks) == 2 and toks[0].kind == "name" and toks[0].value == name and not toks[0].quoted:
        return name
    return f'"{name}"'


def _lit(lit: Literal) -> str:
    return ("~" if not lit.positive else "") + quote_name(lit.var.name)


def _assertion(agent: str, time: TimeLabel, lit: Literal) -> str:
    return f"{quote_name(agent)} @ {quote_name(time.name)} : {_lit(lit)}"


CLOSED_BANNER = "# ⊥ (closed theory)"


def render_theory(theory: Theory) -> str:
    """Canonical text for the layer-1 part of a theory."""
    if theory.closed:
        return CLOSED_BANNER + "\n"
    lines = []
    if theory.agents:
        lines.append("agents " + ", ".join(quote_name(a) for a in sorted(theory.agents)) + ";")
    if theory.times:
        lines.append("times " + ", ".join(quote_name(t.name) for t in theory.times) + ";")
    statements = []
    for f in theory.formulas:
        if isinstance(f, SimpleEvidence):
            statements.append((0, f"evidence {_assertion(f.agent, f.time, f.lit)}."))
        elif isinstance(f, DerivedEvidence):
            body = " | ".join(_assertion(pr.agent, pr.time, pr.lit) for pr in f.premises)
            statements.append(
                (1, f"evidence {_assertion(f.agent, f.time, f.lit)} <- "
                    f"{quote_name(f.reasoning)} [{body}].")
            )
        elif isinstance(f, AgentTrust):
            statements.append(
                (2, f"trust({quote_name(f.subject.name)}) : "
                    f"{quote_name(f.less)} < {quote_name(f.more)}.")
            )
        elif isinstance(f, ReasoningTrust):
            statements.append((3, f"rtrust : {quote_name(f.less)} < {quote_name(f.more)}."))
    lines.extend(text for _, text in sorted(statements))
    return "\n".join(lines) + "\n"
