"""Evidence logic: parse evidence theories and rewrite them to a model or to ⊥."""

from .engine import Outcome, extract_model, plausible, run_procedure, run_randomized
from .model import Theory, Verdict, negate, universe_bound
from .parser import ParseError, TheoryError, parse_file, parse_theory, render_theory

__all__ = [
    "Outcome",
    "ParseError",
    "Theory",
    "TheoryError",
    "Verdict",
    "extract_model",
    "negate",
    "parse_file",
    "parse_theory",
    "plausible",
    "render_theory",
    "run_procedure",
    "run_randomized",
    "universe_bound",
]
