"""A step-counted workbench for primitive recursive terms and the constructions
built on them: a sparse set, a dense splitting of its restrictions, and an
ideal coding into a single set."""

from .evaluate import COST_MODEL_VERSION, Budget, EvalOutcome, evaluate, evaluate_bounded
from .syntax import ParseError, parse, render
from .terms import ArityError, Comp, PrimRec, Proj, Succ, Term, Zero, arity

__all__ = [
    "COST_MODEL_VERSION", "Budget", "EvalOutcome", "evaluate", "evaluate_bounded",
    "ParseError", "parse", "render",
    "ArityError", "Comp", "PrimRec", "Proj", "Succ", "Term", "Zero", "arity",
]
__version__ = "0.1.0"
