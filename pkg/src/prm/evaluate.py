"""Step-counting interpreter.

Cost model: evaluating any node enters one frame, plus the frames of the
sub-evaluations it performs.  A primitive recursion on recursion argument y
performs one base evaluation and y step evaluations.  Interpretation is purely
structural (no memoization), so step counts are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .terms import Comp, PrimRec, Proj, Succ, Term, Zero, arity

COST_MODEL_VERSION = "frames-v1"


@dataclass(frozen=True)
class EvalOutcome:
    value: int
    steps: int


@dataclass(frozen=True)
class Budget:
    max_steps: int

    def __post_init__(self):
        if self.max_steps < 0:
            raise ValueError("budget must be a natural number")


class _Exceeded(Exception):
    pass


class _Meter:
    __slots__ = ("count", "limit")

    def __init__(self, limit: Optional[int]):
        self.count = 0
        self.limit = limit


def _run(term: Term, args: tuple[int, ...], meter: _Meter) -> int:
    if meter.limit is not None and meter.count >= meter.limit:
        raise _Exceeded
    meter.count += 1
    kind = type(term)
    if kind is Succ:
        return args[0] + 1
    if kind is Proj:
        return args[term.i - 1]
    if kind is Zero:
        return 0
    if kind is Comp:
        vals = tuple(_run(t, args, meter) for t in term.inners)
        return _run(term.outer, vals, meter)
    # PrimRec: recursion argument last
    *xs, y = args
    acc = _run(term.base, tuple(xs), meter)
    step = term.step
    for t in range(y):
        acc = _run(step, (*xs, t, acc), meter)
    return acc


def _check_args(term: Term, args: Sequence[int]) -> tuple[int, ...]:
    n = arity(term)
    if len(args) != n:
        raise ValueError(f"term has arity {n} but {len(args)} arguments were given")
    if any(a < 0 for a in args):
        raise ValueError("arguments must be natural numbers")
    return tuple(int(a) for a in args)


def evaluate(term: Term, args: Sequence[int]) -> EvalOutcome:
    meter = _Meter(None)
    value = _run(term, _check_args(term, args), meter)
    return EvalOutcome(value, meter.count)


def evaluate_bounded(term: Term, args: Sequence[int], budget: Budget | int) -> Optional[EvalOutcome]:
    """Evaluate with at most ``budget`` frames; ``None`` when that is not enough.

    When the budget runs out exactly ``budget`` frames have been entered.
    """
    limit = budget.max_steps if isinstance(budget, Budget) else int(budget)
    if limit < 0:
        raise ValueError("budget must be a natural number")
    meter = _Meter(limit)
    try:
        value = _run(term, _check_args(term, args), meter)
    except _Exceeded:
        assert meter.count == limit
        return None
    return EvalOutcome(value, meter.count)
