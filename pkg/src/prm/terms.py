"""Abstract syntax for primitive recursive terms.

A term is one of five node types.  Every well-formed term has a single arity;
``arity`` computes it and raises ``ArityError`` (with the path of the offending
subterm) when the tree is malformed.  Nodes are plain frozen dataclasses, so
malformed trees can be built and inspected; nothing is validated until
``arity`` or an evaluator is asked about them.

The second half of the module is a small library of arithmetic terms (addition,
signum, constants, ...) used to assemble reduction witnesses and index
combinators.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union


class ArityError(ValueError):
    """A term violates the arity discipline somewhere in its tree."""

    def __init__(self, message: str, path: tuple[int, ...] = ()):
        self.path = path
        where = "/".join(str(p) for p in path) or "<root>"
        super().__init__(f"{message} (at {where})")


@dataclass(frozen=True)
class Zero:
    n: int


@dataclass(frozen=True)
class Succ:
    pass


@dataclass(frozen=True)
class Proj:
    i: int
    n: int


@dataclass(frozen=True)
class Comp:
    outer: "Term"
    inners: tuple["Term", ...]


@dataclass(frozen=True)
class PrimRec:
    """h(xs, 0) = base(xs); h(xs, y+1) = step(xs, y, h(xs, y)).

    The recursion argument is the last one.
    """

    base: "Term"
    step: "Term"


Term = Union[Zero, Succ, Proj, Comp, PrimRec]


def arity(term: Term, _path: tuple[int, ...] = ()) -> int:
    """Return the arity of ``term``, validating the whole tree."""
    if isinstance(term, Succ):
        return 1
    if isinstance(term, Zero):
        if term.n < 1:
            raise ArityError(f"Z needs arity >= 1, got {term.n}", _path)
        return term.n
    if isinstance(term, Proj):
        if term.n < 1 or not 1 <= term.i <= term.n:
            raise ArityError(f"projection P({term.i},{term.n}) out of range", _path)
        return term.n
    if isinstance(term, Comp):
        k = arity(term.outer, _path + (0,))
        if len(term.inners) == 0:
            raise ArityError("composition needs at least one inner term", _path)
        if len(term.inners) != k:
            raise ArityError(
                f"outer term has arity {k} but {len(term.inners)} inner terms given", _path
            )
        arities = [arity(t, _path + (i + 1,)) for i, t in enumerate(term.inners)]
        if any(a != arities[0] for a in arities):
            raise ArityError(f"inner terms disagree on arity: {arities}", _path)
        return arities[0]
    if isinstance(term, PrimRec):
        b = arity(term.base, _path + (0,))
        s = arity(term.step, _path + (1,))
        if s != b + 2:
            raise ArityError(f"step arity {s} must be base arity {b} + 2", _path)
        return b + 1
    raise TypeError(f"not a term: {term!r}")


def size(term: Term) -> int:
    """Number of AST nodes."""
    if isinstance(term, Comp):
        return 1 + size(term.outer) + sum(size(t) for t in term.inners)
    if isinstance(term, PrimRec):
        return 1 + size(term.base) + size(term.step)
    return 1


def depth(term: Term) -> int:
    if isinstance(term, Comp):
        return 1 + max(depth(term.outer), *(depth(t) for t in term.inners))
    if isinstance(term, PrimRec):
        return 1 + max(depth(term.base), depth(term.step))
    return 1


# -- term library -----------------------------------------------------------

S = Succ()
ID = Proj(1, 1)

# add(x, y), recursion on y
ADD = PrimRec(ID, Comp(S, (Proj(3, 3),)))
# mult(x, y) = x * y, recursion on y; each step adds x to the accumulator
MULT = PrimRec(Zero(1), Comp(ADD, (Proj(3, 3), Proj(1, 3))))
# monus(x, y) = x - y truncated; pred via h(x, y) recursion on y
_PRED2 = PrimRec(Zero(1), Proj(2, 3))  # pred2(x, y) = y - 1
PRED = Comp(_PRED2, (ID, ID))
MONUS = PrimRec(ID, Comp(PRED, (Proj(3, 3),)))

# sg(y) and 1 - sg(y) as binary recursions on their last argument
_SG2 = PrimRec(Zero(1), Comp(S, (Zero(3),)))
_SGBAR2 = PrimRec(Comp(S, (Zero(1),)), Zero(3))
SG = Comp(_SG2, (ID, ID))
SGBAR = Comp(_SGBAR2, (ID, ID))
DOUBLE = Comp(ADD, (ID, ID))


def compose(outer: Term, *inners: Term) -> Comp:
    return Comp(outer, tuple(inners))


def const(c: int) -> Term:
    """A unary term with constant value ``c``; depth grows with log2(c)."""
    if c < 0:
        raise ValueError("constants are natural numbers")
    if c == 0:
        return Zero(1)
    if c == 1:
        return compose(S, Zero(1))
    half = compose(DOUBLE, const(c // 2))
    return compose(S, half) if c % 2 else half


def add(f: Term, g: Term) -> Term:
    """Pointwise f + g; cost is linear in the value of g."""
    return compose(ADD, f, g)


def mult(f: Term, g: Term) -> Term:
    """Pointwise f * g; cost grows like f * g."""
    return compose(MULT, f, g)


def sg(f: Term) -> Term:
    return compose(SG, f)


def sgbar(f: Term) -> Term:
    return compose(SGBAR, f)


def if_positive(test: Term, then: Term, other: Term) -> Term:
    """Unary case split: then(x) if test(x) > 0 else other(x).

    Recurses on sg(test(x)): ``other`` is always evaluated as the base case,
    ``then`` only when the test is positive.
    """
    branch = PrimRec(other, compose(then, Proj(1, 3)))
    return compose(branch, ID, sg(test))


# parity and halving, by recursion on the argument
_REM2_2 = PrimRec(Zero(1), compose(SGBAR, Proj(3, 3)))
REM2 = compose(_REM2_2, ID, ID)
_HALF2 = PrimRec(Zero(1), compose(ADD, Proj(3, 3), compose(REM2, Proj(2, 3))))
HALF = compose(_HALF2, ID, ID)


def monus(f: Term, g: Term) -> Term:
    """Pointwise max(f - g, 0)."""
    return compose(MONUS, f, g)


def singleton(a: int) -> Term:
    """Characteristic term of {a}: 1 - sg(|x - a|)."""
    c = const(a)
    return sgbar(add(monus(ID, c), monus(c, ID)))


def finite_set(points) -> Term:
    """Characteristic term of a finite set (Zero(1) when empty)."""
    pts = sorted(set(points))
    if not pts:
        return Zero(1)
    acc = singleton(pts[0])
    for a in pts[1:]:
        acc = add(acc, singleton(a))
    return sg(acc)
