"""The algebra of sets A & X_e over a fixed sparse trace.

Elements are set indices read relative to one trace.  Boolean operations go
through the index combinators, so they act on indices and never on bits.
Equivalence of elements (their symmetric difference inside A is a
primitive recursive set) cannot be decided; the module only collects bounded
evidence for it.

The second half holds the correspondence utilities: recovering a splitting
set from a reduction into a join, deciding a set reducible to both halves of
a split, and the reduction of A & X to A & Y when A & (X - Y) is decidable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from . import enumeration as E
from . import terms as T
from .setops import (FunctionSet, OutOfPrefix, ReductionWitness, SetOracle,
                     graph_inverse)
from .sparse import SparseTrace
from .syntax import render
from .terms import Term

SetRef = E.SetRef


class TraceMismatch(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    e: SetRef  # an index, or the term when its index is impractically large
    trace: SparseTrace

    def member(self, x: int) -> int:
        # A first: a 0 there settles the point without evaluating X_e
        return 1 if self.trace.a_member(x) and E.set_char(self.e, x) else 0

    def oracle(self) -> SetOracle:
        return FunctionSet(self.member, self.trace.prefix_end, "A&X")

    def bits(self) -> list[int]:
        return [self.member(x) for x in range(self.trace.prefix_end)]


def element(e: SetRef, trace: SparseTrace) -> AlgebraElement:
    return AlgebraElement(e, trace)


def _same_trace(a: AlgebraElement, b: AlgebraElement) -> SparseTrace:
    if a.trace is not b.trace:
        raise TraceMismatch("elements are read relative to different traces")
    return a.trace


def _both_indices(a: AlgebraElement, b: AlgebraElement) -> bool:
    return isinstance(a.e, int) and isinstance(b.e, int)


def elem_join(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    tr = _same_trace(a, b)
    if _both_indices(a, b):
        return AlgebraElement(E.index_union(a.e, b.e), tr)
    return AlgebraElement(T.sg(T.add(T.sg(E.set_term(a.e)), T.sg(E.set_term(b.e)))), tr)


def elem_meet(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    tr = _same_trace(a, b)
    if _both_indices(a, b):
        return AlgebraElement(E.index_intersect(a.e, b.e), tr)
    return AlgebraElement(T.sgbar(T.add(T.sgbar(E.set_term(a.e)), T.sgbar(E.set_term(b.e)))), tr)


def elem_compl(a: AlgebraElement) -> AlgebraElement:
    if isinstance(a.e, int):
        return AlgebraElement(E.index_complement(a.e), a.trace)
    return AlgebraElement(T.sgbar(a.e), a.trace)


def zero(trace: SparseTrace) -> AlgebraElement:
    return AlgebraElement(E.EMPTY_SET, trace)


def one(trace: SparseTrace) -> AlgebraElement:
    return AlgebraElement(E.ALL_SET, trace)


# -- equivalence evidence ---------------------------------------------------


@dataclass(frozen=True)
class EquivEvidence:
    """Bounded evidence that X_k = A & (X_i xor X_j) pointwise.

    ``verdict`` is "consistent", "refuted" (``at`` is the least refuting x)
    or "inconclusive" (``at`` is the first point outside a prefix).
    """

    i: SetRef
    j: SetRef
    witness_k: SetRef
    checked_up_to: int
    verdict: str
    at: Optional[int] = None

    def to_json(self) -> dict:
        return {"i": _ref_json(self.i), "j": _ref_json(self.j), "witness_k": _ref_json(self.witness_k),
                "checked_up_to": self.checked_up_to, "verdict": self.verdict, "at": self.at}


def _ref_json(e: SetRef):
    return e if isinstance(e, int) else {"term": render(e)}


def approx_equiv(i: SetRef, j: SetRef, witness_k: SetRef, a: SetOracle, up_to: int) -> EquivEvidence:
    for x in range(up_to + 1):
        try:
            a_bit = a.member(x)
        except OutOfPrefix:
            return EquivEvidence(i, j, witness_k, up_to, "inconclusive", x)
        rhs = a_bit * (E.set_char(i, x) ^ E.set_char(j, x))
        if E.set_char(witness_k, x) != rhs:
            return EquivEvidence(i, j, witness_k, up_to, "refuted", x)
    return EquivEvidence(i, j, witness_k, up_to, "consistent")


def difference_set(i: SetRef, j: SetRef, a: SetOracle, up_to: int) -> Term:
    """The finite set A & (X_i xor X_j) restricted to [0, up_to], as a term.

    Its index exists but is far too large to write down once a point above
    a handful is involved.
    """
    pts = [x for x in range(up_to + 1) if a.member(x) and E.set_char(i, x) != E.set_char(j, x)]
    return T.finite_set(pts)


def search_equiv_witness(i: SetRef, j: SetRef, a: SetOracle, up_to: int,
                         small: int = 64) -> Optional[EquivEvidence]:
    """Look for a consistent witness among k < ``small``, then the finite difference.

    A difference sitting at a point of A is a set no small index denotes, so
    the search also tries the explicit finite set on the checked prefix.
    """
    for k in range(small):
        ev = approx_equiv(i, j, k, a, up_to)
        if ev.verdict != "refuted":
            return ev
    ev = approx_equiv(i, j, difference_set(i, j, a, up_to), a, up_to)
    return ev if ev.verdict != "refuted" else None


# -- splitting a join -------------------------------------------------------


@dataclass
class JoinSplit:
    x_set: Term  # X = {x : g(x) even}
    to_b: ReductionWitness  # A & X <= B
    to_c: ReductionWitness  # A & ~X <= C

    @property
    def x_index(self) -> int:
        return E.encode(self.x_set)


def split_from_join_reduction(g: ReductionWitness, b0: int, c0: int) -> JoinSplit:
    """From g: A <= B (+) C, the set X of x with g(x) even and two halves of g.

    floor(g/2) already reduces A & X to B on X itself.  Outside X the target
    must avoid B, so the derived witness sends those points to ``b0``, a
    non-member of B (and symmetrically ``c0`` for C).
    """
    if g.fn is None:
        raise ValueError("the join reduction must be a term")
    gt = g.fn
    in_x = T.sgbar(T.compose(T.REM2, gt))
    half = T.compose(T.HALF, gt)
    to_b = ReductionWitness(T.if_positive(in_x, half, T.const(b0)), f"floor(g/2) on X, else {b0}")
    to_c = ReductionWitness(T.if_positive(in_x, T.const(c0), half), f"floor(g/2) off X, else {c0}")
    return JoinSplit(in_x, to_b, to_c)


# -- sets below both halves of a split --------------------------------------


def meet_zero_decide(p: ReductionWitness, q: ReductionWitness, x_index: SetRef,
                     trace: SparseTrace, x: int) -> int:
    """chi_D(x) for D <= A & X (via p) and D <= A & ~X (via q).

    Follows the three-step procedure: reject when either image misses
    range(f) or the wrong side of X; locate both images as f(k), f(l); then
    decide A at the smaller of the two within the budget given by the larger.
    Raises ``OutOfPrefix`` when an image lies beyond the trace.
    """
    px, qx = p(x), q(x)
    graph = trace.graph()
    k = graph_inverse(graph, px)
    l = graph_inverse(graph, qx)
    if k is None or l is None:
        return 0
    if not E.set_char(x_index, px) or E.set_char(x_index, qx):
        return 0
    # p(x) in X, q(x) outside it, so k != l
    lo, hi = min(k, l), max(k, l)
    bit = trace.a_member_bounded(trace.f(lo), trace.f(hi))
    if bit is None:
        raise RuntimeError(f"A at f({lo}) is not decidable within f({hi}) frames; "
                           "the trace violates its timing condition")
    return bit


def direct_meet_member(p: ReductionWitness, x_index: SetRef, trace: SparseTrace, x: int) -> int:
    """The reference answer chi_{A&X}(p(x))."""
    y = p(x)
    return 1 if trace.a_member(y) and E.set_char(x_index, y) else 0


# -- the cone reduction -----------------------------------------------------


def cone_reduction_witness(x_index: SetRef, y_index: SetRef, c: int, d: int,
                           trace: SparseTrace) -> ReductionWitness:
    """h: A & X <= A & Y, given c in A & Y and d outside A.

    h(x) = c on A & (X - Y), d off X, x elsewhere.  Deciding A & (X - Y)
    consults the trace, so the witness is replay-backed, not a pure term.
    """
    if not (trace.a_member(c) and E.set_char(y_index, c)):
        raise ValueError(f"c = {c} is not in A & Y")
    if trace.a_member(d):
        raise ValueError(f"d = {d} is in A")

    def h(x: int) -> int:
        in_x = E.set_char(x_index, x)
        if not in_x:
            return d
        if trace.a_member(x) and not E.set_char(y_index, x):
            return c
        return x

    return ReductionWitness(None, f"cone(c={c}, d={d})", replay=h)


def members_of(a: AlgebraElement) -> Iterable[int]:
    return (x for x in range(a.trace.prefix_end) if a.member(x))
