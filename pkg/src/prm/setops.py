"""Set oracles, reduction witnesses and the bounded reduction checker.

The constructions only ever know finite prefixes of their sets, so every
oracle may carry a ``limit``: membership is defined for ``x < limit`` and any
query beyond it raises ``OutOfPrefix``.  Nothing is ever guessed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

from . import enumeration as E
from . import terms as T
from .evaluate import evaluate
from .terms import Term


class OutOfPrefix(LookupError):
    """A membership query fell outside the known prefix of a set."""

    def __init__(self, x: int, limit: Optional[int], what: str = "set"):
        self.x = x
        self.limit = limit
        super().__init__(f"{what}: {x} is beyond the defined prefix [0, {limit})")


# -- oracles ----------------------------------------------------------------


class SetOracle:
    """Total 0/1 membership over an initial segment of the naturals."""

    limit: Optional[int] = None
    name: str = "set"

    def _member(self, x: int) -> int:
        raise NotImplementedError

    def member(self, x: int) -> int:
        if x < 0:
            raise ValueError("naturals only")
        if self.limit is not None and x >= self.limit:
            raise OutOfPrefix(x, self.limit, self.name)
        return self._member(x)

    __call__ = member

    def bits(self, upto: Optional[int] = None) -> list[int]:
        end = self.limit if upto is None else upto
        if end is None:
            raise ValueError("an explicit bound is needed for an unbounded oracle")
        return [self.member(x) for x in range(end)]


class PrefixSet(SetOracle):
    """A finite explicit table of bits, defined on [0, len(bits))."""

    def __init__(self, bits: Iterable[int], name: str = "prefix"):
        self._bits = bytes(1 if b else 0 for b in bits)
        self.limit = len(self._bits)
        self.name = name

    def _member(self, x: int) -> int:
        return self._bits[x]

    def to_json(self) -> dict:
        return {"kind": "prefix", "defined_up_to": self.limit, "bits": rle_encode(self._bits)}

    @classmethod
    def from_json(cls, data: dict) -> "PrefixSet":
        if data.get("kind") != "prefix":
            raise ValueError(f"not a prefix oracle: {data.get('kind')!r}")
        bits = rle_decode(data["bits"])
        if len(bits) != data["defined_up_to"]:
            raise ValueError("run lengths do not add up to defined_up_to")
        return cls(bits)


class IndexSet(SetOracle):
    """The primitive recursive set X_e."""

    def __init__(self, e: E.SetRef, limit: Optional[int] = None):
        self.e = e
        self.limit = limit
        self.name = f"X[{_short(e)}]"

    def _member(self, x: int) -> int:
        return E.set_char(self.e, x)


class FunctionSet(SetOracle):
    def __init__(self, fn: Callable[[int], int], limit: Optional[int] = None, name: str = "set"):
        self._fn = fn
        self.limit = limit
        self.name = name

    def _member(self, x: int) -> int:
        return 1 if self._fn(x) else 0


def _min_limit(*limits: Optional[int]) -> Optional[int]:
    known = [l for l in limits if l is not None]
    return min(known) if known else None


def intersect(a: SetOracle, b: SetOracle) -> SetOracle:
    # evaluate ``a`` first so a 0 there never touches b's prefix
    return FunctionSet(lambda x: a.member(x) and b.member(x), _min_limit(a.limit, b.limit),
                       f"({a.name} & {b.name})")


def complement(a: SetOracle) -> SetOracle:
    return FunctionSet(lambda x: 1 - a.member(x), a.limit, f"~{a.name}")


def difference(a: SetOracle, b: SetOracle) -> SetOracle:
    return FunctionSet(lambda x: a.member(x) and not b.member(x), _min_limit(a.limit, b.limit),
                       f"({a.name} - {b.name})")


def join(b: SetOracle, c: SetOracle) -> SetOracle:
    """B (+) C = {2x : x in B} | {2x+1 : x in C}."""
    lim = None
    if b.limit is not None and c.limit is not None:
        lim = min(2 * b.limit, 2 * c.limit + 1)
    return FunctionSet(lambda z: join_member(b, c, z), lim, f"({b.name} (+) {c.name})")


def join_member(b: SetOracle, c: SetOracle, z: int) -> int:
    half, odd = divmod(z, 2)
    return c.member(half) if odd else b.member(half)


# -- run-length encoding ----------------------------------------------------


def rle_encode(bits: Sequence[int]) -> list[list[int]]:
    runs: list[list[int]] = []
    for b in bits:
        b = 1 if b else 0
        if runs and runs[-1][0] == b:
            runs[-1][1] += 1
        else:
            runs.append([b, 1])
    return runs


def rle_decode(runs: Sequence[Sequence[int]]) -> list[int]:
    out: list[int] = []
    for bit, count in runs:
        if bit not in (0, 1) or count < 0:
            raise ValueError(f"bad run {[bit, count]!r}")
        out.extend([bit] * count)
    return out


# -- graphs of strictly increasing functions --------------------------------


class GraphOracle:
    """Membership of pairs (x, y) in the graph of a function.

    Defined for y < limit; the caller asserts the function is strictly
    increasing.
    """

    def __init__(self, member: Callable[[int, int], int], limit: Optional[int], name: str = "graph"):
        self._member = member
        self.limit = limit
        self.name = name

    def member(self, x: int, y: int) -> int:
        if self.limit is not None and y >= self.limit:
            raise OutOfPrefix(y, self.limit, self.name)
        return 1 if self._member(x, y) else 0

    @classmethod
    def from_table(cls, table: dict[int, int] | Sequence[int], limit: Optional[int] = None) -> "GraphOracle":
        pairs = dict(enumerate(table)) if not isinstance(table, dict) else dict(table)
        if limit is None:
            limit = max(pairs.values(), default=-1) + 1
        return cls(lambda x, y: pairs.get(x) == y, limit, "graph")


def graph_inverse(graph: GraphOracle, y: int) -> Optional[int]:
    """The x with f(x) = y, searched among x <= y, or None.

    Strict monotonicity gives f(x) >= x, so the search bound is exact.
    """
    for x in range(y + 1):
        if graph.member(x, y):
            return x
    return None


def graph_in_range(graph: GraphOracle, y: int) -> int:
    return 0 if graph_inverse(graph, y) is None else 1


# -- reduction witnesses ----------------------------------------------------


@dataclass
class ReductionWitness:
    """A unary reducing function plus the prefix on which it was checked.

    ``fn`` is a genuine term whenever ``pure`` is true.  Witnesses whose
    definition consults a construction trace carry a host-language ``replay``
    function instead and are flagged ``pure=False``.
    """

    fn: Optional[Term]
    source: str
    certified_up_to: Optional[int] = None
    replay: Optional[Callable[[int], int]] = field(default=None, repr=False)

    @property
    def pure(self) -> bool:
        return self.replay is None

    def __call__(self, x: int) -> int:
        if self.replay is not None:
            return self.replay(x)
        return evaluate(self.fn, [x]).value


@dataclass(frozen=True)
class Verdict:
    status: str  # "pass" | "fail" | "inconclusive"
    up_to: int
    x: Optional[int] = None
    a_bit: Optional[int] = None
    b_bit: Optional[int] = None
    image: Optional[int] = None
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.status == "pass"


def check_reduction(w: ReductionWitness, a: SetOracle, b: SetOracle, up_to: int) -> Verdict:
    """Check x in A <=> w(x) in B for every x <= up_to.

    Returns the least counterexample on failure; a membership query outside a
    prefix yields an "inconclusive" verdict at that x.
    """
    for x in range(up_to + 1):
        try:
            a_bit = a.member(x)
            y = w(x)
            b_bit = b.member(y)
        except OutOfPrefix as exc:
            return Verdict("inconclusive", up_to, x, detail=str(exc))
        if a_bit != b_bit:
            return Verdict("fail", up_to, x, a_bit, b_bit, y)
    w.certified_up_to = up_to if w.certified_up_to is None else max(w.certified_up_to, up_to)
    return Verdict("pass", up_to)


def _char_term(x_index: E.SetRef) -> Term:
    return E.set_term(x_index)


def restrict_reduction_witness(x_index: E.SetRef, c: int) -> ReductionWitness:
    """g(x) = x if x in X else c; reduces B & X to B whenever c is not in B."""
    fn = T.if_positive(_char_term(x_index), T.ID, T.const(c))
    return ReductionWitness(fn, f"restrict(X={_short(x_index)}, c={c})")


def split_reduction_witness(x_index: E.SetRef) -> ReductionWitness:
    """h(x) = 2x if x in X else 2x+1; reduces B to (B & X) (+) (B & ~X)."""
    fn = T.add(T.DOUBLE, T.sgbar(_char_term(x_index)))
    return ReductionWitness(fn, f"split(X={_short(x_index)})")


def identity_witness() -> ReductionWitness:
    return ReductionWitness(T.ID, "identity")


def constant_witness(c: int) -> ReductionWitness:
    return ReductionWitness(T.const(c), f"constant {c}")


def _short(e: E.SetRef) -> str:
    if not isinstance(e, int):
        return "<term>"
    return str(e) if e.bit_length() < 64 else f"<{e.bit_length()}-bit index>"
