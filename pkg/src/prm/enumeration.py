"""Goedel numbering of unary terms and the functions derived from it.

Numbering
---------
For every arity n the codes 0, 1, 2, ... enumerate *all* well-formed terms of
arity n exactly once, so ``decode`` is total and ``encode`` is its inverse.

Two streams are interleaved (even codes take the first, odd codes the second):

* basic terms: the atoms of arity n (``S`` first when n == 1, then the
  projections ``P(1,n) .. P(n,n)``, then ``Z(n)``), followed for n >= 2 by the
  primitive recursions ``R#0, R#1, ...``;
* compositions ``C#0, C#1, ...``.

For n == 1 the basic stream is finite (three atoms); once it runs out the
remaining codes all go to compositions.  Compound payloads use the Cantor
pairing, so

* ``R#k``: (base code, step code) = unpair(k), decoded at arities n-1, n+1;
* ``C#k``: (j-1, rest) = unpair(k); rest unpacks into j+1 codes: the outer
  term (arity j) followed by j inner terms (arity n).

The first unary codes are S, C(S;S), P(1,1), C(P(1,2);S,S), Z(1), ...

Derived functions
-----------------
``p(e, x)`` and ``p_steps(e, x)`` evaluate the e-th unary term.  ``r`` is the
normalized time bound max_{d<=e}(p_steps(d,x) + p(d,x) + x), which dominates
``p`` and is monotone in e by construction; ``r_steps`` is the declared cost
of computing it.  ``set_char`` reads the e-th term as a characteristic
function by clamping to {0, 1}.
"""

from __future__ import annotations

from functools import lru_cache
from math import isqrt
from typing import Optional, Union

from . import terms as T
from .evaluate import EvalOutcome, evaluate, evaluate_bounded
from .terms import Comp, PrimRec, Proj, Succ, Term, Zero, arity


def cantor_pair(x: int, y: int) -> int:
    return (x + y) * (x + y + 1) // 2 + y


def cantor_unpair(z: int) -> tuple[int, int]:
    w = (isqrt(8 * z + 1) - 1) // 2
    y = z - w * (w + 1) // 2
    return w - y, y


def _pack(codes: list[int]) -> int:
    acc = codes[-1]
    for c in reversed(codes[:-1]):
        acc = cantor_pair(c, acc)
    return acc


def _unpack(z: int, k: int) -> list[int]:
    out = []
    for _ in range(k - 1):
        a, z = cantor_unpair(z)
        out.append(a)
    out.append(z)
    return out


def _atoms(n: int) -> list[Term]:
    head: list[Term] = [Succ()] if n == 1 else []
    return head + [Proj(i, n) for i in range(1, n + 1)] + [Zero(n)]


_UNARY_ATOMS = len(_atoms(1))


def _split(n: int, e: int) -> tuple[str, int]:
    """Map a code to (stream, position): stream is 'basic' or 'comp'."""
    if n == 1 and e >= 2 * _UNARY_ATOMS:
        return "comp", e - _UNARY_ATOMS
    return ("basic", e // 2) if e % 2 == 0 else ("comp", e // 2)


def _join(n: int, stream: str, k: int) -> int:
    if stream == "comp":
        if n == 1 and k >= _UNARY_ATOMS:
            return k + _UNARY_ATOMS
        return 2 * k + 1
    return 2 * k


@lru_cache(maxsize=1 << 18)
def decode_arity(n: int, e: int) -> Term:
    """The term of arity ``n`` with code ``e`` (total for n >= 1, e >= 0)."""
    if n < 1 or e < 0:
        raise ValueError("arity must be >= 1 and code >= 0")
    stream, k = _split(n, e)
    if stream == "basic":
        atoms = _atoms(n)
        if k < len(atoms):
            return atoms[k]
        b, s = cantor_unpair(k - len(atoms))
        return PrimRec(decode_arity(n - 1, b), decode_arity(n + 1, s))
    a, rest = cantor_unpair(k)
    j = a + 1
    codes = _unpack(rest, j + 1)
    outer = decode_arity(j, codes[0])
    return Comp(outer, tuple(decode_arity(n, c) for c in codes[1:]))


def encode_arity(n: int, term: Term) -> int:
    if isinstance(term, Comp):
        j = len(term.inners)
        rest = _pack([encode_arity(j, term.outer)] + [encode_arity(n, t) for t in term.inners])
        return _join(n, "comp", cantor_pair(j - 1, rest))
    atoms = _atoms(n)
    if isinstance(term, PrimRec):
        k = cantor_pair(encode_arity(n - 1, term.base), encode_arity(n + 1, term.step))
        return _join(n, "basic", len(atoms) + k)
    return _join(n, "basic", atoms.index(term))


def decode(e: int) -> Term:
    """The e-th unary term."""
    return decode_arity(1, e)


def encode(term: Term) -> int:
    n = arity(term)
    if n != 1:
        raise ValueError(f"only unary terms are numbered, got arity {n}")
    return encode_arity(1, term)


# -- the list p_e -----------------------------------------------------------


@lru_cache(maxsize=1 << 16)
def outcome(e: int, x: int) -> EvalOutcome:
    return evaluate(decode(e), [x])


def p(e: int, x: int) -> int:
    return outcome(e, x).value


def p_steps(e: int, x: int) -> int:
    return outcome(e, x).steps


def r(e: int, x: int) -> int:
    """Normalized time bound; r(-1, x) = 0."""
    if e < -1:
        raise ValueError("r is defined for e >= -1")
    return max((p_steps(d, x) + p(d, x) + x for d in range(e + 1)), default=0)


def r_steps(e: int, x: int) -> int:
    """Declared cost of computing r(e, x): the evaluation steps it needs, plus one."""
    if e < -1:
        raise ValueError("r_steps is defined for e >= -1")
    return 1 + sum(p_steps(d, x) for d in range(e + 1))


def phi_approx(e: int, x: int, s: int) -> Optional[int]:
    """The stage-s approximation: p(e, x) if it converges within s frames."""
    out = evaluate_bounded(decode(e), [x], s)
    return None if out is None else out.value


SetRef = Union[int, Term]


@lru_cache(maxsize=1 << 16)
def _term_value(term: Term, x: int) -> int:
    return evaluate(term, [x]).value


def set_char(e: SetRef, x: int) -> int:
    """Characteristic function of the e-th primitive recursive set.

    ``e`` may also be the unary term itself.  Indices grow doubly
    exponentially with term depth (a singleton of 4 already needs about a
    million bits), so sets built from constants are passed as terms.
    """
    if isinstance(e, int):
        return min(p(e, x), 1)
    return min(_term_value(e, x), 1)


def set_term(e: SetRef) -> Term:
    return decode(e) if isinstance(e, int) else e


# -- computable operations on set indices -----------------------------------


def index_union(i: int, j: int) -> int:
    return encode(T.sg(T.add(T.sg(decode(i)), T.sg(decode(j)))))


def index_intersect(i: int, j: int) -> int:
    return encode(T.sgbar(T.add(T.sgbar(decode(i)), T.sgbar(decode(j)))))


def index_complement(i: int) -> int:
    return encode(T.sgbar(decode(i)))


def index_of(term: Term) -> int:
    """Index of a unary term viewed as a set (alias for ``encode``)."""
    return encode(term)


EMPTY_SET = encode(T.Zero(1))
ALL_SET = encode(T.compose(T.S, T.Zero(1)))


# -- exhaustive term generation (independent of the numbering) -------------


@lru_cache(maxsize=None)
def terms_of_size(size: int, n: int) -> tuple[Term, ...]:
    """Every well-formed term of arity ``n`` with exactly ``size`` nodes."""
    if size < 1 or n < 1:
        return ()
    if size == 1:
        return tuple(_atoms(n))
    out: list[Term] = []
    # PrimRec: 1 + base + step
    if n >= 2:
        for b in range(1, size - 1):
            for base in terms_of_size(b, n - 1):
                for step in terms_of_size(size - 1 - b, n + 1):
                    out.append(PrimRec(base, step))
    # Comp with j inner terms: 1 + outer + inners
    for j in range(1, size - 1):
        for o in range(1, size - j):
            outers = terms_of_size(o, j)
            if not outers:
                continue
            for inners in _inner_tuples(size - 1 - o, j, n):
                out.extend(Comp(outer, inners) for outer in outers)
    return tuple(out)


def _inner_tuples(total: int, count: int, n: int):
    if count == 0:
        if total == 0:
            yield ()
        return
    for first in range(1, total - count + 2):
        for t in terms_of_size(first, n):
            for rest in _inner_tuples(total - first, count - 1, n):
                yield (t,) + rest


def unary_terms_up_to(size: int) -> list[Term]:
    return [t for k in range(1, size + 1) for t in terms_of_size(k, 1)]


def coverage_scan(size: int, limit: int = 1 << 22) -> Optional[int]:
    """Least K with every unary term of size <= ``size`` among decode(0..K).

    Scans codes upwards; returns None if ``limit`` codes do not suffice.
    """
    missing = set(unary_terms_up_to(size))
    for e in range(limit):
        missing.discard(decode(e))
        if not missing:
            return e
    return None
