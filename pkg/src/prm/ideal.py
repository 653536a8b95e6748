"""Coding a sequence of sets A & X_{psi(e)} into one set C = g^{-1}(A).

Numbers of the form <e, l> = 2^e (2l + 1) sitting between f(m) and f(m+1),
and far enough above the cost of r_{e-1}(f(m)), are the coding locations of
requirement e for f(m).  The function g sends a coding location x to f(m)
when f(m) is seen (within x frames) to lie in X_u for u = psi1(e, x), and to
0 otherwise; C is the preimage of A under g.

``coding_reduction`` builds the map h witnessing A & X_{psi(e)} <= C from a
threshold onwards and certifies it pointwise on the prefix.
``h_requirement_decode`` goes the other way: given a reduction of A & X_i into
C, it routes each point to a finite join of the coded sets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from . import enumeration as E
from . import serialize as J
from .evaluate import COST_MODEL_VERSION, evaluate_bounded
from .report import Report
from .setops import OutOfPrefix, ReductionWitness, rle_decode, rle_encode
from .sparse import SparseTrace


# -- pairing ----------------------------------------------------------------


def pair(i: int, j: int) -> int:
    if i < 0 or j < 0:
        raise ValueError("pair takes naturals")
    return (2 * j + 1) << i


def unpair(n: int) -> tuple[int, int]:
    if n < 1:
        raise ValueError("unpair is defined on positive naturals only")
    i = (n & -n).bit_length() - 1
    return i, (n >> i) >> 1


# -- fixtures for psi1 ------------------------------------------------------


@dataclass(frozen=True)
class PsiFixture:
    """A two-argument guess function psi1(e, s) with known limits.

    Kinds:
      constant(u)              psi1(e, s) = u
      eventually(u0, u1, at)   psi1(e, s) = u0 for s < at, then u1
      two(u0, u1)              psi1(e, s) = u0 for even e, u1 for odd e
    """

    kind: str
    params: tuple[int, ...]

    def __post_init__(self):
        need = {"constant": 1, "eventually": 3, "two": 2}
        if self.kind not in need or len(self.params) != need[self.kind]:
            raise ValueError(f"bad fixture {self.kind}{self.params}")
        if any(type(p) is not int or p < 0 for p in self.params):
            raise ValueError("fixture parameters are naturals")

    def psi1(self, e: int, s: int) -> int:
        if self.kind == "constant":
            return self.params[0]
        if self.kind == "eventually":
            u0, u1, at = self.params
            return u0 if s < at else u1
        return self.params[e % 2]

    def limit(self, e: int) -> int:
        if self.kind == "constant":
            return self.params[0]
        if self.kind == "eventually":
            return self.params[1]
        return self.params[e % 2]

    def settle(self, e: int) -> int:
        """psi1(e, s) = limit(e) for every s >= settle(e)."""
        return self.params[2] if self.kind == "eventually" else 0

    @classmethod
    def parse(cls, text: str) -> "PsiFixture":
        kind, *rest = text.split(":")
        try:
            params = tuple(int(p) for p in rest)
        except ValueError:
            raise ValueError(f"bad fixture parameters in {text!r}") from None
        return cls(kind, params)

    def to_json(self) -> dict:
        return {"kind": self.kind, "params": list(self.params)}

    @classmethod
    def from_json(cls, d: dict) -> "PsiFixture":
        J.require(isinstance(d, dict), "psi_fixture must be an object")
        return cls(str(d["kind"]), tuple(J.nat_list(d["params"], "params")))


# -- coding locations -------------------------------------------------------


def is_coding_location(e: int, n: int, trace: SparseTrace) -> Optional[int]:
    """The m for which n is a coding location of requirement e, or None.

    Requires n < f(last) so that the enclosing interval is known; raises
    ``OutOfPrefix`` otherwise.  The step condition asks both that r_{e-1}
    at f(m) is computed within n - 1 frames and that n exceeds its value.
    """
    m = trace.floor_index(n)
    if n < 1:
        return None
    e2, l = unpair(n)
    if e2 != e or l < e:
        return None
    v = trace.f(m)
    if E.r_steps(e - 1, v) > n - 1 or not n > E.r(e - 1, v):
        return None
    return m


def margin(e: int, x: int) -> int:
    """The largest of x, r_{e-1}(x) and the frames needed to compute it."""
    return max(x, E.r(e - 1, x), E.r_steps(e - 1, x))


@dataclass(frozen=True)
class CodingScan:
    e: int
    m: int
    locations: tuple[int, ...]
    bound_holds: bool  # m > <e,e> and f(m+1) > 3 * 2^(e+1) + margin(f(m))


def coding_locations_for(e: int, m: int, trace: SparseTrace) -> CodingScan:
    if m + 1 > trace.stages_completed:
        raise OutOfPrefix(m + 1, trace.stages_completed + 1, "f")
    lo, hi = trace.f(m), trace.f(m + 1)
    locs = tuple(n for n in range(max(lo, 1), hi) if is_coding_location(e, n, trace) == m)
    bound = m > pair(e, e) and hi > 3 * 2 ** (e + 1) + margin(e, lo)
    return CodingScan(e, m, locs, bound)


# -- g and C ----------------------------------------------------------------


@dataclass(frozen=True)
class CodingRecord:
    x: int
    e: int
    m: int
    u: int
    steps: Optional[int]  # frames used by X_u at f(m); None when x frames ran out
    member: int  # chi_{X_u}(f(m)) when computed, else 0

    def to_json(self) -> dict:
        return {"x": self.x, "e": self.e, "m": self.m, "u": self.u,
                "steps": self.steps, "member": self.member}


def _g_record(x: int, trace: SparseTrace, psi: PsiFixture) -> tuple[int, Optional[CodingRecord]]:
    if x == 0:
        return 0, None
    e, _ = unpair(x)
    m = is_coding_location(e, x, trace)
    if m is None:
        return 0, None
    u = psi.psi1(e, x)
    fm = trace.f(m)
    out = evaluate_bounded(E.decode(u), [fm], x)
    if out is None:
        return 0, CodingRecord(x, e, m, u, None, 0)
    member = min(out.value, 1)
    return (fm if member else 0), CodingRecord(x, e, m, u, out.steps, member)


def g_value(x: int, trace: SparseTrace, psi: PsiFixture) -> int:
    if x >= trace.prefix_end:
        raise OutOfPrefix(x, trace.prefix_end, "g")
    return _g_record(x, trace, psi)[0]


@dataclass
class IdealTrace:
    g_table: list[int]
    ci_bits: list[int]
    psi: PsiFixture
    records: list[CodingRecord] = field(default_factory=list)
    sparse_ref: str = ""

    def g(self, x: int) -> int:
        if x >= len(self.g_table):
            raise OutOfPrefix(x, len(self.g_table), "g")
        return self.g_table[x]

    def ci_member(self, x: int) -> int:
        if x >= len(self.ci_bits):
            raise OutOfPrefix(x, len(self.ci_bits), "C")
        return self.ci_bits[x]

    def to_json(self) -> dict:
        return {
            "kind": "ideal",
            "cost_model_version": COST_MODEL_VERSION,
            "g_table": list(self.g_table),
            "ci_bits_rle": rle_encode(self.ci_bits),
            "psi_fixture": self.psi.to_json(),
            "coding_records": [r.to_json() for r in self.records],
            "sparse_ref": self.sparse_ref,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "IdealTrace":
        J.require(isinstance(doc, dict) and doc.get("kind") == "ideal", "not an ideal trace")
        J.check_version(doc)
        try:
            bits = rle_decode(doc["ci_bits_rle"])
            psi = PsiFixture.from_json(doc["psi_fixture"])
        except (TypeError, ValueError) as exc:
            raise J.TraceFormatError(str(exc)) from None
        recs = []
        for r in doc["coding_records"]:
            J.require(isinstance(r, dict), "coding record must be an object")
            steps = r["steps"]
            J.require(steps is None or (type(steps) is int and steps >= 0), "steps")
            recs.append(CodingRecord(J.nat(r["x"], "x"), J.nat(r["e"], "e"), J.nat(r["m"], "m"),
                                     J.nat(r["u"], "u"), steps, J.bit(r["member"], "member")))
        return cls(J.nat_list(doc["g_table"], "g_table"), bits, psi, recs,
                   str(doc.get("sparse_ref", "")))


def build_ideal(trace: SparseTrace, psi: PsiFixture) -> IdealTrace:
    """g and C on [0, f(last)), with a record for every coding location."""
    if trace.a_bits and trace.a_bits[0]:
        raise ValueError("the construction needs 0 outside A")
    g_table, bits, recs = [], [], []
    for x in range(trace.prefix_end):
        gx, rec = _g_record(x, trace, psi)
        g_table.append(gx)
        bits.append(trace.a_member(gx))
        if rec is not None:
            recs.append(rec)
    return IdealTrace(g_table, bits, psi, recs, J.content_hash(trace.to_json()))


def cI_member(x: int, it: IdealTrace, trace: SparseTrace) -> int:
    return trace.a_member(it.g(x))


# -- the coding reduction ---------------------------------------------------


def step_account(e: int, u: int, y: int) -> int:
    """Frames for chi_{X_u}(y) plus computing r_{e-1}(y), plus its value."""
    return E.p_steps(u, y) + E.r_steps(e - 1, y) + E.r(e - 1, y)


def L_value(e: int, u: int, y: int) -> int:
    """The l used for h(y) = <e, l>.

    Large enough that <e, l> is at least y, that l >= e, that the step
    condition on coding locations holds, and that g gets more than the
    frames X_u needs at y.
    """
    least = (-(-y >> e)) // 2  # least l with <e,l> >= y
    return max(e, least, step_account(e, u, y))


@dataclass(frozen=True)
class Threshold:
    e: int
    m0: int
    y0: int


def find_threshold(e: int, trace: SparseTrace, psi: PsiFixture) -> Optional[Threshold]:
    """Least m0 from which every interval up to the last one is usable.

    m is usable when psi1 has settled by f(m), requirement e has a coding
    location above f(m), and f(m+1) lies above <e, L(f(m))>.
    """
    S = trace.stages_completed
    u = psi.limit(e)
    good_from = None
    for m in range(S - 1, -1, -1):
        fm = trace.f(m)
        ok = (fm >= psi.settle(e)
              and coding_locations_for(e, m, trace).locations
              and trace.f(m + 1) > pair(e, L_value(e, u, fm)))
        if not ok:
            break
        good_from = m
    if good_from is None:
        return None
    return Threshold(e, good_from, trace.f(good_from))


@dataclass
class CodingReduction:
    e: int
    threshold: Optional[Threshold]
    h_table: dict[int, int] = field(default_factory=dict)
    certified: bool = False
    failures: list[int] = field(default_factory=list)

    @property
    def reached(self) -> bool:
        return self.threshold is not None

    @property
    def status(self) -> str:
        if not self.reached:
            return "threshold not reached"
        return "certified" if self.certified else "failed"


def coding_h(e: int, u: int, y: int, trace: SparseTrace) -> int:
    if trace.range_index(y) is None or not E.set_char(u, y):
        return 0
    return pair(e, L_value(e, u, y))


def coding_reduction(e: int, it: IdealTrace, trace: SparseTrace) -> CodingReduction:
    """h for requirement e, checked at every y in [y0, f(last))."""
    th = find_threshold(e, trace, it.psi)
    if th is None:
        return CodingReduction(e, None)
    u = it.psi.limit(e)
    out = CodingReduction(e, th)
    for y in range(th.y0, trace.prefix_end):
        hy = coding_h(e, u, y, trace)
        out.h_table[y] = hy
        lhs = 1 if trace.a_member(y) and E.set_char(u, y) else 0
        if lhs != cI_member(hy, it, trace):
            out.failures.append(y)
    out.certified = not out.failures
    return out


def coding_witness(e: int, it: IdealTrace, trace: SparseTrace) -> ReductionWitness:
    u = it.psi.limit(e)
    return ReductionWitness(None, f"coding h for requirement {e}",
                            replay=lambda y: coding_h(e, u, y, trace))


# -- decoding a reduction into C --------------------------------------------


@dataclass(frozen=True)
class DecodedTarget:
    x: int
    target: int  # 0 or <component, element> in the finite join
    route: str
    detail: str = ""

    @property
    def conclusive(self) -> bool:
        return self.route not in ("inconclusive", "contradiction")


def join_member(n: int, bound: int, psi: PsiFixture, trace: SparseTrace) -> int:
    """Membership in the join of A & X_{psi(m)} over m <= bound, coded by pair."""
    if n == 0:
        return 0
    m, y = unpair(n)
    if m > bound:
        return 0
    return 1 if trace.a_member(y) and E.set_char(psi.limit(m), y) else 0


def least_a0(trace: SparseTrace, psi: PsiFixture) -> int:
    u = psi.limit(0)
    for x in trace.members():
        if E.set_char(u, x):
            return x
    raise ValueError("A & X_psi(0) has no element in the prefix")


def h_requirement_decode(i: int, j: int, pj: Callable[[int], int], it: IdealTrace,
                         trace: SparseTrace, x: int, a0: Optional[int] = None) -> DecodedTarget:
    """Route x to the finite join, given pj reducing A & X_i to C.

    ``j`` names the time bound r_j used by the local precondition.
    """
    ij = pair(i, j)
    if x >= trace.prefix_end:
        return DecodedTarget(x, 0, "inconclusive", "x beyond the prefix")
    m = trace.range_index(x)
    if m is None or not E.set_char(i, x):
        return DecodedTarget(x, 0, "trivial")
    unsettled = [e for e in range(ij + 1) if it.psi.settle(e) > x]
    if unsettled:
        return DecodedTarget(x, 0, "inconclusive", f"psi1 not settled for {unsettled[0]}")
    if m + 1 > trace.stages_completed or not trace.f(m + 1) > E.r(j, x):
        return DecodedTarget(x, 0, "inconclusive", f"f({m}+1) > r_{j}(f({m})) not verified")
    y = pj(x)
    try:
        gy = it.g(y)
    except OutOfPrefix:
        return DecodedTarget(x, 0, "inconclusive", "g(p_j(x)) beyond the prefix")
    k = trace.range_index(gy)
    if gy == 0 or k is None:
        return DecodedTarget(x, 0, "g-zero")
    if k < m:
        bit = trace.a_member_bounded(gy, x)
        if bit is None:
            return DecodedTarget(x, 0, "contradiction", f"A at f({k}) not decidable in {x} frames")
        if not bit:
            return DecodedTarget(x, 0, "case1")
        if a0 is None:
            a0 = least_a0(trace, it.psi)
        return DecodedTarget(x, pair(0, a0), "case1")
    if k > m:
        return DecodedTarget(x, 0, "contradiction", f"g(p_j(x)) = f({k}) above f({m})")
    e, _ = unpair(y)
    if e > ij:
        return DecodedTarget(x, 0, "contradiction", f"coding location for {e} > <i,j> = {ij}")
    out = evaluate_bounded(E.decode(it.psi.limit(e)), [gy], y)
    if out is None:
        return DecodedTarget(x, 0, "case2")
    return DecodedTarget(x, pair(e, gy), "case2")


# -- verification -----------------------------------------------------------


def verify_ideal(it: IdealTrace, trace: SparseTrace, requirements: int = 1) -> Report:
    """Recompute g and C, check their invariants and the coding certificates.

    Requirements whose threshold lies beyond the prefix are reported as
    such and do not count as failures.
    """
    rep = Report("ideal")
    rep.add("sparse reference", it.sparse_ref == J.content_hash(trace.to_json()))
    n = trace.prefix_end
    if not rep.add("prefix shape", len(it.g_table) == n and len(it.ci_bits) == n,
                   f"{len(it.g_table)} g values and {len(it.ci_bits)} bits for prefix {n}"):
        return rep
    rng = set(trace.f_table)
    bad = next((x for x, v in enumerate(it.g_table) if v != 0 and v not in rng), None)
    rep.add("g values in {0} + range(f)", bad is None, f"g({bad})", bad)
    bad = next((x for x in range(n) if it.g_table[x] >= n or it.ci_bits[x] != trace.a_member(it.g_table[x])), None)
    rep.add("C = g^-1(A)", bad is None, f"at {bad}", bad)
    rep.add("0 outside A and C", n == 0 or (trace.a_member(0) == 0 and it.ci_bits[0] == 0))
    try:
        fresh = build_ideal(trace, it.psi)
    except Exception as exc:
        rep.add("replay reproduces trace", False, f"replay raised {exc!r}")
        return rep
    bad = next((x for x in range(n) if fresh.g_table[x] != it.g_table[x]), None)
    rep.add("g recomputed", bad is None, f"g({bad})", bad)
    rep.add("coding records recomputed", fresh.records == it.records)
    for e in range(requirements):
        cr = coding_reduction(e, it, trace)
        if cr.reached:
            rep.add(f"coding certificate e={e}", cr.certified,
                    f"fails at {cr.failures[:1]}", cr.failures[0] if cr.failures else None)
    return rep
