"""Stage-by-stage construction of a sparse pair (f, A) and its verifier.

Stage s+1 evaluates p_0 .. p_s at f(s), sets z = 1 + max(f(s), values), and
charges an account N for replaying every stage so far.  It then declares the
open interval (f(s), w) outside range(f) and outside A, puts f(s+1) = w, and
diagonalizes: f(s) goes into A exactly when p_s(f(s)) = 0.

The real construction interleaves quick declarations with slow evaluations.
Here the slow part is run to completion first and the interval is declared
afterwards; the resulting trace is the same.

Step account
------------
Stage t costs ``W_t = sum_j p_steps(j, f(t-1)) + (t + 1)``: the evaluations
plus one frame per operand of the max giving z.  Replaying stages 1 .. s+1
from scratch then costs ``N_raw = 1 + W_1 + ... + W_{s+1}`` (the leading 1 is
f(0) = 0), and ``N = max(N_raw, z)``.  The least undeclared w >= N is N itself
because everything declared so far lies below f(s) + 1 <= z <= N.
"""

from __future__ import annotations

import os
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Iterable, Optional

from . import enumeration as E
from . import serialize as J
from .evaluate import COST_MODEL_VERSION, evaluate_bounded
from .report import Report
from .setops import FunctionSet, GraphOracle, OutOfPrefix, PrefixSet, rle_decode, rle_encode

DEFAULT_RESOURCE_CAP = 10**7
RESOURCE_CAP_ENV = "PRM_RESOURCE_CAP"


def resource_cap(override: Optional[int] = None) -> int:
    if override is not None:
        return override
    env = os.environ.get(RESOURCE_CAP_ENV)
    if env:
        cap = int(env)
        if cap < 1:
            raise ValueError(f"{RESOURCE_CAP_ENV} must be positive")
        return cap
    return DEFAULT_RESOURCE_CAP


@dataclass(frozen=True)
class StageRecord:
    stage: int  # s + 1
    fs: int  # f(s)
    values: tuple[int, ...]  # p_0(f(s)) .. p_s(f(s))
    steps: tuple[int, ...]
    z: int
    work: int  # W_{s+1}
    n_raw: int
    N: int
    w: int  # f(s+1)
    declared: tuple[int, int]  # half-open [f(s)+1, w): not in range(f), not in A
    a_bit: int  # chi_A(f(s))

    def to_json(self) -> dict:
        return {
            "stage": self.stage, "fs": self.fs, "values": list(self.values),
            "steps": list(self.steps), "z": self.z, "work": self.work,
            "n_raw": self.n_raw, "N": self.N, "w": self.w,
            "declared": list(self.declared), "a_bit": self.a_bit,
        }

    @classmethod
    def from_json(cls, d: dict) -> "StageRecord":
        J.require(isinstance(d, dict), "stage record must be an object")
        declared = J.nat_list(d["declared"], "declared")
        J.require(len(declared) == 2, "declared must be a [lo, hi) pair")
        return cls(
            J.nat(d["stage"], "stage"), J.nat(d["fs"], "fs"),
            tuple(J.nat_list(d["values"], "values")), tuple(J.nat_list(d["steps"], "steps")),
            J.nat(d["z"], "z"), J.nat(d["work"], "work"), J.nat(d["n_raw"], "n_raw"),
            J.nat(d["N"], "N"), J.nat(d["w"], "w"), (declared[0], declared[1]),
            J.bit(d["a_bit"], "a_bit"),
        )


@dataclass
class SparseTrace:
    f_table: list[int]
    a_bits: list[int]  # defined on [0, f(last))
    records: list[StageRecord] = field(default_factory=list)
    truncated: Optional[dict] = None
    synthetic: bool = False
    # synthetic fixtures only: the declared cost of deciding A at f(k), per k
    accounts: Optional[list[int]] = None

    def __post_init__(self):
        self._pos = {v: k for k, v in enumerate(self.f_table)}

    # -- shape --------------------------------------------------------------

    @property
    def stages_completed(self) -> int:
        return len(self.f_table) - 1

    @property
    def prefix_end(self) -> int:
        """A is defined on [0, prefix_end)."""
        return self.f_table[-1]

    def f(self, k: int) -> int:
        if not 0 <= k < len(self.f_table):
            raise OutOfPrefix(k, len(self.f_table), "f")
        return self.f_table[k]

    # -- range(f) -----------------------------------------------------------

    def range_index(self, y: int) -> Optional[int]:
        """k with f(k) = y, None when y is not in the range.

        Defined for y <= f(last): beyond that the next value is unknown.
        """
        if y > self.prefix_end:
            raise OutOfPrefix(y, self.prefix_end + 1, "range(f)")
        return self._pos.get(y)

    def in_range(self, y: int) -> int:
        return 0 if self.range_index(y) is None else 1

    def floor_index(self, x: int) -> int:
        """Greatest m with f(m) <= x, for x < f(last) so that f(m+1) is known."""
        if x >= self.prefix_end:
            raise OutOfPrefix(x, self.prefix_end, "f-interval")
        return bisect_right(self.f_table, x) - 1

    def graph(self) -> GraphOracle:
        pos = self._pos
        return GraphOracle(lambda x, y: pos.get(y) == x, self.prefix_end + 1, "graph(f)")

    # -- A ------------------------------------------------------------------

    def a_member(self, x: int) -> int:
        if x >= self.prefix_end:
            raise OutOfPrefix(x, self.prefix_end, "A")
        return self.a_bits[x]

    def a_oracle(self) -> PrefixSet:
        return PrefixSet(self.a_bits, "A")

    def a_cost(self, x: int) -> int:
        """Declared frames to decide x in A by replaying the construction.

        Numbers off the range were declared promptly (cost 1); f(k) needs
        the full stage-(k+1) account.
        """
        k = self.range_index(x)
        if k is None:
            if x >= self.prefix_end:
                raise OutOfPrefix(x, self.prefix_end, "A")
            return 1
        if k >= self.stages_completed:
            raise OutOfPrefix(x, self.prefix_end, "A")
        if self.synthetic:
            return self.accounts[k]
        return self.records[k].N

    def a_member_bounded(self, x: int, budget: int) -> Optional[int]:
        """chi_A(x) if it can be decided within ``budget`` frames, else None."""
        return self.a_member(x) if self.a_cost(x) <= budget else None

    def members(self) -> list[int]:
        return [x for x, b in enumerate(self.a_bits) if b]

    def non_member(self) -> int:
        """The least verified non-member of A (0 for every genuine trace)."""
        for x, b in enumerate(self.a_bits):
            if not b:
                return x
        raise OutOfPrefix(self.prefix_end, self.prefix_end, "A (no non-member in prefix)")

    def intersect_index(self, e: int) -> FunctionSet:
        """A & X_e on the defined prefix."""
        return FunctionSet(lambda x: self.a_member(x) and E.set_char(e, x), self.prefix_end,
                           "A&X")

    # -- fixtures -----------------------------------------------------------

    @classmethod
    def synthetic_fixture(cls, f_table: Iterable[int], members: Iterable[int],
                          accounts: Optional[Iterable[int]] = None) -> "SparseTrace":
        """A sparse-like pair that was not produced by the construction.

        Used to reach shapes (faster growth, denser A) that desk-scale runs of
        the construction never produce.  ``accounts[k]`` is the declared cost
        of deciding A at f(k); it defaults to f(k+1), the largest cost the
        timing condition allows.
        """
        f_table = list(f_table)
        members = set(members)
        end = f_table[-1]
        bits = [1 if x in members else 0 for x in range(end)]
        if any(m >= end for m in members):
            raise ValueError("members must lie below f(last)")
        acc = list(accounts) if accounts is not None else f_table[1:]
        if len(acc) != len(f_table) - 1:
            raise ValueError("one account per completed stage is needed")
        return cls(f_table, bits, [], None, True, acc)

    # -- JSON ---------------------------------------------------------------

    def to_json(self) -> dict:
        doc = {
            "kind": "sparse",
            "cost_model_version": COST_MODEL_VERSION,
            "f_table": list(self.f_table),
            "a_bits_rle": rle_encode(self.a_bits),
            "stage_records": [r.to_json() for r in self.records],
            "stages_completed": self.stages_completed,
            "truncated": self.truncated,
            "synthetic": self.synthetic,
        }
        if self.synthetic:
            doc["accounts"] = list(self.accounts)
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "SparseTrace":
        J.require(isinstance(doc, dict) and doc.get("kind") == "sparse", "not a sparse trace")
        J.check_version(doc)
        f_table = J.nat_list(doc["f_table"], "f_table")
        J.require(len(f_table) >= 1, "f_table is empty")
        runs = doc["a_bits_rle"]
        J.require(isinstance(runs, list) and all(isinstance(r, list) and len(r) == 2 for r in runs),
                  "a_bits_rle must be a list of [bit, count] runs")
        try:
            bits = rle_decode(runs)
        except (TypeError, ValueError) as exc:
            raise J.TraceFormatError(f"a_bits_rle: {exc}") from None
        records = [StageRecord.from_json(r) for r in doc["stage_records"]]
        J.require(doc.get("stages_completed") == len(f_table) - 1,
                  "stages_completed disagrees with f_table")
        synthetic = doc.get("synthetic", False)
        J.require(isinstance(synthetic, bool), "synthetic must be a boolean")
        accounts = J.nat_list(doc["accounts"], "accounts") if synthetic else None
        trunc = doc.get("truncated")
        J.require(trunc is None or isinstance(trunc, dict), "truncated must be null or an object")
        return cls(f_table, bits, records, trunc, synthetic, accounts)


# -- construction -----------------------------------------------------------


def build_sparse(stages: int, cap: Optional[int] = None) -> SparseTrace:
    """Run ``stages`` stages of the construction.

    Each stage may spend at most ``cap`` frames on its evaluations (default
    10^7, or the PRM_RESOURCE_CAP environment variable).  A stage that would
    exceed it is abandoned and the trace is returned with a ``truncated``
    marker.
    """
    if stages < 1:
        raise ValueError("stages must be >= 1")
    cap = resource_cap(cap)
    f_table = [0]
    a_bits: list[int] = []
    records: list[StageRecord] = []
    replay_total = 1  # f(0) = 0
    for s in range(stages):
        fs = f_table[s]
        values, steps = [], []
        spent = 0
        for j in range(s + 1):
            out = evaluate_bounded(E.decode(j), [fs], cap - spent)
            if out is None:
                trunc = {"stage": s + 1, "reason": "resource cap", "cap": cap, "index": j}
                return SparseTrace(f_table, a_bits, records, trunc)
            values.append(out.value)
            steps.append(out.steps)
            spent += out.steps
        z = 1 + max([fs] + values)
        work = spent + (s + 2)
        replay_total += work
        n = max(replay_total, z)
        w = n  # everything below f(s)+1 is already decided and f(s)+1 <= z <= N
        a_bit = 1 if values[s] == 0 else 0
        a_bits.append(a_bit)
        a_bits.extend([0] * (w - fs - 1))
        f_table.append(w)
        records.append(StageRecord(s + 1, fs, tuple(values), tuple(steps), z, work,
                                   replay_total, n, w, (fs + 1, w), a_bit))
    return SparseTrace(f_table, a_bits, records)


# -- verification -----------------------------------------------------------


def verify_sparse(trace: SparseTrace) -> Report:
    """Check the trace against the definition and re-derive it by replay.

    Failures are reported, never raised.
    """
    rep = Report("sparse")
    f = trace.f_table
    S = trace.stages_completed
    rep.add("f(0)=0", f[0] == 0, f"f(0) = {f[0]}")
    bad = next((k for k in range(S) if f[k + 1] <= f[k]), None)
    rep.add("f strictly increasing", bad is None, f"f({bad}) >= f({bad}+1)" if bad is not None else "", bad)
    rep.add("A prefix length", len(trace.a_bits) == f[-1],
            f"A has {len(trace.a_bits)} bits, expected f({S}) = {f[-1]}")
    if not rep.passed:
        return rep

    range_set = set(f)
    bad = next((x for x, b in enumerate(trace.a_bits) if b and x not in range_set), None)
    rep.add("A inside range(f)", bad is None, f"{bad} in A but not in range(f)", bad)

    bad = _first_starstar_failure(f, lambda j, t: True)
    rep.add("f(t) > p_j(f(t-1)) for j < t", bad is None, _fmt_pair(bad))
    bad = _first_starstar_failure(f, lambda i, t: i < t - 1)
    rep.add("f(n+1) > p_i(f(n)) for i < n", bad is None, _fmt_pair(bad))

    if trace.synthetic:
        acc = trace.accounts or []
        ok = len(acc) == S and all(acc[k] <= f[k + 1] for k in range(S))
        rep.add("account <= f(s+1)", ok)
        return rep

    bad = next((s for s in range(S) if trace.a_bits[f[s]] == E.set_char(s, f[s])), None)
    rep.add("diagonal A(f(s)) != X_s(f(s))", bad is None,
            f"A and X_{bad} agree at f({bad})" if bad is not None else "", bad)

    recs = trace.records
    if not rep.add("stage records present", len(recs) == S, f"{len(recs)} records for {S} stages"):
        return rep
    bad = next((k for k, r in enumerate(recs) if not r.N <= f[k + 1]), None)
    rep.add("N <= f(s+1)", bad is None, f"stage {bad}" if bad is not None else "", bad)
    bad = next((k for k, r in enumerate(recs) if not (r.w == f[k + 1] and r.w >= r.z and r.w >= r.N)), None)
    rep.add("w = f(s+1) >= max(z, N)", bad is None, f"stage {bad}" if bad is not None else "", bad)

    covered = [0] * (f[-1] + 1)
    for v in f:
        covered[v] += 1
    tiling_ok = True
    for k, r in enumerate(recs):
        lo, hi = r.declared
        if lo != f[k] + 1 or hi != f[k + 1]:
            tiling_ok = False
            break
        for y in range(lo, hi):
            covered[y] += 1
    tiling_ok = tiling_ok and all(c == 1 for c in covered)
    rep.add("declared intervals tile [0, f(last)] minus range(f)", tiling_ok)
    end = len(trace.a_bits)
    bad = next((x for r in recs for x in range(*r.declared) if x >= end or trace.a_bits[x]), None)
    rep.add("declared points outside A", bad is None, f"{bad}", bad)

    fresh = build_sparse(S, cap=_replay_cap(trace))
    diff = _first_difference(trace, fresh)
    rep.add("replay reproduces trace", diff is None, diff or "")
    return rep


def _replay_cap(trace: SparseTrace) -> int:
    used = max((sum(r.steps) for r in trace.records), default=0)
    return max(resource_cap(), used)


def _first_starstar_failure(f: list[int], keep) -> Optional[tuple[int, int]]:
    for t in range(1, len(f)):
        for j in range(t):
            if keep(j, t) and not f[t] > E.p(j, f[t - 1]):
                return (j, t)
    return None


def _fmt_pair(pair: Optional[tuple[int, int]]) -> str:
    return "" if pair is None else f"fails at j={pair[0]}, t={pair[1]}"


def _first_difference(a: SparseTrace, b: SparseTrace) -> Optional[str]:
    if a.f_table != b.f_table:
        k = next(k for k in range(min(len(a.f_table), len(b.f_table)) + 1)
                 if k >= len(a.f_table) or k >= len(b.f_table) or a.f_table[k] != b.f_table[k])
        return f"f_table differs at {k}"
    if a.a_bits != b.a_bits:
        x = next(x for x in range(len(a.a_bits)) if a.a_bits[x] != b.a_bits[x])
        return f"A differs at {x}"
    for k, (ra, rb) in enumerate(zip(a.records, b.records)):
        if ra != rb:
            name = next(n for n in ra.__dataclass_fields__ if getattr(ra, n) != getattr(rb, n))
            return f"stage record {k}: field {name} differs"
    return None
