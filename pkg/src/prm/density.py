"""Building a subset Y of X that splits A & X, one requirement at a time.

Requirement i wants a point where A & Y disagrees with p_i and one where
A & (X - Y) does.  While it waits, Y copies X (h(x) = x); the slow
computations of p_i and chi_{A&X} run on successive candidate points.  The
first candidate y with chi_{A&X}(y) = 0 and p_i(y) != 0 settles it at once
(case a).  A candidate z with chi_{A&X}(z) = 1 and p_i(z) != 1 makes Y stop
copying: from then on Y is 0 and h maps to the fixed non-member d, until a
later z1 with chi_{A&X}(z1) != p_i(z1) turns up (case b).

Scheduler
---------
Time is measured in ticks.  During tick t:

1. Y and h are defined at the next undefined point (unless ``y_limit`` is
   reached), copying X or writing 0 / d depending on the phase;
2. both pending evaluations for the current candidate receive one unit.

A candidate started at tick t0 with costs cp (for p_i) and ca (for
chi_{A&X}) completes at the end of tick t0 + max(cp, ca) - 1 and the next
candidate starts on the following tick.  Deciding chi_{A&X}(c) is charged
p_steps(X, c) plus the trace's replay account for A at c.

The loop below jumps from completion to completion instead of ticking; the
tests hold it against a literal tick-by-tick simulation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import enumeration as E
from . import serialize as J
from .evaluate import COST_MODEL_VERSION
from .report import Report
from .setops import rle_decode, rle_encode
from .sparse import SparseTrace

COPYING = "copying"
FLIPPED = "flipped"


def ax_cost(x_index: int, trace: SparseTrace, c: int) -> int:
    return E.p_steps(x_index, c) + trace.a_cost(c)


def ax_value(x_index: int, trace: SparseTrace, c: int) -> int:
    return 1 if trace.a_member(c) and E.set_char(x_index, c) else 0


@dataclass
class DensityTrace:
    x_index: int
    y_bits: list[int]
    h_table: list[int]
    statuses: list[dict]
    d: int
    tick_budget: int
    ticks_run: int
    y_limit: int
    max_requirements: int
    log: list[dict] = field(default_factory=list)
    exhausted: bool = False
    sparse_ref: str = ""

    def status(self, i: int) -> dict:
        return self.statuses[i]

    def satisfied(self, i: int) -> bool:
        return self.statuses[i]["status"].startswith("satisfied")

    def to_json(self) -> dict:
        return {
            "kind": "density",
            "cost_model_version": COST_MODEL_VERSION,
            "x_index": self.x_index,
            "y_bits_rle": rle_encode(self.y_bits),
            "h_table": list(self.h_table),
            "requirement_status": [dict(s) for s in self.statuses],
            "d": self.d,
            "max_requirements": self.max_requirements,
            "scheduler": {"tick_budget": self.tick_budget, "granularity": 1,
                          "ticks_run": self.ticks_run, "y_limit": self.y_limit},
            "scheduler_log": [dict(e) for e in self.log],
            "exhausted": self.exhausted,
            "sparse_ref": self.sparse_ref,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "DensityTrace":
        J.require(isinstance(doc, dict) and doc.get("kind") == "density", "not a density trace")
        J.check_version(doc)
        sched = doc["scheduler"]
        J.require(isinstance(sched, dict) and sched.get("granularity") == 1,
                  "scheduler granularity must be 1")
        try:
            y_bits = rle_decode(doc["y_bits_rle"])
        except (TypeError, ValueError) as exc:
            raise J.TraceFormatError(f"y_bits_rle: {exc}") from None
        statuses = doc["requirement_status"]
        J.require(isinstance(statuses, list) and all(isinstance(s, dict) for s in statuses),
                  "requirement_status must be a list of objects")
        log = doc["scheduler_log"]
        J.require(isinstance(log, list) and all(isinstance(e, dict) for e in log),
                  "scheduler_log must be a list of objects")
        exhausted = doc["exhausted"]
        J.require(isinstance(exhausted, bool), "exhausted must be a boolean")
        return cls(
            J.nat(doc["x_index"], "x_index"), y_bits, J.nat_list(doc["h_table"], "h_table"),
            [dict(s) for s in statuses], J.nat(doc["d"], "d"),
            J.nat(sched["tick_budget"], "tick_budget"), J.nat(sched["ticks_run"], "ticks_run"),
            J.nat(sched["y_limit"], "y_limit"), J.nat(doc["max_requirements"], "max_requirements"),
            [dict(e) for e in log], exhausted, str(doc.get("sparse_ref", "")),
        )


def build_dense_subset(x_index: int, trace: SparseTrace, max_requirements: int,
                       tick_budget: int, y_limit: Optional[int] = None) -> DensityTrace:
    """Run requirements 0 .. max_requirements-1 for at most ``tick_budget`` ticks.

    Y never extends past ``y_limit`` (default: the trace's A prefix).  A
    candidate reaching ``y_limit`` sets the exhaustion marker and leaves the
    current requirement pending.
    """
    limit = trace.prefix_end if y_limit is None else y_limit
    if limit > trace.prefix_end:
        raise ValueError("y_limit cannot exceed the sparse prefix")
    d = trace.non_member()
    y_bits: list[int] = []
    h_table: list[int] = []
    log: list[dict] = []
    statuses: list[dict] = []
    exhausted = False

    def extend(ticks: int, phase: str) -> None:
        for _ in range(min(ticks, limit - len(y_bits))):
            x = len(y_bits)
            if phase == COPYING:
                y_bits.append(E.set_char(x_index, x))
                h_table.append(x)
            else:
                y_bits.append(0)
                h_table.append(d)

    tick = 0  # the next tick to run
    for i in range(max_requirements):
        if exhausted or tick >= tick_budget:
            statuses.append({"i": i, "status": "pending", "phase": COPYING, "ticks_used": 0})
            continue
        start = tick
        phase = COPYING
        # the new stage's first extension happens in its first tick
        m0 = len(y_bits) if len(y_bits) < limit else limit
        cand = m0
        z = m1 = None
        done = None
        while True:
            if tick >= tick_budget:
                break
            if cand >= limit:
                exhausted = True
                break
            cp = E.p_steps(i, cand)
            ca = ax_cost(x_index, trace, cand)
            end = tick + max(cp, ca) - 1
            if end >= tick_budget:
                extend(tick_budget - tick, phase)
                tick = tick_budget
                break
            extend(end - tick + 1, phase)
            pv = E.p(i, cand)
            av = ax_value(x_index, trace, cand)
            log.append({"i": i, "point": cand, "start": tick, "end": end,
                        "p_cost": cp, "ax_cost": ca, "p": pv, "ax": av, "phase": phase})
            tick = end + 1
            if phase == COPYING:
                if av == 0 and pv != 0:
                    done = {"i": i, "status": "satisfied-a", "y": cand, "m0": m0}
                    break
                if av == 1 and pv != 1:
                    z, m1 = cand, len(y_bits)
                    phase = FLIPPED
                    cand = m1
                    continue
            elif av != pv:
                done = {"i": i, "status": "satisfied-b", "z": z, "z1": cand, "m0": m0, "m1": m1}
                break
            cand += 1
        if done is not None:
            statuses.append(done)
            continue
        pend = {"i": i, "status": "pending", "phase": phase, "ticks_used": tick - start,
                "m0": m0, "candidate": cand}
        if phase == FLIPPED:
            pend.update(z=z, m1=m1)
        statuses.append(pend)
        # a stuck stage keeps the tick loop busy until the budget runs out
        tick = tick_budget if not exhausted else tick

    return DensityTrace(x_index, y_bits, h_table, statuses, d, tick_budget, tick, limit,
                        max_requirements, log, exhausted, J.content_hash(trace.to_json()))


# -- verification -----------------------------------------------------------


def verify_density(dt: DensityTrace, trace: SparseTrace) -> Report:
    """Check Y inside X, the reduction h, every witness, the log and a full replay."""
    rep = Report("density")
    rep.add("sparse reference", dt.sparse_ref == J.content_hash(trace.to_json()),
            "trace was built against a different sparse trace")
    n = len(dt.y_bits)
    ok = len(dt.h_table) == n and n <= dt.y_limit <= trace.prefix_end
    if not rep.add("prefix shape", ok, f"{n} Y bits, {len(dt.h_table)} h values, limit {dt.y_limit}"):
        return rep
    X = dt.x_index
    d = dt.d
    rep.add("d outside A", d < trace.prefix_end and not trace.a_member(d), f"d = {d}")

    bad = next((x for x in range(n) if dt.y_bits[x] and not E.set_char(X, x)), None)
    rep.add("Y inside X", bad is None, f"Y({bad}) = 1 but {bad} not in X", bad)

    def shape_ok(x: int) -> bool:
        hx = dt.h_table[x]
        if hx == x and dt.y_bits[x] == E.set_char(X, x):
            return True
        return hx == d and dt.y_bits[x] == 0

    bad = next((x for x in range(n) if not shape_ok(x)), None)
    rep.add("h copies X or zeroes to d", bad is None, f"at {bad}", bad)

    def red_ok(x: int) -> bool:
        hx = dt.h_table[x]
        if hx >= trace.prefix_end:
            return False
        lhs = 1 if trace.a_member(x) and dt.y_bits[x] else 0
        return lhs == ax_value(X, trace, hx)

    bad = next((x for x in range(n) if not red_ok(x)), None)
    rep.add("h: A&Y <= A&X", bad is None, f"fails at {bad}", bad)

    rep.add("requirement list length", len(dt.statuses) == dt.max_requirements)
    bad = next((s.get("i") for s in dt.statuses if not _witness_ok(s, dt, trace)), None)
    rep.add("requirement witnesses", bad is None, f"requirement {bad}", bad)

    rep.add("scheduler log", _log_ok(dt, trace))

    try:
        fresh = build_dense_subset(X, trace, dt.max_requirements, dt.tick_budget, dt.y_limit)
        same = J.canonical_json(fresh.to_json()) == J.canonical_json(dt.to_json())
        detail = "" if same else _first_json_difference(dt.to_json(), fresh.to_json())
    except Exception as exc:  # a corrupted trace can make the replay itself fail
        same, detail = False, f"replay raised {exc!r}"
    rep.add("replay reproduces trace", same, detail)
    return rep


def _witness_ok(s: dict, dt: DensityTrace, trace: SparseTrace) -> bool:
    i = s.get("i")
    n = len(dt.y_bits)
    X = dt.x_index

    def a_y(x):
        return 1 if trace.a_member(x) and dt.y_bits[x] else 0

    def a_x_minus_y(x):
        return 1 if trace.a_member(x) and E.set_char(X, x) and not dt.y_bits[x] else 0

    try:
        st = s["status"]
        if st == "satisfied-a":
            y = s["y"]
            return (y < n and ax_value(X, trace, y) == 0 and E.p(i, y) != 0
                    and a_y(y) != E.p(i, y) and a_x_minus_y(y) != E.p(i, y))
        if st == "satisfied-b":
            z, z1 = s["z"], s["z1"]
            return (z < n and z1 < n and a_y(z) == 1 and E.p(i, z) != 1
                    and a_x_minus_y(z1) != E.p(i, z1))
        return st == "pending" and s.get("phase") in (COPYING, FLIPPED)
    except (LookupError, TypeError):  # includes points outside the sparse prefix
        return False


def _log_ok(dt: DensityTrace, trace: SparseTrace) -> bool:
    try:
        prev_end = None
        prev_i = None
        for e in dt.log:
            c, i = e["point"], e["i"]
            if e["p_cost"] != E.p_steps(i, c) or e["ax_cost"] != ax_cost(dt.x_index, trace, c):
                return False
            if e["end"] != e["start"] + max(e["p_cost"], e["ax_cost"]) - 1:
                return False
            if prev_end is not None and e["start"] != prev_end + 1:
                return False
            if prev_i is not None and i < prev_i:
                return False
            prev_end, prev_i = e["end"], i
        return True
    except (LookupError, TypeError):
        return False


def _first_json_difference(a, b, path: str = "$") -> str:
    if type(a) is not type(b):
        return f"{path}: type differs"
    if isinstance(a, dict):
        for k in sorted(set(a) | set(b)):
            if a.get(k) != b.get(k):
                return _first_json_difference(a.get(k), b.get(k), f"{path}.{k}")
    elif isinstance(a, list):
        if len(a) != len(b):
            return f"{path}: length {len(a)} vs {len(b)}"
        for k, (x, y) in enumerate(zip(a, b)):
            if x != y:
                return _first_json_difference(x, y, f"{path}[{k}]")
    return f"{path}: {a!r} vs {b!r}"
