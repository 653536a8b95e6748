import pytest

from prm import enumeration as E
from prm import terms as T
from prm.density import DensityTrace, build_dense_subset, verify_density
from prm.sparse import SparseTrace

EVENS = E.encode(T.sgbar(T.REM2))


def tick_oracle(x_index, trace, reqs, budget, limit=None):
    """Literal simulation: one tick at a time, counters decremented per tick."""
    limit = trace.prefix_end if limit is None else limit
    d = next(x for x in range(trace.prefix_end) if not trace.a_member(x))
    Y, H, log, statuses = [], [], [], []
    i, phase, cand, m0, z, m1 = 0, "copying", 0, 0, None, None
    left = None  # remaining (p, ax) units of the running candidate
    start = tick = 0
    exhausted = False

    def ax(c):
        return 1 if trace.a_member(c) and E.set_char(x_index, c) else 0

    while tick < budget and i < reqs:
        if left is None:
            if cand >= limit:
                exhausted = True
                break
            left = [E.p_steps(i, cand), E.p_steps(x_index, cand) + trace.a_cost(cand)]
            start = tick
        if len(Y) < limit:
            x = len(Y)
            Y.append(E.set_char(x_index, x) if phase == "copying" else 0)
            H.append(x if phase == "copying" else d)
        left = [max(v - 1, 0) for v in left]
        tick += 1
        if left != [0, 0]:
            continue
        left = None
        pv, av = E.p(i, cand), ax(cand)
        log.append((i, cand, start, tick - 1))
        result = None
        if phase == "copying" and av == 0 and pv != 0:
            result = ("satisfied-a", cand)
        elif phase == "copying" and av == 1 and pv != 1:
            phase, z, m1, cand = "flipped", cand, len(Y), len(Y)
            continue
        elif phase == "flipped" and av != pv:
            result = ("satisfied-b", cand)
        if result is None:
            cand += 1
            continue
        statuses.append((i,) + result)
        i, phase, z, m1 = i + 1, "copying", None, None
        m0 = cand = len(Y)
    while len(statuses) < reqs:
        statuses.append((len(statuses), "pending", None))
    return Y, H, log, statuses, exhausted


def summarize(dt):
    sts = []
    for s in dt.statuses:
        key = {"satisfied-a": "y", "satisfied-b": "z1"}.get(s["status"])
        sts.append((s["i"], s["status"], s[key] if key else None))
    log = [(e["i"], e["point"], e["start"], e["end"]) for e in dt.log]
    return dt.y_bits, dt.h_table, log, sts, dt.exhausted


CONFIGS = [
    ("all-golden", E.ALL_SET, 3, 3, 10**6),
    ("all-stage6", E.ALL_SET, 6, 4, 5000),
    ("evens", EVENS, 6, 4, 5000),
    ("budget-5", E.ALL_SET, 3, 3, 5),
    ("budget-20", E.ALL_SET, 3, 3, 20),
    ("budget-33", E.ALL_SET, 3, 3, 33),
    ("single-req", 3, 6, 1, 400),
]


@pytest.mark.parametrize("name, x, stages, reqs, budget", CONFIGS, ids=[c[0] for c in CONFIGS])
def test_event_loop_matches_tick_oracle(request, name, x, stages, reqs, budget):
    trace = request.getfixturevalue(f"sparse{stages}")
    dt = build_dense_subset(x, trace, reqs, budget)
    assert summarize(dt) == tick_oracle(x, trace, reqs, budget)
    assert verify_density(dt, trace).passed


def test_golden_configuration(dense_golden, sparse3):
    dt = dense_golden
    assert [(s["status"], s.get("y")) for s in dt.statuses] == [
        ("satisfied-a", 0), ("satisfied-a", 7), ("satisfied-a", 11)]
    assert dt.ticks_run == 34 and len(dt.y_bits) == 20 and not dt.exhausted
    assert [(e["point"], e["p_cost"], e["ax_cost"], e["end"]) for e in dt.log] == [
        (0, 1, 7, 6), (7, 3, 4, 10), (11, 1, 23, 33)]
    assert dt.y_bits == [1] * 20 and dt.h_table == list(range(20))
    rep = verify_density(dt, sparse3)
    assert rep.passed and len(rep.checks) == 10


def test_golden_is_reproducible(sparse3, dense_golden):
    again = build_dense_subset(E.ALL_SET, sparse3, 3, 10**6)
    assert again.to_json() == dense_golden.to_json()


def test_flip_then_exhaustion(sparse6):
    dt = build_dense_subset(E.ALL_SET, sparse6, 4, 10**6)
    r3 = dt.statuses[3]
    assert r3["status"] == "pending" and r3["phase"] == "flipped"
    assert (r3["z"], r3["m1"]) == (34, 72)
    assert dt.exhausted
    assert verify_density(dt, sparse6).passed


def test_flipped_segment_zeroes_y(sparse6):
    dt = build_dense_subset(E.ALL_SET, sparse6, 4, 10**6)
    assert dt.y_bits[34] == 1  # defined while still copying
    flipped = [x for x in range(len(dt.h_table)) if dt.h_table[x] == dt.d and x != dt.d]
    assert all(dt.y_bits[x] == 0 for x in flipped)


def test_json_round_trip(dense_golden):
    back = DensityTrace.from_json(dense_golden.to_json())
    assert back.to_json() == dense_golden.to_json()


def test_corrupted_y_bit_is_located(dense_golden, sparse3):
    doc = dense_golden.to_json()
    doc["y_bits_rle"] = [[1, 5], [0, 1], [1, 14]]
    rep = verify_density(DensityTrace.from_json(doc), sparse3)
    assert not rep.passed
    assert rep.get("h copies X or zeroes to d").at == 5


def test_y_outside_x_is_located(sparse6):
    dt = build_dense_subset(EVENS, sparse6, 2, 5000)
    dt.y_bits[3] = 1
    rep = verify_density(dt, sparse6)
    assert rep.get("Y inside X").at == 3


def test_wrong_sparse_reference(dense_golden, sparse6):
    rep = verify_density(dense_golden, sparse6)
    assert not rep.get("sparse reference").ok


def test_y_limit_respected(sparse6):
    dt = build_dense_subset(E.ALL_SET, sparse6, 4, 10**6, y_limit=30)
    assert len(dt.y_bits) <= 30
    with pytest.raises(ValueError):
        build_dense_subset(E.ALL_SET, sparse6, 4, 10, y_limit=100)


def test_synthetic_trace_with_dense_a():
    tr = SparseTrace.synthetic_fixture([0, 4, 11, 20, 34, 50], [4, 20, 34])
    dt = build_dense_subset(E.ALL_SET, tr, 3, 10**5)
    assert summarize(dt) == tick_oracle(E.ALL_SET, tr, 3, 10**5)
    assert verify_density(dt, tr).passed


def test_budget_beyond_completion_leaves_no_trace(sparse3, dense_golden):
    # every requirement is settled by tick 34, so larger budgets run identically
    # and the only difference in the document is the echoed budget itself
    other = build_dense_subset(E.ALL_SET, sparse3, 3, 10**6 ^ (1 << 7))
    a, b = dense_golden.to_json(), other.to_json()
    assert a["scheduler"].pop("tick_budget") != b["scheduler"].pop("tick_budget")
    assert a == b
    assert verify_density(other, sparse3).passed
