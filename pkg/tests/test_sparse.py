import copy

import pytest

from prm import enumeration as E
from prm.setops import GraphOracle, OutOfPrefix, graph_inverse
from prm.sparse import (RESOURCE_CAP_ENV, SparseTrace, StageRecord, build_sparse,
                        resource_cap, verify_sparse)

# golden stage records of the first three stages, recomputed by hand from the
# frame counts of S, C(S;S) and P(1,1)
GOLDEN_F = [0, 4, 11, 20]


def test_golden_stage_three(sparse3):
    assert sparse3.f_table == GOLDEN_F
    assert sparse3.members() == []
    r = sparse3.records[2]
    assert (r.fs, r.values, r.steps, r.z, r.work, r.N) == (11, (12, 13, 11), (1, 3, 1), 14, 9, 20)
    assert r.declared == (12, 20) and r.a_bit == 0


def test_first_stage_by_hand(sparse3):
    # p_0 = S at 0: value 1 in 1 frame; W = 1 + 2; N_raw = 1 + 3
    r = sparse3.records[0]
    assert (r.values, r.steps, r.z, r.work, r.n_raw, r.N) == ((1,), (1,), 2, 3, 4, 4)


def test_longer_natural_prefix(sparse6):
    assert sparse6.f_table == [0, 4, 11, 20, 34, 50, 72]
    assert sparse6.members() == [34]


def test_prefixes_agree(sparse3, sparse6):
    assert sparse6.f_table[:4] == sparse3.f_table
    assert sparse6.a_bits[:20] == sparse3.a_bits
    assert sparse6.records[:3] == sparse3.records


def test_build_is_deterministic():
    a, b = build_sparse(4), build_sparse(4)
    assert a.to_json() == b.to_json()


def test_verify_natural(sparse6):
    rep = verify_sparse(sparse6)
    assert rep.passed, rep.summary()


def test_diagonal_against_enumeration(sparse6):
    for s in range(6):
        assert sparse6.a_member(sparse6.f(s)) != E.set_char(s, sparse6.f(s))


def test_graph_inverse_matches_scan(sparse6):
    g = sparse6.graph()
    for y in range(sparse6.prefix_end + 1):
        scan = next((k for k, v in enumerate(sparse6.f_table) if v == y), None)
        assert graph_inverse(g, y) == scan == sparse6.range_index(y)


def test_floor_index(sparse3):
    assert [sparse3.floor_index(x) for x in (0, 3, 4, 10, 11, 19)] == [0, 0, 1, 1, 2, 2]
    with pytest.raises(OutOfPrefix):
        sparse3.floor_index(20)


def test_a_outside_prefix(sparse3):
    with pytest.raises(OutOfPrefix):
        sparse3.a_member(20)
    with pytest.raises(OutOfPrefix):
        sparse3.range_index(21)


def test_a_cost_model(sparse3):
    assert sparse3.a_cost(4) == sparse3.records[1].N
    assert sparse3.a_cost(5) == 1
    assert sparse3.a_member_bounded(11, 19) is None
    assert sparse3.a_member_bounded(11, 20) == 0


def test_json_round_trip(sparse6):
    back = SparseTrace.from_json(sparse6.to_json())
    assert back.to_json() == sparse6.to_json()
    assert back.records == sparse6.records


def test_cap_truncates():
    # stage 4 needs 9 frames (frame sums per stage: 1, 4, 5, 9, ...)
    tr = build_sparse(6, cap=8)
    assert tr.truncated == {"stage": 4, "reason": "resource cap", "cap": 8, "index": 3}
    assert tr.f_table == GOLDEN_F
    assert verify_sparse(tr).passed


def test_cap_from_environment(monkeypatch):
    monkeypatch.setenv(RESOURCE_CAP_ENV, "123")
    assert resource_cap() == 123
    assert resource_cap(5) == 5
    monkeypatch.setenv(RESOURCE_CAP_ENV, "0")
    with pytest.raises(ValueError):
        resource_cap()


def test_synthetic_fixture_checks():
    fx = SparseTrace.synthetic_fixture([0, 4, 11, 20, 34, 50], [4, 20, 34])
    assert verify_sparse(fx).passed
    assert fx.a_cost(20) == 34


def test_synthetic_fixture_rejects_bad_accounts():
    fx = SparseTrace.synthetic_fixture([0, 4, 11, 20], [4], accounts=[4, 12, 20])
    rep = verify_sparse(fx)
    assert not rep.get("account <= f(s+1)").ok


def test_member_off_range_is_caught():
    fx = SparseTrace.synthetic_fixture([0, 4, 11, 20], [5])
    assert not verify_sparse(fx).get("A inside range(f)").ok


def test_slow_growth_breaks_star_star():
    # f(1) = 1 is not above p_0(f(0)) = S(0) = 1
    fx = SparseTrace.synthetic_fixture([0, 1, 11, 20], [])
    rep = verify_sparse(fx)
    assert not rep.get("f(t) > p_j(f(t-1)) for j < t").ok


def test_tampered_record_fails_replay(sparse3):
    doc = sparse3.to_json()
    doc["stage_records"][1]["work"] += 1
    rep = verify_sparse(SparseTrace.from_json(doc))
    assert not rep.passed


def test_flipped_diagonal_bit_fails(sparse3):
    bad = copy.deepcopy(sparse3)
    bad.a_bits[11] = 1
    rep = verify_sparse(bad)
    assert not rep.get("diagonal A(f(s)) != X_s(f(s))").ok
