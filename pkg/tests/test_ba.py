import pytest

from prm import enumeration as E
from prm import terms as T
from prm.ba import (TraceMismatch, approx_equiv, cone_reduction_witness, direct_meet_member,
                    elem_compl, elem_join, elem_meet, element, meet_zero_decide, one,
                    search_equiv_witness, split_from_join_reduction, zero)
from prm.setops import (FunctionSet, ReductionWitness, check_reduction, complement, IndexSet,
                        intersect, join, split_reduction_witness)
from prm.sparse import SparseTrace, build_sparse, verify_sparse
from prm.syntax import render

F = [0, 4, 11, 20, 34, 50]
MEMBERS = [4, 20, 34]
EVENS = E.encode(T.sgbar(T.REM2))


@pytest.fixture(scope="module")
def rich():
    tr = SparseTrace.synthetic_fixture(F, MEMBERS)
    assert verify_sparse(tr).passed
    return tr


def idx(points):
    # a finite set's index is astronomically large, so sets travel as terms
    return T.finite_set(points)


def test_finite_set_terms():
    for pts in ([], [3], [4, 11], [0, 5, 9]):
        assert [E.set_char(idx(pts), x) for x in range(14)] == [int(x in pts) for x in range(14)]
    assert E.encode(idx([])) == E.EMPTY_SET


@pytest.mark.parametrize("other", [idx([4, 5, 20]), E.ALL_SET, 3], ids=["term", "all", "index3"])
def test_algebra_operations_pointwise(rich, other):
    a, b = element(EVENS, rich), element(other, rich)
    for x in range(rich.prefix_end):
        am, bm, in_a = a.member(x), b.member(x), rich.a_member(x)
        assert elem_join(a, b).member(x) == max(am, bm)
        assert elem_meet(a, b).member(x) == min(am, bm)
        assert elem_compl(a).member(x) == in_a - am
    assert zero(rich).bits() == [0] * 50
    assert one(rich).bits() == rich.a_bits


def test_algebra_refuses_mixed_traces(rich, sparse3):
    with pytest.raises(TraceMismatch):
        elem_join(element(0, rich), element(0, sparse3))


def test_equivalence_evidence(rich):
    a = rich.a_oracle()
    # X_all and X_evens differ only at odd points, none of which is in A
    ev = approx_equiv(E.ALL_SET, EVENS, E.EMPTY_SET, a, 49)
    assert ev.verdict == "consistent"
    ev = approx_equiv(E.ALL_SET, E.EMPTY_SET, E.EMPTY_SET, a, 49)
    assert (ev.verdict, ev.at) == ("refuted", 4)
    ev = approx_equiv(E.ALL_SET, EVENS, E.EMPTY_SET, a, 60)
    assert (ev.verdict, ev.at) == ("inconclusive", 50)


def test_equivalence_search_falls_back_to_finite_difference(rich):
    ev = search_equiv_witness(E.ALL_SET, E.EMPTY_SET, rich.a_oracle(), 49)
    assert ev is not None and ev.verdict == "consistent"
    assert ev.witness_k == idx(MEMBERS)
    assert ev.to_json()["witness_k"] == {"term": render(idx(MEMBERS))}


# -- splitting a join -------------------------------------------------------


@pytest.mark.parametrize("x_index", [EVENS, idx([4]), idx([20, 34]), E.ALL_SET],
                         ids=["evens", "single", "pair", "all"])
def test_split_from_join_recovers_halves(rich, x_index):
    a = rich.a_oracle()
    xs = IndexSet(x_index)
    b, c = intersect(a, xs), intersect(a, complement(xs))
    g = split_reduction_witness(x_index)
    n = rich.prefix_end - 1
    assert check_reduction(g, a, join(b, c), n // 2).passed
    js = split_from_join_reduction(g, 1, 1)
    assert all(E.set_char(js.x_set, x) == E.set_char(x_index, x) for x in range(n + 1))
    ax = intersect(a, IndexSet(js.x_set))
    axc = intersect(a, complement(IndexSet(js.x_set)))
    assert check_reduction(js.to_b, ax, b, n).passed
    assert check_reduction(js.to_c, axc, c, n).passed


def test_split_from_join_needs_a_term():
    with pytest.raises(ValueError):
        split_from_join_reduction(ReductionWitness(None, "r", replay=lambda x: x), 1, 1)


# -- sets below both halves -------------------------------------------------

DS = {
    "evens": T.sgbar(T.REM2),
    "small": T.finite_set(range(5)),
    "single": T.singleton(3),
    "empty": T.Zero(1),
}

# (X points, a1, a2, p off D, q off D): a1 in A & X, a2 in A - X
PAIRS = [
    ([4], 4, 20, 1, 1),  # p image below q image
    ([20], 20, 4, 1, 1),  # p image above q image
    ([4, 11], 4, 34, 11, 0),  # off D both images are in range(f); A decides at f(0) and f(2)
]


@pytest.mark.parametrize("pair", PAIRS, ids=["p-low", "p-high", "in-range"])
@pytest.mark.parametrize("dname", sorted(DS))
def test_meet_zero_decide_agrees_with_membership(rich, pair, dname):
    xpts, a1, a2, pd, qd = pair
    x_index = idx(xpts)
    d = DS[dname]
    p = ReductionWitness(T.if_positive(d, T.const(a1), T.const(pd)), "p")
    q = ReductionWitness(T.if_positive(d, T.const(a2), T.const(qd)), "q")
    dset = FunctionSet(lambda x: E.set_char(d, x))
    ax = rich.intersect_index(x_index)
    axc = FunctionSet(lambda y: rich.a_member(y) and not E.set_char(x_index, y), 50)
    assert check_reduction(p, dset, ax, 12).passed
    assert check_reduction(q, dset, axc, 12).passed
    for x in range(13):
        got = meet_zero_decide(p, q, x_index, rich, x)
        assert got == direct_meet_member(p, x_index, rich, x) == dset.member(x)


def test_meet_zero_decide_on_natural_trace(sparse6):
    # A = {34}: D reduces to A & X through 34 and to A - X through nothing but
    # non-members, so D is empty and the procedure must say so
    p = ReductionWitness(T.const(34), "p")
    q = ReductionWitness(T.const(35), "q")
    assert all(meet_zero_decide(p, q, E.ALL_SET, sparse6, x) == 0 for x in range(10))


def test_meet_zero_timing_violation_is_reported():
    tight = SparseTrace.synthetic_fixture(F, MEMBERS, accounts=[4, 11, 20, 34, 50])
    loose = SparseTrace.synthetic_fixture(F, MEMBERS, accounts=[4, 30, 20, 34, 50])
    p = ReductionWitness(T.const(4), "p")
    q = ReductionWitness(T.const(11), "q")
    assert meet_zero_decide(p, q, idx([4]), tight, 0) == 1
    with pytest.raises(RuntimeError):
        meet_zero_decide(p, q, idx([4]), loose, 0)


# -- the cone reduction -----------------------------------------------------

CONES = [
    (E.ALL_SET, idx([4]), 4, 1),
    (EVENS, idx([20, 34]), 20, 0),
    (EVENS, EVENS, 34, 3),
    (idx([4, 20, 34, 7]), idx([34]), 34, 7),
]


@pytest.mark.parametrize("x_index, y_index, c, d", CONES, ids=["all", "evens", "equal", "finite"])
def test_cone_witness_reduces(rich, x_index, y_index, c, d):
    assert all(E.set_char(y_index, x) <= E.set_char(x_index, x) for x in range(50))
    w = cone_reduction_witness(x_index, y_index, c, d, rich)
    assert not w.pure
    v = check_reduction(w, rich.intersect_index(x_index), rich.intersect_index(y_index), 49)
    assert v.passed, v


def test_cone_witness_validates_its_constants(rich):
    with pytest.raises(ValueError):
        cone_reduction_witness(E.ALL_SET, idx([4]), 20, 1, rich)
    with pytest.raises(ValueError):
        cone_reduction_witness(E.ALL_SET, idx([4]), 4, 34, rich)
