import pytest
from hypothesis import given, settings

from prm import terms as T
from prm.syntax import ParseError, parse, render
from prm.terms import ArityError, Comp, PrimRec, Proj, Succ, Zero, arity

from strategies import terms


def test_arity_of_basis_and_schemas():
    assert arity(Succ()) == 1
    assert arity(PrimRec(Proj(1, 1), Comp(Succ(), (Proj(3, 3),)))) == 2
    assert arity(Comp(Succ(), (Succ(),))) == 1
    assert arity(Zero(4)) == 4


@pytest.mark.parametrize("bad, path", [
    (Proj(3, 2), ()),
    (Zero(0), ()),
    (Comp(Succ(), (Succ(), Succ())), ()),
    (Comp(Proj(1, 2), (Succ(), Zero(2))), ()),
    (Comp(Succ(), (Proj(0, 1),)), (1,)),
    (PrimRec(Zero(1), Proj(1, 2)), ()),
    (PrimRec(Zero(1), Comp(Succ(), (Proj(4, 3),))), (1, 1)),
])
def test_malformed_terms_report_the_offending_path(bad, path):
    with pytest.raises(ArityError) as info:
        arity(bad)
    assert info.value.path == path


def test_parse_grammar_examples():
    assert parse("C(S; S)") == Comp(Succ(), (Succ(),))
    assert parse("  R( P(1,1) ;C(S;P(3,3)) ) ") == T.ADD
    assert render(T.ADD) == "R(P(1,1);C(S;P(3,3)))"


def test_parse_rejects_out_of_range_projection():
    with pytest.raises(ArityError):
        parse("P(3,2)")


@pytest.mark.parametrize("text, line, col", [
    ("C(S;S", 1, 6),
    ("Q", 1, 1),
    ("C(S;\n  X)", 2, 3),
    ("S S", 1, 3),
    ("P(1,)", 1, 5),
])
def test_parse_errors_carry_line_and_column(text, line, col):
    with pytest.raises(ParseError) as info:
        parse(text)
    assert (info.value.line, info.value.column) == (line, col)


@given(terms(1, 4))
@settings(max_examples=200)
def test_print_then_parse_is_identity(t):
    assert parse(render(t)) == t


@given(terms(2, 3))
def test_canonical_rendering_is_idempotent(t):
    spaced = render(t).replace(",", " , ").replace(";", " ;\n ")
    once = render(parse(spaced))
    assert once == render(parse(once)) == render(t)


def test_size_and_depth():
    assert T.size(Succ()) == 1
    assert T.size(T.ADD) == 5  # R, P, C, S, P
    assert T.depth(T.ADD) == 3


def test_constants_have_logarithmic_depth():
    assert T.depth(T.const(1 << 20)) < 4 * 21
