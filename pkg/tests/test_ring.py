"""Polynomial arithmetic, orders, bidegrees, parsing and minors."""

import json
from itertools import combinations
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from rees_kit.ideals import minor_ideal
from rees_kit.groebner import Ideal
from rees_kit.ring import (Bidegree, Field, MonomialOrder, NotBihomogeneous, ParseError,
                           PolyMatrix, RingContext, RingError, bidegree_of, determinant,
                           matrix_minors, parse_poly)

from conftest import matrix

R = RingContext.rees(5)
GF = RingContext.rees(5, Field(32003))


def polys(ring, max_terms=4, max_exp=2, nvars=5):
    """Small random polynomials in the first ``nvars`` variables."""
    mono = st.tuples(*[st.integers(0, max_exp)] * nvars)
    coeff = st.integers(-5, 5).filter(bool)
    pad = (0,) * (ring.nvars - nvars)

    def build(terms):
        f = ring.zero()
        for e, c in terms:
            f = f + ring.monomial(e + pad, c)
        return f

    return st.lists(st.tuples(mono, coeff), max_size=max_terms).map(build)


# -- parsing -------------------------------------------------------------

def test_parse_paper_generator():
    f = parse_poly("x*w2 + (-x-y)*w3 + y*w4", R)
    x, y, w = R["x"], R["y"], R.w
    assert f == x * w(2) - x * w(3) - y * w(3) + y * w(4)


@pytest.mark.parametrize("text", ["0", "x^2 - x^2", "  (x+y)*0 "])
def test_parse_zero(text):
    f = parse_poly(text, R)
    assert f.is_zero() and f.terms == {}


def test_parse_rationals_and_powers():
    f = parse_poly("3/2*x**2 - y/4 + 2^3", R)
    assert f.coefficient((2, 0, 0, 0, 0, 0, 0, 0)) == Fraction(3, 2)
    assert f.coefficient((0,) * 8) == 8


def test_parse_errors():
    with pytest.raises(ParseError):
        parse_poly("x + q", R)
    with pytest.raises(ParseError):
        parse_poly("x / y", R)
    with pytest.raises(ParseError):
        parse_poly("x +", R)


def test_parse_prime_field_reduces():
    f = parse_poly("32004*x + 1/2*y", GF)
    assert f == GF["x"] + GF["y"].scale(16002)


@given(polys(R))
def test_print_parse_roundtrip(f):
    assert parse_poly(str(f), R) == f


# -- arithmetic ----------------------------------------------------------

def test_arith_examples():
    x, y, z, w = R["x"], R["y"], R["z"], R.w
    assert x * w(0) + y * w(1) == parse_poly("x*w0 + y*w1", R)
    assert (x + y) * (x - y) == x ** 2 - y ** 2
    assert (z * w(0)) * (z * w(0)) == parse_poly("z^2*w0^2", R)
    assert (x + 1).scale(0).is_zero()


@given(polys(R), polys(R), polys(R))
def test_ring_axioms(f, g, h):
    assert (f + g) + h == f + (g + h)
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h
    assert f * g == g * f
    assert f - f == R.zero()


@given(polys(GF), polys(GF))
def test_ring_axioms_prime_field(f, g):
    assert f * g == g * f
    assert (f + g) - g == f


@given(polys(R).filter(bool), polys(R).filter(bool), st.sampled_from(["degrevlex", "lex"]))
def test_leading_term_multiplicative(f, g, kind):
    order = MonomialOrder(kind, R.nvars)
    (ef, cf), (eg, cg) = f.leading_term(order), g.leading_term(order)
    e, c = (f * g).leading_term(order)
    assert e == tuple(a + b for a, b in zip(ef, eg))
    assert c == cf * cg


@given(st.tuples(*[st.integers(0, 3)] * 8), st.tuples(*[st.integers(0, 3)] * 8),
       st.tuples(*[st.integers(0, 2)] * 8))
def test_order_is_multiplicative(a, b, c):
    for kind in ("degrevlex", "lex"):
        o = MonomialOrder(kind, 8)
        if o.encode(a) < o.encode(b):
            ac = tuple(map(sum, zip(a, c)))
            bc = tuple(map(sum, zip(b, c)))
            assert o.encode(ac) < o.encode(bc)


def test_variable_ranking():
    names = R.names
    assert names == ("x", "y", "z", "w0", "w1", "w2", "w3", "w4")
    o = R.order
    e = [tuple(int(i == k) for i in range(8)) for k in range(8)]
    assert all(o.encode(e[k]) < o.encode(e[k + 1]) for k in range(7))


# -- leading terms used by the Case I argument ---------------------------

def test_leading_terms_of_linear_forms():
    n = 7
    S = RingContext.rees(n)
    x, y, z, w = S["x"], S["y"], S["z"], S.w
    l_last = x * w(n - 2) + y * w(n - 1) + z * w(0)
    assert l_last.leading_term()[0] == (z * w(0)).leading_term()[0]
    for i in range(2, n - 3):
        li = x * w(i) + y * w(i + 1)
        assert li.leading_monomial() == (y * w(i + 1)).leading_monomial()
    m = x ** 2 * w(3)
    assert m.leading_term() == (m.leading_monomial(), 1)


# -- bidegrees -----------------------------------------------------------

def test_bidegrees(p71):
    z, w0 = R["z"], R.w(0)
    assert bidegree_of(z * w0) == Bidegree(1, 1)
    assert tuple(bidegree_of(p71.forms[-1])) == (2, 1)
    with pytest.raises(NotBihomogeneous):
        bidegree_of(R["x"] + w0)


# -- fields --------------------------------------------------------------

def test_field_parse_and_guards():
    assert Field.parse("q") == Field(0)
    assert Field.parse("gf:7").characteristic == 7
    assert str(Field.parse("GF(11)")) == "GF(11)"
    with pytest.raises(RingError):
        Field(9)
    with pytest.raises(RingError):
        RingContext.rees(5, Field(5))


def test_context_mismatch():
    with pytest.raises(RingError):
        R["x"] + RingContext.rees(6)["x"]


# -- matrices and minors -------------------------------------------------

def test_matrix_json_roundtrip(ex71):
    phi = ex71.phi
    data = json.loads(phi.to_json())
    assert PolyMatrix.from_dict(data, phi.ring) == phi
    with pytest.raises(RingError):
        PolyMatrix(2, 2, (R.one(),), R)


def test_minor_conventions():
    I2 = PolyMatrix.from_rows(R, [[1, 0], [0, 1]])
    assert matrix_minors(I2, 0) == [R.one()]
    assert matrix_minors(I2, 2) == [R.one()]
    with pytest.raises(RingError):
        matrix_minors(I2, 3)


def test_I3_of_case_three_example(p73, ex73):
    expected = [parse_poly(s, R) for s in ex73.displayed["I3"]]
    got = [d for d in matrix_minors(p73.B.matrix, 3) if d]
    assert len(got) == 3
    monics = {g.monic() for g in got}
    assert monics == {e.monic() for e in expected}


def _swap_rows(M, i, j):
    rows = M.to_rows()
    rows[i], rows[j] = rows[j], rows[i]
    return PolyMatrix.from_rows(M.ring, rows)


@given(st.integers(0, 4), st.integers(0, 4))
def test_minors_alternate_under_row_swap(i, j):
    M = matrix(R, [["x", "y", "z"], ["w0", "x*y", "1"], ["y", "0", "w1"], ["z", "w2", "x"],
                   ["1", "w3", "y"]])
    if i == j:
        return
    sw = _swap_rows(M, i, j)
    for rows in combinations(range(5), 2):
        if i in rows and j in rows:
            for cols in combinations(range(3), 2):
                assert determinant(sw.submatrix(rows, cols)) == -determinant(M.submatrix(rows, cols))


invertible = st.lists(st.integers(-2, 2), min_size=9, max_size=9).map(
    lambda v: [v[0:3], v[3:6], v[6:9]]).filter(
    lambda m: determinant(PolyMatrix.from_rows(R, m)) != R.zero())


@given(invertible, invertible)
def test_minor_ideals_invariant_under_scalar_equivalence(U, V):
    M = matrix(R, [["x", "y", "z"], ["y", "x", "0"], ["0", "z", "x+y"]])
    N = M.scalar_transform(left=U, right=V)
    for k in (1, 2, 3):
        assert minor_ideal(M, k).equals(minor_ideal(N, k))


def test_substitute():
    f = parse_poly("x*w0 + y*w1", R)
    g = f.substitute({"w0": R.w(1), "w1": 2})
    assert g == parse_poly("x*w1 + 2*y", R)


def test_ideal_json(p71):
    text = p71.J.to_json()
    back = Ideal.from_json(text, p71.ring)
    assert back.equals(p71.J)
