"""Division, S-polynomials, Buchberger, elimination and membership."""

import random
from itertools import combinations

import pytest
import sympy
from hypothesis import given, strategies as st

from rees_kit.groebner import (Ideal, buchberger, eliminate, ideal_member, record_bases, reduce,
                               s_polynomial)
from rees_kit.rees import ReesProblem
from rees_kit.ring import Field, RingContext

from conftest import staircase_family

R = RingContext.rees(5)
P = R.parse


# -- division ------------------------------------------------------------

def test_reduce_reconstructs_dividend():
    f = P("x^2*w0 + x*y*w1 + y^2*w2 + z*w0")
    G = [P("x*w0 - y*w1"), P("y*w2 + z")]
    quotients, r = reduce(f, G)
    assert sum((q * g for q, g in zip(quotients, G)), R.zero()) + r == f
    leads = [g.leading_monomial() for g in G]
    for e in r.terms:
        assert not any(all(a <= b for a, b in zip(m, e)) for m in leads)


def test_reduce_rejects_zero_divisor():
    with pytest.raises(ValueError):
        reduce(P("x"), [R.zero()])
    with pytest.raises(ValueError):
        reduce(P("x"), [])


def test_s_polynomial_cancels_leads():
    f, g = P("x*y - w0"), P("y^2 - w1")
    s = s_polynomial(f, g)
    assert s == P("x*w1 - y*w0")
    assert s_polynomial(g, f) == -s


# -- the Case I staircase family ------------------------------------------

@pytest.fixture(scope="module")
def family6():
    p = ReesProblem(staircase_family(6))
    S = p.ring
    l = [None] + p.forms
    a = p.alpha
    eta = [None] + [a.g2 * a.alphas[i] - a.g1 * a.alphas[i + 1] for i in range(2)]
    return p, S, l, a, eta


def test_family_linear_forms(family6):
    p, S, l, a, _ = family6
    assert l[1] == S.parse("x*w0 + x*w1 + y*w2")
    assert l[2] == S.parse("x*w2 + y*w3")
    assert l[3] == S.parse("x*w3 + y*w0 + y*w4")
    assert l[4] == S.parse("x*w4 + y*w5 + z*w0")
    assert (a.g1, a.g2) == (S.w(4), S.w(5))


def test_family_quadrics_and_leads(family6):
    _, S, _, a, eta = family6
    assert a.cijs[(1, 3)] == S.parse("w0^2 + w0*w1 + w0*w4 + w1*w4 - w2*w3")
    assert a.cijs[(1, 3)].leading_monomial() == S.parse("w2*w3").leading_monomial()
    assert eta[1] == S.parse("w3*w4^2 - 2*w2*w4*w5 + w1*w5^2 + w0*w5^2")
    assert eta[2] == S.parse("w4^3 - 2*w3*w4*w5 + w2*w5^2 + w0*w4^2")
    assert eta[1].leading_monomial() == S.parse("w3*w4^2").leading_monomial()
    assert eta[2].leading_monomial() == S.parse("w4^3").leading_monomial()


def test_family_s_polynomial_with_z2w0(family6):
    _, S, l, _, _ = family6
    z2w0 = S.parse("z^2*w0^2")
    _, r = reduce(s_polynomial(l[4], z2w0), [l[4], l[3]])
    # Our S(f, g) = (m/lt f) f - (m/lt g) g; the remainder is the negation of h.
    h = S.parse("x^2*w4^2 - 2*x^2*w3*w5 - 2*x*y*w0*w5 + y^2*w5^2")
    assert r == -h
    assert h.leading_monomial() == S.parse("y^2*w5^2").leading_monomial()


def test_family_s_polynomial_with_eta(family6):
    _, S, l, _, eta = family6
    s = s_polynomial(l[2], eta[1])
    assert s == S.parse("x*w2*w4^2 - y*w0*w5^2 - y*w1*w5^2 + 2*y*w2*w4*w5")
    _, r = reduce(s, [l[1]])
    assert r == S.parse("x*w2*w4^2 - 2*x*w0*w4*w5 - 2*x*w1*w4*w5 - y*w0*w5^2 - y*w1*w5^2")
    assert r.leading_monomial() == S.parse("y*w1*w5^2").leading_monomial()


def test_family_basis_is_groebner(family6):
    p, S, l, a, eta = family6
    z2w0 = S.parse("z^2*w0^2")
    h1 = -reduce(s_polynomial(l[4], z2w0), [l[4], l[3]])[1]
    h2 = reduce(s_polynomial(l[2], eta[1]), [l[1]])[1]
    G1 = l[1:5] + list(a.cijs.values()) + [z2w0] + eta[1:] + [h1, h2]
    for f, g in combinations(G1, 2):
        assert reduce(s_polynomial(f, g), G1)[1].is_zero()
    target = Ideal(S, p.J.generators + [z2w0] + eta[1:])
    assert Ideal(S, G1).equals(target)
    assert all(g.leading_monomial()[0] == 0 for g in G1)
    # x regular modulo the ideal: the colon by x gives nothing new.
    from rees_kit.ideals import colon_element
    assert colon_element(target, S["x"]).equals(target)


# -- Buchberger ----------------------------------------------------------

def small_gens():
    return [P("x*w0 + y*w1"), P("y*w2 - z*w0"), P("x*y - w1^2")]


def test_buchberger_reduced_and_groebner():
    gb = buchberger(small_gens())
    assert gb.is_reduced() and gb.is_groebner()


def test_criteria_do_not_change_result():
    assert buchberger(small_gens()).elements == buchberger(small_gens(), criteria=False).elements


def test_buchberger_lex_and_prime_field():
    gb = buchberger(small_gens(), "lex")
    assert gb.is_groebner()
    GF = RingContext.rees(5, Field(32003))
    gens = [GF.parse(str(g)) for g in small_gens()]
    assert buchberger(gens).is_groebner()


def _to_sympy(f, syms):
    return sympy.sympify(str(f).replace("^", "**"), locals=syms)


@pytest.mark.parametrize("order", ["degrevlex", "lex"])
def test_matches_sympy(order, p71):
    S = p71.ring
    syms = {name: sympy.Symbol(name) for name in S.names}
    gens = p71.forms[:3]
    ours = buchberger(gens, order)
    # Our variables rank x < y < z < w0 < ...; sympy ranks its first generator highest.
    gens_order = [syms[name] for name in reversed(S.names)]
    ref = sympy.groebner([_to_sympy(g, syms) for g in gens], *gens_order,
                         order="grevlex" if order == "degrevlex" else "lex")
    mine = {sympy.expand(_to_sympy(g, syms)) for g in ours.elements}
    theirs = {sympy.expand(g / sympy.Poly(g, *gens_order).LC(order=ref.order))
              for g in ref.exprs}
    assert mine == theirs


@given(st.permutations(range(4)), st.lists(st.integers(1, 5), min_size=4, max_size=4))
def test_shuffle_and_rescale_invariance(perm, scales):
    gens = small_gens() + [P("w3*x - w4*y")]
    moved = [gens[i].scale(scales[i]) for i in perm]
    assert buchberger(moved).elements == buchberger(gens).elements


@given(st.lists(st.tuples(st.tuples(*[st.integers(0, 2)] * 8), st.integers(-3, 3)), max_size=5))
def test_normal_form_idempotent(terms):
    gb = buchberger(small_gens())
    f = R.zero()
    for e, c in terms:
        f = f + R.monomial(e, c)
    nf = gb.normal_form(f)
    assert gb.normal_form(nf) == nf
    assert gb.contains(f - nf)


def test_unit_ideal():
    assert buchberger([P("x"), P("x + 1")]).is_unit()


# -- elimination and membership -------------------------------------------

def test_eliminate_examples():
    ring = RingContext(("t", "x", "y"), Field(0), "degrevlex")
    t, x, y = ring["t"], ring["x"], ring["y"]
    out = eliminate(Ideal(ring, [t * x, (ring.one() - t) * x]), ["t"])
    assert out.equals(Ideal(ring, [x]))
    out = eliminate(Ideal(ring, [x - t, y - t * t]), ["t"])
    assert out.equals(Ideal(ring, [y - x * x]))
    out = eliminate(Ideal(ring, [t * x, (ring.one() - t) * y]), ["t"])
    assert out.equals(Ideal(ring, [x * y]))


def test_membership(p71):
    U = p71.U
    assert ideal_member(p71.forms[-1], U.power(2))
    assert not ideal_member(p71.forms[0], U.power(2))
    assert all(ideal_member(f, p71.J) for f in p71.forms[:-1])


def test_equality_witness():
    a, b = Ideal(R, [P("x"), P("y")]), Ideal(R, [P("x")])
    assert not a.equals(b)
    assert a.witness_difference(b) == P("y")
    assert a.witness_difference(Ideal(R, [P("y"), P("x + y")])) is None


def test_gb_order_cache_is_per_order():
    I = Ideal(R, small_gens())
    g1 = I.gb()
    g2 = I.gb("lex")
    assert I.gb() is g1 and g1.order != g2.order
    rng = random.Random(1)
    assert all(I.contains(rng.choice(I.generators) * P("w3")) for _ in range(3))


def test_nested_recorders():
    with record_bases() as outer:
        with record_bases() as inner:
            buchberger(small_gens(), R.order, ring=R)
        assert inner == outer and len(inner) == 1
        buchberger([P("x")], R.order, ring=R)
    assert len(outer) == 2 and len(inner) == 1
