"""Colon, saturation, intersection, radical membership, dimension, Fitting ideals."""

import pytest
from hypothesis import given, strategies as st

from rees_kit.groebner import Ideal
from rees_kit.ideals import (PreconditionError, colon, colon_element, dimension, fitting_ideal,
                             gs_check, gs_profile, height, intersect, min_prime_check,
                             minor_ideal, radical_member, saturate)
from rees_kit.ring import Field, RingContext

from conftest import matrix

T = RingContext(("x", "y", "z"), Field(0), "degrevlex")
R = RingContext.rees(5)


def I(ring, *gens):
    return Ideal(ring, [ring.parse(g) for g in gens])


# -- colon ---------------------------------------------------------------

def test_colon_basic():
    assert colon(I(T, "x*y"), I(T, "x")).equals(I(T, "y"))
    assert colon(I(T, "x*y", "x*z"), I(T, "y", "z")).equals(I(T, "x"))
    assert colon(I(T, "x^2", "y"), I(T, "1")).equals(I(T, "x^2", "y"))
    assert colon(I(T, "x"), I(T, "x")).is_unit()
    with pytest.raises(ValueError):
        colon_element(I(T, "x"), T.zero())


def test_colon_recovers_quadric(p71):
    S = p71.ring
    base = Ideal(S, p71.forms[:-1])
    J = colon(base, p71.U)
    quadric = S.parse("w2^2 - w1*w3 - w0*w3 - w0*w1 - w0^2")
    assert J.contains(quadric) and not base.contains(quadric)
    assert J.equals(p71.J)


monomials = st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 3)).filter(any)
mono_ideals = st.lists(monomials, min_size=1, max_size=4).map(
    lambda es: Ideal(T, [T.monomial(e) for e in es]))


@given(mono_ideals, mono_ideals)
def test_colon_contract(A, B):
    Q = colon(A, B)
    assert A.issubset(Q)
    assert (Q * B).issubset(A)


@given(mono_ideals, mono_ideals)
def test_saturation_fixed_point(A, B):
    sat = saturate(A, B)
    assert colon(sat.ideal, B).equals(sat.ideal)
    assert A.issubset(sat.ideal)


@given(mono_ideals, mono_ideals)
def test_intersection_height(A, B):
    meet = intersect(A, B)
    assert meet.issubset(A) and meet.issubset(B)
    assert (A * B).issubset(meet)
    if not A.is_unit() and not B.is_unit():
        assert height(meet) == min(height(A), height(B))


# -- saturation ----------------------------------------------------------

def test_saturation_exponents():
    sat = saturate(I(T, "x^2"), I(T, "x"))
    assert sat.ideal.is_unit() and sat.exponent == 2
    sat = saturate(I(T, "x*y^3"), I(T, "y"))
    assert sat.ideal.equals(I(T, "x")) and sat.exponent == 3
    assert saturate(I(T, "x"), I(T, "y")).exponent == 0


def test_saturation_of_examples(p71, p73):
    S = p73.ring
    xy = I(S, "x", "y")
    sat73 = saturate(p73.L, xy)
    assert sat73.exponent == 1
    sat71 = saturate(p71.L, I(p71.ring, "x", "y"))
    assert sat71.exponent >= 2
    assert saturate(p71.L, p71.U).ideal.equals(sat71.ideal)


# -- intersection and radical --------------------------------------------

def test_intersect_examples():
    assert intersect(I(T, "x"), I(T, "y")).equals(I(T, "x*y"))
    assert intersect(I(T, "x", "y"), I(T, "x", "z")).equals(I(T, "x", "y*z"))
    assert intersect(I(T, "1"), I(T, "x^2")).equals(I(T, "x^2"))
    assert intersect(I(T, "x"), Ideal(T)).is_zero()


def test_radical_member():
    assert radical_member(T.parse("x"), I(T, "x^3"))
    assert radical_member(T.parse("x + y"), I(T, "x^2", "y^5"))
    assert not radical_member(T.parse("z"), I(T, "x^2", "y"))
    assert radical_member(T.zero(), I(T, "x"))


# -- dimension -----------------------------------------------------------

def test_dimension_examples():
    assert dimension(Ideal(T)) == 3
    assert dimension(I(T, "x", "y*z")) == 1
    assert height(I(T, "x*y", "x*z")) == 1
    with pytest.raises(ValueError):
        dimension(I(T, "1"))


def test_heights_of_example(p71):
    assert height(p71.J) == 3
    assert height(minor_ideal(p71.phi, 3)) == 2


# -- Fitting ideals and G_s ----------------------------------------------

def test_fitting_convention(p71):
    phi = p71.phi
    n = phi.rows
    assert fitting_ideal(phi, 1).equals(minor_ideal(phi, n - 1))
    assert fitting_ideal(phi, n).is_unit()
    assert fitting_ideal(phi, 0).is_zero()
    with pytest.raises(ValueError):
        fitting_ideal(phi, n + 1)


def test_minor_ideal_conventions(p71):
    assert minor_ideal(p71.phi, 0).is_unit()
    assert minor_ideal(p71.phi, 9).is_zero()


GENERIC = [["x", "y", "z", "x+y"], ["y", "z", "x", "y-z"], ["z", "x+y", "y", "x"],
           ["x-z", "x", "z", "y"], ["y", "x+2*z", "x-y", "z"]]


def test_gs_generic_linear():
    M = matrix(R, GENERIC)
    assert height(minor_ideal(M, 3)) == 3
    assert gs_check(M, 2) and gs_check(M, 3)
    assert [r["i"] for r in gs_profile(M, 3)] == [1, 2]


@pytest.mark.parametrize("name", ["ex71", "ex72", "ex73"])
def test_gs_calibration(name, request):
    phi = request.getfixturevalue(name).phi
    assert gs_check(phi, 2) and not gs_check(phi, 3)
    assert height(minor_ideal(phi, 3)) == 2
    assert min_prime_check(phi)


def test_gs_preconditions():
    with pytest.raises(PreconditionError):
        gs_check(matrix(R, [["x", "y"], ["y", "x"]]), 3)


def test_min_prime_check(ex71):
    assert min_prime_check(ex71.phi)
    # z^3 is a 3-minor, so (x, y) cannot contain I_3.
    diag = matrix(R, [["z", "0", "0", "0"], ["0", "z", "0", "0"], ["0", "0", "z", "0"],
                      ["x", "y", "0", "z"], ["0", "0", "y", "x"]])
    assert not min_prime_check(diag)
    assert not min_prime_check(matrix(R, GENERIC))
