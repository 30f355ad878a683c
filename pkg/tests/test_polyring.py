import random

import pytest
from hypothesis import given, strategies as st
from sympy import Poly, symbols

from ulrichfold.errors import PolySyntaxError, RingMismatch, UnknownVariable
from ulrichfold.polyring import (GREVLEX, Ideal, PolyRing, RingMap, elimination, format_ideal_file,
                                 parse_ideal_file, parse_poly, print_poly, random_form)

P = 32003
R = PolyRing(3, p=P)
xs = symbols("x0 x1 x2")


def to_sympy(f):
    return Poly(sum(c * xs[0] ** e[0] * xs[1] ** e[1] * xs[2] ** e[2] for e, c in f.term_list()) or 0,
                *xs, modulus=P)


@st.composite
def polys(draw, ring=R, max_terms=5, max_deg=4):
    terms = draw(st.lists(st.tuples(st.tuples(*[st.integers(0, max_deg)] * ring.n),
                                    st.integers(0, ring.p - 1)), max_size=max_terms))
    return ring.from_terms(terms)


@given(polys(), polys())
def test_product_matches_sympy(f, g):
    assert to_sympy(f * g) == to_sympy(f) * to_sympy(g)


@given(polys(), polys(), polys())
def test_ring_axioms(f, g, h):
    assert (f + g) * h == f * h + g * h
    assert f * g == g * f
    assert (f - f).is_zero()
    assert f * R.one() == f


@given(polys())
def test_print_parse_roundtrip(f):
    assert parse_poly(print_poly(f), R) == f


@given(polys(), polys(), st.tuples(*[st.integers(0, P - 1)] * 3))
def test_evaluation_is_a_homomorphism(f, g, pt):
    assert (f * g).evaluate(pt) == f.evaluate(pt) * g.evaluate(pt) % P
    assert (f + g).evaluate(pt) == (f.evaluate(pt) + g.evaluate(pt)) % P


def test_ring_map_and_composition():
    S = PolyRing(var_names=["s", "t"], p=P)
    s, t = S.gens()
    phi = RingMap(R, S, [s * s, s * t, t * t])
    x0, x1, x2 = R.gens()
    assert phi(x0 * x2 - x1 * x1).is_zero()
    assert phi.degree == 2
    psi = RingMap(S, S, [t, s])
    assert psi.compose(phi)(x0) == t * t


def test_map_errors():
    S = PolyRing(2, p=7)
    with pytest.raises(RingMismatch):
        RingMap(R, S, S.gens() + [S.one()])
    with pytest.raises(ValueError):
        RingMap(R, R, R.gens()[:2])


def test_parse_errors_carry_positions():
    with pytest.raises(PolySyntaxError) as e:
        parse_poly("x0 + * x1", R)
    assert (e.value.line, e.value.column) == (1, 6)
    with pytest.raises(UnknownVariable):
        parse_poly("x0 + y", R)
    with pytest.raises(PolySyntaxError):
        parse_poly("", R)


def test_ideal_file_roundtrip():
    x0, x1, x2 = R.gens()
    I = Ideal(R, [x0 * x1 - x2 * x2, x0 ** 3 + 5])
    J = parse_ideal_file(format_ideal_file(I, comment="two generators"))
    assert J.ring == R and J.gens == I.gens


def test_ideal_file_error_line():
    text = "ring p=7 vars=a,b\na+b\na+*b\n"
    with pytest.raises(PolySyntaxError) as e:
        parse_ideal_file(text)
    assert e.value.line == 3


def test_grevlex_leading_term():
    f = parse_poly("x0^2*x2 + x1^3 + x0*x1", R)
    assert f.leading_exponents() == (0, 3, 0)
    E = R.with_order(elimination(1))
    assert E.convert(f).leading_exponents() == (2, 0, 1)


def test_monomial_counts():
    for d in range(6):
        assert len(R.monomials(d)) == R.num_monomials(d) == (d + 1) * (d + 2) // 2


@given(st.integers(0, 10**6))
def test_random_form_homogeneous(seed):
    f = random_form(R, 3, random.Random(seed))
    assert f.is_zero() or (f.is_homogeneous() and f.degree == 3)


def test_diff_and_homogeneous_part():
    f = parse_poly("x0^3 + 2*x0*x1 + 7", R)
    assert f.diff(0) == parse_poly("3*x0^2 + 2*x1", R)
    assert f.homogeneous_part(2) == parse_poly("2*x0*x1", R)
    assert f.constant_coeff() == 7
    assert not f.is_homogeneous()


def test_bad_rings():
    with pytest.raises(ValueError):
        PolyRing(var_names=["a", "a"])
    with pytest.raises(ValueError):
        PolyRing()
    assert PolyRing(3, p=P) == R and R.order == GREVLEX
