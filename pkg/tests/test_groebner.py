import random

import pytest
from hypothesis import given, settings, strategies as st
from sympy import GF
from sympy.polys.matrices import DomainMatrix

from ulrichfold.errors import RingMismatch
from ulrichfold.groebner import (eliminate, generates, groebner_basis, ideal_quotient, intersect,
                                 kernel_of_map, minimal_generators, normal_form, saturate_irrelevant,
                                 saturation, spair_fixpoint)
from ulrichfold.polyring import Ideal, PolyRing, RingMap, parse_poly, random_form

P = 32003


def rand_ideal(seed, n=4, degs=(2, 2, 3), p=P):
    R = PolyRing(n, p=p)
    rng = random.Random(f"ideal:{seed}")
    return Ideal(R, [random_form(R, d, rng) for d in degs])


def macaulay_oracle(I, f):
    """(in_span, standard-monomial count) computed with sympy over GF(p)."""
    R, d = I.ring, f.degree
    mons = R.monomials(d)
    col = {m: i for i, m in enumerate(mons)}
    rows = []
    for g in I.gens:
        for m in R.monomials(d - g.degree):
            h = g.mul_term(m, 1)
            row = [0] * len(mons)
            for k, c in h.terms.items():
                row[col[k]] = c
            rows.append(row)
    K = GF(R.p)
    M = DomainMatrix([[K(c) for c in r] for r in rows], (len(rows), len(mons)), K) if rows else None
    rk = M.rank() if M is not None else 0
    return M, rk, mons, col


@given(st.integers(0, 10**6))
@settings(max_examples=15)
def test_buchberger_fixpoint(seed):
    G = groebner_basis(rand_ideal(seed, n=3, degs=(2, 2, 2)))
    assert spair_fixpoint(G)


def test_normal_form_against_macaulay_matrix():
    rng = random.Random("nf")
    K = GF(P)
    for inst in range(100):
        I = rand_ideal(inst, n=3, degs=(2, 2))
        G = groebner_basis(I)
        d = rng.choice([2, 3, 4])
        f = random_form(I.ring, d, rng)
        r = normal_form(f, G)
        M, rk, mons, col = macaulay_oracle(I, f)
        # f - NF(f) lies in I_d
        diff = f - r
        vec = [0] * len(mons)
        for k, c in diff.terms.items():
            vec[col[k]] = c
        aug = DomainMatrix(M.to_list() + [[K(c) for c in vec]], (M.shape[0] + 1, len(mons)), K)
        assert aug.rank() == rk
        # NF(f) is supported on standard monomials, and those count dim (R/I)_d
        leads = G.leading_monomials()
        R = I.ring
        std = [m for m in mons if not any(R.divides(L, m) for L in leads)]
        assert all(k in std for k in r.terms)
        assert len(std) == len(mons) - rk


def test_membership_and_generation():
    I = rand_ideal(5)
    G = groebner_basis(I)
    assert all(G.contains(g) for g in I.gens)
    assert generates(G, I)
    f = I.gens[0] * I.gens[1] + I.gens[2]
    assert normal_form(f, G).is_zero()


def test_elimination_of_parameter():
    R = PolyRing(var_names=["t", "a", "b"], p=P)
    I = Ideal(R, [parse_poly("a - t^2", R), parse_poly("b - t^3", R)])
    J = eliminate(I, 1)
    assert len(J.gens) == 1
    g = J.gens[0]
    assert g == parse_poly("a^3 - b^2", g.ring) or g == parse_poly("b^2 - a^3", g.ring)


def test_intersection_quotient_saturation():
    R = PolyRing(3, p=P)
    x0, x1, x2 = R.gens()
    I = intersect(Ideal(R, [x0]), Ideal(R, [x1]))
    assert groebner_basis(I).same_ideal(groebner_basis(Ideal(R, [x0 * x1])))
    Q = ideal_quotient(Ideal(R, [x0 * x1]), Ideal(R, [x1]))
    assert groebner_basis(Q).same_ideal(groebner_basis(Ideal(R, [x0])))
    J = Ideal(R, [x0 * x0, x0 * x1, x0 * x2])
    S = saturate_irrelevant(J)
    assert groebner_basis(S).same_ideal(groebner_basis(Ideal(R, [x0])))
    S2 = saturation(J, Ideal(R, R.gens()))
    assert groebner_basis(S2).same_ideal(groebner_basis(S))
    with pytest.raises(RingMismatch):
        intersect(I, Ideal(PolyRing(2, p=P), []))


def test_kernel_routes_agree_on_twisted_cubic():
    S = PolyRing(var_names=["s", "t"], p=P)
    s, t = S.gens()
    R = PolyRing(4, p=P)
    phi = RingMap(R, S, [s ** 3, s * s * t, s * t * t, t ** 3])
    A = kernel_of_map(phi)
    B = kernel_of_map(phi, method="linear", max_degree=3)
    assert len(A.gens) == len(B.gens) == 3
    assert groebner_basis(A).same_ideal(groebner_basis(B))


@given(st.integers(0, 10**6))
@settings(max_examples=10)
def test_kernel_routes_agree_on_random_plane_maps(seed):
    rng = random.Random(f"map:{seed}")
    S = PolyRing(3, p=P, prefix="u")
    R = PolyRing(5, p=P)
    phi = RingMap(R, S, [random_form(S, 2, rng) for _ in range(5)])
    A = kernel_of_map(phi)
    B = kernel_of_map(phi, method="linear", max_degree=4)
    assert groebner_basis(A).same_ideal(groebner_basis(B))


def test_minimal_generators_drops_redundant():
    I = rand_ideal(3, degs=(2, 2))
    J = Ideal(I.ring, I.gens + [I.gens[0] * I.ring.gens()[0], I.gens[0] + I.gens[1]])
    assert len(minimal_generators(J).gens) == 2
