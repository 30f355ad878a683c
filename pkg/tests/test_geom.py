from math import comb

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ulrichfold.cli import degree9, delpezzo
from ulrichfold.errors import CenterOnSurface
from ulrichfold.geom import (PointConfig, SurfaceModel, blowup_numbers, center_meets, curve_degree_genus,
                             expected_hilbert_poly, fat_point_piece, hyperplane_section, linkage,
                             project, random_general_points, scroll_ideal, smoothness_check,
                             surface_degree_genus, conic_through, degree_of, rao_module)
from ulrichfold.groebner import groebner_basis, kernel_of_map
from ulrichfold.polyring import Ideal, PolyRing, RingMap, random_form
from ulrichfold.resolve import Module, hilbert

P = 32003


def test_fat_points_impose_expected_conditions():
    cfg = random_general_points(10, [2, 2] + [1] * 8, seed=1, degrees=[5])
    assert cfg.expected_dim(5) == 21 - 6 - 8 == 7
    assert len(fat_point_piece(cfg, 5)) == 7
    assert cfg.K2() == -1 and cfg.chi_top() == 13


@given(st.integers(0, 10**5), st.integers(1, 6))
@settings(max_examples=10)
def test_simple_points_general(seed, n):
    cfg = random_general_points(n, 1, seed=seed)
    d = next(d for d in range(5) if comb(d + 2, 2) > n)
    assert len(fat_point_piece(cfg, d)) == comb(d + 2, 2) - n


def test_point_config_validation():
    with pytest.raises(ValueError):
        PointConfig([(1, 0, 0), (2, 0, 0)], [1, 1], 0)
    with pytest.raises(ValueError):
        PointConfig([(1, 0, 0)], [1, 1], 0)
    with pytest.raises(ValueError):
        PointConfig([(0, 0, 0)], [1], 0)


def test_blowup_numbers_and_riemann_roch():
    assert blowup_numbers(3, [1] * 4) == (5, -5)
    assert blowup_numbers(5, [2, 2] + [1] * 8) == (9, -3)
    assert blowup_numbers(6, [2] * 5 + [1] * 5) == (11, -3)
    hp = expected_hilbert_poly(5, -5)
    assert [hp(t) for t in range(4)] == [1, 6, 16, 31]


def test_delpezzo_is_smooth_and_has_expected_hilbert_function():
    S, _ = delpezzo(P, 1)
    H = S.hilbert()
    hp = expected_hilbert_poly(5, -5)
    assert H.values(0, 8) == [hp(t) for t in range(9)]
    assert surface_degree_genus(H) == (5, 1)
    assert smoothness_check(S)
    C = hyperplane_section(S.ideal, 2)
    assert curve_degree_genus(hilbert(Module.quotient(C))) == (5, 1)


def test_projection_routes_agree():
    L = PolyRing(var_names=["s", "t"], p=P)
    s, t = L.gens()
    R = PolyRing(5, p=P)
    phi = RingMap(R, L, [s ** (4 - i) * t ** i for i in range(5)])
    C = SurfaceModel(kernel_of_map(phi), {}, phi)
    A = project(C, seed=3, expected_hp=lambda d: 4 * d + 1)
    B = project(C, seed=3, route="eliminate")
    assert groebner_basis(A.ideal).same_ideal(groebner_basis(B.ideal))
    assert rao_module(A.ideal) == {d: int(d == 1) for d in range(-3, 7)}


def test_center_on_surface_rejected():
    S, _ = delpezzo(P, 1)
    pt = np.array([[g.evaluate((1, 2, 3)) for g in S.param.images]], dtype=np.int64)
    assert center_meets(S, pt)
    with pytest.raises(CenterOnSurface):
        project(S, pt)


def test_degree9_projections():
    cfg, Z, Y1, Y, G = degree9(P, 1)
    assert surface_degree_genus(Z.hilbert()) == (9, 4)
    assert surface_degree_genus(Y1.hilbert()) == (9, 4)
    assert surface_degree_genus(Y.hilbert()) == (9, 4)
    # chord projection glues two points: the pushforward has one extra section in each degree
    assert [G.hilbert_value(d) - Y.hilbert().value(d) for d in range(5)] == [0, 1, 1, 1, 1]
    # general projection: non-linearly normal with a one-dimensional Rao piece in degree 1
    rao = rao_module(Y1, window=(-1, 3))
    assert rao[1] == 1 and rao[0] == 0


def test_conic_passes_through_chosen_points():
    cfg = random_general_points(10, [2, 2] + [1] * 8, seed=1, degrees=[5])
    Q, par = conic_through(cfg, (2, 3, 4, 5), 1)
    assert all(Q.evaluate(cfg.points[i]) == 0 for i in (2, 3, 4, 5))
    assert Q.evaluate(cfg.points[0]) != 0
    # the parametrization lands on the conic
    assert all(c == 0 for c in [Q.evaluate([g.evaluate((a, 1)) for g in par]) for a in range(5)])


def test_scrolls_and_linkage():
    T = scroll_ideal([1, 2])
    assert degree_of(T) == 3 and len(T.gens) == 3
    assert degree_of(scroll_ideal([2, 2])) == 4
    R = T.ring
    # two general quadrics through the twisted cubic link it to a line
    import random
    rng = random.Random("link")
    q = [sum((g.scale(rng.randrange(1, P)) for g in T.gens), R.zero()) for _ in range(2)]
    L = linkage(Ideal(R, q), T)
    assert degree_of(L) == 1
    with pytest.raises(ValueError):
        linkage(Ideal(R, [random_form(R, 2, rng)]), T)


def test_degree9_curve_hilbert_series():
    from ulrichfold.resolve import betti_table, minimal_free_resolution
    _, _, Y1, _, _ = degree9(P, 1)
    C = hyperplane_section(Y1.ideal, 3)
    F = minimal_free_resolution(Module.quotient(C))
    B = betti_table(F)
    assert B.numerator() == {0: 1, 3: -11, 4: 18, 5: -9, 6: 1}
    H = hilbert(Module.quotient(C))
    # Riemann-Roch on a degree-9 genus-4 curve, minus the Rao piece in degree 1
    assert [H.value(d) for d in range(1, 8)] == [9 * d + 1 - 4 - (d == 1) for d in range(1, 8)]
    assert H.value(6) == 51
