import pytest

from ulrichfold.cli import bourbaki, delpezzo, rank2
from ulrichfold.errors import NoCubic, NotApplicable, NotLinearMF, NotUlrich
from ulrichfold.polyring import Ideal, PolyRing
from ulrichfold.resolve import BettiTable, GradedMatrix, MatrixFactorization, hom_dim
from ulrichfold.ulrich import (FourfoldContext, brill_noether_rho, certify_mf, choose_cubic,
                               distinguished_flag, endo_cohomology, bourbaki_shape, expected_ulrich_invariants,
                               extension_dimension, hassett, matches_up_to_ghosts, mf_ext_dim,
                               normal_module_dims, surface_to_ulrich)

P = 32003


@pytest.mark.parametrize("r,d,g", [(2, 5, 1), (3, 12, 10), (4, 22, 33), (5, 35, 76)])
def test_expected_invariants(r, d, g):
    e = expected_ulrich_invariants(r)
    assert (e["degree"], e["genus"]) == (d, g)
    # degree from the resolution shape agrees with the closed form
    from ulrichfold.resolve import hilbert_from_betti
    H = hilbert_from_betti(e["betti"], 6)
    assert H.degree_and_dim() == (d, 3)


def test_bourbaki_shape_tables():
    assert bourbaki_shape(2) == {(0, 0): 1, (1, 2): 5, (1, 3): 1, (2, 3): 6, (3, 5): 1}
    assert bourbaki_shape(3) == {(0, 0): 1, (1, 3): 8, (2, 4): 9, (3, 6): 2}
    with pytest.raises(ValueError):
        expected_ulrich_invariants(1)


def test_ghost_matching():
    E = bourbaki_shape(2)
    dp = BettiTable({(0, 0): 1, (1, 2): 5, (2, 3): 5, (3, 5): 1})
    assert matches_up_to_ghosts(dp, E)
    assert matches_up_to_ghosts(E, E)
    assert not matches_up_to_ghosts(BettiTable({(0, 0): 1, (1, 2): 5}), E)
    assert not matches_up_to_ghosts(BettiTable({(0, 0): 1, (1, 2): 6, (2, 3): 6, (3, 5): 1}), E)


def test_hassett_and_rho():
    assert hassett({"H2": 12, "HK": 6, "K2": 0, "chi_top": 36}, 12) == {"Y2": 54, "delta": 18, "special": True}
    assert hassett({"H2": 5, "HK": -5, "K2": 5, "chi_top": 7}, 5)["delta"] == 14
    # a plane: Y² = 3, δ = 8
    assert hassett({"H2": 1, "HK": -3, "K2": 9, "chi_top": 3}, 1) == {"Y2": 3, "delta": 8, "special": True}
    assert brill_noether_rho(10, 4, 12) == 0
    assert brill_noether_rho(4, 4, 9) == 9
    assert brill_noether_rho(3, 1, 3) == 1


def test_extension_dimension():
    assert extension_dimension(4) == {"ext_dim": 4, "family_dim": 13, "moduli_dim": 17, "smaller": True}
    assert extension_dimension(5)["family_dim"] < 26
    with pytest.raises(ValueError):
        extension_dimension(3)


def test_fourfold_context_validation():
    R = PolyRing(6, p=P)
    x = R.gens()
    with pytest.raises(ValueError):
        FourfoldContext(x[0] * x[1], Ideal(R, []), 0, 1)
    with pytest.raises(NoCubic):
        choose_cubic(Ideal(R, [x[0] ** 4]))
    X = FourfoldContext(sum((xi ** 3 for xi in x), R.zero()), Ideal(R, []), 1, 1)
    assert X.check_smooth() and X.smooth_checked
    Xs = FourfoldContext(x[0] ** 3 + x[1] ** 3, Ideal(R, []), 1, 1)
    assert not Xs.check_smooth()


def test_rank2_certificate_and_cross_checks():
    S, X = delpezzo(P, 1)
    _, cert = rank2(P, 1)
    assert cert.rank == 2 and cert.size == 6
    assert cert.mf.verify() and cert.mf.is_linear()
    # Ext^0 from the periodic resolution equals Hom computed over the polynomial ring
    M = cert.module()
    assert mf_ext_dim(cert.mf, 0, 0) == hom_dim(M, M, 0) == 1


def test_certify_rejects_nonlinear():
    R = PolyRing(6, p=P)
    x = R.gens()
    f = x[0] ** 3
    A = GradedMatrix.from_rows(R, [[x[0] ** 2]])
    B = GradedMatrix.from_rows(R, [[x[0]]])
    with pytest.raises(NotLinearMF):
        certify_mf(MatrixFactorization(f, A, B))
    A1 = GradedMatrix.from_rows(R, [[x[0]]])
    B1 = GradedMatrix.from_rows(R, [[x[0] ** 2]])
    with pytest.raises(NotUlrich):
        certify_mf(MatrixFactorization(f, A1, B1))


def test_bourbaki_roundtrip_rank2():
    X, cert, W = bourbaki(P, 1, 2)
    assert (W.meta["degree"], W.meta["genus"], W.meta["acm"]) == (5, 1, True)
    back = surface_to_ulrich(W, X)
    assert back.rank == 2
    assert distinguished_flag(W, X, cert)["distinguished"]
    S, _ = delpezzo(P, 1)
    with pytest.raises(NotApplicable):
        distinguished_flag(S, X, cert)


def test_normal_modules_delpezzo():
    S, X = delpezzo(P, 1)
    nm = normal_module_dims(S, X, with_h1=True)
    assert nm == {"h0_NYP": 35, "h0_NYX": 5, "h1_NYP": 0}


def test_endo_mf_route_rank2():
    _, cert = rank2(P, 1)
    e = endo_cohomology(cert, route="mf")
    assert e["h0"] == 1 and e["simple"]
    assert e["chi"] == sum((-1) ** i * e[f"h{i}"] for i in range(5))


@pytest.mark.heavy
def test_endo_routes_agree_rank2():
    _, cert = rank2(P, 1)
    a = endo_cohomology(cert, route="mf", budget=None)
    b = endo_cohomology(cert, route="duality", budget=None)
    assert a == b


def test_time_limit_interrupts_long_step_with_partial():
    import time
    from ulrichfold.errors import TimeBudgetExceeded
    from ulrichfold.ulrich import _time_limit
    partial = {"h0": 1}
    t0 = time.monotonic()
    with pytest.raises(TimeBudgetExceeded) as info:
        with _time_limit(t0, 0.2, partial):
            partial["h1"] = 0
            while True:
                time.sleep(0.01)
    assert info.value.partial == {"h0": 1, "h1": 0}
    assert time.monotonic() - t0 < 2.0
    with _time_limit(time.monotonic(), 5.0, {}):
        pass
    time.sleep(0.1)
