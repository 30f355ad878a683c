"""Ulrich bundles on cubic fourfolds from surfaces, and back.

Pipeline: a surface ``Y ⊂ X ⊂ P^5`` gives a module over ``R/(f)``; the
periodic tail of its minimal resolution is a matrix factorization; when
the small factor is a square matrix of linear forms of size ``3r`` its
cokernel is an Ulrich sheaf of rank ``r``.  The converse direction takes
``r - 1`` general sections of the Ulrich module and recovers an ACM
surface (a Bourbaki-type sequence).
"""
from __future__ import annotations

import random
import signal
import threading
import time
from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np

from . import ffield
from .errors import (DegenerateSections, NoCubic, NotApplicable, NotLinearMF, NotUlrich,
                     ShapeMismatch, TimeBudgetExceeded)
from .groebner import ideal_degree_piece, minimal_generators, saturate_irrelevant
from .polyring import Ideal, Polynomial
from .resolve import (BettiTable, free_basis, piece, GradedMatrix, GradedRing, MatrixFactorization, Module,
                      betti_table, extract_matrix_factorization, hom_degree_piece,
                      minimal_free_resolution, quotient_resolution, section_module,
                      sheaf_cohomology, annihilator, hilbert)

MAX_SECTION_TRIES = 8


@dataclass
class FourfoldContext:
    f: Polynomial
    source: Ideal
    cubic_dim: int
    seed: int
    smooth_checked: bool = False

    def __post_init__(self):
        if not self.f.terms or not self.f.is_homogeneous() or self.f.degree != 3:
            raise ValueError("the fourfold needs a nonzero homogeneous cubic")

    def check_smooth(self) -> bool:
        """Jacobian criterion: the partials of ``f`` have no common projective zero.

        In characteristic ``p > 3`` Euler's relation puts ``f`` in the ideal
        of partials, so this is smoothness of ``X``.  Sets ``smooth_checked``.
        """
        from .groebner import groebner_basis
        R = self.f.ring
        J = Ideal(R, [self.f.diff(i) for i in range(R.n)])
        ok = groebner_basis(saturate_irrelevant(J)).is_unit()
        self.smooth_checked = ok
        return ok


def cubic_space(I: Ideal) -> list[Polynomial]:
    """Basis of ``I_3`` (rows of the reduced echelon form)."""
    mons, B = ideal_degree_piece(I, 3)
    R = I.ring
    return [Polynomial(R, {m: int(c) for m, c in zip(mons, v) if c}) for v in B]


def choose_cubic(S, seed: int = 1) -> FourfoldContext:
    """A seeded random cubic through the surface (``S`` a SurfaceModel or Ideal)."""
    I = S if isinstance(S, Ideal) else S.ideal
    basis = cubic_space(I)
    if not basis:
        raise NoCubic("no cubic contains the surface")
    rng = random.Random(seed)
    R = I.ring
    if len(basis) == 1:
        f = basis[0]
    else:
        f = R.zero()
        for g in basis:
            f = f + g.scale(rng.randrange(1, R.p))
    return FourfoldContext(f, I, len(basis), seed)


# -- certificates -----------------------------------------------------------------

@dataclass
class UlrichCertificate:
    rank: int
    size: int
    mf: MatrixFactorization
    betti_R: BettiTable
    h0_init: int
    initialized: bool
    annihilated_by_f: bool
    periodic_from: int | None = None
    extra: dict = field(default_factory=dict)

    def module(self) -> Module:
        """``coker A`` over the polynomial ring."""
        return Module(self.mf.A, GradedRing(self.mf.f.ring))

    def to_json(self) -> dict:
        return {"rank": self.rank, "size": self.size, "betti_R": self.betti_R.to_list(),
                "mf_ok": self.mf.verify(), "initialized": self.initialized,
                "h0": self.h0_init, "annihilated_by_f": self.annihilated_by_f}


def certify_mf(mf: MatrixFactorization, periodic_from=None) -> UlrichCertificate:
    """Check that ``coker A`` is an Ulrich module; all numbers recomputed."""
    A = mf.A
    if not mf.is_linear() or A.nrows != A.ncols:
        raise NotLinearMF("A is not a square matrix of linear forms")
    m = A.nrows
    if m % 3 or mf.f.degree != 3:
        raise NotUlrich(f"size {m} is not 3r for a cubic")
    if set(A.tgt) != {0} or set(A.src) != {1}:
        raise NotLinearMF("A is not normalised to R(-1)^m -> R^m")
    M = Module(A, GradedRing(mf.f.ring))
    bt = betti_table(minimal_free_resolution(M))
    if bt != {(0, 0): m, (1, 1): m}:
        raise NotUlrich("coker A does not have a linear two-step resolution")
    h0 = M.hilbert_value(0)
    init = M.hilbert_value(-1) == 0
    ok = mf.verify()
    if h0 != m or not init or not ok:
        raise NotUlrich("Hilbert values or the factorization identity fail")
    return UlrichCertificate(m // 3, m, mf, bt, h0, init, ok, periodic_from)


def surface_to_ulrich(S, X: FourfoldContext, *, module: Module | None = None,
                      max_steps: int = 8) -> UlrichCertificate:
    """Ulrich certificate from the section module of ``S`` over ``R/(f)``.

    ``module`` overrides the section module (for example the pushforward
    of a normalization).
    """
    I = S if isinstance(S, Ideal) else S.ideal
    M = module if module is not None else section_module(I)
    F = quotient_resolution(M, X.f, max_steps)
    mf, s = extract_matrix_factorization(F)
    cert = certify_mf(mf, s)
    cert.extra["betti_RX"] = betti_table(F)
    return cert


# -- Bourbaki surfaces --------------------------------------------------------------

def expected_ulrich_invariants(r: int) -> dict:
    """Degree, sectional genus and resolution shape of a Bourbaki surface of rank ``r``."""
    if r < 2:
        raise ValueError("rank must be at least 2")
    return {"r": r, "degree": (3 * r * r - r) // 2, "genus": r ** 3 - 2 * r * r + 1,
            "betti": bourbaki_shape(r)}


def bourbaki_shape(r: int) -> BettiTable:
    """``O^{r-1}(-r-3) -> O^{3r}(-r-1) -> O^{2r+1}(-r) ⊕ O(-3) -> I_Y`` (possibly non-minimal)."""
    ent: dict[tuple[int, int], int] = {(0, 0): 1}
    for k, v in (((1, r), 2 * r + 1), ((1, 3), 1), ((2, r + 1), 3 * r), ((3, r + 3), r - 1)):
        if v:
            ent[k] = ent.get(k, 0) + v
    return BettiTable(ent)


def matches_up_to_ghosts(measured: BettiTable, expected: BettiTable) -> bool:
    """``measured`` arises from ``expected`` by cancelling pairs in adjacent
    homological degrees with the same internal degree."""
    diff = {k: expected.get(*k) - measured.get(*k)
            for k in set(expected.entries) | set(measured.entries)}
    if any(v < 0 for v in diff.values()):
        return False
    # greedy pairing from the left in each internal degree
    left = dict(diff)
    for (i, j) in sorted(left):
        v = left[(i, j)]
        if not v:
            continue
        nxt = left.get((i + 1, j), 0)
        if nxt < v:
            return False
        left[(i, j)] = 0
        left[(i + 1, j)] = nxt - v
    return not any(left.values())


def bourbaki_surface(cert: UlrichCertificate, X: FourfoldContext, seed: int = 1):
    """Surface ``Y`` from ``0 -> O^{r-1} -> F -> I_{Y/X}(r) -> 0``.

    Dualising, ``F^∨ -> O^{r-1}`` has cokernel supported on ``Y`` with
    annihilator ``I_Y``.  ``F^∨`` is the image of ``B^T``, so the cokernel
    is presented over ``R`` by ``[(B S)^T | f·I]`` with ``S`` the chosen
    sections.  Returns a SurfaceModel checked against the expected shape.
    """
    from .geom import SurfaceModel, surface_degree_genus
    r = cert.rank
    if r < 2:
        raise ValueError("rank must be at least 2")
    mf = cert.mf
    R = mf.f.ring
    p = R.p
    m = cert.size
    want = expected_ulrich_invariants(r)
    rng = random.Random(seed)
    last = None
    for attempt in range(MAX_SECTION_TRIES):
        Smat = np.array([[rng.randrange(p) for _ in range(r - 1)] for _ in range(m)],
                        dtype=np.int64)
        if ffield.rank(Smat, p) < r - 1:
            continue
        cols = []
        srcs = []
        for i in range(m):           # column i of (B S)^T: entries Σ_j B[i, j] S[j, k]
            col = []
            for k in range(r - 1):
                e = R.zero()
                for j in range(m):
                    c = int(Smat[j, k])
                    if c:
                        e = e + mf.B.cols[j][i].scale(c)
                col.append(e)
            if any(x.terms for x in col):
                cols.append(col)
                srcs.append(max(x.degree for x in col if x.terms))
        for k in range(r - 1):
            col = [R.zero() for _ in range(r - 1)]
            col[k] = mf.f
            cols.append(col)
            srcs.append(3)
        Q = Module(GradedMatrix(R, [0] * (r - 1), srcs, cols), GradedRing(R))
        I = minimal_generators(saturate_irrelevant(annihilator(Q)))
        Y = SurfaceModel(I, {"tag": f"bourbaki-r{r}", "seed": seed, "prime": p,
                             "rank": r})
        try:
            d, g = surface_degree_genus(Y.hilbert())
        except Exception as exc:       # wrong dimension: degenerate choice
            last = exc
            continue
        if (d, g) != (want["degree"], want["genus"]):
            last = ShapeMismatch(f"got degree {d}, genus {g}")
            continue
        bt = betti_table(Y.resolution())
        acm = len(Y.resolution().maps) == 3
        if not acm or not matches_up_to_ghosts(bt, want["betti"]):
            raise ShapeMismatch("Bourbaki surface resolution has the wrong shape")
        HK = 2 * g - 2 - d
        Y.meta.update({"degree": d, "genus": g, "acm": acm, "H2": d, "HK": HK,
                       "sections_seed": seed, "attempt": attempt})
        return Y
    raise DegenerateSections(f"no good sections after {MAX_SECTION_TRIES} tries: {last}")


# -- arithmetic -------------------------------------------------------------------

def hassett(meta: dict, d: int) -> dict:
    """Self-intersection in the fourfold and discriminant of ``<h², Y>``."""
    Y2 = 6 * meta["H2"] + 3 * meta["HK"] + meta["K2"] - meta["chi_top"]
    delta = 3 * Y2 - d * d
    return {"Y2": Y2, "delta": delta, "special": delta > 6 and delta % 6 in (0, 2)}


def brill_noether_rho(g: int, r: int, d: int) -> int:
    return g - (r + 1) * (g + r - d)


def extension_dimension(r: int) -> dict:
    """Extension count behind the wild-type argument, rank ``r >= 4``."""
    if r < 4:
        raise ValueError("formula needs r >= 4")
    ext = 2 * (r - 2)
    fam = 5 + ((r - 2) ** 2 + 1) + ext - 1
    return {"ext_dim": ext, "family_dim": fam, "moduli_dim": r * r + 1,
            "smaller": fam < r * r + 1}


# -- normal modules and endomorphisms ------------------------------------------------

def _check_budget(start, budget, partial):
    if budget is not None and time.monotonic() - start > budget:
        raise TimeBudgetExceeded("time budget exhausted", partial)


@contextmanager
def _time_limit(start, budget, partial):
    """Interrupt a long single step once ``budget`` seconds have passed.

    Between steps the budget is checked explicitly; this guard covers the
    steps themselves.  It uses ``SIGALRM`` and so only acts in the main
    thread on platforms that have it; elsewhere it does nothing.
    """
    usable = (budget is not None and hasattr(signal, "SIGALRM")
              and threading.current_thread() is threading.main_thread())
    if not usable:
        yield
        return
    left = budget - (time.monotonic() - start)
    if left <= 0:
        raise TimeBudgetExceeded("time budget exhausted", dict(partial))

    def _expire(signum, frame):
        raise TimeBudgetExceeded("time budget exhausted", dict(partial))

    old = signal.signal(signal.SIGALRM, _expire)
    signal.setitimer(signal.ITIMER_REAL, left)
    try:
        yield
    finally:
        signal.setitimer(signal.ITIMER_REAL, 0)
        signal.signal(signal.SIGALRM, old)


def normal_module_dims(S, X: FourfoldContext | None = None, *, budget: float | None = None,
                       with_h1: bool = True) -> dict:
    """``h^0(N_{Y/P^5})``, ``h^1(N_{Y/P^5})`` and ``h^0(N_{Y/X})``.

    ``H^0(N) = Hom(I_Y, R_Y)_0`` needs depth two for ``R_Y``; ACM surfaces
    qualify.  ``N_{Y/X}`` is the kernel of evaluation at ``f``.
    """
    from .resolve import hom_module
    t0 = time.monotonic()
    I = S if isinstance(S, Ideal) else S.ideal
    R = I.ring
    out: dict = {}
    Mi = Module.ideal(I)
    Q = Module.quotient(I)
    basis, layout = hom_degree_piece(Mi, Q, 0)
    out["h0_NYP"] = basis.shape[0]
    _check_budget(t0, budget, out)
    if X is not None:
        out["h0_NYX"] = _normal_in_fourfold(I, X.f, Mi, Q, basis, layout)
        _check_budget(t0, budget, out)
    if with_h1:
        with _time_limit(t0, budget, out):
            H = hom_module(Mi, Q)
            out["h1_NYP"] = sheaf_cohomology(H, 1, 0)
    return out


def _normal_in_fourfold(I, f, Mi, Q, basis, layout) -> int:
    """Dimension of the kernel of ``φ -> φ(f)`` on ``Hom(I, R/I)_0``."""
    R = I.ring
    gens = list(I.gens)
    coeffs = _lift_to_generators(f, gens)
    mons3, rref3 = ideal_degree_piece(I, 3)
    # φ is given by the images of the generators, one block of (component, monomial) each
    flat = [(k, mono) for k, blk in enumerate(layout) for (_, mono) in blk]
    rows = []
    for b in basis:
        img = R.zero()
        for (k, mon), c in zip(flat, b):
            if c:
                img = img + coeffs[k] * Polynomial(R, {mon: int(c)})
        rows.append(_reduce_mod(img, I, 3, mons3, rref3))
    if not rows:
        return 0
    A = np.array(rows, dtype=np.int64)
    return basis.shape[0] - ffield.rank(A, R.p)


def _lift_to_generators(f: Polynomial, gens: list[Polynomial]) -> list[Polynomial]:
    """``f = Σ c_k g_k`` by degreewise linear algebra."""
    R = f.ring
    d = f.degree
    cols, slots = [], []
    mons = R.monomials(d)
    pos = {m: i for i, m in enumerate(mons)}
    for k, g in enumerate(gens):
        e = d - g.degree
        if e < 0:
            continue
        for mm in R.monomials(e):
            v = np.zeros(len(mons), dtype=np.int64)
            for key, c in g.terms.items():
                v[pos[key + mm]] = c
            cols.append(v)
            slots.append((k, mm))
    b = np.zeros(len(mons), dtype=np.int64)
    for key, c in f.terms.items():
        b[pos[key]] = c
    x = ffield.solve(np.array(cols).T, b, R.p)
    if x is None:
        raise ValueError("f is not in the ideal")
    out = [R.zero() for _ in gens]
    for (k, mm), c in zip(slots, x):
        if c:
            out[k] = out[k] + Polynomial(R, {mm: int(c)})
    return out


def _reduce_mod(g: Polynomial, I: Ideal, d: int, mons, rref) -> list[int]:
    """Coordinates of ``g`` in ``R_d / I_d`` (a fixed complement of the rref pivots)."""
    R = g.ring
    pos = {m: i for i, m in enumerate(mons)}
    v = np.zeros(len(mons), dtype=np.int64)
    for key, c in g.terms.items():
        v[pos[key]] = c
    p = R.p
    for row in rref:
        piv = int(np.flatnonzero(row)[0])
        if v[piv]:
            v = (v - v[piv] * row) % p
    return [int(x) for x in v]


def mf_resolution_step(mf: MatrixFactorization, i: int) -> tuple[list[int], GradedMatrix | None]:
    """Twists of ``F_i`` and the map ``F_i -> F_{i-1}`` in the 2-periodic
    resolution ``... -B-> F_1 -A-> F_0`` of ``coker A`` over ``R/(f)``."""
    e = mf.f.degree
    A, B = mf.A, mf.B
    if i == 0:
        return list(A.tgt), None
    k, odd = divmod(i - 1, 2)
    if odd == 0:     # F_i = A.src shifted by k*e, map A
        return [t + k * e for t in A.src], A.shift(k * e)
    return [t + k * e for t in B.src], B.shift(k * e)


def mf_ext_dim(mf: MatrixFactorization, i: int, d: int) -> int:
    """``dim Ext^i_{R/(f)}(M, M)_d`` for ``M = coker A``, by linear algebra
    on ``Hom(F_•, M)``."""
    A = mf.A
    R = A.ring
    p = R.p
    Rg = GradedRing(R)
    m = A.nrows

    def quot(deg):
        tb = free_basis(Rg, A.tgt, deg)
        if not tb:
            return tb, np.zeros((0, 0), dtype=np.int64)
        mat, _, _ = piece(Rg, A, deg)
        L = ffield.left_kernel(mat, p) if mat.size else np.eye(len(tb), dtype=np.int64)
        return tb, L

    def cochains(k):
        """Hom(F_k, M)_d: per generator of F_k a block M_{t + d}."""
        tw, _ = mf_resolution_step(mf, k)
        blocks = [quot(t + d) for t in tw]
        return tw, blocks

    def coboundary(k):
        """Matrix of ``Hom(F_k, M)_d -> Hom(F_{k+1}, M)_d`` on quotient coordinates."""
        tw0, bl0 = cochains(k)
        tw1, bl1 = cochains(k + 1)
        _, D = mf_resolution_step(mf, k + 1)
        # lift a quotient coordinate to a representative: use the complement of im A
        reps0 = [_section(tb, L, p) for tb, L in bl0]
        rows_out = sum(L.shape[0] for _, L in bl1)
        cols_in = sum(L.shape[0] for _, L in bl0)
        T = np.zeros((rows_out, cols_in), dtype=np.int64)
        ro = np.concatenate([[0], np.cumsum([L.shape[0] for _, L in bl1])]).astype(int)
        co = np.concatenate([[0], np.cumsum([L.shape[0] for _, L in bl0])]).astype(int)
        for j in range(len(tw1)):          # generator of F_{k+1}: φ ↦ Σ_i D[i, j] φ_i
            tb1, L1 = bl1[j]
            if not tb1:
                continue
            pos1 = {b: n for n, b in enumerate(tb1)}
            for i in range(len(tw0)):
                ent = D.cols[j][i]
                if not ent.terms:
                    continue
                tb0, _ = bl0[i]
                for u in range(co[i + 1] - co[i]):
                    v = np.zeros(len(tb1), dtype=np.int64)
                    for n, c in enumerate(reps0[i][u]):
                        if not c:
                            continue
                        comp, mono = tb0[n]
                        for key, cc in ent.terms.items():
                            v[pos1[(comp, key + mono)]] += c * cc
                    T[ro[j]:ro[j + 1], co[i] + u] += ffield.matmul_mod(L1, (v % p)[:, None], p)[:, 0]
        return T % p

    def dim_cochains(k):
        return sum(L.shape[0] for _, L in cochains(k)[1])

    n_k = dim_cochains(i)
    if n_k == 0:
        return 0
    d_out = coboundary(i)
    ker = n_k - (ffield.rank(d_out, p) if d_out.size else 0)
    if i == 0:
        return ker
    d_in = coboundary(i - 1)
    return ker - (ffield.rank(d_in, p) if d_in.size else 0)


def _section(tb, L, p) -> np.ndarray:
    """Rows: representatives in ``R^m_deg`` dual to the functionals ``L``."""
    if L.shape[0] == 0:
        return np.zeros((0, len(tb)), dtype=np.int64)
    X = ffield.solve(L, np.eye(L.shape[0], dtype=np.int64), p)
    return np.ascontiguousarray(X.T)


def endo_cohomology(cert: UlrichCertificate, X: FourfoldContext | None = None, *,
                    budget: float | None = 600.0, route: str = "mf") -> dict:
    """``h^i(F ⊗ F^∨)`` for ``i = 0..4``.

    ``route="mf"``: graded ``Ext^i_{R/(f)}(M, M)`` from the periodic
    resolution; for an ACM bundle these are ``H^i(End F)`` when ``i <= 3``
    in degree 0, and Serre duality (``ω_X = O(-3)``) gives ``h^3`` and
    ``h^4`` from degree ``-3``.
    ``route="duality"``: ``Hom(M, M)`` over ``R`` and graded local duality
    on P^5 (much slower; kept as an independent check).
    """
    t0 = time.monotonic()
    out: dict = {}
    if route == "mf":
        mf = cert.mf
        with _time_limit(t0, budget, out):
            out["h0"] = mf_ext_dim(mf, 0, 0)
            for i in (1, 2):
                out[f"h{i}"] = mf_ext_dim(mf, i, 0)
            out["h3"] = mf_ext_dim(mf, 1, -3)
            out["h4"] = mf_ext_dim(mf, 0, -3)
    else:
        from .resolve import hom_module
        M = cert.module()
        with _time_limit(t0, budget, out):
            E = hom_module(M, M)
            F = minimal_free_resolution(E)
            for i in range(5):
                out[f"h{i}"] = sheaf_cohomology(F, i, 0) if i else E.hilbert_value(0)
    r = cert.rank
    out["chi"] = sum((-1) ** i * out[f"h{i}"] for i in range(5))
    out["simple"] = out["h0"] == 1
    out["rank"] = r
    return out


def distinguished_flag(S, X: FourfoldContext, cert: UlrichCertificate | None) -> dict:
    """Provenance flag: a surface built from an Ulrich certificate on ``X``."""
    meta = getattr(S, "meta", {})
    if cert is None or "rank" not in meta or meta.get("rank") != cert.rank:
        raise NotApplicable("surface does not come from an Ulrich certificate")
    return {"distinguished": True,
            "chain": [f"ulrich certificate rank {cert.rank}", f"bourbaki sections seed {meta.get('sections_seed')}",
                      "ACM surface on X"]}


# -- unfolding of the hyperplane section ------------------------------------------------

def unfolding_check(S, seed: int = 1, steps: tuple[int, int] = (1, 2), *,
                    with_dim: bool = False) -> dict:
    """Compare the resolution of ``S`` with that of a hyperplane section.

    After a seeded linear change of coordinates the hyperplane is
    ``x_last = 0``.  Writing the two linear maps of the surface as
    ``φ + x·A`` and ``ψ + x·B`` with ``φ, ψ`` the maps of the section, the
    complex condition splits into ``φψ = 0``, ``Aψ + φB = 0`` and ``AB = 0``.
    Also reports the dimension of the solution space of the linear
    condition and the number of independent quadrics ``AB = 0`` cuts out on it.
    """
    from .polyring import PolyRing, RingMap
    I = S if isinstance(S, Ideal) else S.ideal
    R = I.ring
    p = R.p
    n = R.n
    rng = random.Random(f"unfold:{seed}")
    while True:
        M = np.array([[rng.randrange(p) for _ in range(n)] for _ in range(n)], dtype=np.int64)
        if ffield.rank(M, p) == n:
            break
    x = R.gens()
    sub = [sum((x[j].scale(int(M[i, j])) for j in range(n)), R.zero()) for i in range(n)]
    ch = RingMap(R, R, sub)
    J = Ideal(R, [ch(g) for g in I.gens])
    F = minimal_free_resolution(Module.quotient(J))
    i1, i2 = steps
    phiY, psiY = F.maps[i1], F.maps[i2]
    if not (phiY.entry_degrees() <= {1} and psiY.entry_degrees() <= {1}):
        raise ShapeMismatch("the chosen maps are not linear")
    Rp = PolyRing(n - 1, p=p, prefix="y")
    last = n - 1

    def split(Mat):
        """(constant-in-x part over R', coefficient of x as a constant matrix)."""
        rows, cols = Mat.nrows, Mat.ncols
        base = [[Rp.zero() for _ in range(rows)] for _ in range(cols)]
        coef = np.zeros((rows, cols), dtype=np.int64)
        for j, col in enumerate(Mat.cols):
            for i, e in enumerate(col):
                for k, c in e.terms.items():
                    ex = R.exps(k)
                    if ex[last]:
                        coef[i, j] = c
                    else:
                        base[j][i] = base[j][i] + Rp.monomial(ex[:last], c)
        return base, coef

    phi, A = split(phiY)
    psi, B = split(psiY)
    r0, r1, r2 = phiY.nrows, phiY.ncols, psiY.ncols

    def prod_zero(P, Q, inner, rows, cols):
        for a in range(rows):
            for b in range(cols):
                acc = Rp.zero()
                for k in range(inner):
                    acc = acc + P[k][a] * Q[b][k]
                if acc.terms:
                    return False
        return True

    ok_phipsi = prod_zero(phi, psi, r1, r0, r2)
    # Aψ + φB
    ok_lin = True
    for a in range(r0):
        for b in range(r2):
            acc = Rp.zero()
            for k in range(r1):
                c = int(A[a, k])
                if c and psi[b][k].terms:
                    acc = acc + psi[b][k].scale(c)
                c = int(B[k, b])
                if c and phi[k][a].terms:
                    acc = acc + phi[k][a].scale(c)
            if acc.terms:
                ok_lin = False
    ok_quad = not ffield.matmul_mod(A, B, p).any()
    # solution space of the linear condition: unknowns A (r0×r1), B (r1×r2)
    mons = Rp.monomials(1)
    mpos = {m: i for i, m in enumerate(mons)}
    nA, nB = r0 * r1, r1 * r2
    E = np.zeros((r0 * r2 * len(mons), nA + nB), dtype=np.int64)
    for a in range(r0):
        for b in range(r2):
            base = (a * r2 + b) * len(mons)
            for k in range(r1):
                for key, c in psi[b][k].terms.items():
                    E[base + mpos[key], a * r1 + k] += c
                for key, c in phi[k][a].terms.items():
                    E[base + mpos[key], nA + k * r2 + b] += c
    L = ffield.kernel(E % p, p)
    N = L.shape[0]
    As = L[:, :nA].reshape(N, r0, r1)
    Bs = L[:, nA:].reshape(N, r1, r2)
    # quadrics (AB)_{ab} = Σ y_u y_v (A^u B^v)_{ab}; symmetrise
    T = np.zeros((N, N, r0, r2), dtype=np.int64)
    for u in range(N):
        for v in range(N):
            T[u, v] = ffield.matmul_mod(As[u], Bs[v], p)
    iu = np.triu_indices(N)
    Q = np.zeros((r0 * r2, len(iu[0])), dtype=np.int64)
    for a in range(r0):
        for b in range(r2):
            Sym = (T[:, :, a, b] + T[:, :, a, b].T) % p
            # diagonal counted once: y_u^2 coefficient is T[u,u]
            Sym[np.diag_indices(N)] = T[:, :, a, b][np.diag_indices(N)]
            Q[a * r2 + b] = Sym[iu]
    nq = ffield.rank(Q % p, p)
    out_dim = None
    if with_dim:
        from .polyring import PolyRing as _PR
        from .resolve import hilbert as _hilbert
        Sring = _PR(N, p=p, prefix="z")
        pairs = list(zip(*iu))
        quad = []
        for row in ffield.row_space_basis(Q % p, p):
            terms = {}
            for (u, v), c in zip(pairs, row):
                if c:
                    e = [0] * N
                    e[u] += 1
                    e[v] += 1
                    terms[Sring.encode(e)] = int(c)
            quad.append(Polynomial(Sring, terms))
        _, dim_affine = _hilbert(Module.quotient(Ideal(Sring, quad))).degree_and_dim()
        out_dim = dim_affine - 1
    return {"projective_dim_V": out_dim, "phi_psi": ok_phipsi, "linear_identity": ok_lin, "quadratic_identity": ok_quad,
            "shape": [r0, r1, r2], "linear_space_dim": N, "independent_quadrics": nq}
