"""Rational surfaces from point configurations, projections, scrolls and linkage.

Surfaces are built as images of linear systems ``(d; m_1, ..., m_k)`` on
blow-ups of P².  The image ideal is computed degree by degree as the kernel
of ``Sym^t -> k[x, y, z]_{td}`` and then certified: the truncated ideal must
have depth one (it is saturated) and the Hilbert polynomial predicted by
Riemann-Roch.  Together with ``J ⊆ I`` this forces ``J = I``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations, combinations_with_replacement
from math import comb

import numpy as np

from . import ffield
from .errors import (BadPartition, CenterOnSurface, EmptySystem, GenericityFailure)
from .groebner import (eliminate, groebner_basis, ideal_quotient, intersect, kernel_linear,
                       minimal_generators, saturate_irrelevant)
from .polyring import DEFAULT_PRIME, Ideal, Polynomial, PolyRing, RingMap
from .resolve import (FreeResolution, HilbertData, Module, betti_table, hilbert,
                      local_cohomology_dims, minimal_free_resolution)

MAX_RETRIES = 32


# -- point configurations -------------------------------------------------------

@dataclass
class PointConfig:
    points: list[tuple[int, int, int]]
    mults: list[int]
    seed: int
    p: int = DEFAULT_PRIME
    certified_degrees: dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        if len(self.points) != len(self.mults):
            raise ValueError("one multiplicity per point")
        norm = [_normalize(pt, self.p) for pt in self.points]
        if len(set(norm)) != len(norm):
            raise ValueError("points must be distinct")

    @property
    def n(self) -> int:
        return len(self.points)

    def expected_dim(self, d: int) -> int:
        return max(0, comb(d + 2, 2) - sum(comb(m + 1, 2) for m in self.mults))

    def K2(self) -> int:
        return 9 - len(self.points)

    def chi_top(self) -> int:
        return 3 + len(self.points)


def _normalize(pt, p):
    for c in pt:
        if c % p:
            inv = pow(c, -1, p)
            return tuple(x * inv % p for x in pt)
    raise ValueError("zero vector is not a point")


def plane_ring(p: int = DEFAULT_PRIME) -> PolyRing:
    return PolyRing(3, p=p, var_names=["s", "t", "u"])


def random_general_points(n: int, mults, seed: int, *, p: int = DEFAULT_PRIME,
                          degrees=None) -> PointConfig:
    """Seeded points whose fat-point conditions are independent in ``degrees``.

    ``mults`` is a list or a single multiplicity.  The certificate compares
    ``dim I_d`` with ``max(0, C(d+2,2) - Σ C(m+1,2))`` for each listed degree
    (default: the smallest degree where the expected count is positive).
    """
    if n > 20:
        raise ValueError("at most 20 points")
    mults = [mults] * n if isinstance(mults, int) else list(mults)
    rng = random.Random(seed)
    for attempt in range(MAX_RETRIES):
        pts = [tuple(rng.randrange(p) for _ in range(3)) for _ in range(n)]
        try:
            cfg = PointConfig(pts, mults, seed, p)
        except ValueError:
            continue
        degs = degrees
        if degs is None:
            degs = [next(d for d in range(0, 60) if cfg.expected_dim(d) > 0)] if n else [1]
        ok = True
        for d in degs:
            got = len(fat_point_piece(cfg, d))
            if got != cfg.expected_dim(d):
                ok = False
                break
            cfg.certified_degrees[d] = got
        if ok:
            return cfg
    raise GenericityFailure(f"no general configuration after {MAX_RETRIES} retries")


def _conditions(cfg: PointConfig, d: int, mons: list[int], S: PolyRing) -> np.ndarray:
    """Rows: vanishing of all order ``m-1`` partials at each point."""
    p = cfg.p
    rows = []
    for pt, m in zip(cfg.points, cfg.mults):
        for alpha in _compositions(m - 1, 3):
            row = []
            for key in mons:
                e = S.exps(key)
                if any(a > b for a, b in zip(alpha, e)):
                    row.append(0)
                    continue
                c = 1
                for a, b in zip(alpha, e):
                    for t in range(a):
                        c *= (b - t)
                v = c % p
                for coord, b, a in zip(pt, e, alpha):
                    v = v * pow(coord, b - a, p) % p
                row.append(v)
            rows.append(row)
    if not rows:
        return np.zeros((0, len(mons)), dtype=np.int64)
    return np.array(rows, dtype=np.int64) % p


def _compositions(total: int, parts: int):
    for c in combinations_with_replacement(range(parts), total):
        yield tuple(c.count(i) for i in range(parts))


def fat_point_piece(cfg: PointConfig, d: int) -> list[Polynomial]:
    """Basis of the degree-``d`` forms with the prescribed multiplicities.

    The basis is the reduced row echelon form of the kernel, so it is
    deterministic.  Vanishing of all order ``m-1`` partials implies the
    lower ones by Euler's formula (``d < p``).
    """
    S = plane_ring(cfg.p)
    mons = S.monomials(d)
    C = _conditions(cfg, d, mons, S)
    K = ffield.kernel(C, cfg.p) if C.shape[0] else np.eye(len(mons), dtype=np.int64)
    if K.shape[0]:
        K, _ = ffield.rref(K, cfg.p)
    return [Polynomial(S, {m: int(c) for m, c in zip(mons, v) if c}) for v in K if v.any()]


def point_ideal(pt, S: PolyRing) -> Ideal:
    """Ideal of a point of P² (two linear forms)."""
    p = S.p
    M = np.array([list(pt)], dtype=np.int64) % p
    K = ffield.kernel(M, p)
    x = S.gens()
    return Ideal(S, [sum((x[i].scale(int(v[i])) for i in range(3) if v[i]), S.zero()) for v in K])


def fat_point_ideal(cfg: PointConfig) -> Ideal:
    """``∩ m_{p_i}^{m_i}`` as an ideal of ``k[s, t, u]``."""
    S = plane_ring(cfg.p)
    out: Ideal | None = None
    for pt, m in zip(cfg.points, cfg.mults):
        P = point_ideal(pt, S)
        Q = P
        for _ in range(m - 1):
            Q = Q * P
        Q = minimal_generators(Ideal(S, groebner_basis(Q).basis))
        out = Q if out is None else Ideal(S, groebner_basis(intersect(out, Q)).basis)
    if out is None:
        return Ideal(S, [S.one()])
    return minimal_generators(out)


def linear_system_map(cfg: PointConfig, d: int, prefix: str = "x") -> RingMap:
    """Map ``P² --> P^N`` given by a basis of the degree-``d`` piece."""
    forms = fat_point_piece(cfg, d)
    if not forms:
        raise EmptySystem(f"no forms of degree {d} through the configuration")
    T = PolyRing(len(forms), p=cfg.p, prefix=prefix)
    return RingMap(T, forms[0].ring, forms)


# -- surfaces -------------------------------------------------------------------

@dataclass
class SurfaceModel:
    ideal: Ideal
    meta: dict
    param: RingMap | None = None
    _res: FreeResolution | None = field(default=None, repr=False)
    _hilb: HilbertData | None = field(default=None, repr=False)

    @property
    def ring(self) -> PolyRing:
        return self.ideal.ring

    def resolution(self) -> FreeResolution:
        if self._res is None:
            self._res = minimal_free_resolution(Module.quotient(self.ideal))
        return self._res

    def hilbert(self) -> HilbertData:
        if self._hilb is None:
            self._hilb = hilbert(Module.quotient(self.ideal))
        return self._hilb

    def module(self) -> Module:
        return Module.quotient(self.ideal)


def expected_hilbert_poly(H2: int, HK: int, chi: int = 1):
    """``t -> χ(O(tH)) = χ(O) + (t²H² - tH·K)/2`` for a surface."""
    return lambda t: chi + (t * t * H2 - t * HK) // 2


def blowup_numbers(d: int, mults) -> tuple[int, int]:
    """``(H², H·K)`` for ``dL - Σ m_i E_i`` on a blow-up of P²."""
    return d * d - sum(m * m for m in mults), -3 * d + sum(mults)


def image_ideal(phi: RingMap, expected_hp=None, *, start: int = 3, max_degree: int = 8,
                check_degrees=range(4, 12)) -> Ideal:
    """Kernel of ``phi`` computed degree by degree and certified.

    The truncation at degree ``D`` is accepted once its quotient has depth
    at least one (projective dimension below the number of variables) and,
    when ``expected_hp`` is given, its Hilbert polynomial matches.
    """
    D = start
    while True:
        J = kernel_linear(phi, D)
        if _certify(J, expected_hp, check_degrees):
            return J
        D += 1
        if D > max_degree:
            raise GenericityFailure("image ideal not certified by the degree bound")


def _certify(J: Ideal, expected_hp, check_degrees) -> bool:
    if not J.gens:
        return False
    F = minimal_free_resolution(Module.quotient(J))
    if len(F.maps) >= J.ring.n:
        return False
    if expected_hp is None:
        return True
    H = hilbert(Module.quotient(J))
    return all(H.poly_value(t) == expected_hp(t) for t in check_degrees)


def image_surface(phi: RingMap, meta: dict, *, expected_hp=None, **kw) -> SurfaceModel:
    I = image_ideal(phi, expected_hp, **kw)
    S = SurfaceModel(I, dict(meta), phi)
    return S


def blowup_surface(cfg: PointConfig, d: int, tag: str = "") -> SurfaceModel:
    """Image of the linear system ``(d; mults)`` with metadata for Hassett's formula."""
    phi = linear_system_map(cfg, d)
    H2, HK = blowup_numbers(d, cfg.mults)
    meta = {"tag": tag or f"({d};{','.join(map(str, cfg.mults))})", "H2": H2, "HK": HK,
            "K2": cfg.K2(), "chi_top": cfg.chi_top(), "seed": cfg.seed, "prime": cfg.p}
    return image_surface(phi, meta, expected_hp=expected_hilbert_poly(H2, HK))


# -- projections ------------------------------------------------------------------

def _forms_vanishing_on(center_rows: np.ndarray, R: PolyRing) -> list[np.ndarray]:
    """Coefficient vectors of linear forms vanishing on the span of the rows."""
    return list(ffield.kernel(center_rows % R.p, R.p))


def random_center(R: PolyRing, dim: int, seed: int) -> np.ndarray:
    rng = random.Random(seed)
    while True:
        M = np.array([[rng.randrange(R.p) for _ in range(R.n)] for _ in range(dim + 1)],
                     dtype=np.int64)
        if ffield.rank(M, R.p) == dim + 1:
            return M


def center_meets(S: SurfaceModel, center: np.ndarray) -> bool:
    """Does the linear span of the rows meet ``S``?  (Membership test for a
    point; for a line, a point of ``S`` on it is detected by the restricted
    ideal having a zero on P¹.)"""
    R = S.ring
    if center.shape[0] == 1:
        return all(g.evaluate([int(c) for c in center[0]]) == 0 for g in S.ideal.gens)
    # restrict the ideal to the line a*P + b*Q
    L = PolyRing(2, p=R.p, var_names=["a", "b"])
    a, b = L.gens()
    sub = [a.scale(int(center[0, i])) + b.scale(int(center[1, i])) for i in range(R.n)]
    phi = RingMap(R, L, sub)
    imgs = [phi(g) for g in S.ideal.gens]
    imgs = [g for g in imgs if g.terms]
    if not imgs:
        return True
    G = groebner_basis(Ideal(L, imgs))
    return not any(all(e == 0 for e in L.exps(g.lm)[:1]) or g.is_constant() for g in G.basis) \
        and not _is_m_primary(G)


def _is_m_primary(G) -> bool:
    R = G.ideal.ring
    pure = [False] * R.n
    for g in G.basis:
        e = R.exps(g.lm)
        nz = [i for i, x in enumerate(e) if x]
        if len(nz) == 1:
            pure[nz[0]] = True
        if g.is_constant():
            return True
    return all(pure)


def chord_point(S: SurfaceModel, seed: int) -> np.ndarray:
    """A seeded point on the line through two random points of ``S``.

    Projecting from it glues the two points, which lowers ``χ(O)`` by one.
    Needs the parametrization of ``S``.
    """
    if S.param is None:
        raise ValueError("chord points need a parametrized surface")
    rng = random.Random(f"chord:{seed}")
    phi = S.param
    p = S.ring.p
    for _ in range(MAX_RETRIES):
        a, b = ([rng.randrange(p) for _ in range(3)] for _ in range(2))
        za = [g.evaluate(a) for g in phi.images]
        zb = [g.evaluate(b) for g in phi.images]
        lam = rng.randrange(1, p)
        q = np.array([[(x + lam * y) % p for x, y in zip(za, zb)]], dtype=np.int64)
        if ffield.rank(np.array([za, zb]), p) == 2 and not center_meets(S, q):
            return q
    raise GenericityFailure("no usable chord point")


def projection_forms(R: PolyRing, center: np.ndarray) -> list[Polynomial]:
    x = R.gens()
    out = []
    for v in _forms_vanishing_on(center, R):
        v, = ffield.rref(v[None, :], R.p)[0]
        out.append(sum((x[i].scale(int(v[i])) for i in range(R.n) if v[i]), R.zero()))
    return out


def project(S: SurfaceModel, center: np.ndarray | None = None, *, dim: int = 0, seed: int = 1,
            allow_on_surface: bool = False, route: str = "param", expected_hp=None,
            prefix: str = "x") -> SurfaceModel:
    """Project ``S`` from a point (``dim=0``) or a line (``dim=1``).

    ``route="param"`` composes the parametrization with the linear forms
    vanishing on the center; ``route="eliminate"`` changes coordinates so the
    center is spanned by the last coordinate points and eliminates them.
    """
    R = S.ring
    if center is None:
        center = random_center(R, dim, seed)
    if not allow_on_surface and center_meets(S, center):
        raise CenterOnSurface("projection center meets the surface")
    forms = projection_forms(R, center)
    T = PolyRing(len(forms), p=R.p, prefix=prefix)
    meta = dict(S.meta)
    meta["projected_from"] = center.tolist()
    if route == "param":
        if S.param is None:
            raise ValueError("parametrization route needs a parametrized surface")
        phi = RingMap(T, S.param.target, [S.param(g) for g in forms])
        if expected_hp is None and "H2" in meta:
            expected_hp = expected_hilbert_poly(meta["H2"], meta["HK"])
        out = image_surface(phi, meta, expected_hp=expected_hp)
        return out
    # elimination: new coordinates (forms, then a complement spanning the center)
    k = center.shape[0]
    comp = [v for v in np.eye(R.n, dtype=np.int64)]
    basis = [np.array(_coeffs(f), dtype=np.int64) for f in forms]
    M = np.array(basis)
    for e in comp:
        if len(basis) == R.n:
            break
        if ffield.rank(np.array(basis + [e]), R.p) > len(basis):
            basis.append(e)
    M = np.array(basis) % R.p      # y = M x
    Minv = ffield.solve(M, np.eye(R.n, dtype=np.int64), R.p)
    names = [f"_e{i}" for i in range(k)] + list(T.var_names)
    U = PolyRing(p=R.p, var_names=names)
    ys = U.gens()
    # x = Minv y, with y ordered (forms..., extra...) -> U ordering (extra..., forms...)
    yorder = ys[k:] + ys[:k]
    sub = [sum((yorder[j].scale(int(Minv[i, j])) for j in range(R.n) if Minv[i, j]), U.zero())
           for i in range(R.n)]
    psi = RingMap(R, U, sub)
    J = eliminate(Ideal(U, [psi(g) for g in S.ideal.gens]), k)
    out = Ideal(T, [T.convert(g) for g in minimal_generators(J).gens]) if J.gens else Ideal(T, [])
    return SurfaceModel(out, meta, None)


def pushforward_module(S: SurfaceModel, center: np.ndarray, *, max_degree: int = 4,
                       check_degrees=range(0, 9), prefix: str = "x") -> Module:
    """``R_S`` as a module over the coordinate ring of the projection target.

    Generators are ``1`` and linear forms completing the projection forms
    to a basis; relations are found degree by degree up to ``max_degree``
    and certified by comparing the Hilbert function with that of ``R_S``.
    """
    from .resolve import GradedMatrix, GradedRing, minimize_presentation
    if S.param is None:
        raise ValueError("pushforward needs a parametrized surface")
    R = S.ring
    p = R.p
    forms = projection_forms(R, center)
    basis = [np.array(_coeffs(f), dtype=np.int64) for f in forms]
    extra = []
    for e in np.eye(R.n, dtype=np.int64):
        if len(basis) == R.n:
            break
        if ffield.rank(np.array(basis + [e]), p) > len(basis):
            basis.append(e)
            extra.append(R.gens()[int(np.flatnonzero(e)[0])])
    T = PolyRing(len(forms), p=p, prefix=prefix)
    par = S.param
    tvars = [par(g) for g in forms]
    gimg = [par.target.one()] + [par(w) for w in extra]
    gdeg = [0] + [1] * len(extra)
    mimg = {T.monomials(0)[0]: par.target.one()}   # monomial -> image, all degrees so far
    rels: list[tuple[int, list[Polynomial]]] = []
    for d in range(max_degree + 1):
        if d:
            for m in T.monomials(d):
                e = list(T.exps(m))
                i = next(j for j, x in enumerate(e) if x)
                e[i] -= 1
                mimg[m] = mimg[T.encode(e)] * tvars[i]
        # source basis in degree d: (generator g, monomial of degree d - gdeg[g])
        src = [(g, m) for g in range(len(gimg)) if d - gdeg[g] >= 0
               for m in T.monomials(d - gdeg[g])]
        tmons = {k: i for i, k in enumerate(par.target.monomials(d * par.degree))}
        A = np.zeros((len(tmons), len(src)), dtype=np.int64)
        for j, (g, m) in enumerate(src):
            for k, c in (mimg[m] * gimg[g]).terms.items():
                A[tmons[k], j] = c
        K = ffield.kernel(A, p)
        if K.shape[0] == 0:
            continue
        pos = {sm: j for j, sm in enumerate(src)}
        span = ffield.RowSpace(len(src), p)
        for rd, col in rels:
            for m in T.monomials(d - rd):
                v = np.zeros(len(src), dtype=np.int64)
                for g, f in enumerate(col):
                    for k, c in f.terms.items():
                        v[pos[(g, k + m)]] = c
                span.add(v)
        for v in K:
            if span.add(v):
                col = [T.zero() for _ in gimg]
                for (g, m), c in zip(src, v):
                    if c:
                        col[g] = col[g] + Polynomial(T, {m: int(c)})
                rels.append((d, col))
    pres = GradedMatrix(T, gdeg, [d for d, _ in rels], [c for _, c in rels])
    M = minimize_presentation(Module(pres, GradedRing(T)))
    H = S.hilbert()
    for d in check_degrees:
        if M.hilbert_value(d) != H.value(d):
            raise GenericityFailure("pushforward presentation fails the Hilbert check")
    return M


def _coeffs(f: Polynomial) -> list[int]:
    R = f.ring
    v = [0] * R.n
    for k, c in f.terms.items():
        e = R.exps(k)
        v[e.index(1)] = c
    return v


# -- invariants -------------------------------------------------------------------

def hyperplane_section(I: Ideal, seed: int, prefix: str = "x") -> Ideal:
    """Saturated ideal of ``V(I) ∩ H`` for a seeded random hyperplane ``H``,
    in the coordinates of ``H`` (one variable fewer)."""
    R = I.ring
    rng = random.Random(seed)
    coeffs = [rng.randrange(R.p) for _ in range(R.n - 1)]
    T = PolyRing(R.n - 1, p=R.p, prefix=prefix)
    t = T.gens()
    last = sum((t[i].scale(c) for i, c in enumerate(coeffs) if c), T.zero())
    phi = RingMap(R, T, t + [last])
    J = Ideal(T, [g for g in (phi(f) for f in I.gens) if g.terms])
    J = saturate_irrelevant(J)
    return minimal_generators(J)


def curve_degree_genus(H: HilbertData) -> tuple[int, int]:
    """From a curve's Hilbert polynomial ``d t + 1 - g``."""
    a, b = H.poly_value(20), H.poly_value(21)
    d = b - a
    return d, 1 - (a - 20 * d)


def surface_degree_genus(H: HilbertData) -> tuple[int, int]:
    """From ``ΔP(t) = d t + 1 - g`` of the surface's Hilbert polynomial."""
    D = lambda t: H.poly_value(t) - H.poly_value(t - 1)
    d = D(21) - D(20)
    return d, 1 - (D(20) - 20 * d)


def rao_module(S: SurfaceModel | Ideal, window=(-3, 6)) -> dict[int, int]:
    """``m -> h^1(I(m))`` on the window, via ``H^1_m(R/I)``."""
    I = S.ideal if isinstance(S, SurfaceModel) else S
    F = S.resolution() if isinstance(S, SurfaceModel) else minimal_free_resolution(Module.quotient(I))
    return local_cohomology_dims(F, 1, range(window[0], window[1] + 1))


def surface_invariants(S: SurfaceModel, *, seeds=(), window=(-3, 8)) -> dict:
    """Degree, sectional genus, codimension, ACM and maximal-rank flags.

    Degree and genus come from the Hilbert polynomial; with ``seeds`` the
    genus is also recomputed from actual hyperplane sections.
    """
    H = S.hilbert()
    num, dim = H.reduced()
    N = S.ring.n
    codim = N - dim
    F = S.resolution()
    acm = len(F.maps) == codim
    if dim == 3:
        d, g = surface_degree_genus(H)
    else:
        d, g = curve_degree_genus(H)
    rao = rao_module(S, window)
    max_rank = all(rao[m] == 0 or _ideal_dim(S, m) == 0 for m in rao)
    out = {"degree": d, "sectional_genus": g, "codim": codim, "acm": acm,
           "maximal_rank": max_rank, "rao": rao}
    if seeds:
        gens = []
        for s in seeds:
            C = hyperplane_section(S.ideal, s)
            gens.append(curve_degree_genus(hilbert(Module.quotient(C)))[1] if dim == 3 else g)
        out["slice_genera"] = gens
    return out


def _ideal_dim(S: SurfaceModel, m: int) -> int:
    if m < 0:
        return 0
    return S.ring.num_monomials(m) - S.module().hilbert_value(m)


# -- scrolls and linkage -------------------------------------------------------------

def scroll_ideal(partition, R: PolyRing | None = None, p: int = DEFAULT_PRIME) -> Ideal:
    """2×2 minors of the block matrix ``[[x_s..x_{s+a-1}], [x_{s+1}..x_{s+a}]]``
    for the rational normal scroll ``S(a_1, ..., a_k)``."""
    part = list(partition)
    if not part or any(a < 1 for a in part):
        raise BadPartition("scroll partition must be positive integers")
    n = sum(a + 1 for a in part)
    if R is None:
        R = PolyRing(n, p=p)
    if R.n != n:
        raise BadPartition(f"partition {part} needs {n} variables, ring has {R.n}")
    x = R.gens()
    top, bot = [], []
    s = 0
    for a in part:
        top += x[s:s + a]
        bot += x[s + 1:s + a + 1]
        s += a + 1
    gens = []
    for i, j in combinations(range(len(top)), 2):
        m = top[i] * bot[j] - top[j] * bot[i]
        if m.terms:
            gens.append(m)
    return minimal_generators(Ideal(R, gens))


def conic_through(cfg: PointConfig, idx, seed: int) -> tuple[Polynomial, list[Polynomial]]:
    """A seeded conic through the points ``idx`` of ``cfg`` and a rational
    parametrization ``P^1 -> conic`` by binary quadrics.

    The pencil (four points) or net is cut down with seeded random points
    of P²; the parametrization projects from the first point.
    """
    S2 = plane_ring(cfg.p)
    p = cfg.p
    rng = random.Random(f"conic:{seed}")   # tagged: must not replay the point stream
    mons = S2.monomials(2)
    pts = [cfg.points[i] for i in idx]
    for _ in range(MAX_RETRIES):
        extra = [tuple(rng.randrange(p) for _ in range(3)) for _ in range(5 - len(pts))]
        rows = [[S2.monomial(S2.exps(m)).evaluate(pt) for m in mons] for pt in pts + extra]
        K = ffield.kernel(np.array(rows, dtype=np.int64), p)
        if K.shape[0] != 1:
            continue
        Q = Polynomial(S2, {m: int(c) for m, c in zip(mons, K[0]) if c})
        if _conic_rank(Q) < 3:
            continue
        break
    else:
        raise GenericityFailure("no smooth conic through the points")
    P0 = [int(c) for c in pts[0]]
    # directions spanning a complement of P0
    basis = [P0]
    for e in np.eye(3, dtype=np.int64):
        if len(basis) < 3 and ffield.rank(np.array(basis + [list(map(int, e))]), p) > len(basis):
            basis.append(list(map(int, e)))
    comp = basis[1:]
    L = PolyRing(2, p=p, var_names=["a", "b"])
    a, b = L.gens()
    v = [a.scale(comp[0][i]) + b.scale(comp[1][i]) for i in range(3)]
    sub = RingMap(S2, L, v)
    Qv = sub(Q)
    # bilinear form B(P0, v) = Σ P0_i ∂Q/∂x_i (v) / 2
    Bv = sum((sub(Q.diff(i)).scale(P0[i]) for i in range(3) if P0[i]), L.zero())
    # point = Q(v) P0 - B(P0, v) v with B the polar (factor 2 absorbed)
    param = [Qv.scale(P0[i]) - Bv * v[i] for i in range(3)]
    return Q, param


def _conic_rank(Q: Polynomial) -> int:
    S2 = Q.ring
    M = np.zeros((3, 3), dtype=np.int64)
    for i in range(3):
        for j in range(3):
            d = Q.diff(i).diff(j)
            M[i, j] = d.constant_coeff() if d.terms else 0
    return ffield.rank(M, S2.p)


def curve_image(phi: RingMap, param: list[Polynomial], genus: int = 0, *,
                max_degree: int = 6) -> tuple[Ideal, RingMap]:
    """Ideal of the image of ``P^1 --param--> P² --phi--> P^N`` and the composite map.

    Base points are harmless: a common factor of the composite forms does
    not change the kernel.  Certified by depth and the Hilbert polynomial
    ``deg·t + 1 - genus`` (the degree is read off the truncated kernel).
    """
    L = param[0].ring
    sub = RingMap(phi.target, L, param)
    psi = RingMap(phi.source, L, [sub(g) for g in phi.images])
    for D in range(2, max_degree + 1):
        J = kernel_linear(psi, D)
        if not J.gens:
            continue
        F = minimal_free_resolution(Module.quotient(J))
        if len(F.maps) >= J.ring.n:
            continue
        H = hilbert(Module.quotient(J))
        deg, dim = H.degree_and_dim()
        if dim == 2 and all(H.poly_value(t) == deg * t + 1 - genus for t in range(3, 8)):
            return J, psi
    raise GenericityFailure("curve image not certified by the degree bound")


def scroll_through_curve(psi: RingMap) -> tuple[list[list[Polynomial]], Ideal]:
    """A 2×k matrix of linear forms whose 2×2 minors vanish on the rational
    curve parametrized by ``psi`` (forms in ``a, b``).

    Columns come from ``W = {g : a·g, b·g ∈ V}`` with ``V`` the span of the
    coordinate forms; each column is ``(a·g, b·g)`` written in the coordinates.
    """
    T, L = psi.source, psi.target
    p = T.p
    e = psi.images[0].degree
    mons = L.monomials(e)
    pos = {m: i for i, m in enumerate(mons)}
    V = np.zeros((len(mons), T.n), dtype=np.int64)
    for i, g in enumerate(psi.images):
        for k, c in g.terms.items():
            V[pos[k], i] = c
    Vperp = ffield.left_kernel(V, p)        # functionals cutting out V
    a, b = L.gens()
    gm = L.monomials(e - 1)
    blocks = []
    for x in (a, b):
        M = np.zeros((len(mons), len(gm)), dtype=np.int64)
        for j, m in enumerate(gm):
            for k, c in (x * Polynomial(L, {m: 1})).terms.items():
                M[pos[k], j] = c
        blocks.append(ffield.matmul_mod(Vperp, M, p))
    W = ffield.kernel(np.concatenate(blocks), p)
    rows: list[list[Polynomial]] = [[], []]
    x = T.gens()
    for w in W:
        g = Polynomial(L, {m: int(c) for m, c in zip(gm, w) if c})
        for r, y in enumerate((a, b)):
            h = y * g
            vec = np.zeros(len(mons), dtype=np.int64)
            for k, c in h.terms.items():
                vec[pos[k]] = c
            coef = ffield.solve(V, vec, p)
            rows[r].append(sum((x[i].scale(int(coef[i])) for i in range(T.n) if coef[i]),
                               T.zero()))
    gens = [rows[0][i] * rows[1][j] - rows[0][j] * rows[1][i]
            for i, j in combinations(range(len(rows[0])), 2)]
    gens = [g for g in gens if g.terms]
    return rows, minimal_generators(Ideal(T, gens))


def column_subscroll(rows, ncols: int, seed: int) -> Ideal:
    """Minors of ``rows · C`` for a seeded random column reduction ``C`` to ``ncols`` columns."""
    T = rows[0][0].ring
    rng = random.Random(seed)
    k = len(rows[0])
    C = [[rng.randrange(T.p) for _ in range(ncols)] for _ in range(k)]
    new = [[sum((rows[r][i].scale(C[i][j]) for i in range(k)), T.zero()) for j in range(ncols)]
           for r in range(2)]
    gens = [new[0][i] * new[1][j] - new[0][j] * new[1][i]
            for i, j in combinations(range(ncols), 2)]
    return minimal_generators(Ideal(T, [g for g in gens if g.terms]))


def linkage(total: Ideal, part: Ideal) -> Ideal:
    """Residual ``(total : part)``, saturated."""
    Gp = groebner_basis(part)
    if not all(Gp.contains(g) for g in total.gens):
        raise ValueError("part must contain total")
    Q = ideal_quotient(total, part)
    return minimal_generators(saturate_irrelevant(Q))


def degree_of(I: Ideal) -> int:
    return hilbert(Module.quotient(I)).degree_and_dim()[0]


def smoothness_check(S: SurfaceModel, max_minors: int = 2000, seed: int = 1) -> bool:
    """Opt-in: singular locus (ideal + Jacobian minors) is empty.

    Minors come from ``c`` seeded random combinations of the generators
    (``c`` the codimension).  One such choice is singular wherever ``S``
    meets the residual of the complete intersection, so ``dim + 1``
    independent choices are used; their bad loci have empty common
    intersection for general seeds.  ``True`` is a certificate, ``False``
    may be a false alarm from an unlucky seed.
    """
    I = S.ideal
    R = I.ring
    H = S.hilbert()
    _, dim = H.reduced()
    c = R.n - dim
    gens = I.gens
    rng = random.Random(f"smooth:{seed}")
    dmax = max(g.degree for g in gens)
    minors = []
    for _ in range(dim + 1):
        rows = []
        for _ in range(c):
            f = R.zero()
            for g in gens:
                f = f + g * _rand_form_deg(R, dmax - g.degree, rng)
            rows.append([f.diff(i) for i in range(R.n)])
        for cols in combinations(range(R.n), c):
            minors.append(_det([[rows[i][j] for j in cols] for i in range(c)]))
            if len(minors) >= max_minors:
                break
    J = Ideal(R, list(gens) + [m for m in minors if m.terms])
    sat = saturate_irrelevant(Ideal(R, groebner_basis(J).basis))
    return groebner_basis(sat).is_unit()


def _rand_form_deg(R: PolyRing, d: int, rng) -> Polynomial:
    return Polynomial(R, {m: rng.randrange(1, R.p) for m in R.monomials(d)})


def _det(M):
    n = len(M)
    if n == 1:
        return M[0][0]
    out = None
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in M[1:]]
        t = M[0][j] * _det(minor)
        out = t if out is None else (out + t if j % 2 == 0 else out - t)
    return out
