"""Buchberger's algorithm for ideals and graded submodules of free modules.

Everything runs on integer monomial keys (see :mod:`polyring`).  A
:class:`KeySpace` describes how keys of free-module elements are laid out:
ideals use the ring's own keys; modules append a component index in the low
bits and fold the generator twist into the degree digit, which gives a
degree-compatible term-over-position order.  An optional *block* above
everything else realises the elimination order used for syzygies.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import ffield
from .errors import DegreeCapExceeded, RingMismatch
from .polyring import (BITS, GREVLEX, Ideal, MonomialOrder, Polynomial, PolyRing,
                       RingMap, elimination, mul_terms)

DEFAULT_DEGREE_CAP = 40


class KeySpace:
    """Key layout for a free module ``⊕ R(-twists[c])`` (rank 1 = the ring)."""

    def __init__(self, ring: PolyRing, twists: Sequence[int] | None = None,
                 blocks: Sequence[int] | None = None):
        self.ring = ring
        self.p = ring.p
        twists = list(twists) if twists is not None else [0]
        self.twists = twists
        self.rank = len(twists)
        self.module = not (self.rank == 1 and twists[0] == 0 and not blocks)
        if not self.module:
            self.cb = 0
            return
        if ring.order != GREVLEX:
            raise RingMismatch("module keys need a grevlex ring")
        self.blocks = list(blocks) if blocks is not None else [0] * self.rank
        self.cb = max(1, (self.rank - 1).bit_length())
        self.cmask = (1 << self.cb) - 1
        self.tmin = min(twists) if twists else 0
        # degree digit sits at the top of ORD; give it room for twists
        self.degshift = ring.ebits + self.cb + BITS * (ring.n - 1)
        self.blkshift = self.degshift + 24
        self.ebase = [((t - self.tmin) << self.degshift) | (b << self.blkshift) | c
                      for c, (t, b) in enumerate(zip(twists, self.blocks))]

    # keys ---------------------------------------------------------------
    def key(self, mono: int, comp: int = 0) -> int:
        if not self.module:
            return mono
        return (mono << self.cb) + self.ebase[comp]

    def comp(self, key: int) -> int:
        return key & self.cmask if self.module else 0

    def mono(self, key: int) -> int:
        """Ring monomial key underlying a module key."""
        if not self.module:
            return key
        return (key - self.ebase[key & self.cmask]) >> self.cb

    def E(self, key: int) -> int:
        return (key >> self.cb) & self.ring.emask

    def shift(self, mono: int) -> int:
        """Turn a ring monomial key into an additive shift on module keys."""
        return mono << self.cb if self.module else mono

    def deg(self, key: int) -> int:
        if not self.module:
            return self.ring.kdeg(key)
        return self.ring.kdeg(self.mono(key)) + self.twists[key & self.cmask]

    def divides(self, a: int, b: int) -> bool:
        R = self.ring
        if self.module:
            if (a ^ b) & self.cmask:
                return False
            g = R.guard
            return ((((b >> self.cb) & R.emask) | g) - ((a >> self.cb) & R.emask)) & g == g
        return R.divides(a, b)

    def lcm(self, a: int, b: int) -> int:
        if not self.module:
            return self.ring.lcm_key(a, b)
        return self.key(self.ring.lcm_key(self.mono(a), self.mono(b)), a & self.cmask)

    def coprime(self, a: int, b: int) -> bool:
        return self.ring.coprime(self.mono(a), self.mono(b))

    # conversion -----------------------------------------------------------
    def from_column(self, col: Sequence[Polynomial]) -> dict[int, int]:
        out = {}
        for c, f in enumerate(col):
            if f is None:
                continue
            for k, v in f.terms.items():
                out[self.key(k, c)] = v
        return out

    def to_column(self, vec: dict[int, int]) -> list[Polynomial]:
        cols = [dict() for _ in range(self.rank)]
        for k, v in vec.items():
            cols[self.comp(k)][self.mono(k)] = v
        return [Polynomial(self.ring, d) for d in cols]


def ideal_space(ring: PolyRing) -> KeySpace:
    return KeySpace(ring)


# -- reduction -------------------------------------------------------------------

class DivisorIndex:
    """Finds the first basis element whose lead key divides a given key."""

    def __init__(self, space: KeySpace):
        self.space = space
        self.leads: list[int] = []
        self.active: list[bool] = []
        self.bycomp: dict[int, list[int]] = {}
        self.cache: dict[int, int] = {}

    def add(self, lead: int) -> int:
        i = len(self.leads)
        self.leads.append(lead)
        self.active.append(True)
        self.bycomp.setdefault(self.space.comp(lead), []).append(i)
        self.cache.clear()
        return i

    def deactivate(self, i: int):
        self.active[i] = False
        self.cache.clear()

    def find(self, key: int) -> int:
        sp = self.space
        # the cache is keyed by exponent+component; twists/blocks follow from it
        ck = key if not sp.module else (sp.E(key) << sp.cb) | sp.comp(key)
        hit = self.cache.get(ck)
        if hit is not None:
            return hit
        res = -1
        div = sp.divides
        leads, active = self.leads, self.active
        for i in self.bycomp.get(sp.comp(key), ()):
            if active[i] and div(leads[i], key):
                res = i
                break
        self.cache[ck] = res
        return res


def reduce_vec(f: dict[int, int], basis: list[dict[int, int]], index: DivisorIndex,
               p: int, full: bool = True, stop_below: int | None = None):
    """Normal form of ``f``; basis elements must be monic.

    Returns ``(remainder, rest)``: ``rest`` is non-empty only when
    ``stop_below`` is set, and holds the untouched terms with key below it
    (used for the syzygy block of augmented modules).
    """
    f = dict(f)
    if not f:
        return {}, {}
    heap = [-k for k in f]
    heapq.heapify(heap)
    out: dict[int, int] = {}
    leads = index.leads
    pop = heapq.heappop
    push = heapq.heappush
    while heap:
        k = -pop(heap)
        c = f.pop(k, 0)
        if not c:
            continue
        if stop_below is not None and k < stop_below:
            f[k] = c
            break
        i = index.find(k)
        if i < 0:
            out[k] = c
            if not full:
                # top reduction only: keep remaining terms as they are
                out.update(f)
                return out, {}
            continue
        g = basis[i]
        sh = k - leads[i]
        neg = p - c
        lead = leads[i]
        for kg, cg in g.items():
            if kg == lead:
                continue
            kk = kg + sh
            v = f.get(kk)
            if v is None:
                f[kk] = neg * cg % p
                push(heap, -kk)
            else:
                v = (v + neg * cg) % p
                if v:
                    f[kk] = v
                else:
                    del f[kk]
    rest = f if stop_below is not None else {}
    return out, rest


def _monic(f: dict[int, int], p: int) -> dict[int, int]:
    lead = max(f)
    c = f[lead]
    if c == 1:
        return f
    inv = pow(c, -1, p)
    return {k: v * inv % p for k, v in f.items()}


def _ecart_sugar(f: dict[int, int], space: KeySpace) -> int:
    return max(space.deg(k) for k in f)


# -- Buchberger -------------------------------------------------------------------

@dataclass
class BuchbergerResult:
    basis: list[dict[int, int]]
    syzygies: list[dict[int, int]] = field(default_factory=list)
    pairs_reduced: int = 0


def buchberger(gens: Iterable[dict[int, int]], space: KeySpace, *,
               degree_cap: int = DEFAULT_DEGREE_CAP,
               syz_split: int | None = None, reduce_result: bool = True,
               max_degree: int | None = None) -> BuchbergerResult:
    """Gröbner basis of the submodule generated by ``gens``.

    With ``syz_split`` set, keys below ``syz_split`` form the second block
    of an augmented module; elements whose first-block part reduces to zero
    are returned as syzygies instead of entering the basis.  In that mode no
    basis element is ever discarded and the coprime criterion is off, so the
    collected syzygies generate the full syzygy module.

    ``max_degree`` truncates a homogeneous computation (a d-truncated basis).
    """
    p = space.p
    syz_mode = syz_split is not None
    basis: list[dict[int, int]] = []
    sugar: list[int] = []
    index = DivisorIndex(space)
    pairs: list[tuple] = []  # heap of (sugar, lcm, i, j)
    syzygies: list[dict[int, int]] = []
    lcm, divides, coprime = space.lcm, space.divides, space.coprime
    comp = space.comp
    use_product = not syz_mode and not space.module
    nred = 0

    def insert(h: dict[int, int], s: int):
        h = _monic(h, p)
        lh = max(h)
        t = len(basis)
        # Gebauer-Möller update: criteria M and F, then the product criterion
        cands = []
        for i in range(t):
            li = index.leads[i]
            if not index.active[i] or comp(li) != comp(lh):
                continue
            L = lcm(li, lh)
            sg = max(sugar[i] + space.deg(L) - space.deg(li), s + space.deg(L) - space.deg(lh))
            cands.append((L, i, sg, use_product and coprime(li, lh)))
        Ls = [c[0] for c in cands]
        groups: dict[int, list] = {}
        for L, i, sg, cp in cands:
            if any(L2 != L and divides(L2, L) for L2 in Ls):
                continue
            groups.setdefault(L, []).append((L, i, sg, cp))
        newpairs = []
        for L, grp in groups.items():
            if any(cp for (_, _, _, cp) in grp):
                continue
            _, i, sg, _ = grp[0]
            newpairs.append((sg, L, i, t))
        # chain criterion on old pairs
        lhE = lh
        survivors = []
        for pr in pairs:
            sg, L, i, j = pr
            if (divides(lhE, L) and comp(L) == comp(lh)
                    and lcm(index.leads[i], lh) != L and lcm(index.leads[j], lh) != L):
                continue
            survivors.append(pr)
        pairs[:] = survivors
        for pr in newpairs:
            pairs.append(pr)
        heapq.heapify(pairs)
        basis.append(h)
        sugar.append(s)
        index.add(lh)
        if not syz_mode:
            for i in range(t):
                if index.active[i] and divides(lh, index.leads[i]):
                    index.deactivate(i)
        return t

    # seed with generators, lowest degree first for determinism
    gl = [dict(g) for g in gens if g]
    gl.sort(key=lambda g: (_ecart_sugar(g, space), max(g)))
    pending = [(_ecart_sugar(g, space), n, g) for n, g in enumerate(gl)]
    heapq.heapify(pending)

    def process(h, s):
        if syz_mode:
            r, rest = reduce_vec(h, basis, index, p, full=True, stop_below=syz_split)
            if not r:
                if rest:
                    syzygies.append(rest)
                return
            r.update(rest)
            insert(r, s)
        else:
            r, _ = reduce_vec(h, basis, index, p, full=True)
            if r:
                insert(r, s)

    while pairs or pending:
        # next item: generator or pair of lowest sugar
        take_gen = pending and (not pairs or pending[0][0] <= pairs[0][0])
        if take_gen:
            s, _, g = heapq.heappop(pending)
            if max_degree is not None and s > max_degree:
                continue
            if s > degree_cap:
                raise DegreeCapExceeded(f"generator of degree {s} exceeds cap {degree_cap}")
            process(g, s)
            continue
        s, L, i, j = heapq.heappop(pairs)
        if max_degree is not None and s > max_degree:
            pairs.clear()
            continue
        if s > degree_cap:
            raise DegreeCapExceeded(f"S-pair of degree {s} exceeds cap {degree_cap}")
        gi, gj = basis[i], basis[j]
        li, lj = index.leads[i], index.leads[j]
        si, sj = L - li, L - lj
        spoly: dict[int, int] = {}
        for k, v in gi.items():
            spoly[k + si] = v
        for k, v in gj.items():
            kk = k + sj
            w = (spoly.get(kk, 0) - v) % p
            if w:
                spoly[kk] = w
            else:
                spoly.pop(kk, None)
        nred += 1
        process(spoly, s)

    final = [basis[i] for i in range(len(basis)) if index.active[i]]
    if reduce_result and not syz_mode:
        final = interreduce(final, space)
    return BuchbergerResult(final if not syz_mode else basis, syzygies, nred)


def interreduce(basis: list[dict[int, int]], space: KeySpace) -> list[dict[int, int]]:
    """Reduced Gröbner basis from a Gröbner basis (minimal leads, tails reduced)."""
    p = space.p
    items = sorted((_monic(g, p) for g in basis if g), key=max)
    minimal: list[dict[int, int]] = []
    for g in items:
        lg = max(g)
        if any(space.divides(max(h), lg) for h in minimal):
            continue
        minimal = [h for h in minimal if not space.divides(lg, max(h))]
        minimal.append(g)
    minimal.sort(key=max)
    out = []
    for t, g in enumerate(minimal):
        others = minimal[:t] + minimal[t + 1:]
        idx = DivisorIndex(space)
        for h in others:
            idx.add(max(h))
        lg = max(g)
        tail = {k: v for k, v in g.items() if k != lg}
        r, _ = reduce_vec(tail, others, idx, p)
        r[lg] = 1
        out.append(r)
    out.sort(key=max)
    return out


# -- public ideal layer ------------------------------------------------------------

class GroebnerBasis:
    """A Gröbner basis of an ideal; ``basis`` sorted by ascending lead term."""

    def __init__(self, ideal: Ideal, basis: list[Polynomial], reduced: bool = True):
        self.ideal = ideal
        self.ring = ideal.ring
        self.order = ideal.ring.order
        self.basis = basis
        self.reduced = reduced
        self._space = ideal_space(self.ring)
        self._index = DivisorIndex(self._space)
        self._dicts = [g.terms for g in basis]
        for g in basis:
            self._index.add(g.lm)

    def __len__(self):
        return len(self.basis)

    def __iter__(self):
        return iter(self.basis)

    def leading_monomials(self) -> list[int]:
        return [g.lm for g in self.basis]

    def normal_form(self, f: Polynomial) -> Polynomial:
        if f.ring != self.ring:
            raise RingMismatch("polynomial from another ring")
        r, _ = reduce_vec(f.terms, self._dicts, self._index, self.ring.p)
        return Polynomial(self.ring, r)

    def contains(self, f: Polynomial) -> bool:
        return self.normal_form(f).is_zero()

    def is_unit(self) -> bool:
        return any(g.lm == 0 for g in self.basis)

    def max_degree(self) -> int:
        return max((g.degree for g in self.basis), default=0)

    def same_ideal(self, other: "GroebnerBasis") -> bool:
        return self.reduced and other.reduced and \
            sorted(map(_fz, self.basis)) == sorted(map(_fz, other.basis))

    def to_ideal(self) -> Ideal:
        return Ideal(self.ring, self.basis)


def _fz(g: Polynomial):
    return tuple(sorted(g.terms.items()))


def groebner_basis(I: Ideal, order: MonomialOrder | None = None, *,
                   degree_cap: int = DEFAULT_DEGREE_CAP) -> GroebnerBasis:
    R = I.ring
    if order is not None and order != R.order:
        R2 = R.with_order(order)
        I = Ideal(R2, [R2.convert(g) for g in I.gens])
        R = R2
    res = buchberger((g.terms for g in I.gens), ideal_space(R), degree_cap=degree_cap)
    return GroebnerBasis(I, [Polynomial(R, g) for g in res.basis])


def normal_form(f: Polynomial, G: GroebnerBasis) -> Polynomial:
    return G.normal_form(f)


def spair_fixpoint(G: GroebnerBasis) -> bool:
    """Re-check Buchberger's criterion: every S-polynomial reduces to zero."""
    R, p = G.ring, G.ring.p
    B = G.basis
    for i in range(len(B)):
        for j in range(i + 1, len(B)):
            li, lj = B[i].lm, B[j].lm
            L = R.lcm_key(li, lj)
            s = B[i].mul_term(L - li, pow(B[i].lc, -1, p)) - B[j].mul_term(L - lj, pow(B[j].lc, -1, p))
            if not G.normal_form(s).is_zero():
                return False
    return True


def generates(G: GroebnerBasis, I: Ideal) -> bool:
    return all(G.contains(g) for g in I.gens)


# -- derived ideal operations -----------------------------------------------------

def _extend(R: PolyRing, front: Sequence[str], order: MonomialOrder) -> PolyRing:
    return PolyRing(p=R.field, var_names=list(front) + list(R.var_names), order=order)


def _lift(f: Polynomial, S: PolyRing, offset: int) -> Polynomial:
    """Embed ``f`` into ``S`` whose last variables are ``f.ring``'s."""
    R = f.ring
    z = (0,) * offset
    return S.from_terms((z + R.exps(k), c) for k, c in f.terms.items())


def _drop(f: Polynomial, R: PolyRing, offset: int) -> Polynomial:
    S = f.ring
    return R.from_terms((S.exps(k)[offset:], c) for k, c in f.terms.items())


def _fresh(R: PolyRing, stem: str, k: int) -> list[str]:
    names = []
    i = 0
    while len(names) < k:
        nm = f"{stem}{i}"
        if nm not in R.var_names:
            names.append(nm)
        i += 1
    return names


def eliminate(I: Ideal, k: int, *, degree_cap: int = DEFAULT_DEGREE_CAP) -> Ideal:
    """``I ∩ k[x_k, ..., x_{n-1}]``: drop the leading ``k`` variables.

    The result lives in the ring of the remaining variables (grevlex).
    """
    R = I.ring
    if k == 0:
        return Ideal(R, I.gens)
    S = PolyRing(p=R.field, var_names=R.var_names, order=elimination(k))
    G = groebner_basis(Ideal(S, [S.convert(g) for g in I.gens]), degree_cap=degree_cap)
    T = PolyRing(p=R.field, var_names=R.var_names[k:])
    keep = [g for g in G.basis if all(e == 0 for e in S.exps(g.lm)[:k])]
    return Ideal(T, [_drop(g, T, k) for g in keep])


def intersect(I: Ideal, J: Ideal, *, degree_cap: int = DEFAULT_DEGREE_CAP) -> Ideal:
    """``I ∩ J`` by the t-trick."""
    R = I.ring
    if J.ring != R:
        raise RingMismatch("ideals in different rings")
    if I.is_zero() or J.is_zero():
        return Ideal(R, [])
    (tn,) = _fresh(R, "t", 1)
    S = _extend(R, [tn], elimination(1))
    t = S.var(0)
    gens = [t * _lift(f, S, 1) for f in I.gens] + [(S.one() - t) * _lift(g, S, 1) for g in J.gens]
    G = groebner_basis(Ideal(S, gens), degree_cap=degree_cap)
    keep = [g for g in G.basis if S.exps(g.lm)[0] == 0]
    R0 = R.with_order(GREVLEX) if R.order != GREVLEX else R
    out = [_drop(g, R0, 1) for g in keep]
    return Ideal(R, [R.convert(g) for g in out])


def divide_exact(h: Polynomial, g: Polynomial) -> Polynomial:
    """``h / g`` when ``g`` divides ``h`` exactly (multivariate division)."""
    R = h.ring
    p = R.p
    lg, cg = g.lm, g.lc
    inv = pow(cg, -1, p)
    rem = dict(h.terms)
    q: dict[int, int] = {}
    while rem:
        k = max(rem)
        if not R.divides(lg, k):
            raise ArithmeticError("division is not exact")
        c = rem[k] * inv % p
        sh = k - lg
        q[sh] = c
        for kg, vg in g.terms.items():
            kk = kg + sh
            v = (rem.get(kk, 0) - c * vg) % p
            if v:
                rem[kk] = v
            else:
                rem.pop(kk, None)
    return Polynomial(R, q)


def quotient_by_element(I: Ideal, g: Polynomial, **kw) -> Ideal:
    if g.is_zero():
        return Ideal(I.ring, [I.ring.one()])
    if g.is_constant():
        return Ideal(I.ring, I.gens)
    inter = intersect(I, Ideal(I.ring, [g]), **kw)
    return Ideal(I.ring, [divide_exact(h, g) for h in inter.gens])


def ideal_quotient(I: Ideal, J: Ideal, **kw) -> Ideal:
    """``(I : J)``, intersecting the quotients by each generator of ``J``."""
    R = I.ring
    if J.is_zero():
        return Ideal(R, [R.one()])
    out = None
    for g in J.gens:
        Q = quotient_by_element(I, g, **kw)
        out = Q if out is None else intersect(out, Q, **kw)
    G = groebner_basis(out, **kw)
    return Ideal(R, G.basis)


def saturation(I: Ideal, J: Ideal, *, max_iter: int = 64, **kw) -> Ideal:
    """``(I : J^∞)`` by iterated quotients until the reduced bases agree."""
    cur = groebner_basis(I, **kw)
    for _ in range(max_iter):
        nxt = groebner_basis(ideal_quotient(cur.to_ideal(), J, **kw), **kw)
        if nxt.same_ideal(cur):
            return cur.to_ideal()
        cur = nxt
    raise RuntimeError("saturation did not stabilise")


def saturate_by_variable(I: Ideal, i: int, **kw) -> Ideal:
    """``(I : x_i^∞)`` for homogeneous ``I`` (Bayer's grevlex trick)."""
    R = I.ring
    n = R.n
    perm = list(range(n))
    perm[i], perm[n - 1] = perm[n - 1], perm[i]
    names = [R.var_names[j] for j in perm]
    S = PolyRing(p=R.field, var_names=names)
    swap = lambda f, A, B: B.from_terms((tuple(A.exps(k)[j] for j in perm), c) for k, c in f.terms.items())
    G = groebner_basis(Ideal(S, [swap(g, R, S) for g in I.gens]), **kw)
    out = []
    for g in G.basis:
        m = min(S.exps(k)[n - 1] for k in g.terms)
        if m:
            g = S.from_terms((e[:-1] + (e[-1] - m,), c) for e, c in g.term_list())
        out.append(swap(g, S, R))
    return Ideal(R, groebner_basis(Ideal(R, out), **kw).basis)


def saturate_irrelevant(I: Ideal, **kw) -> Ideal:
    """``(I : m^∞)`` for homogeneous ``I``.

    After a generic linear change of coordinates the saturation equals the
    saturation by the last variable; the answer is mapped back.
    """
    from .polyring import random_linear_form
    R = I.ring
    import random as _r
    rng = _r.Random(7919)
    n, p = R.n, R.p
    while True:
        M = np.array([[rng.randrange(p) for _ in range(n)] for _ in range(n)], dtype=np.int64)
        if ffield.rank(M, p) == n:
            break
    Minv = ffield.solve(M, np.eye(n, dtype=np.int64), p)
    fwd = RingMap(R, R, [R.from_terms(((tuple(1 if t == j else 0 for t in range(n))), int(M[i, j]))
                                      for j in range(n)) for i in range(n)])
    back = RingMap(R, R, [R.from_terms(((tuple(1 if t == j else 0 for t in range(n))), int(Minv[i, j]))
                                       for j in range(n)) for i in range(n)])
    J = Ideal(R, [fwd(g) for g in I.gens])
    S = saturate_by_variable(J, n - 1, **kw)
    return Ideal(R, groebner_basis(Ideal(R, [back(g) for g in S.gens]), **kw).basis)


def kernel_of_map(phi: RingMap, *, method: str = "graph", max_degree: int | None = None,
                  degree_cap: int = DEFAULT_DEGREE_CAP) -> Ideal:
    """Homogeneous ideal of the closure of the image of ``phi``.

    ``method="graph"`` eliminates the source variables from the graph ideal
    ``<y_i - g_i(x)>``.  ``method="linear"`` computes the kernel of
    ``Sym^d(y) -> R_{dD}(x)`` degree by degree up to ``max_degree`` and keeps
    minimal generators; it needs a graded map.
    """
    if method == "linear":
        return kernel_linear(phi, max_degree if max_degree is not None else 6)
    Tgt, Src = phi.target, phi.source
    xs = [f"_x{i}" for i in range(Tgt.n)]
    ys = [f"_y{i}" for i in range(Src.n)]
    S = PolyRing(p=Tgt.field, var_names=xs + ys, order=elimination(Tgt.n))
    gens = []
    for j, g in enumerate(phi.images):
        lifted = S.from_terms((Tgt.exps(k) + (0,) * Src.n, c) for k, c in g.terms.items())
        gens.append(S.var(Tgt.n + j) - lifted)
    G = groebner_basis(Ideal(S, gens), degree_cap=degree_cap)
    m = Tgt.n
    keep = [g for g in G.basis if all(e == 0 for e in S.exps(g.lm)[:m])]
    out = [Src.from_terms((S.exps(k)[m:], c) for k, c in g.terms.items()) for g in keep]
    J = Ideal(Src, groebner_basis(Ideal(Src, out)).basis)
    return minimal_generators(J) if J.is_homogeneous() else J


def kernel_linear(phi: RingMap, max_degree: int) -> Ideal:
    """Degreewise kernel of a graded ring map, minimal generators up to ``max_degree``."""
    Src, Tgt = phi.source, phi.target
    p = Src.p
    D = phi.degree
    if D is None:
        raise ValueError("linear kernel method needs a graded map")
    gens: list[Polynomial] = []
    for d in range(1, max_degree + 1):
        mons = Src.monomials(d)
        tmons = {k: i for i, k in enumerate(Tgt.monomials(d * D))}
        A = np.zeros((len(tmons), len(mons)), dtype=np.int64)
        for j, m in enumerate(mons):
            img = phi(Polynomial(Src, {m: 1}))
            for k, c in img.terms.items():
                A[tmons[k], j] = c
        K = ffield.kernel(A, p)
        if K.shape[0] == 0:
            continue
        # subtract the part generated in lower degrees
        lower = _degree_piece(gens, d, mons)
        span = ffield.RowSpace(len(mons), p)
        for v in lower:
            span.add(v)
        for v in K:
            if span.add(v):
                gens.append(Polynomial(Src, {m: int(c) for m, c in zip(mons, v) if c}))
    return Ideal(Src, gens)


def _degree_piece(gens: Sequence[Polynomial], d: int, mons: list[int]) -> list[np.ndarray]:
    """Coefficient vectors spanning ``(gens)_d`` in the basis ``mons``."""
    if not gens:
        return []
    R = gens[0].ring
    pos = {k: i for i, k in enumerate(mons)}
    out = []
    for g in gens:
        e = d - g.degree
        if e < 0:
            continue
        for m in R.monomials(e):
            v = np.zeros(len(mons), dtype=np.int64)
            for k, c in g.terms.items():
                v[pos[k + m]] = c
            out.append(v)
    return out


def ideal_degree_piece(I: Ideal | Sequence[Polynomial], d: int) -> tuple[list[int], np.ndarray]:
    """Row-reduced basis of ``I_d`` in the monomial basis of degree ``d``."""
    gens = I.gens if isinstance(I, Ideal) else list(I)
    R = gens[0].ring if gens else None
    if R is None:
        return [], np.zeros((0, 0), dtype=np.int64)
    mons = R.monomials(d)
    rows = _degree_piece(gens, d, mons)
    if not rows:
        return mons, np.zeros((0, len(mons)), dtype=np.int64)
    return mons, ffield.row_space_basis(np.array(rows), R.p)


def minimal_generators(I: Ideal) -> Ideal:
    """Minimal homogeneous generators, chosen degree by degree."""
    R = I.ring
    gens = sorted((g for g in I.gens), key=lambda g: (g.degree, g.sorted_terms()))
    out: list[Polynomial] = []
    for d in sorted({g.degree for g in gens}):
        mons = R.monomials(d)
        pos = {k: i for i, k in enumerate(mons)}
        span = ffield.RowSpace(len(mons), R.p)
        for v in _degree_piece(out, d, mons):
            span.add(v)
        for g in gens:
            if g.degree != d:
                continue
            v = np.zeros(len(mons), dtype=np.int64)
            for k, c in g.terms.items():
                v[pos[k]] = c
            if span.add(v):
                out.append(g)
    return Ideal(R, out)
