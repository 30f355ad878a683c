"""Graded free resolutions, Betti tables, Hilbert series, Ext/Hom and
matrix factorizations.

Modules are given by presentations ``F1 --phi--> F0 -> M -> 0`` over a
graded ring ``A = R/J`` (``J`` zero or principal in practice).  Syzygies
come from a module Gröbner basis of the augmented matrix; everything that
only needs a single graded piece (pruning to minimal generators, Hilbert
values, Ext and Hom dimensions) is plain linear algebra over F_p.
"""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from math import comb, factorial
from typing import Iterable, Sequence

import numpy as np

from . import ffield
from .errors import (DegreeCapExceeded, LiftFailure, NoStabilization, NotAnnihilated, NotMinimal, NotPeriodic,
                     RingMismatch, StepCapExceeded)
from .groebner import (DEFAULT_DEGREE_CAP, DivisorIndex, GroebnerBasis, KeySpace, buchberger,
                       groebner_basis, reduce_vec)
from .polyring import Ideal, Polynomial, PolyRing, print_poly, parse_poly


# -- rings -----------------------------------------------------------------------

class GradedRing:
    """``R/J`` with a fixed Gröbner basis of ``J``; ``J = 0`` gives ``R``."""

    def __init__(self, R: PolyRing, ideal: Ideal | None = None):
        self.R = R
        self.p = R.p
        gens = ideal.gens if ideal is not None else []
        self.gb: GroebnerBasis | None = groebner_basis(Ideal(R, gens)) if gens else None
        self.defining = list(gens)
        self._basis: dict[int, list[int]] = {}
        self._nf: dict[int, dict[int, int]] = {}

    @classmethod
    def hypersurface(cls, f: Polynomial) -> "GradedRing":
        return cls(f.ring, Ideal(f.ring, [f]))

    @property
    def is_quotient(self) -> bool:
        return self.gb is not None

    @property
    def f(self) -> Polynomial | None:
        return self.defining[0] if len(self.defining) == 1 else None

    def __eq__(self, other):
        return isinstance(other, GradedRing) and self.R == other.R and \
            sorted(map(_pkey, self.defining)) == sorted(map(_pkey, other.defining))

    def __hash__(self):
        return hash(self.R)

    def basis(self, d: int) -> list[int]:
        """Standard monomials of degree ``d`` (descending)."""
        if d < 0:
            return []
        b = self._basis.get(d)
        if b is None:
            mons = self.R.monomials(d)
            if self.gb is not None:
                leads = self.gb.leading_monomials()
                div = self.R.divides
                mons = [m for m in mons if not any(div(l, m) for l in leads)]
            b = mons
            self._basis[d] = b
        return b

    def dim(self, d: int) -> int:
        if self.gb is None:
            return self.R.num_monomials(d)
        return len(self.basis(d))

    def nf_mono(self, key: int) -> dict[int, int]:
        if self.gb is None:
            return {key: 1}
        r = self._nf.get(key)
        if r is None:
            r = self.gb.normal_form(Polynomial(self.R, {key: 1})).terms
            self._nf[key] = r
        return r

    def nf(self, f: Polynomial) -> Polynomial:
        if self.gb is None or not f.terms:
            return f
        return self.gb.normal_form(f)


def _pkey(f: Polynomial):
    return tuple(sorted(f.terms.items()))


def as_ring(A) -> GradedRing:
    return A if isinstance(A, GradedRing) else GradedRing(A)


# -- graded matrices ----------------------------------------------------------------

class GradedMatrix:
    """Homogeneous map ``⊕_j R(-src[j]) -> ⊕_i R(-tgt[i])``.

    ``cols[j][i]`` is the entry in row ``i`` of column ``j``; it is zero or
    homogeneous of degree ``src[j] - tgt[i]``.
    """

    def __init__(self, ring: PolyRing, tgt: Sequence[int], src: Sequence[int],
                 cols: Sequence[Sequence[Polynomial]], check: bool = True):
        self.ring = ring
        self.tgt = list(tgt)
        self.src = list(src)
        self.cols = [list(c) for c in cols]
        if check:
            self._check()

    def _check(self):
        if len(self.cols) != len(self.src):
            raise ValueError("column count differs from source rank")
        for j, c in enumerate(self.cols):
            if len(c) != len(self.tgt):
                raise ValueError("column length differs from target rank")
            for i, e in enumerate(c):
                if e.terms and (not e.is_homogeneous() or e.degree != self.src[j] - self.tgt[i]):
                    raise ValueError(f"entry ({i},{j}) is not homogeneous of degree "
                                     f"{self.src[j] - self.tgt[i]}")

    # construction ------------------------------------------------------------
    @classmethod
    def from_rows(cls, ring: PolyRing, rows: Sequence[Sequence[Polynomial]],
                  tgt: Sequence[int] | None = None) -> "GradedMatrix":
        """Infer source twists from the first nonzero entry in each column."""
        rows = [list(r) for r in rows]
        m = len(rows)
        n = len(rows[0]) if rows else 0
        tgt = list(tgt) if tgt is not None else [0] * m
        src = []
        for j in range(n):
            d = None
            for i in range(m):
                e = rows[i][j]
                if e.terms:
                    d = e.degree + tgt[i]
                    break
            src.append(d if d is not None else max(tgt, default=0))
        cols = [[rows[i][j] for i in range(m)] for j in range(n)]
        return cls(ring, tgt, src, cols)

    @classmethod
    def row(cls, gens: Sequence[Polynomial]) -> "GradedMatrix":
        R = gens[0].ring
        return cls(R, [0], [g.degree for g in gens], [[g] for g in gens])

    @classmethod
    def identity(cls, ring: PolyRing, twists: Sequence[int]) -> "GradedMatrix":
        n = len(twists)
        cols = [[ring.one() if i == j else ring.zero() for i in range(n)] for j in range(n)]
        return cls(ring, twists, twists, cols)

    @classmethod
    def zero(cls, ring: PolyRing, tgt, src) -> "GradedMatrix":
        return cls(ring, tgt, src, [[ring.zero() for _ in tgt] for _ in src])

    # shape ----------------------------------------------------------------
    @property
    def nrows(self) -> int:
        return len(self.tgt)

    @property
    def ncols(self) -> int:
        return len(self.src)

    def entry(self, i: int, j: int) -> Polynomial:
        return self.cols[j][i]

    def rows(self) -> list[list[Polynomial]]:
        return [[self.cols[j][i] for j in range(self.ncols)] for i in range(self.nrows)]

    def is_zero(self) -> bool:
        return all(not e.terms for c in self.cols for e in c)

    def __eq__(self, other):
        return (isinstance(other, GradedMatrix) and self.tgt == other.tgt and self.src == other.src
                and all(a == b for ca, cb in zip(self.cols, other.cols) for a, b in zip(ca, cb)))

    def unit_positions(self) -> list[tuple[int, int]]:
        return [(i, j) for j, c in enumerate(self.cols) for i, e in enumerate(c)
                if e.terms and e.degree == 0]

    def is_minimal(self) -> bool:
        return not self.unit_positions()

    def entry_degrees(self) -> set[int]:
        return {e.degree for c in self.cols for e in c if e.terms}

    # algebra ----------------------------------------------------------------
    def __matmul__(self, other: "GradedMatrix") -> "GradedMatrix":
        if self.src != other.tgt:
            if len(self.src) != len(other.tgt):
                raise ValueError("shapes do not compose")
        R = self.ring
        p = R.p
        out = []
        for ocol in other.cols:
            acc = [dict() for _ in self.tgt]
            for k, b in enumerate(ocol):
                if not b.terms:
                    continue
                for i, a in enumerate(self.cols[k]):
                    if a.terms:
                        prod = _mul(a.terms, b.terms, p)
                        ai = acc[i]
                        for key, v in prod.items():
                            ai[key] = (ai.get(key, 0) + v) % p
            out.append([Polynomial(R, {k: v for k, v in a.items() if v}) for a in acc])
        return GradedMatrix(R, self.tgt, other.src, out, check=False)

    def scale(self, c: int) -> "GradedMatrix":
        return GradedMatrix(self.ring, self.tgt, self.src,
                            [[e.scale(c) for e in col] for col in self.cols], check=False)

    def __sub__(self, other: "GradedMatrix") -> "GradedMatrix":
        return GradedMatrix(self.ring, self.tgt, self.src,
                            [[a - b for a, b in zip(ca, cb)] for ca, cb in zip(self.cols, other.cols)],
                            check=False)

    def transpose(self) -> "GradedMatrix":
        """The dual map ``Hom(-, R)``: twists are negated and swapped."""
        cols = [[self.cols[j][i] for j in range(self.ncols)] for i in range(self.nrows)]
        return GradedMatrix(self.ring, [-s for s in self.src], [-t for t in self.tgt], cols, check=False)

    def reduce(self, A: GradedRing) -> "GradedMatrix":
        return GradedMatrix(self.ring, self.tgt, self.src,
                            [[A.nf(e) for e in c] for c in self.cols], check=False)

    def submatrix(self, rows: Sequence[int] | None = None, cols: Sequence[int] | None = None):
        rows = list(range(self.nrows)) if rows is None else list(rows)
        cols = list(range(self.ncols)) if cols is None else list(cols)
        return GradedMatrix(self.ring, [self.tgt[i] for i in rows], [self.src[j] for j in cols],
                            [[self.cols[j][i] for i in rows] for j in cols], check=False)

    def hstack(self, other: "GradedMatrix") -> "GradedMatrix":
        if self.tgt != other.tgt:
            raise ValueError("targets differ")
        return GradedMatrix(self.ring, self.tgt, self.src + other.src, self.cols + other.cols, check=False)

    def shift(self, a: int) -> "GradedMatrix":
        """Same entries, all twists increased by ``a``."""
        return GradedMatrix(self.ring, [t + a for t in self.tgt], [s + a for s in self.src],
                            self.cols, check=False)

    def to_text(self) -> str:
        lines = [f"matrix {self.nrows} {self.ncols}"]
        for r in self.rows():
            lines.append(", ".join(print_poly(e) for e in r))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, ring: PolyRing, tgt: Sequence[int] | None = None) -> "GradedMatrix":
        lines = [l for l in (x.split("#", 1)[0].strip() for x in text.splitlines()) if l]
        head = lines[0].split()
        if head[0] != "matrix" or len(head) != 3:
            raise ValueError("missing 'matrix <rows> <cols>' header")
        m, n = int(head[1]), int(head[2])
        rows = [[parse_poly(e, ring) for e in l.split(",")] for l in lines[1:1 + m]]
        if len(rows) != m or any(len(r) != n for r in rows):
            raise ValueError("matrix body does not match its header")
        return cls.from_rows(ring, rows, tgt)

    def __repr__(self):
        return f"GradedMatrix({self.nrows}x{self.ncols}, tgt={self.tgt}, src={self.src})"


def _mul(a: dict, b: dict, p: int) -> dict:
    out: dict[int, int] = {}
    get = out.get
    for kb, cb in b.items():
        for ka, ca in a.items():
            k = ka + kb
            out[k] = get(k, 0) + ca * cb
    return {k: v % p for k, v in out.items() if v % p}


# -- degree pieces -----------------------------------------------------------------

def free_basis(A: GradedRing, twists: Sequence[int], d: int) -> list[tuple[int, int]]:
    return [(c, m) for c, t in enumerate(twists) for m in A.basis(d - t)]


def _positions(A: GradedRing, twists: Sequence[int], d: int) -> dict[tuple[int, int], int]:
    return {b: i for i, b in enumerate(free_basis(A, twists, d))}


def piece(A: GradedRing, M: GradedMatrix, d: int, cols: Sequence[int] | None = None
          ) -> tuple[np.ndarray, list[tuple[int, int]], list[tuple[int, int]]]:
    """Matrix of ``M`` in degree ``d``: rows index the target basis,
    columns the source basis (component, standard monomial)."""
    tb = free_basis(A, M.tgt, d)
    tpos = {b: i for i, b in enumerate(tb)}
    use = range(M.ncols) if cols is None else cols
    sb = [(j, m) for j in use for m in A.basis(d - M.src[j])]
    out = np.zeros((len(tb), len(sb)), dtype=np.int64)
    p = A.p
    quotient = A.is_quotient
    for col, (j, m) in enumerate(sb):
        for i, e in enumerate(M.cols[j]):
            if not e.terms:
                continue
            if not quotient:
                for k, c in e.terms.items():
                    out[tpos[(i, k + m)], col] += c
            else:
                for k, c in e.terms.items():
                    for kk, cc in A.nf_mono(k + m).items():
                        out[tpos[(i, kk)], col] += c * cc
    out %= p
    return out, tb, sb


def vector_in_piece(A: GradedRing, twists, d, col: Sequence[Polynomial], pos=None) -> np.ndarray:
    pos = pos or _positions(A, twists, d)
    v = np.zeros(len(pos), dtype=np.int64)
    for i, e in enumerate(col):
        for k, c in A.nf(e).terms.items():
            v[pos[(i, k)]] = (v[pos[(i, k)]] + c) % A.p
    return v


def column_from_vector(A: GradedRing, basis: list[tuple[int, int]], v: np.ndarray, rank: int
                       ) -> list[Polynomial]:
    acc = [dict() for _ in range(rank)]
    for (c, m), x in zip(basis, v):
        if x:
            acc[c][m] = int(x)
    return [Polynomial(A.R, a) for a in acc]


def col_degree(M_twists_tgt, col: Sequence[Polynomial]) -> int | None:
    for t, e in zip(M_twists_tgt, col):
        if e.terms:
            return e.degree + t
    return None


# -- module presentations ----------------------------------------------------------

@dataclass
class Module:
    """Graded module ``coker(pres)`` over ``ring`` (a GradedModulePresentation)."""
    pres: GradedMatrix
    ring: GradedRing

    @classmethod
    def quotient(cls, I: Ideal, A: GradedRing | None = None) -> "Module":
        """``A/I`` as a cyclic module."""
        A = A or GradedRing(I.ring)
        gens = [g for g in I.gens]
        return cls(GradedMatrix(I.ring, [0], [g.degree for g in gens], [[g] for g in gens]), A)

    @classmethod
    def free(cls, R: PolyRing, twists: Sequence[int], A: GradedRing | None = None) -> "Module":
        return cls(GradedMatrix(R, twists, [], []), A or GradedRing(R))

    @classmethod
    def ideal(cls, I: Ideal) -> "Module":
        """The ideal ``I`` itself as a module, via its first syzygies."""
        G = GradedMatrix.row(I.gens)
        S = syzygy_module(G)
        return cls(GradedMatrix(I.ring, G.src, S.src, S.cols, check=False), GradedRing(I.ring))

    @property
    def R(self) -> PolyRing:
        return self.pres.ring

    @property
    def twists(self) -> list[int]:
        return self.pres.tgt

    def over_R(self) -> GradedMatrix:
        """Presentation over the polynomial ring (adds ``J``-multiples)."""
        A = self.ring
        M = self.pres
        if not A.is_quotient:
            return M
        extra_cols, extra_src = [], []
        for g in A.defining:
            for i, t in enumerate(M.tgt):
                col = [M.ring.zero() for _ in M.tgt]
                col[i] = g
                extra_cols.append(col)
                extra_src.append(t + g.degree)
        return GradedMatrix(M.ring, M.tgt, M.src + extra_src, M.cols + extra_cols, check=False)

    def hilbert_value(self, d: int) -> int:
        """``dim M_d`` by linear algebra in degree ``d``."""
        A = self.ring
        dimF = sum(A.dim(d - t) for t in self.twists)
        if self.pres.ncols == 0 or dimF == 0:
            return dimF
        mat, _, _ = piece(A, self.pres, d)
        return dimF - ffield.rank(mat, A.p)


# -- syzygies ------------------------------------------------------------------------

def _aug_space(R: PolyRing, tgt, src):
    twists = list(tgt) + list(src)
    blocks = [1] * len(tgt) + [0] * len(src)
    sp = KeySpace(R, twists, blocks)
    return sp, 1 << sp.blkshift


def syzygy_module(M: GradedMatrix, A: GradedRing | None = None, *, minimal: bool = True,
                  method: str = "linear", degree_bound: int | None = None,
                  degree_cap: int = DEFAULT_DEGREE_CAP) -> GradedMatrix:
    """Columns generate ``ker(M)`` over ``A`` (default: the polynomial ring).

    ``method="linear"`` (default) finds minimal generators degree by degree as
    kernels of the graded pieces of ``M``, up to ``degree_bound``; over the
    polynomial ring the bound defaults to a regularity estimate.
    ``method="gb"`` runs Buchberger on the augmented matrix ``[M | I]`` and
    reads off the syzygies (over ``R/J`` the columns ``J·I`` are appended
    first); the result is then pruned unless ``minimal=False``.
    """
    R = M.ring
    A = A or GradedRing(R)
    if M.ncols == 0:
        return GradedMatrix(R, M.src, [], [])
    if method == "linear":
        if degree_bound is None:
            if A.is_quotient:
                raise ValueError("degree_bound is required over a quotient ring")
            degree_bound = max(max(M.src), module_gb_data(M)[0] + 1)
        if degree_bound > degree_cap:
            raise DegreeCapExceeded(f"syzygy degree bound {degree_bound} exceeds cap {degree_cap}")
        return _syzygies_linear(M, A, degree_bound)
    if method != "gb":
        raise ValueError(f"unknown method {method!r}")
    full = Module(M, A).over_R() if A.is_quotient else M
    nt = full.nrows
    if nt == 0:
        # map to the zero module: everything is a syzygy
        return GradedMatrix.identity(R, M.src)
    sp, split = _aug_space(R, full.tgt, full.src)
    gens = []
    for j, col in enumerate(full.cols):
        vec = {}
        for i, e in enumerate(col):
            for k, c in e.terms.items():
                vec[sp.key(k, i)] = c
        vec[sp.key(0, nt + j)] = 1
        gens.append(vec)
    res = buchberger(gens, sp, degree_cap=degree_cap, syz_split=split)
    cols = []
    src = []
    keep = M.ncols
    for s in res.syzygies:
        col = [dict() for _ in range(keep)]
        for k, c in s.items():
            comp = sp.comp(k) - nt
            if comp < keep:
                col[comp][sp.mono(k)] = c
        polys = [A.nf(Polynomial(R, d)) for d in col]
        if all(not e.terms for e in polys):
            continue
        cols.append(polys)
        src.append(col_degree(M.src, polys))
    S = GradedMatrix(R, M.src, src, cols, check=False)
    if minimal:
        S = prune(S, A)
    return S


def _syzygies_linear(M: GradedMatrix, A: GradedRing, bound: int) -> GradedMatrix:
    """Minimal generators of ``ker M`` in degrees ``<= bound``."""
    R = M.ring
    p = A.p
    S = GradedMatrix(R, M.src, [], [], check=False)
    lo = min(M.src)
    for d in range(lo, bound + 1):
        mat, tb, sb = piece(A, M, d)
        if not sb:
            continue
        K = ffield.kernel(mat, p) if mat.shape[0] else np.eye(len(sb), dtype=np.int64)
        if K.shape[0] == 0:
            continue
        span = ffield.RowSpace(len(sb), p)
        if S.ncols:
            img, _, _ = piece(A, S, d)
            if img.size:
                for row in ffield.row_space_basis(img.T.copy(), p):
                    span.add(row)
        if len(span) == K.shape[0]:
            continue
        K, _ = ffield.rref(K, p)
        for v in K:
            if span.add(v):
                S.cols.append(column_from_vector(A, sb, v, M.ncols))
                S.src.append(d)
    return S


def module_gb_data(M: GradedMatrix, seed: int = 7919) -> tuple[int, "HilbertData"]:
    """Max Gröbner-basis degree of ``im M`` in random coordinates, and the
    Hilbert data of ``coker M`` (from the lead terms of the same basis).

    In generic coordinates the grevlex basis degree is the regularity of
    ``im M`` (Bayer-Stillman), which bounds all later syzygy degrees.
    """
    R = M.ring
    n = R.n
    if M.ncols == 0 or M.nrows == 0:
        tw = M.tgt
        return (max(tw) if tw else 0), HilbertData(_free_numerator(tw), n)
    phi = _random_coordinates(R, seed)
    cols = [[phi(e) for e in c] for c in M.cols]
    sp = KeySpace(R, M.tgt) if (M.nrows > 1 or M.tgt[0] != 0) else KeySpace(R)
    gens = [g for g in (sp.from_column(c) for c in cols) if g]
    res = buchberger(gens, sp, syz_split=None)
    gbmax = max(sp.deg(max(g)) for g in res.basis) if res.basis else max(M.tgt)
    return gbmax, _hilbert_from_leads(res.basis, sp, M.tgt, n)


def _free_numerator(tw) -> dict[int, int]:
    out: dict[int, int] = {}
    for t in tw:
        out[t] = out.get(t, 0) + 1
    return out


@lru_cache(maxsize=None)
def _random_coordinates(R: PolyRing, seed: int):
    import random
    from .polyring import RingMap
    rng = random.Random(seed)
    x = R.gens()
    while True:
        C = np.array([[rng.randrange(R.p) for _ in range(R.n)] for _ in range(R.n)], dtype=np.int64)
        if ffield.rank(C, R.p) == R.n:
            break
    imgs = [sum((x[j].scale(int(C[i, j])) for j in range(R.n) if C[i, j]), R.zero())
            for i in range(R.n)]
    return RingMap(R, R, imgs)


def prune(S: GradedMatrix, A: GradedRing | None = None, keep_first: int = 0) -> GradedMatrix:
    """Drop columns that the remaining ones generate over ``A``.

    Columns are scanned by degree (stable otherwise), so the result is a
    minimal generating set.  The first ``keep_first`` columns are trusted
    and always retained.
    """
    R = S.ring
    A = A or GradedRing(R)
    order = sorted(range(S.ncols), key=lambda j: (S.src[j], j))
    kept: list[int] = []
    for d in sorted(set(S.src)):
        here = [j for j in order if S.src[j] == d]
        if not here:
            continue
        span = ffield.RowSpace(sum(A.dim(d - t) for t in S.tgt), A.p)
        if kept:
            mat, _, _ = piece(A, S, d, cols=kept)
            R_, _ = ffield.rref(mat.T, A.p)
            for row in R_:
                span.add(row)
        pos = _positions(A, S.tgt, d)
        for j in here:
            v = vector_in_piece(A, S.tgt, d, S.cols[j], pos)
            if span.add(v) or j < keep_first:
                kept.append(j)
    kept.sort(key=lambda j: (S.src[j], j))
    return S.submatrix(cols=kept)


def minimize_presentation(M: Module) -> Module:
    """Remove superfluous generators and relations by cancelling unit entries."""
    P = cancel_unit_entries_single(M.pres, M.ring)
    P = prune(P, M.ring)
    return Module(P, M.ring)


def cancel_unit_entries_single(P: GradedMatrix, A: GradedRing) -> GradedMatrix:
    """Cancel constant entries of a presentation (generator/relation pairs)."""
    R = P.ring
    p = R.p
    P = P.reduce(A)
    while True:
        units = P.unit_positions()
        if not units:
            return P
        i, j = units[0]
        c = P.cols[j][i].constant_coeff()
        inv = pow(c, -1, p)
        pivot = P.cols[j]
        newcols = []
        for k, col in enumerate(P.cols):
            if k == j:
                continue
            a = col[i]
            if a.terms:
                fac = a.scale(inv)
                col = [A.nf(e - fac * pv) for e, pv in zip(col, pivot)]
            newcols.append([e for r, e in enumerate(col) if r != i])
        tgt = [t for r, t in enumerate(P.tgt) if r != i]
        src = [s for k, s in enumerate(P.src) if k != j]
        P = GradedMatrix(R, tgt, src, newcols, check=False)


# -- resolutions ----------------------------------------------------------------------

@dataclass
class FreeResolution:
    """``F_0 <-d_1- F_1 <-d_2- ...``; ``maps[i]`` is ``d_{i+1}``."""
    maps: list[GradedMatrix]
    ring: GradedRing
    F0: list[int]
    minimal: bool = True

    @property
    def length(self) -> int:
        return sum(1 for m in self.maps if m.ncols)

    def twists(self, i: int) -> list[int]:
        if i == 0:
            return list(self.F0)
        if i - 1 < len(self.maps):
            return list(self.maps[i - 1].src)
        return []

    def ranks(self) -> list[int]:
        return [len(self.F0)] + [m.ncols for m in self.maps]

    def check_complex(self) -> bool:
        """``d_i ∘ d_{i+1} = 0`` exactly (modulo the ring's ideal)."""
        A = self.ring
        for a, b in zip(self.maps, self.maps[1:]):
            if a.ncols == 0 or b.ncols == 0:
                continue
            prod = (a @ b).reduce(A)
            if not prod.is_zero():
                return False
        return True

    def to_json(self, periodic_from: int | None = None) -> dict:
        return {"betti": betti_table(self).to_list(),
                "twists": [self.twists(i) for i in range(len(self.maps) + 1)],
                "periodic_from": periodic_from}


def minimal_free_resolution(P: Module, max_steps: int | None = None, *,
                            method: str = "linear",
                            degree_cap: int = DEFAULT_DEGREE_CAP) -> FreeResolution:
    """Minimal graded free resolution of ``coker(P.pres)`` over ``P.ring``.

    Over the polynomial ring the length is at most the number of variables,
    so ``max_steps`` defaults to that; degree bounds come from a regularity
    estimate and the finished resolution must reproduce the lead-term
    Hilbert numerator (otherwise the bounds are widened and it is redone).
    Over a quotient ring use :func:`quotient_resolution`.
    """
    A = P.ring
    R = P.R
    if A.is_quotient:
        raise ValueError("use quotient_resolution over a quotient ring")
    M = minimize_presentation(P).pres
    if max_steps is None:
        max_steps = R.n + 1
    if method == "gb":
        maps = [M]
        while maps[-1].ncols and len(maps) <= max_steps:
            maps.append(syzygy_module(maps[-1], A, method="gb", minimal=False,
                                      degree_cap=degree_cap))
        if maps[-1].ncols:
            raise StepCapExceeded("resolution longer than the step cap")
        F = cancel_units(FreeResolution(maps[:-1] if len(maps) > 1 else maps, A, list(M.tgt),
                                        minimal=False))
        return F
    gbmax, H = module_gb_data(M)
    slack = 0
    while True:
        maps = [M]
        bound = gbmax + slack
        while maps[-1].ncols:
            cur = maps[-1]
            bound = max(max(cur.src), bound + 1)
            S = syzygy_module(cur, A, degree_bound=bound, degree_cap=degree_cap)
            if not S.ncols:
                break
            if len(maps) >= max_steps:
                raise StepCapExceeded("resolution longer than the step cap")
            maps.append(S)
        F = FreeResolution(maps, A, list(M.tgt), minimal=True)
        if M.ncols == 0 or betti_table(F).numerator() == {j: c for j, c in H.numerator.items() if c}:
            return F
        slack += 2
        if slack > 6:
            raise NotMinimal("resolution does not reproduce the Hilbert numerator")


def shamash_bounds(FR: FreeResolution, e: int, steps: int) -> list[int]:
    """Upper bounds for generator degrees of a resolution over ``R/(f)``,
    ``deg f = e``: ``t_i <= max_k (t^R_{i-2k} + e·k)`` (Shamash)."""
    tR = [max(FR.twists(i)) if FR.twists(i) else None for i in range(len(FR.maps) + 1)]
    out = []
    for i in range(steps + 1):
        cands = [tR[i - 2 * k] + e * k for k in range(i // 2 + 1)
                 if i - 2 * k < len(tR) and tR[i - 2 * k] is not None]
        out.append(max(cands) if cands else (out[-1] + e if out else 0))
    return out


def quotient_resolution(P: Module, f: Polynomial, max_steps: int, *,
                        degree_cap: int = DEFAULT_DEGREE_CAP) -> FreeResolution:
    """Minimal resolution over ``R/(f)`` of a module presented over ``R``.

    Each step takes degreewise kernels over the quotient ring; this is the
    same as resolving the augmented presentation ``[P | f·I]`` over ``R``
    and projecting.  Degree bounds come from the Shamash construction
    applied to the resolution over ``R``.
    """
    R = P.R
    Rg = GradedRing(R)
    # f must kill the module: f * e_i lies in the image for every generator
    for i, t in enumerate(P.pres.tgt):
        col = [R.zero() for _ in P.pres.tgt]
        col[i] = f
        if not in_image(P.pres, col, Rg):
            raise NotAnnihilated("f does not annihilate the module")
    FR = minimal_free_resolution(Module(P.over_R(), Rg))
    bounds = shamash_bounds(FR, f.degree, max_steps)
    A = GradedRing.hypersurface(f)
    M = minimize_presentation(Module(P.pres.reduce(A), A)).pres
    maps = [M]
    while maps[-1].ncols and len(maps) < max_steps:
        cur = maps[-1]
        S = syzygy_module(cur, A, degree_bound=max(max(cur.src), bounds[len(maps) + 1]),
                          degree_cap=degree_cap)
        if not S.ncols:
            break
        maps.append(S)
    return FreeResolution(maps, A, list(M.tgt), minimal=True)


def in_image(M: GradedMatrix, col: Sequence[Polynomial], A: GradedRing) -> bool:
    d = col_degree(M.tgt, col)
    if d is None:
        return True
    mat, tb, _ = piece(A, M, d)
    v = vector_in_piece(A, M.tgt, d, col)
    if mat.shape[1] == 0:
        return not v.any()
    return ffield.rank(np.concatenate([mat, v[:, None]], axis=1), A.p) == ffield.rank(mat, A.p)


def cancel_units(F: FreeResolution) -> FreeResolution:
    """Minimalize a resolution by repeatedly cancelling a unit entry.

    Scan order: lowest homological step first, then column, then row.  A
    unit at (i, j) of ``d_k`` splits off ``R(-a) --1--> R(-a)`` from steps
    k and k-1.
    """
    A = F.ring
    R = A.R
    p = A.p
    maps = [GradedMatrix(m.ring, m.tgt, m.src, m.cols, check=False).reduce(A) for m in F.maps]
    F0 = list(F.F0)
    while True:
        found = None
        for k, m in enumerate(maps):
            for j, col in enumerate(m.cols):
                for i, e in enumerate(col):
                    if e.terms and e.degree == 0:
                        found = (k, i, j)
                        break
                if found:
                    break
            if found:
                break
        if not found:
            break
        k, i, j = found
        m = maps[k]
        inv = pow(m.cols[j][i].constant_coeff(), -1, p)
        pivcol = m.cols[j]
        # column operations on d_k remove row i's entries; row operations
        # then clear column j (compensated in d_{k+1} / d_{k-1}).
        newcols = []
        for jj, col in enumerate(m.cols):
            if jj == j:
                continue
            a = col[i]
            if a.terms:
                fac = a.scale(inv)
                col = [A.nf(e - fac * pv) for e, pv in zip(col, pivcol)]
            newcols.append([e for r, e in enumerate(col) if r != i])
        tgt = [t for r, t in enumerate(m.tgt) if r != i]
        src = [s for c, s in enumerate(m.src) if c != j]
        if k + 1 < len(maps):
            nxt = maps[k + 1]
            maps[k + 1] = GradedMatrix(R, src, nxt.src, _adjust_next(nxt, j), check=False)
        if k > 0:
            prev = maps[k - 1]
            # row ops on d_k: e_i' = e_i + sum (b/u) e_r; d_{k-1} drops column i
            pcols = [c for l, c in enumerate(prev.cols) if l != i]
            maps[k - 1] = GradedMatrix(R, prev.tgt, tgt, pcols, check=False)
        else:
            F0 = tgt
        maps[k] = GradedMatrix(R, tgt, src, newcols, check=False)
    while len(maps) > 1 and maps[-1].ncols == 0:
        maps.pop()
    return FreeResolution(maps, A, F0 if F.maps else F0, minimal=True)


def _adjust_next(nxt: GradedMatrix, j: int):
    """New ``d_{k+1}`` after the column operations on ``d_k``.

    Column operations ``c_l <- c_l - (m_il/u) c_j`` are the basis change
    ``e_l' = e_l - (m_il/u) e_j`` of ``F_k``.  In the new basis row ``i`` of
    ``d_k`` is ``u`` at column ``j`` and zero elsewhere, so every element of
    ``ker d_k`` has zero ``e_j`` coordinate and the other coordinates are
    unchanged: the new matrix just drops row ``j``.  Dually the row
    operations send the ``i``-th basis vector of ``F_{k-1}`` into
    ``ker d_{k-1}``, so ``d_{k-1}`` drops column ``i``.
    """
    return [[e for r, e in enumerate(col) if r != j] for col in nxt.cols]


def betti_numbers(twist_lists: Sequence[Sequence[int]]) -> dict[tuple[int, int], int]:
    out: dict[tuple[int, int], int] = {}
    for i, tw in enumerate(twist_lists):
        for j, b in Counter(tw).items():
            out[(i, j)] = b
    return out


@dataclass
class BettiTable:
    """``(i, j) -> β_{i,j}``; displayed with row ``j - i``."""
    entries: dict[tuple[int, int], int]

    def __eq__(self, other):
        if isinstance(other, BettiTable):
            return self.entries == other.entries
        if isinstance(other, dict):
            return self.entries == {k: v for k, v in other.items() if v}
        return NotImplemented

    def get(self, i: int, j: int) -> int:
        return self.entries.get((i, j), 0)

    def row(self, r: int) -> list[int]:
        if not self.entries:
            return []
        top = max(i for i, _ in self.entries)
        return [self.get(i, i + r) for i in range(top + 1)]

    def rows(self) -> dict[int, list[int]]:
        return {r: self.row(r) for r in sorted({j - i for i, j in self.entries})}

    def total(self) -> list[int]:
        top = max((i for i, _ in self.entries), default=-1)
        return [sum(v for (i, _), v in self.entries.items() if i == k) for k in range(top + 1)]

    def numerator(self) -> dict[int, int]:
        """``Σ (-1)^i β_{i,j} t^j`` as ``{j: coeff}``."""
        out: dict[int, int] = {}
        for (i, j), b in self.entries.items():
            out[j] = out.get(j, 0) + (-1) ** i * b
        return {j: c for j, c in sorted(out.items()) if c}

    def render(self) -> str:
        if not self.entries:
            return "(empty)\n"
        top = max(i for i, _ in self.entries)
        rows = sorted({j - i for i, j in self.entries})
        w = max(len(str(v)) for v in self.entries.values())
        w = max(w, len(str(top)))
        lines = ["      " + " ".join(str(i).rjust(w) for i in range(top + 1))]
        for r in range(rows[0], rows[-1] + 1):
            cells = []
            for i in range(top + 1):
                b = self.get(i, i + r)
                cells.append((str(b) if b else ".").rjust(w))
            lines.append(f"{r:>4}: " + " ".join(cells))
        return "\n".join(lines) + "\n"

    def to_list(self) -> list[dict]:
        return [{"i": i, "j": j, "b": b} for (i, j), b in sorted(self.entries.items())]

    @classmethod
    def from_list(cls, items) -> "BettiTable":
        return cls({(d["i"], d["j"]): d["b"] for d in items})

    @classmethod
    def from_rows(cls, rows: dict[int, Sequence[int]], start: int = 0) -> "BettiTable":
        """Build from display rows ``{row: [β_0, β_1, ...]}`` (zeros skipped)."""
        ent = {}
        for r, vals in rows.items():
            for i, b in enumerate(vals):
                if b:
                    ent[(i + start, i + start + r)] = b
        return cls(ent)


def betti_table(F: FreeResolution) -> BettiTable:
    for m in F.maps:
        if m.unit_positions():
            raise NotMinimal("resolution has constant entries")
    return BettiTable(betti_numbers([F.twists(i) for i in range(len(F.maps) + 1)
                                     if F.twists(i)]))


# -- Hilbert series -----------------------------------------------------------------

def _monomial_numerator(gens: list[tuple[int, ...]], n: int) -> dict[int, int]:
    """Numerator ``N`` with ``H(S/I) = N/(1-t)^n`` for a monomial ideal."""

    @lru_cache(maxsize=None)
    def rec(gs: tuple) -> tuple:
        gs = _minimalize(gs)
        if any(sum(g) == 0 for g in gs):
            return ()
        # split off generators that are variables
        lin = [g for g in gs if sum(g) == 1]
        rest = [g for g in gs if sum(g) > 1]
        if not rest:
            return tuple(_poly_pow_one_minus(len(lin)).items())
        # pivot on a variable occurring in the highest-degree generator
        g = max(rest, key=lambda x: (sum(x), x))
        v = max(range(n), key=lambda i: (g[i] > 0, sum(1 for h in rest if h[i] > 0)))
        xv = tuple(1 if k == v else 0 for k in range(n))
        plus = rec(tuple(sorted(set(gs + (xv,)))))
        colon = rec(tuple(sorted(set(tuple(e - 1 if k == v and e > 0 else e for k, e in enumerate(h))
                                     for h in gs))))
        out: dict[int, int] = dict(plus)
        for j, c in colon:
            out[j + 1] = out.get(j + 1, 0) + c
        return tuple(sorted((j, c) for j, c in out.items() if c))

    return dict(rec(tuple(sorted(set(gens)))))


def _minimalize(gs: tuple) -> tuple:
    gs = sorted(set(gs), key=lambda g: (sum(g), g))
    out = []
    for g in gs:
        if not any(all(a <= b for a, b in zip(h, g)) for h in out):
            out.append(g)
    return tuple(out)


def _poly_pow_one_minus(k: int) -> dict[int, int]:
    return {j: (-1) ** j * comb(k, j) for j in range(k + 1)}


@dataclass
class HilbertData:
    numerator: dict[int, int]     # over (1-t)^n
    nvars: int

    def value(self, d: int) -> int:
        n = self.nvars
        return sum(c * comb(d - j + n - 1, n - 1) for j, c in self.numerator.items() if d - j >= 0)

    def values(self, lo: int, hi: int) -> list[int]:
        return [self.value(d) for d in range(lo, hi + 1)]

    def reduced(self) -> tuple[dict[int, int], int]:
        """Numerator after cancelling factors of ``(1-t)``; returns (N, dim)."""
        num = dict(self.numerator)
        k = self.nvars
        while k > 0 and num and sum(num.values()) == 0:
            # synthetic division by (1 - t)
            top = max(num)
            q: dict[int, int] = {}
            carry = 0
            for j in range(0, top + 1):
                carry += num.get(j, 0)
                if carry:
                    q[j] = carry
            num = q
            k -= 1
        return num, k

    def poly_value(self, d: int) -> int:
        num, k = self.reduced()
        if k == 0:
            return 0
        return sum(c * _binom_poly(d - j + k - 1, k - 1) for j, c in num.items())

    def degree_and_dim(self) -> tuple[int, int]:
        """(multiplicity, Krull dimension)."""
        num, k = self.reduced()
        return sum(num.values()), k


def _binom_poly(a: int, b: int) -> int:
    """``binom(a, b)`` as a polynomial in ``a``, so negative ``a`` is allowed."""
    out = 1
    for i in range(b):
        out *= a - i
    return out // factorial(b)


def hilbert(P: Module) -> HilbertData:
    """Hilbert series of ``coker(P)`` from lead terms of a module Gröbner basis."""
    M = P.over_R()
    R = M.ring
    n = R.n
    nt = M.nrows
    if nt == 0:
        return HilbertData({}, n)
    sp = KeySpace(R, M.tgt) if (nt > 1 or M.tgt[0] != 0) else KeySpace(R)
    gens = [sp.from_column(c) for c in M.cols]
    res = buchberger([g for g in gens if g], sp, syz_split=None)
    return _hilbert_from_leads(res.basis, sp, M.tgt, n)


def _hilbert_from_leads(basis, sp: KeySpace, tgt, n: int) -> HilbertData:
    R = sp.ring
    per: list[list[tuple[int, ...]]] = [[] for _ in tgt]
    for g in basis:
        lk = max(g)
        per[sp.comp(lk)].append(R.exps(sp.mono(lk)))
    num: dict[int, int] = {}
    for c in range(len(tgt)):
        N = _monomial_numerator(per[c], n)
        for j, v in N.items():
            num[j + tgt[c]] = num.get(j + tgt[c], 0) + v
    return HilbertData({j: v for j, v in sorted(num.items()) if v}, n)


def hilbert_from_betti(B: BettiTable, nvars: int) -> HilbertData:
    return HilbertData(B.numerator(), nvars)


# -- Ext and sheaf cohomology -------------------------------------------------------------

def _dual_complex_dims(F: FreeResolution, j: int, e: int) -> int:
    """``dim Ext^j(M, R)_e`` from the dual of a resolution over ``R``."""
    A = F.ring
    if A.is_quotient:
        raise ValueError("Ext via duals needs a resolution over the polynomial ring")
    p = A.p
    # dual modules: F_j^* = ⊕ R(a) for a in twists(j) -> generators in degree -a
    tw = lambda i: [-a for a in F.twists(i)]
    Fj = tw(j)
    dimj = sum(A.dim(e - t) for t in Fj)
    if dimj == 0:
        return 0
    # outgoing map d_{j+1}^T : F_j^* -> F_{j+1}^*
    if j < len(F.maps) and F.maps[j].ncols:
        out = F.maps[j].transpose()
        mat, _, _ = piece(A, out, e)
        rk_out = ffield.rank(mat, p) if mat.size else 0
    else:
        rk_out = 0
    if j >= 1 and F.maps[j - 1].ncols:
        inc = F.maps[j - 1].transpose()
        mat, _, _ = piece(A, inc, e)
        rk_in = ffield.rank(mat, p) if mat.size else 0
    else:
        rk_in = 0
    return dimj - rk_out - rk_in


def ext_dims(F: FreeResolution, j: int, degrees: Iterable[int]) -> dict[int, int]:
    return {e: _dual_complex_dims(F, j, e) for e in degrees}


def ext_modules(F: FreeResolution, j: int) -> Module:
    """Presentation of ``Ext^j(M, R)`` as ``ker(d_{j+1}^T) / im(d_j^T)``."""
    A = F.ring
    R = A.R
    tw = [-a for a in F.twists(j)]
    if not tw:
        return Module.free(R, [])
    if j < len(F.maps) and F.maps[j].ncols:
        K = syzygy_module(F.maps[j].transpose())
    else:
        K = GradedMatrix.identity(R, tw)
    if K.ncols == 0:
        return Module.free(R, [])
    if j >= 1 and F.maps[j - 1].ncols:
        B = F.maps[j - 1].transpose()
    else:
        B = GradedMatrix.zero(R, tw, [])
    return subquotient(K, B)


def subquotient(K: GradedMatrix, B: GradedMatrix) -> Module:
    """Presentation of ``(im K + im B) / im B`` with generators the columns of K."""
    R = K.ring
    if B.ncols == 0:
        rel = syzygy_module(K)
        return Module(GradedMatrix(R, K.src, rel.src, rel.cols, check=False), GradedRing(R))
    big = K.hstack(B)
    S = syzygy_module(big, minimal=False)
    nk = K.ncols
    cols, src = [], []
    for j, col in enumerate(S.cols):
        c = col[:nk]
        if any(e.terms for e in c):
            cols.append(c)
            src.append(S.src[j])
    rel = GradedMatrix(R, K.src, src, cols, check=False)
    rel = prune(rel)
    return minimize_presentation(Module(rel, GradedRing(R)))


def sheaf_cohomology(P: Module | FreeResolution, i: int, d: int, *,
                     saturated: "Module | None" = None) -> int:
    """``h^i`` of the sheaf associated with ``M`` on ``P^n``, twisted by ``d``.

    For ``i >= 1`` this is ``dim Ext^{n-i}(M, R(-n-1))_{-d}`` (graded local
    duality).  For ``i = 0`` it is the degree-``d`` piece of the section
    module; pass ``saturated`` to reuse one.
    """
    F = P if isinstance(P, FreeResolution) else minimal_free_resolution(P)
    R = F.ring.R
    n = R.n - 1
    if i >= 1:
        if i > n:
            return 0
        return _dual_complex_dims(F, n - i, -d - n - 1)
    N = R.n
    # 0 -> H^0_m(M) -> M -> Γ_*(M~) -> H^1_m(M) -> 0, both local cohomologies by duality
    if saturated is not None:
        return saturated.hilbert_value(d)
    hm0 = _dual_complex_dims(F, N, -d - N)
    hm1 = _dual_complex_dims(F, N - 1, -d - N)
    return _module_value(F, d) - hm0 + hm1


def _module_value(F: FreeResolution, d: int) -> int:
    A = F.ring
    return sum((-1) ** i * sum(A.dim(d - a) for a in F.twists(i)) for i in range(len(F.maps) + 1))


def local_cohomology_dims(F: FreeResolution, i: int, degrees: Iterable[int]) -> dict[int, int]:
    """``dim H^i_m(M)_d`` via ``Ext^{N-i}(M, R(-N))_{-d}``."""
    N = F.ring.R.n
    return {d: _dual_complex_dims(F, N - i, -d - N) for d in degrees}


# -- Hom ----------------------------------------------------------------------------

def hom_degree_piece(P: Module, Q: Module, d: int) -> tuple[np.ndarray, list]:
    """Basis of ``Hom(M, N)_d`` as vectors of generator images.

    Unknowns are the images of the generators of ``M`` in ``(F0^N)_{d+a_k}``
    modulo relations of ``N``.  Returns (basis rows over the unknowns,
    unknown layout); the rows are reduced modulo maps that vanish in N.
    """
    A = Q.ring
    p = A.p
    M, N = P.pres, Q.pres
    blocks = []
    for k, a in enumerate(M.tgt):
        blocks.append(free_basis(A, N.tgt, d + a))
    sizes = [len(b) for b in blocks]
    offs = np.concatenate([[0], np.cumsum(sizes)]).astype(int)
    nunk = int(offs[-1])
    if nunk == 0:
        return np.zeros((0, 0), dtype=np.int64), blocks
    # relations of N in each needed degree, to quotient by
    eqs = []
    # condition per relation column c of M: sum_k M[k][c] u_k ∈ im N, degree d + src_c
    for c, col in enumerate(M.cols):
        e = d + M.src[c]
        tb = free_basis(A, N.tgt, e)
        if not tb:
            continue
        tpos = {b: i for i, b in enumerate(tb)}
        T = np.zeros((len(tb), nunk), dtype=np.int64)
        for k, ent in enumerate(col):
            if not ent.terms:
                continue
            for u, (comp, mono) in enumerate(blocks[k]):
                for key, cc in ent.terms.items():
                    for kk, c2 in A.nf_mono(key + mono).items():
                        T[tpos[(comp, kk)], offs[k] + u] += cc * c2
        T %= p
        if N.ncols:
            Nimg, _, _ = piece(A, N, e)
            # project away the image of N: left-multiply by a complement basis
            L = ffield.left_kernel(Nimg, p) if Nimg.size else np.eye(len(tb), dtype=np.int64)
            T = ffield.matmul_mod(L, T, p)
        eqs.append(T)
    E = np.concatenate(eqs, axis=0) if eqs else np.zeros((0, nunk), dtype=np.int64)
    K = ffield.kernel(E, p) if E.shape[0] else np.eye(nunk, dtype=np.int64)
    # quotient by the maps that are zero in N (images in im N)
    zero_rows = []
    if N.ncols:
        for k, a in enumerate(M.tgt):
            Nimg, _, _ = piece(A, N, d + a)
            for v in Nimg.T:
                z = np.zeros(nunk, dtype=np.int64)
                z[offs[k]:offs[k + 1]] = v
                zero_rows.append(z)
    if zero_rows:
        Z = ffield.row_space_basis(np.array(zero_rows), p)
        span = ffield.RowSpace(nunk, p)
        for r in Z:
            span.add(r)
        out = [v for v in K if span.add(v)]
        K = np.array(out, dtype=np.int64) if out else np.zeros((0, nunk), dtype=np.int64)
    return K, blocks


def hom_dim(P: Module, Q: Module, d: int) -> int:
    return hom_degree_piece(P, Q, d)[0].shape[0]


def hom_module(P: Module, Q: Module) -> Module:
    """Presentation of ``Hom(M, N)`` over the polynomial ring.

    ``Hom(M, N) = ker(F0^* ⊗ N -> F1^* ⊗ N)``; elements are represented in
    ``F0^* ⊗ G0`` and the answer is a subquotient modulo ``F0^* ⊗ im(ψ)``.
    """
    R = P.R
    M, N = P.pres, Q.over_R()
    r0, r1 = M.nrows, M.ncols
    s0 = N.nrows
    # ambient: F0^* ⊗ G0, index (k, i) -> k*s0 + i, twist G0[i] - F0[k]
    amb = [N.tgt[i] - M.tgt[k] for k in range(r0) for i in range(s0)]
    out_tw = [N.tgt[i] - M.src[c] for c in range(r1) for i in range(s0)]
    # phi^T ⊗ 1 : amb -> F1^* ⊗ G0
    cols = []
    for k in range(r0):
        for i in range(s0):
            col = [R.zero() for _ in out_tw]
            for c in range(r1):
                e = M.cols[c][k]
                if e.terms:
                    col[c * s0 + i] = e
            cols.append(col)
    Phi = GradedMatrix(R, out_tw, amb, cols, check=False)
    # 1 ⊗ ψ on F1^* ⊗ G1 and on F0^* ⊗ G1
    def tensor_psi(F_tw):
        tw_src = [N.src[c] - a for a in F_tw for c in range(N.ncols)]
        tw_tgt = [N.tgt[i] - a for a in F_tw for i in range(s0)]
        cs = []
        for t, a in enumerate(F_tw):
            for c in range(N.ncols):
                col = [R.zero() for _ in tw_tgt]
                for i in range(s0):
                    col[t * s0 + i] = N.cols[c][i]
                cs.append(col)
        return GradedMatrix(R, tw_tgt, tw_src, cs, check=False)
    if r1:
        Psi1 = tensor_psi(M.src)
        big = Phi.hstack(Psi1) if Psi1.ncols else Phi
        S = syzygy_module(big, minimal=False)
        n_amb = len(amb)
        kc, ks = [], []
        for j, col in enumerate(S.cols):
            c = col[:n_amb]
            if any(e.terms for e in c):
                kc.append(c)
                ks.append(S.src[j])
        K = prune(GradedMatrix(R, amb, ks, kc, check=False))
    else:
        K = GradedMatrix.identity(R, amb)
    Psi0 = tensor_psi(M.tgt)
    return subquotient(K, Psi0)


def koszul_maximal_ideal(R: PolyRing) -> Module:
    """``m = (x_0, ..., x_n)`` presented by its Koszul relations."""
    n = R.n
    x = R.gens()
    pairs = list(combinations(range(n), 2))
    cols = []
    for a, b in pairs:
        col = [R.zero() for _ in range(n)]
        col[a] = x[b]
        col[b] = -x[a]
        cols.append(col)
    return Module(GradedMatrix(R, [1] * n, [2] * len(pairs), cols), GradedRing(R))


def saturate_module(P: Module, *, window: tuple[int, int] | None = None, max_t: int = 6) -> Module:
    """Module of twisted global sections, by iterating ``M -> Hom(m, M)``.

    Stops when the Hilbert values agree on the window.  Requires ``P`` to
    have no ``m``-torsion after the first step (true for the saturated
    ideals used here).
    """
    R = P.R
    mm = koszul_maximal_ideal(R)
    cur = Module(P.over_R(), GradedRing(R))
    if window is None:
        window = (-4, 8)
    lo, hi = window
    prev = [cur.hilbert_value(d) for d in range(lo, hi + 1)]
    for t in range(1, max_t + 1):
        nxt = hom_module(mm, cur)
        vals = [nxt.hilbert_value(d) for d in range(lo, hi + 1)]
        if vals == prev:
            return cur
        cur, prev = nxt, vals
    raise NoStabilization("section module did not stabilise")


def section_module(I: Ideal, *, seed: int = 1, F: FreeResolution | None = None) -> Module:
    """``Γ_*(O_Y)`` for a saturated ideal ``I`` with finite-length ``H^1_m(R/I)``.

    With ``h`` a random linear form and ``t`` larger than the spread of
    ``H^1_m(R/I)``, multiplication by ``h^t`` identifies ``Γ_*(O_Y)(-t)``
    with ``((I + h^t) : m^∞) / I``.  The Hilbert function is checked
    against ``HF(R/I) + h^1(I(d))`` on the relevant window.
    """
    from .groebner import minimal_generators, saturate_irrelevant
    from .polyring import random_linear_form
    R = I.ring
    F = F or minimal_free_resolution(Module.quotient(I))
    reg = max(j - i for (i, j) in betti_table(F).entries)
    window = range(-reg - 2, reg + 2)
    h1 = local_cohomology_dims(F, 1, window)
    nz = [d for d, v in h1.items() if v]
    base = Module.quotient(I)
    if not nz:
        return base
    t = max(nz) - min(nz) + 1
    h = random_linear_form(R, seed)
    J = saturate_irrelevant(Ideal(R, list(I.gens) + [h ** t]))
    J = minimal_generators(J)
    gens = list(J.gens)
    row = GradedMatrix.row(gens + list(I.gens))
    S = syzygy_module(row)
    k = len(gens)
    keep = [j for j, c in enumerate(S.cols) if any(e.terms for e in c[:k])]
    cols = [S.cols[j][:k] for j in keep]
    src = [S.src[j] for j in keep]
    pres = GradedMatrix(R, [g.degree - t for g in gens], [d - t for d in src], cols, check=False)
    G = minimize_presentation(Module(pres, GradedRing(R)))
    for d in window:
        if G.hilbert_value(d) != base.hilbert_value(d) + h1[d]:
            raise NoStabilization("section module fails the Hilbert function check")
    return G


# -- annihilators ---------------------------------------------------------------------

def annihilator(P: Module) -> Ideal:
    """``ann(coker P)`` over the polynomial ring (``∩_c (im P : e_c)``)."""
    from .groebner import intersect, groebner_basis as gbas, minimal_generators
    M = P.over_R()
    R = M.ring
    out: Ideal | None = None
    for c in range(M.nrows):
        col = [R.zero() for _ in M.tgt]
        col[c] = R.one()
        e = GradedMatrix(R, M.tgt, [M.tgt[c]], [col])
        big = e.hstack(M) if M.ncols else e
        S = syzygy_module(big, minimal=False)
        gens = [S.cols[j][0] for j in range(S.ncols) if S.cols[j][0].terms]
        Q = Ideal(R, gens)
        out = Q if out is None else intersect(out, Q)
    if out is None:
        return Ideal(R, [R.one()])
    G = gbas(out)
    return minimal_generators(Ideal(R, G.basis))


# -- matrix factorizations -------------------------------------------------------------

@dataclass
class MatrixFactorization:
    f: Polynomial
    A: GradedMatrix
    B: GradedMatrix

    @property
    def size(self) -> int:
        return self.A.nrows

    def verify(self) -> bool:
        """``A·B = B·A = f·I`` as an exact polynomial identity."""
        m = self.size
        if self.A.ncols != m or self.B.nrows != m or self.B.ncols != m:
            return False
        for X in (self.A @ self.B, self.B @ self.A):
            for j, col in enumerate(X.cols):
                for i, e in enumerate(col):
                    if e != (self.f if i == j else 0):
                        return False
        return True

    def is_linear(self) -> bool:
        return self.A.entry_degrees() <= {1}

    @property
    def rank(self) -> int | None:
        """``r`` with ``m = 3r`` when ``A`` is linear and ``f`` is cubic."""
        if self.is_linear() and self.f.degree == 3 and self.size % 3 == 0:
            return self.size // 3
        return None


def detect_periodicity(F: FreeResolution, shift: int) -> int | None:
    """Smallest ``s`` with ``F_{s+2} = F_s(-shift)`` and ``F_{s+3} = F_{s+1}(-shift)``."""
    n = len(F.maps) + 1
    tw = [sorted(F.twists(i)) for i in range(n)]
    for s in range(0, n - 3):
        if not tw[s] or not tw[s + 1]:
            continue
        if tw[s + 2] == [t + shift for t in tw[s]] and tw[s + 3] == [t + shift for t in tw[s + 1]]:
            return s
    return None


def extract_matrix_factorization(F: FreeResolution) -> tuple[MatrixFactorization, int]:
    """Matrix factorization from the periodic tail of a resolution over ``R/(f)``.

    Returns the normalised pair and the step where periodicity starts.
    """
    f = F.ring.f
    if f is None:
        raise ValueError("resolution is not over a hypersurface ring")
    e = f.degree
    s = detect_periodicity(F, e)
    if s is None:
        raise NotPeriodic("no stable periodic window")
    d1, d2 = F.maps[s], F.maps[s + 1]  # d_{s+1}: F_{s+1}->F_s, d_{s+2}: F_{s+2}->F_{s+1}
    if d1.nrows != d1.ncols or d2.nrows != d2.ncols:
        raise NotPeriodic("periodic maps are not square")
    # pick the map with the smaller entry degree as A
    deg1 = max(d1.entry_degrees(), default=0)
    deg2 = max(d2.entry_degrees(), default=0)
    # A must be followed by B in the complex so that A·B is a composite
    A, B = (d1, d2) if deg1 <= deg2 else (d2, F.maps[s + 2])
    R = f.ring
    p = R.p
    AB = A @ B
    # AB = f * C with C constant; normalise B <- B C^{-1}
    m = A.nrows
    C = np.zeros((m, m), dtype=np.int64)
    for j, col in enumerate(AB.cols):
        for i, ent in enumerate(col):
            if not ent.terms:
                continue
            try:
                from .groebner import divide_exact
                q = divide_exact(ent, f)
            except ArithmeticError:
                raise LiftFailure("A·B is not a multiple of f") from None
            if not q.is_constant():
                raise LiftFailure("A·B / f is not constant")
            C[i, j] = q.constant_coeff()
    if ffield.rank(C, p) < m:
        raise LiftFailure("A·B / f is singular")
    Cinv = ffield.solve(C, np.eye(m, dtype=np.int64), p)
    Bn = _const_right_mul(B, Cinv)
    # twist normalisation: A : R(-1)^m -> R^m when linear
    a0 = min(A.tgt)
    An = A.shift(-a0)
    Bn = Bn.shift(-a0)
    mf = MatrixFactorization(f, An, Bn)
    if not mf.verify():
        raise LiftFailure("lifted pair fails A·B = B·A = f·I")
    return mf, s


def _const_right_mul(B: GradedMatrix, C: np.ndarray) -> GradedMatrix:
    R = B.ring
    cols = []
    for j in range(C.shape[1]):
        col = [R.zero() for _ in B.tgt]
        for k in range(C.shape[0]):
            c = int(C[k, j])
            if c:
                col = [a + b.scale(c) for a, b in zip(col, B.cols[k])]
        cols.append(col)
    src = [col_degree(B.tgt, c) if col_degree(B.tgt, c) is not None else B.src[j]
           for j, c in enumerate(cols)]
    return GradedMatrix(R, B.tgt, src, cols, check=False)


def solve_mf_partner(A: GradedMatrix, f: Polynomial) -> GradedMatrix:
    """The unique ``B`` with ``A·B = f·I`` (linear algebra column by column)."""
    R = f.ring
    p = R.p
    m = A.nrows
    e = f.degree
    da = max(A.entry_degrees())
    db = e - da
    Rg = GradedRing(R)
    # B: R(-src_B) -> R(-tgt_B) with tgt_B = A.src, src_B = A.tgt + e
    tgtB = list(A.src)
    srcB = [t + e for t in A.tgt]
    mat, tb, sb = piece(Rg, A, max(srcB))
    cols = []
    for j in range(m):
        d = srcB[j]
        mat, tb, sb = piece(Rg, A, d)
        target = [R.zero() for _ in A.tgt]
        target[j] = f
        v = vector_in_piece(Rg, A.tgt, d, target)
        x = ffield.solve(mat, v, p)
        if x is None:
            raise LiftFailure("no B with A·B = f·I")
        cols.append(column_from_vector(Rg, sb, x, m))
    return GradedMatrix(R, tgtB, srcB, cols)
