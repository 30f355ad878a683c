"""Sparse multivariate polynomials over a prime field.

A monomial is stored as a single Python int, its *key*::

    key = (ORD << 8*n) | E

``E`` packs the exponents one byte per variable (7 value bits plus a guard
bit) and ``ORD`` packs digits that are nonnegative linear functions of the
exponents, arranged so that integer comparison of keys is the monomial
order.  Both parts are additive, so multiplying monomials is adding keys,
and the guard bits turn divisibility into one subtraction and a mask.
"""
from __future__ import annotations

import random
import re
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations_with_replacement
from math import comb
from typing import Iterable, Sequence

from .errors import PolySyntaxError, RingMismatch, UnknownVariable
from .ffield import DEFAULT_PRIME, PrimeField

BITS = 8
DIGIT = (1 << BITS) - 1
MAX_EXP = (1 << (BITS - 1)) - 1
MAX_VARS = 16


@dataclass(frozen=True)
class MonomialOrder:
    kind: str = "grevlex"
    k: int = 0  # size of the leading block for kind == "elim"

    def __post_init__(self):
        if self.kind not in ("grevlex", "lex", "elim"):
            raise ValueError(f"unknown monomial order {self.kind!r}")
        if self.kind == "elim" and self.k < 0:
            raise ValueError("elimination block size must be nonnegative")

    def __str__(self):
        return f"elim({self.k})" if self.kind == "elim" else self.kind


GREVLEX = MonomialOrder("grevlex")
LEX = MonomialOrder("lex")


def elimination(k: int) -> MonomialOrder:
    return MonomialOrder("elim", k)


class PolyRing:
    """``F_p[x_0, ..., x_{n-1}]`` with a fixed monomial order.

    Rings compare equal when prime, names and order agree, so polynomials
    built in two equal rings interoperate.
    """

    def __init__(self, n_vars: int | None = None, p: int = DEFAULT_PRIME,
                 var_names: Sequence[str] | None = None,
                 order: MonomialOrder = GREVLEX, prefix: str = "x"):
        if var_names is None:
            if n_vars is None:
                raise ValueError("need n_vars or var_names")
            var_names = [f"{prefix}{i}" for i in range(n_vars)]
        var_names = tuple(var_names)
        if n_vars is not None and n_vars != len(var_names):
            raise ValueError("n_vars disagrees with var_names")
        if len(set(var_names)) != len(var_names):
            raise ValueError("variable names must be pairwise distinct")
        if not 1 <= len(var_names) <= MAX_VARS:
            raise ValueError(f"between 1 and {MAX_VARS} variables supported")
        if order.kind == "elim" and order.k > len(var_names):
            raise ValueError("elimination block larger than the ring")
        self.field = p if isinstance(p, PrimeField) else PrimeField(p)
        self.p = self.field.p
        self.var_names = var_names
        self.n = len(var_names)
        self.order = order
        n = self.n
        self.ebits = BITS * n
        self.emask = (1 << self.ebits) - 1
        self.guard = sum(1 << (BITS * i + BITS - 1) for i in range(n))
        self._index = {v: i for i, v in enumerate(var_names)}
        self.var_keys = [self.encode(tuple(1 if j == i else 0 for j in range(n)))
                         for i in range(n)]

    # -- identity ----------------------------------------------------------
    @property
    def n_vars(self) -> int:
        return self.n

    def _ident(self):
        return (self.p, self.var_names, self.order)

    def __eq__(self, other):
        return self is other or (isinstance(other, PolyRing) and self._ident() == other._ident())

    def __hash__(self):
        return hash(self._ident())

    def __repr__(self):
        return f"PolyRing(p={self.p}, vars={','.join(self.var_names)}, order={self.order})"

    def with_order(self, order: MonomialOrder) -> "PolyRing":
        return PolyRing(p=self.field, var_names=self.var_names, order=order)

    # -- monomial keys -----------------------------------------------------
    def _ord(self, e: Sequence[int]) -> int:
        n, kind = self.n, self.order.kind
        if kind == "grevlex":
            d = sum(e)
            o = d
            for i in range(n - 1, 0, -1):
                o = (o << BITS) | (d - e[i])
            return o
        if kind == "lex":
            o = 0
            for i in range(n):
                o = (o << BITS) | e[i]
            return o
        k = self.order.k
        o = 0
        for lo, hi in ((0, k), (k, n)):
            if hi == lo:
                continue
            d = sum(e[lo:hi])
            o = (o << BITS) | d
            for i in range(hi - 1, lo, -1):
                o = (o << BITS) | (d - e[i])
        return o

    def encode(self, e: Sequence[int]) -> int:
        if len(e) != self.n:
            raise ValueError("exponent vector has wrong length")
        if any(x < 0 or x > MAX_EXP for x in e):
            raise ValueError(f"exponents must lie in [0, {MAX_EXP}]")
        E = 0
        for i in range(self.n - 1, -1, -1):
            E = (E << BITS) | e[i]
        return (self._ord(e) << self.ebits) | E

    def exps(self, key: int) -> tuple[int, ...]:
        return tuple((key & self.emask).to_bytes(self.n, "little"))

    def key_from_E(self, E: int) -> int:
        return (self._ord(E.to_bytes(self.n, "little")) << self.ebits) | E

    def kdeg(self, key: int) -> int:
        return sum((key & self.emask).to_bytes(self.n, "little"))

    def divides(self, a: int, b: int) -> bool:
        g = self.guard
        return (((b & self.emask) | g) - (a & self.emask)) & g == g

    def lcm_key(self, a: int, b: int) -> int:
        n = self.n
        ea = (a & self.emask).to_bytes(n, "little")
        eb = (b & self.emask).to_bytes(n, "little")
        E = int.from_bytes(bytes(max(x, y) for x, y in zip(ea, eb)), "little")
        return self.key_from_E(E)

    def coprime(self, a: int, b: int) -> bool:
        ea = (a & self.emask).to_bytes(self.n, "little")
        eb = (b & self.emask).to_bytes(self.n, "little")
        return not any(x and y for x, y in zip(ea, eb))

    def monomials(self, d: int) -> list[int]:
        """Keys of all monomials of degree ``d``, descending in the order."""
        if d < 0:
            return []
        out = []
        n = self.n
        for combo in combinations_with_replacement(range(n), d):
            e = [0] * n
            for i in combo:
                e[i] += 1
            out.append(self.encode(e))
        out.sort(reverse=True)
        return out

    def num_monomials(self, d: int) -> int:
        return comb(d + self.n - 1, self.n - 1) if d >= 0 else 0

    # -- constructors ------------------------------------------------------
    def zero(self) -> "Polynomial":
        return Polynomial(self, {})

    def one(self) -> "Polynomial":
        return Polynomial(self, {0: 1})

    def const(self, c: int) -> "Polynomial":
        c %= self.p
        return Polynomial(self, {0: c} if c else {})

    def var(self, i: int | str) -> "Polynomial":
        if isinstance(i, str):
            if i not in self._index:
                raise UnknownVariable(i)
            i = self._index[i]
        return Polynomial(self, {self.var_keys[i]: 1})

    def gens(self) -> list["Polynomial"]:
        return [self.var(i) for i in range(self.n)]

    def monomial(self, exps: Sequence[int], coeff: int = 1) -> "Polynomial":
        c = coeff % self.p
        return Polynomial(self, {self.encode(exps): c} if c else {})

    def from_terms(self, terms: Iterable[tuple[Sequence[int], int]]) -> "Polynomial":
        d: dict[int, int] = {}
        p = self.p
        for e, c in terms:
            k = self.encode(e)
            d[k] = (d.get(k, 0) + c) % p
        return Polynomial(self, {k: c for k, c in d.items() if c})

    def index(self, name: str) -> int:
        if name not in self._index:
            raise UnknownVariable(name)
        return self._index[name]

    def parse(self, text: str) -> "Polynomial":
        return parse_poly(text, self)

    def convert(self, f: "Polynomial") -> "Polynomial":
        """Re-key ``f`` (from a ring with the same variables) into this ring."""
        if f.ring == self:
            return f
        if f.ring.var_names != self.var_names or f.ring.p != self.p:
            raise RingMismatch("rings differ in variables or characteristic")
        em = f.ring.emask
        return Polynomial(self, {self.key_from_E(k & em): c for k, c in f.terms.items()})


class Polynomial:
    """Element of a :class:`PolyRing`; ``terms`` maps monomial key to residue."""

    __slots__ = ("ring", "terms", "__dict__")

    def __init__(self, ring: PolyRing, terms: dict[int, int]):
        self.ring = ring
        self.terms = terms

    # -- structure ---------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    @cached_property
    def lm(self) -> int:
        return max(self.terms)

    @property
    def lc(self) -> int:
        return self.terms[self.lm]

    def leading_exponents(self) -> tuple[int, ...]:
        return self.ring.exps(self.lm)

    def sorted_terms(self) -> list[tuple[int, int]]:
        return sorted(self.terms.items(), reverse=True)

    def term_list(self) -> list[tuple[tuple[int, ...], int]]:
        """``(exponents, coefficient)`` pairs, strictly descending."""
        ex = self.ring.exps
        return [(ex(k), c) for k, c in self.sorted_terms()]

    @cached_property
    def degree(self) -> int:
        if not self.terms:
            return -1
        kd = self.ring.kdeg
        return max(kd(k) for k in self.terms)

    def low_degree(self) -> int:
        kd = self.ring.kdeg
        return min(kd(k) for k in self.terms) if self.terms else -1

    def is_homogeneous(self) -> bool:
        if not self.terms:
            return True
        kd = self.ring.kdeg
        it = iter(self.terms)
        d = kd(next(it))
        return all(kd(k) == d for k in it)

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and 0 in self.terms)

    def constant_coeff(self) -> int:
        return self.terms.get(0, 0)

    def homogeneous_part(self, d: int) -> "Polynomial":
        kd = self.ring.kdeg
        return Polynomial(self.ring, {k: c for k, c in self.terms.items() if kd(k) == d})

    # -- arithmetic --------------------------------------------------------
    def _check(self, other):
        if not isinstance(other, Polynomial):
            return self.ring.const(other)
        if other.ring is not self.ring and other.ring != self.ring:
            raise RingMismatch(f"{self.ring} vs {other.ring}")
        return other

    def __add__(self, other):
        other = self._check(other)
        p = self.ring.p
        d = dict(self.terms)
        for k, c in other.terms.items():
            v = (d.get(k, 0) + c) % p
            if v:
                d[k] = v
            else:
                d.pop(k, None)
        return Polynomial(self.ring, d)

    __radd__ = __add__

    def __neg__(self):
        p = self.ring.p
        return Polynomial(self.ring, {k: p - c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def scale(self, c: int) -> "Polynomial":
        p = self.ring.p
        c %= p
        if not c:
            return self.ring.zero()
        return Polynomial(self.ring, {k: v * c % p for k, v in self.terms.items()})

    def mul_term(self, key: int, c: int) -> "Polynomial":
        p = self.ring.p
        return Polynomial(self.ring, {k + key: v * c % p for k, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return self.scale(other)
        other = self._check(other)
        return Polynomial(self.ring, mul_terms(self.terms, other.terms, self.ring.p))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power")
        result = self.ring.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def monic(self) -> "Polynomial":
        if not self.terms:
            return self
        return self.scale(pow(self.lc, -1, self.ring.p))

    def __eq__(self, other):
        if isinstance(other, int):
            return self.terms == ({0: other % self.ring.p} if other % self.ring.p else {})
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        return hash((self.ring, frozenset(self.terms.items())))

    def __call__(self, *point: int) -> int:
        return self.evaluate(point)

    def evaluate(self, point: Sequence[int]) -> int:
        p = self.ring.p
        total = 0
        for e, c in self.term_list():
            v = c
            for x, k in zip(point, e):
                if k:
                    v = v * pow(x, k, p) % p
            total += v
        return total % p

    def diff(self, i: int) -> "Polynomial":
        R = self.ring
        vk = R.var_keys[i]
        out: dict[int, int] = {}
        for k, c in self.terms.items():
            e = R.exps(k)[i]
            if e:
                v = c * e % R.p
                if v:
                    out[k - vk] = v
        return Polynomial(R, out)

    def __repr__(self):
        return print_poly(self)

    __str__ = __repr__


def mul_terms(a: dict[int, int], b: dict[int, int], p: int) -> dict[int, int]:
    """Product of two term dicts (keys add, coefficients multiply)."""
    if len(a) < len(b):
        a, b = b, a
    out: dict[int, int] = {}
    get = out.get
    for kb, cb in b.items():
        for ka, ca in a.items():
            k = ka + kb
            out[k] = get(k, 0) + ca * cb
    return {k: v % p for k, v in out.items() if v % p}


def schoolbook_mul(f: Polynomial, g: Polynomial) -> Polynomial:
    """Reference product on exponent tuples; independent of key packing."""
    R = f.ring
    acc: dict[tuple, int] = {}
    for ef, cf in f.term_list():
        for eg, cg in g.term_list():
            e = tuple(x + y for x, y in zip(ef, eg))
            acc[e] = (acc.get(e, 0) + cf * cg) % R.p
    return R.from_terms((e, c) for e, c in acc.items() if c)


def monomial_compare(a: Sequence[int], b: Sequence[int], order: MonomialOrder) -> int:
    """Three-way comparison of exponent vectors, computed directly."""
    if len(a) != len(b):
        raise ValueError("exponent vectors of different length")
    a, b = tuple(a), tuple(b)
    if a == b:
        return 0

    def grevlex(x, y):
        if sum(x) != sum(y):
            return 1 if sum(x) > sum(y) else -1
        for i in range(len(x) - 1, -1, -1):
            if x[i] != y[i]:
                return 1 if x[i] < y[i] else -1
        return 0

    if order.kind == "lex":
        return 1 if a > b else -1
    if order.kind == "grevlex":
        return grevlex(a, b)
    k = order.k
    c = grevlex(a[:k], b[:k]) if k else 0
    return c if c else grevlex(a[k:], b[k:])


# -- ideals and ring maps -----------------------------------------------------

class Ideal:
    """Finitely generated ideal; zero generators are dropped."""

    def __init__(self, ring: PolyRing, gens: Iterable[Polynomial] = ()):
        self.ring = ring
        gl = []
        for g in gens:
            if not isinstance(g, Polynomial):
                g = ring.const(g)
            if g.ring != ring:
                raise RingMismatch("generator from another ring")
            if g.terms:
                gl.append(g)
        self.gens = gl

    def __repr__(self):
        return f"Ideal({', '.join(map(str, self.gens))})"

    def __len__(self):
        return len(self.gens)

    def __add__(self, other: "Ideal") -> "Ideal":
        if other.ring != self.ring:
            raise RingMismatch("ideals in different rings")
        return Ideal(self.ring, self.gens + other.gens)

    def __mul__(self, other: "Ideal") -> "Ideal":
        return Ideal(self.ring, [f * g for f in self.gens for g in other.gens])

    def is_homogeneous(self) -> bool:
        return all(g.is_homogeneous() for g in self.gens)

    def is_zero(self) -> bool:
        return not self.gens

    def content_key(self):
        return (self.ring, tuple(sorted(frozenset(g.monic().terms.items()) for g in self.gens)))


class RingMap:
    """Substitution homomorphism ``source -> target``, ``x_i -> images[i]``."""

    def __init__(self, source: PolyRing, target: PolyRing, images: Sequence[Polynomial]):
        if len(images) != source.n:
            raise ValueError("need one image per source variable")
        imgs = []
        for g in images:
            if not isinstance(g, Polynomial):
                g = target.const(g)
            if g.ring != target:
                raise RingMismatch("image outside target ring")
            imgs.append(g)
        if source.p != target.p:
            raise RingMismatch("characteristics differ")
        self.source = source
        self.target = target
        self.images = imgs

    @property
    def degree(self) -> int | None:
        """Common degree when graded, else None."""
        ds = {g.degree for g in self.images if g.terms}
        if len(ds) == 1 and all(g.is_homogeneous() for g in self.images):
            d = ds.pop()
            return d if d >= 1 else None
        return None

    def is_graded(self) -> bool:
        return self.degree is not None

    def __call__(self, f: Polynomial) -> Polynomial:
        return apply_map(self, f)

    def compose(self, other: "RingMap") -> "RingMap":
        """``self ∘ other``: first ``other``, then ``self``."""
        if other.target != self.source:
            raise RingMismatch("maps do not compose")
        return RingMap(other.source, self.target, [apply_map(self, g) for g in other.images])


def apply_map(phi: RingMap, f: Polynomial) -> Polynomial:
    if f.ring != phi.source:
        raise RingMismatch("polynomial not in the source ring")
    T = phi.target
    p = T.p
    powers: list[dict[int, Polynomial]] = [{0: T.one(), 1: g} for g in phi.images]

    def pw(i, e):
        cache = powers[i]
        if e not in cache:
            h = e // 2
            cache[e] = pw(i, h) * pw(i, e - h)
        return cache[e]

    acc: dict[int, int] = {}
    S = phi.source
    for k, c in f.terms.items():
        term = {0: c}
        for i, e in enumerate(S.exps(k)):
            if e:
                term = mul_terms(term, pw(i, e).terms, p)
                if not term:
                    break
        for kk, v in term.items():
            acc[kk] = (acc.get(kk, 0) + v) % p
    return Polynomial(T, {k: v for k, v in acc.items() if v})


def identity_map(R: PolyRing) -> RingMap:
    return RingMap(R, R, R.gens())


def random_linear_form(ring: PolyRing, seed: int, variables: Sequence[int] | None = None) -> Polynomial:
    """Seeded degree-one form; same seed, same form."""
    rng = random.Random(seed)
    idx = range(ring.n) if variables is None else variables
    while True:
        coeffs = [rng.randrange(ring.p) for _ in idx]
        if any(coeffs):
            break
    return Polynomial(ring, {ring.var_keys[i]: c for i, c in zip(idx, coeffs) if c})


def random_form(ring: PolyRing, d: int, rng: random.Random) -> Polynomial:
    return Polynomial(ring, {k: c for k in ring.monomials(d) if (c := rng.randrange(ring.p))})


# -- text format ----------------------------------------------------------------

def print_poly(f: Polynomial) -> str:
    if not f.terms:
        return "0"
    R = f.ring
    names = R.var_names
    out = []
    for key, c in f.sorted_terms():
        e = R.exps(key)
        s = R.field.signed(c)
        neg = s < 0
        a = -s if neg else s
        mono = "*".join(names[i] if x == 1 else f"{names[i]}^{x}" for i, x in enumerate(e) if x)
        if not mono:
            body = str(a)
        elif a == 1:
            body = mono
        else:
            body = f"{a}*{mono}"
        if out:
            out.append(("-" if neg else "+") + body)
        else:
            out.append(("-" if neg else "") + body)
    return "".join(out)


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*^−]))")


def parse_poly(text: str, ring: PolyRing) -> Polynomial:
    """Parse a sum of terms ``[+|-] [coeff*] var[^e]*...``, e.g. ``3*x0^2*x1 - x2 + 5``.

    Coefficients are reduced mod p; errors report 1-based line and column.
    """
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise PolySyntaxError(f"unexpected character {text[pos]!r}", *_linecol(text, pos))
        kind = m.lastgroup
        val = m.group(kind)
        if val == "−":
            val = "-"
        tokens.append((kind, val, m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    p = ring.p
    acc: dict[int, int] = {}
    i = 0

    def err(msg, at):
        raise PolySyntaxError(msg, *_linecol(text, at))

    def expect_int(j):
        kind, val, at = tokens[j]
        if kind != "num":
            err("expected exponent", at)
        return int(val)

    if tokens[0][0] == "end":
        err("empty polynomial", 0)
    first = True
    while tokens[i][0] != "end":
        sign = 1
        kind, val, at = tokens[i]
        if kind == "op" and val in "+-":
            sign = -1 if val == "-" else 1
            i += 1
        elif not first:
            err("expected '+' or '-'", at)
        first = False
        coeff = 1
        e = [0] * ring.n
        kind, val, at = tokens[i]
        if kind == "num":
            coeff = int(val)
            i += 1
            if tokens[i][0] == "op" and tokens[i][1] == "*":
                i += 1
                if tokens[i][0] != "name":
                    err("expected variable after '*'", tokens[i][2])
            else:
                acc[0] = (acc.get(0, 0) + sign * coeff) % p
                continue
        elif kind != "name":
            err("expected coefficient or variable", at)
        while True:
            kind, val, at = tokens[i]
            if kind != "name":
                err("expected variable", at)
            if val not in ring._index:
                raise UnknownVariable(f"{val} (line {_linecol(text, at)[0]}, column {_linecol(text, at)[1]})")
            i += 1
            x = 1
            if tokens[i][0] == "op" and tokens[i][1] == "^":
                x = expect_int(i + 1)
                i += 2
            e[ring._index[val]] += x
            if tokens[i][0] == "op" and tokens[i][1] == "*":
                i += 1
                continue
            break
        k = ring.encode(e)
        acc[k] = (acc.get(k, 0) + sign * coeff) % p
    return Polynomial(ring, {k: c for k, c in acc.items() if c})


def _linecol(text: str, pos: int) -> tuple[int, int]:
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, col


def format_ideal_file(I: Ideal, comment: str | None = None) -> str:
    R = I.ring
    lines = [f"ring p={R.p} vars={','.join(R.var_names)}"]
    if comment:
        lines += [f"# {c}" for c in comment.splitlines()]
    lines += [print_poly(g) for g in I.gens]
    return "\n".join(lines) + "\n"


def parse_ideal_file(text: str) -> Ideal:
    ring = None
    gens = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ring is None:
            m = re.fullmatch(r"ring\s+p=(\d+)\s+vars=([\w,\s]+)", line)
            if not m:
                raise PolySyntaxError("missing 'ring p=<prime> vars=<list>' header", lineno, 1)
            names = [v.strip() for v in m.group(2).split(",") if v.strip()]
            ring = PolyRing(p=int(m.group(1)), var_names=names)
            continue
        try:
            gens.append(parse_poly(line, ring))
        except PolySyntaxError as exc:
            raise PolySyntaxError(str(exc).rsplit(" (line", 1)[0], lineno, exc.column) from None
    if ring is None:
        raise PolySyntaxError("empty ideal file", 1, 1)
    return Ideal(ring, gens)
