"""Prime fields and dense exact linear algebra over them.

Residues are plain Python ints in ``[0, p)``; matrices are ``numpy.int64``
arrays.  Because ``p < 2**31`` every product of two residues fits in a
signed 64-bit word, so the elimination kernels never overflow.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .errors import ZeroInverse

DEFAULT_PRIME = 32003


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for ``n < 3.3e24``."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
    for q in small:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class PrimeField:
    p: int = DEFAULT_PRIME

    def __post_init__(self):
        if not (3 <= self.p < 2**31) or not is_prime(self.p):
            raise ValueError(f"modulus must be an odd prime below 2^31, got {self.p}")

    def __call__(self, a: int) -> int:
        return a % self.p

    def inv(self, a: int) -> int:
        return field_inverse(a, self)

    def neg(self, a: int) -> int:
        return -a % self.p

    def signed(self, a: int) -> int:
        """Representative in ``(-p/2, p/2]`` (used only for printing)."""
        a %= self.p
        return a - self.p if a > self.p // 2 else a


def field_inverse(a: int, F: PrimeField) -> int:
    a %= F.p
    if a == 0:
        raise ZeroInverse(f"0 has no inverse mod {F.p}")
    return pow(a, -1, F.p)


@njit(cache=True)
def _inv_mod(a, p):
    t, newt = 0, 1
    r, newr = p, a % p
    while newr != 0:
        q = r // newr
        t, newt = newt, t - q * newt
        r, newr = newr, r - q * newr
    if t < 0:
        t += p
    return t


@njit(cache=True)
def _rref_kernel(A, p, reduced):
    rows, cols = A.shape
    piv = np.empty(min(rows, cols), np.int64)
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        i = r
        while i < rows and A[i, c] == 0:
            i += 1
        if i == rows:
            continue
        if i != r:
            for j in range(c, cols):
                tmp = A[i, j]
                A[i, j] = A[r, j]
                A[r, j] = tmp
        inv = _inv_mod(A[r, c], p)
        if inv != 1:
            for j in range(c, cols):
                A[r, j] = A[r, j] * inv % p
        start = 0 if reduced else r + 1
        for i2 in range(start, rows):
            if i2 == r:
                continue
            f = A[i2, c]
            if f != 0:
                for j in range(c, cols):
                    v = A[r, j]
                    if v != 0:
                        A[i2, j] = (A[i2, j] - f * v) % p
        piv[r] = c
        r += 1
    return piv[:r]


def _as_array(entries, rows=None, cols=None, p=None) -> np.ndarray:
    a = np.asarray(entries, dtype=np.int64)
    if rows is not None:
        a = a.reshape(rows, cols)
    if a.ndim != 2:
        raise ValueError("matrix entries must be two-dimensional")
    if p is not None:
        a = a % p
    return a


@dataclass(frozen=True)
class DenseMatrix:
    """Row-major matrix of residues modulo ``field.p``."""

    field: PrimeField
    a: np.ndarray = field(repr=False)

    @classmethod
    def from_rows(cls, F: PrimeField, rows, ncols: int | None = None) -> "DenseMatrix":
        rows = list(rows)
        if not rows:
            return cls(F, np.zeros((0, ncols or 0), dtype=np.int64))
        return cls(F, _as_array(rows, p=F.p))

    @classmethod
    def zeros(cls, F: PrimeField, rows: int, cols: int) -> "DenseMatrix":
        return cls(F, np.zeros((rows, cols), dtype=np.int64))

    @classmethod
    def identity(cls, F: PrimeField, n: int) -> "DenseMatrix":
        return cls(F, np.eye(n, dtype=np.int64))

    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    @property
    def entries(self) -> list[int]:
        return [int(v) for v in self.a.ravel()]

    def __eq__(self, other):
        return (isinstance(other, DenseMatrix) and self.field == other.field
                and self.a.shape == other.a.shape and bool(np.array_equal(self.a, other.a)))

    def __hash__(self):
        return hash((self.field.p, self.a.shape, self.a.tobytes()))

    def __matmul__(self, other: "DenseMatrix") -> "DenseMatrix":
        return DenseMatrix(self.field, matmul_mod(self.a, other.a, self.field.p))

    def transpose(self) -> "DenseMatrix":
        return DenseMatrix(self.field, np.ascontiguousarray(self.a.T))

    def rref(self) -> tuple["DenseMatrix", int, list[int]]:
        R, piv = rref(self.a, self.field.p)
        return DenseMatrix(self.field, R), len(piv), piv

    def rank(self) -> int:
        return rank(self.a, self.field.p)

    def kernel_basis(self) -> list[list[int]]:
        K = kernel(self.a, self.field.p)
        return [[int(v) for v in row] for row in K]

    def solve(self, b) -> list[int] | None:
        x = solve(self.a, np.asarray(b, dtype=np.int64), self.field.p)
        return None if x is None else [int(v) for v in x]


# -- array-level helpers (used directly by the algebra layers) -------------

def matmul_mod(A: np.ndarray, B: np.ndarray, p: int) -> np.ndarray:
    """Exact ``A @ B mod p`` without int64 overflow."""
    if A.shape[1] == 0:
        return np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
    # k * (p-1)^2 must stay below 2^63; chunk the inner dimension.
    chunk = max(1, (2**62) // ((p - 1) ** 2))
    out = np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
    for s in range(0, A.shape[1], chunk):
        out = (out + (A[:, s:s + chunk] @ B[s:s + chunk]) % p) % p
    return out


def rref(A: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    R = np.array(A, dtype=np.int64, copy=True) % p
    if R.size == 0:
        return R, []
    piv = _rref_kernel(R, p, True)
    r = len(piv)
    return R[:r].copy(), [int(c) for c in piv]


def rank(A: np.ndarray, p: int) -> int:
    if A.size == 0:
        return 0
    R = np.array(A, dtype=np.int64, copy=True) % p
    # eliminate along the shorter side
    if R.shape[0] > R.shape[1]:
        R = np.ascontiguousarray(R.T)
    return len(_rref_kernel(R, p, False))


def kernel(A: np.ndarray, p: int) -> np.ndarray:
    """Rows form a basis of ``{v : A v = 0}``."""
    rows, cols = A.shape
    if cols == 0:
        return np.zeros((0, 0), dtype=np.int64)
    R, piv = rref(A, p) if rows else (np.zeros((0, cols), np.int64), [])
    free = [c for c in range(cols) if c not in set(piv)]
    K = np.zeros((len(free), cols), dtype=np.int64)
    for k, fc in enumerate(free):
        K[k, fc] = 1
        for r, pc in enumerate(piv):
            K[k, pc] = (-R[r, fc]) % p
    return K


def left_kernel(A: np.ndarray, p: int) -> np.ndarray:
    """Rows form a basis of ``{w : w A = 0}``."""
    return kernel(np.ascontiguousarray(A.T), p)


def solve(A: np.ndarray, b: np.ndarray, p: int) -> np.ndarray | None:
    """One solution of ``A x = b`` (``b`` a vector or a matrix of columns)."""
    vec = b.ndim == 1
    B = b.reshape(-1, 1) if vec else b
    aug = np.concatenate([A % p, B % p], axis=1)
    R, piv = rref(aug, p)
    n = A.shape[1]
    if any(c >= n for c in piv):
        return None
    X = np.zeros((n, B.shape[1]), dtype=np.int64)
    for r, c in enumerate(piv):
        X[c] = R[r, n:]
    return X[:, 0] if vec else X


def row_space_basis(A: np.ndarray, p: int) -> np.ndarray:
    R, _ = rref(A, p)
    return R


class RowSpace:
    """Incrementally maintained row space kept in reduced echelon form.

    ``add`` returns True when the vector was independent of the current
    span.  Used for degreewise minimal-generator selection.
    """

    def __init__(self, ncols: int, p: int):
        self.p = p
        self.ncols = ncols
        self.rows: list[np.ndarray] = []
        self.pivots: list[int] = []

    def reduce(self, v: np.ndarray) -> np.ndarray:
        v = np.array(v, dtype=np.int64) % self.p
        for row, c in zip(self.rows, self.pivots):
            f = v[c]
            if f:
                v = (v - f * row) % self.p
        return v

    def add(self, v: np.ndarray) -> bool:
        v = self.reduce(v)
        nz = np.flatnonzero(v)
        if nz.size == 0:
            return False
        c = int(nz[0])
        v = v * pow(int(v[c]), -1, self.p) % self.p
        for i, row in enumerate(self.rows):
            f = row[c]
            if f:
                self.rows[i] = (row - f * v) % self.p
        self.rows.append(v)
        self.pivots.append(c)
        return True

    def __len__(self):
        return len(self.rows)
