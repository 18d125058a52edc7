"""Exact dense linear algebra over prime fields.

Matrices hold int64 residues in ``[0, p)``. Row reduction never overflows for
``p <= 2**31 - 1`` because every intermediate product is below ``2**62``;
matrix products fall back to Python integers when an inner sum could exceed
the int64 range.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numba
import numpy as np

MAX_PRIME = 2**31 - 1
_INT64_MAX = 2**63 - 1


class LinalgError(ValueError):
    """Shape or modulus mismatch between operands."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def _mod_matmul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    inner = a.shape[1]
    if inner == 0:
        return np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    if (p - 1) ** 2 * inner <= _INT64_MAX:
        return (a @ b) % p
    out = (a.astype(object) @ b.astype(object)) % p
    return out.astype(np.int64)


class PrimeFieldMatrix:
    """Immutable dense matrix over F_p."""

    __slots__ = ("p", "a")

    def __init__(self, p: int, data, shape: tuple[int, int] | None = None):
        if not 2 <= p <= MAX_PRIME:
            raise LinalgError(f"modulus {p} outside [2, 2^31-1]")
        arr = np.array(data, dtype=object)
        if shape is not None:
            arr = arr.reshape(shape)
        if arr.ndim != 2:
            raise LinalgError(f"expected a 2-d array, got shape {arr.shape}")
        arr = (arr % p).astype(np.int64)
        arr.setflags(write=False)
        self.p = p
        self.a = arr

    @classmethod
    def _wrap(cls, p: int, arr: np.ndarray) -> "PrimeFieldMatrix":
        # trusted constructor: arr already reduced int64
        m = object.__new__(cls)
        arr = np.ascontiguousarray(arr, dtype=np.int64)
        arr.setflags(write=False)
        m.p = p
        m.a = arr
        return m

    # construction helpers
    @classmethod
    def zeros(cls, p: int, rows: int, cols: int) -> "PrimeFieldMatrix":
        return cls._wrap(p, np.zeros((rows, cols), dtype=np.int64))

    @classmethod
    def identity(cls, p: int, n: int) -> "PrimeFieldMatrix":
        return cls._wrap(p, np.eye(n, dtype=np.int64))

    @classmethod
    def from_rows(cls, p: int, rows: Sequence[Sequence[int]], cols: int | None = None) -> "PrimeFieldMatrix":
        rows = [list(r) for r in rows]
        if not rows:
            return cls.zeros(p, 0, cols or 0)
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise LinalgError("ragged rows")
        return cls(p, [[int(x) for x in r] for r in rows], shape=(len(rows), width))

    @classmethod
    def column(cls, p: int, entries: Iterable[int]) -> "PrimeFieldMatrix":
        entries = [int(x) for x in entries]
        return cls(p, entries, shape=(len(entries), 1)) if entries else cls.zeros(p, 0, 1)

    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.a.shape

    def entries(self) -> list[int]:
        """Row-major residues."""
        return [int(x) for x in self.a.ravel()]

    def tolist(self) -> list[list[int]]:
        return [[int(x) for x in row] for row in self.a]

    def _check(self, other: "PrimeFieldMatrix") -> None:
        if not isinstance(other, PrimeFieldMatrix):
            raise TypeError(f"expected PrimeFieldMatrix, got {type(other).__name__}")
        if other.p != self.p:
            raise LinalgError(f"modulus mismatch: {self.p} vs {other.p}")

    def __matmul__(self, other: "PrimeFieldMatrix") -> "PrimeFieldMatrix":
        self._check(other)
        if self.cols != other.rows:
            raise LinalgError(f"cannot multiply {self.shape} by {other.shape}")
        return PrimeFieldMatrix._wrap(self.p, _mod_matmul(self.a, other.a, self.p))

    def __add__(self, other: "PrimeFieldMatrix") -> "PrimeFieldMatrix":
        self._check(other)
        if self.shape != other.shape:
            raise LinalgError(f"cannot add {self.shape} and {other.shape}")
        return PrimeFieldMatrix._wrap(self.p, (self.a + other.a) % self.p)

    def __sub__(self, other: "PrimeFieldMatrix") -> "PrimeFieldMatrix":
        self._check(other)
        if self.shape != other.shape:
            raise LinalgError(f"cannot subtract {other.shape} from {self.shape}")
        return PrimeFieldMatrix._wrap(self.p, (self.a - other.a) % self.p)

    def __neg__(self) -> "PrimeFieldMatrix":
        return PrimeFieldMatrix._wrap(self.p, (-self.a) % self.p)

    def scale(self, c: int) -> "PrimeFieldMatrix":
        return PrimeFieldMatrix._wrap(self.p, (self.a * (int(c) % self.p)) % self.p)

    @property
    def T(self) -> "PrimeFieldMatrix":
        return PrimeFieldMatrix._wrap(self.p, self.a.T)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PrimeFieldMatrix):
            return NotImplemented
        return self.p == other.p and self.shape == other.shape and bool(np.array_equal(self.a, other.a))

    def __hash__(self) -> int:
        return hash((self.p, self.shape, self.a.tobytes()))

    def __repr__(self) -> str:
        return f"PrimeFieldMatrix(p={self.p}, {self.tolist()})"

    def is_zero(self) -> bool:
        return not self.a.any()

    def submatrix(self, rows: slice, cols: slice) -> "PrimeFieldMatrix":
        return PrimeFieldMatrix._wrap(self.p, self.a[rows, cols])


def hstack(p: int, blocks: Sequence[PrimeFieldMatrix], rows: int | None = None) -> PrimeFieldMatrix:
    if not blocks:
        return PrimeFieldMatrix.zeros(p, rows or 0, 0)
    return PrimeFieldMatrix._wrap(p, np.hstack([b.a for b in blocks]))


def vstack(p: int, blocks: Sequence[PrimeFieldMatrix], cols: int | None = None) -> PrimeFieldMatrix:
    if not blocks:
        return PrimeFieldMatrix.zeros(p, 0, cols or 0)
    return PrimeFieldMatrix._wrap(p, np.vstack([b.a for b in blocks]))


def block_diag(p: int, blocks: Sequence[PrimeFieldMatrix]) -> PrimeFieldMatrix:
    r = sum(b.rows for b in blocks)
    c = sum(b.cols for b in blocks)
    out = np.zeros((r, c), dtype=np.int64)
    i = j = 0
    for b in blocks:
        out[i:i + b.rows, j:j + b.cols] = b.a
        i += b.rows
        j += b.cols
    return PrimeFieldMatrix._wrap(p, out)


# -- array-level kernels ------------------------------------------------------

@numba.njit(cache=True)
def _inv_mod(a, p):
    # extended Euclid; a is a nonzero residue
    r0, r1 = p, a
    s0, s1 = 0, 1
    while r1:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    return s0 % p


@numba.njit(cache=True)
def _rref_inplace(m, p, pivots):
    rows, cols = m.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        piv = -1
        for i in range(r, rows):
            if m[i, c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(c, cols):
                t = m[r, j]
                m[r, j] = m[piv, j]
                m[piv, j] = t
        inv = _inv_mod(m[r, c], p)
        if inv != 1:
            for j in range(c, cols):
                m[r, j] = (m[r, j] * inv) % p
        for i in range(rows):
            t = m[i, c]
            if t != 0 and i != r:
                for j in range(c, cols):
                    m[i, j] = (m[i, j] - t * m[r, j]) % p
        pivots[r] = c
        r += 1
    return r


def rref_array(a: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of an int64 residue array.

    Pivot choice is the first nonzero entry of each column, scanning columns
    left to right, so the output is reproducible bit for bit. The elimination
    loop is compiled; entries stay below ``p**2 < 2**62``.
    """
    m = np.array(a, dtype=np.int64, copy=True)
    if m.size == 0:
        return m, []
    pivots = np.zeros(min(m.shape), dtype=np.int64)
    rank = _rref_inplace(m, p, pivots)
    return m, [int(c) for c in pivots[:rank]]


def kernel_array(a: np.ndarray, p: int) -> np.ndarray:
    """Columns spanning the right null space of ``a`` (shape cols x nullity)."""
    cols = a.shape[1]
    red, pivots = rref_array(a, p)
    pivot_set = set(pivots)
    free = [c for c in range(cols) if c not in pivot_set]
    out = np.zeros((cols, len(free)), dtype=np.int64)
    if free:
        out[free, range(len(free))] = 1
        if pivots:
            out[pivots, :] = (-red[: len(pivots)][:, free]) % p
    return out


def solve_array(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray | None:
    """One solution ``x`` of ``a @ x = b`` (free variables set to zero), or None."""
    rows, cols = a.shape
    aug = np.hstack([a, b])
    red, pivots = rref_array(aug, p)
    if pivots and pivots[-1] >= cols:
        return None
    x = np.zeros((cols, b.shape[1]), dtype=np.int64)
    for i, pc in enumerate(pivots):
        x[pc] = red[i, cols:]
    return x


def rank_array(a: np.ndarray, p: int) -> int:
    return len(rref_array(a, p)[1])


# -- public API ----------------------------------------------------------------

def rref(m: PrimeFieldMatrix) -> tuple[PrimeFieldMatrix, list[int]]:
    red, pivots = rref_array(m.a, m.p)
    return PrimeFieldMatrix._wrap(m.p, red), pivots


def rank(m: PrimeFieldMatrix) -> int:
    return rank_array(m.a, m.p)


def kernel_matrix(m: PrimeFieldMatrix) -> PrimeFieldMatrix:
    return PrimeFieldMatrix._wrap(m.p, kernel_array(m.a, m.p))


def kernel_basis(m: PrimeFieldMatrix) -> list[PrimeFieldMatrix]:
    k = kernel_array(m.a, m.p)
    return [PrimeFieldMatrix._wrap(m.p, k[:, [j]]) for j in range(k.shape[1])]


def image_matrix(m: PrimeFieldMatrix) -> PrimeFieldMatrix:
    """Columns of ``m`` at pivot positions: a basis of the column space."""
    _, pivots = rref_array(m.a, m.p)
    return PrimeFieldMatrix._wrap(m.p, m.a[:, pivots])


def image_basis(m: PrimeFieldMatrix) -> list[PrimeFieldMatrix]:
    img = image_matrix(m)
    return [PrimeFieldMatrix._wrap(m.p, img.a[:, [j]]) for j in range(img.cols)]


def solve(a: PrimeFieldMatrix, b: PrimeFieldMatrix) -> tuple[PrimeFieldMatrix, list[PrimeFieldMatrix]] | None:
    """Solve ``a @ x = b`` exactly.

    Returns ``(particular, kernel_basis(a))`` or ``None`` when the system is
    inconsistent.
    """
    a._check(b)
    if a.rows != b.rows:
        raise LinalgError(f"row mismatch: a has {a.rows} rows, b has {b.rows}")
    x = solve_array(a.a, b.a, a.p)
    if x is None:
        return None
    return PrimeFieldMatrix._wrap(a.p, x), kernel_basis(a)


def solve_left(a: PrimeFieldMatrix, b: PrimeFieldMatrix) -> PrimeFieldMatrix | None:
    """One ``x`` with ``x @ a = b``, or None."""
    x = solve_array(a.a.T, b.a.T, a.p)
    return None if x is None else PrimeFieldMatrix._wrap(a.p, x.T)


def inverse(m: PrimeFieldMatrix) -> PrimeFieldMatrix | None:
    if m.rows != m.cols:
        return None
    x = solve_array(m.a, np.eye(m.rows, dtype=np.int64), m.p)
    if x is None:
        return None
    return PrimeFieldMatrix._wrap(m.p, x)


def is_injective(m: PrimeFieldMatrix) -> bool:
    return rank(m) == m.cols


def is_surjective(m: PrimeFieldMatrix) -> bool:
    return rank(m) == m.rows
