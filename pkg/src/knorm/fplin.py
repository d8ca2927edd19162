"""Exact linear algebra over the prime field F_p.

All matrices are numpy int64 arrays with entries reduced mod p.  Subspaces
are stored in reduced row-echelon form, which is unique, so two subspaces
are equal iff their stored bases are identical arrays.  That canonicality
is what makes every "choose a complement" step elsewhere in the package
reproducible.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import InputError

__all__ = [
    "FpMatrix",
    "Subspace",
    "rref",
    "kernel_image",
    "intersect_and_sum",
    "complement",
    "quotient_dim",
    "solve",
]


class MathInternal(AssertionError):
    """Impossible-by-mathematics branch; reaching it means a bug."""


def is_prime(n: int) -> bool:
    """Trial-division primality test; moduli here are always small."""
    if n <= 1:
        return False
    for i in range(2, int(math.isqrt(n)) + 1):
        if n % i == 0:
            return False
    return True


def _check_prime(p: int) -> int:
    p = int(p)
    if not is_prime(p):
        raise InputError(f"modulus {p} is not prime")
    if p >= 1 << 16:
        raise InputError(f"prime modulus {p} exceeds the supported bound 2^16")
    return p


def rref(mat: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row-echelon form over F_p.

    Returns (R, pivot_cols).  R contains only the nonzero rows; pivots are
    normalized to 1 and their columns cleared above and below.
    """
    a = np.array(mat, dtype=np.int64) % p
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        pr = r + int(nz[0])
        if pr != r:
            a[[r, pr]] = a[[pr, r]]
        a[r] = (a[r] * pow(int(a[r, c]), -1, p)) % p
        col = a[:, c].copy()
        col[r] = 0
        # One rank-1 update clears the pivot column in all other rows.
        a -= np.outer(col, a[r])
        a %= p
        pivots.append(c)
        r += 1
    return a[: len(pivots)], pivots


class FpMatrix:
    """A rows x cols matrix over F_p with entries reduced mod p."""

    __slots__ = ("p", "entries")

    def __init__(self, p: int, entries) -> None:
        self.p = _check_prime(p)
        a = np.asarray(entries, dtype=np.int64)
        if a.ndim != 2:
            raise InputError(f"expected a 2-d array, got shape {a.shape}")
        self.entries = a % self.p

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    @classmethod
    def identity(cls, p: int, n: int) -> "FpMatrix":
        return cls(p, np.eye(n, dtype=np.int64))

    @classmethod
    def zero(cls, p: int, rows: int, cols: int) -> "FpMatrix":
        return cls(p, np.zeros((rows, cols), dtype=np.int64))

    def __matmul__(self, other: "FpMatrix") -> "FpMatrix":
        if self.p != other.p:
            raise InputError("modulus mismatch")
        return FpMatrix(self.p, (self.entries @ other.entries) % self.p)

    def __add__(self, other: "FpMatrix") -> "FpMatrix":
        if self.p != other.p:
            raise InputError("modulus mismatch")
        return FpMatrix(self.p, self.entries + other.entries)

    def __sub__(self, other: "FpMatrix") -> "FpMatrix":
        if self.p != other.p:
            raise InputError("modulus mismatch")
        return FpMatrix(self.p, self.entries - other.entries)

    def __pow__(self, k: int) -> "FpMatrix":
        if self.rows != self.cols:
            raise InputError("matrix power requires a square matrix")
        out = np.eye(self.rows, dtype=np.int64)
        base = self.entries
        while k:
            if k & 1:
                out = (out @ base) % self.p
            base = (base @ base) % self.p
            k >>= 1
        return FpMatrix(self.p, out)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, FpMatrix)
            and self.p == other.p
            and self.entries.shape == other.entries.shape
            and bool(np.array_equal(self.entries, other.entries))
        )

    def apply(self, vec) -> np.ndarray:
        return (self.entries @ (np.asarray(vec, dtype=np.int64) % self.p)) % self.p

    def rank(self) -> int:
        return len(rref(self.entries, self.p)[1])

    def __repr__(self) -> str:
        return f"FpMatrix(p={self.p}, {self.rows}x{self.cols})"


class Subspace:
    """A subspace of F_p^n, stored by its reduced row-echelon basis."""

    __slots__ = ("p", "ambient_dim", "basis")

    def __init__(self, p: int, ambient_dim: int, vectors=None) -> None:
        self.p = _check_prime(p)
        self.ambient_dim = int(ambient_dim)
        if vectors is None or self.ambient_dim == 0:
            vecs = np.zeros((0, self.ambient_dim), dtype=np.int64)
        else:
            vecs = np.asarray(vectors, dtype=np.int64).reshape(-1, self.ambient_dim)
        self.basis, _ = rref(vecs, self.p)

    @classmethod
    def zero(cls, p: int, n: int) -> "Subspace":
        return cls(p, n)

    @classmethod
    def full(cls, p: int, n: int) -> "Subspace":
        return cls(p, n, np.eye(n, dtype=np.int64))

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Subspace)
            and self.p == other.p
            and self.ambient_dim == other.ambient_dim
            and self.basis.shape == other.basis.shape
            and bool(np.array_equal(self.basis, other.basis))
        )

    def contains(self, vec) -> bool:
        v = np.asarray(vec, dtype=np.int64) % self.p
        if v.shape != (self.ambient_dim,):
            raise InputError("vector has wrong length")
        stacked, _ = rref(np.vstack([self.basis, v.reshape(1, -1)]), self.p)
        return stacked.shape[0] == self.dim

    def is_subspace_of(self, other: "Subspace") -> bool:
        self._check_compatible(other)
        stacked, _ = rref(np.vstack([other.basis, self.basis]), other.p)
        return stacked.shape[0] == other.dim

    def vectors(self):
        """Iterate over all p^dim vectors of the subspace (small spaces only)."""
        coeffs = np.zeros(self.dim, dtype=np.int64)
        for idx in range(self.p**self.dim):
            k = idx
            for i in range(self.dim):
                coeffs[i] = k % self.p
                k //= self.p
            yield (coeffs @ self.basis) % self.p

    def _check_compatible(self, other: "Subspace") -> None:
        if self.p != other.p or self.ambient_dim != other.ambient_dim:
            raise InputError("subspaces live in different ambient spaces")

    def __repr__(self) -> str:
        return f"Subspace(p={self.p}, dim={self.dim}, ambient={self.ambient_dim})"


def kernel_image(m: FpMatrix) -> tuple[Subspace, Subspace]:
    """Null space and column space of a matrix; rank-nullity is asserted."""
    p = m.p
    a = m.entries
    rows, cols = a.shape
    red, pivots = rref(a, p)
    pivot_set = set(pivots)
    free = [j for j in range(cols) if j not in pivot_set]
    kvecs = np.zeros((len(free), cols), dtype=np.int64)
    for k, f in enumerate(free):
        kvecs[k, f] = 1
        for row_idx, pc in enumerate(pivots):
            kvecs[k, pc] = (-red[row_idx, f]) % p
    kernel = Subspace(p, cols, kvecs)
    image = Subspace(p, rows, a.T)
    if kernel.dim + image.dim != cols:
        raise MathInternal("rank-nullity violated")  # pragma: no cover
    return kernel, image


def intersect_and_sum(a: Subspace, b: Subspace) -> tuple[Subspace, Subspace]:
    """(a ∩ b, a + b), with the dimension formula enforced."""
    a._check_compatible(b)
    p, n = a.p, a.ambient_dim
    total = Subspace(p, n, np.vstack([a.basis, b.basis]))
    if a.dim == 0 or b.dim == 0:
        inter = Subspace.zero(p, n)
    else:
        # Solutions (u, v) of u*A = v*B give intersection vectors u*A.
        stacked = np.vstack([a.basis, (-b.basis) % p]).T  # n x (da+db)
        kern, _ = kernel_image(FpMatrix(p, stacked))
        inter_vecs = (kern.basis[:, : a.dim] @ a.basis) % p
        inter = Subspace(p, n, inter_vecs)
    if inter.dim + total.dim != a.dim + b.dim:
        raise MathInternal("dimension formula for sum/intersection violated")
    return inter, total


def select_independent(mat: np.ndarray, p: int) -> list[int]:
    """Indices of rows that strictly increase the rank, scanned in order.

    Maintains a reduced echelon workspace so each row costs one reduction
    and at most one rank-1 update.
    """
    a = np.asarray(mat, dtype=np.int64) % p
    nrows, ncols = a.shape
    work = np.zeros((0, ncols), dtype=np.int64)
    piv_cols: list[int] = []
    chosen: list[int] = []
    for idx in range(nrows):
        v = a[idx]
        if piv_cols:
            v = (v - a[idx, piv_cols] @ work) % p
        nz = np.nonzero(v)[0]
        if nz.size == 0:
            continue
        c = int(nz[0])
        v = (v * pow(int(v[c]), -1, p)) % p
        if piv_cols:
            # keep the workspace reduced against the new pivot column
            work = (work - np.outer(work[:, c], v)) % p
        work = np.vstack([work, v.reshape(1, -1)])
        piv_cols.append(c)
        chosen.append(idx)
    return chosen


def complement(inner: Subspace, outer: Subspace) -> Subspace:
    """Deterministic complement of ``inner`` inside ``outer``.

    The echelon basis of ``inner`` is extended by rows of ``outer``'s
    echelon basis, taken in order of their pivots, so the selection is
    canonical for given inputs.
    """
    inner._check_compatible(outer)
    if not inner.is_subspace_of(outer):
        raise InputError("complement requires inner to be contained in outer")
    p, n = inner.p, inner.ambient_dim
    stacked = np.vstack([inner.basis, outer.basis])
    picked = select_independent(stacked, p)
    chosen = [stacked[i] for i in picked if i >= inner.dim]
    comp = Subspace(p, n, np.array(chosen, dtype=np.int64).reshape(-1, n) if chosen else None)
    inter, total = intersect_and_sum(comp, inner)
    if inter.dim != 0 or total != outer:
        raise MathInternal("complement construction failed")  # pragma: no cover
    return comp


def quotient_dim(inner: Subspace, outer: Subspace) -> int:
    """dim(outer/inner); requires inner ⊆ outer."""
    if not inner.is_subspace_of(outer):
        raise InputError("quotient_dim requires inner to be contained in outer")
    return outer.dim - inner.dim


def solve(m: FpMatrix, b) -> tuple[np.ndarray, Subspace] | None:
    """Solve m x = b over F_p.

    Returns (particular solution, kernel of m), or None when the system is
    inconsistent.
    """
    sols = solve_many(m, np.asarray(b, dtype=np.int64).reshape(-1, 1))
    if sols is None:
        return None
    kern, _ = kernel_image(m)
    return sols[:, 0], kern


def solve_many(m: FpMatrix, rhs) -> np.ndarray | None:
    """Particular solutions of m x = b for every column b of rhs, as the
    columns of the returned matrix; None when any system is inconsistent."""
    p = m.p
    a = m.entries
    rows, cols = a.shape
    b = np.asarray(rhs, dtype=np.int64).reshape(rows, -1) % p
    red, pivots = rref(np.hstack([a, b]), p)
    if any(pc >= cols for pc in pivots):
        return None
    xs = np.zeros((cols, b.shape[1]), dtype=np.int64)
    for row_idx, pc in enumerate(pivots):
        xs[pc] = red[row_idx, cols:]
    return xs
