"""Sublattices of Z^n: discriminants, minor gcds, duals and box enumeration.

Bases are stored as rows.  "Same lattice" is decided by comparing row-style
Hermite normal forms (positive pivots, entries above each pivot reduced into
[0, pivot)), which is the column-style HNF of the transposed basis matrix.
All arithmetic is exact.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

from .errors import DomainError, ResourceError

DEFAULT_BOX_CAP = 10**7

Vector = tuple[int, ...]


@dataclass(frozen=True)
class LatticeBasis:
    ambient_dim: int
    vectors: tuple[Vector, ...]

    def __post_init__(self):
        vecs = tuple(tuple(int(c) for c in v) for v in self.vectors)
        object.__setattr__(self, "vectors", vecs)
        if self.ambient_dim < 1:
            raise DomainError("ambient dimension must be positive")
        if any(len(v) != self.ambient_dim for v in vecs):
            raise DomainError("basis vector length differs from ambient dimension")
        if len(vecs) > self.ambient_dim:
            raise DomainError("rank exceeds ambient dimension")
        if vecs and gram_determinant(vecs) == 0:
            raise DomainError("basis vectors are linearly dependent")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], ambient_dim: int | None = None) -> "LatticeBasis":
        rows = [tuple(r) for r in rows]
        n = ambient_dim if ambient_dim is not None else len(rows[0])
        return cls(n, tuple(rows))

    @property
    def rank(self) -> int:
        return len(self.vectors)

    def canonical(self) -> "LatticeBasis":
        return LatticeBasis(self.ambient_dim, tuple(hermite_normal_form(self.vectors, self.ambient_dim)))

    def same_lattice(self, other: "LatticeBasis") -> bool:
        return (
            self.ambient_dim == other.ambient_dim
            and self.canonical().vectors == other.canonical().vectors
        )

    def contains(self, x: Sequence[int]) -> bool:
        """Membership test by reducing x against the canonical basis."""
        rem = list(x)
        for row in self.canonical().vectors:
            c = next(i for i, v in enumerate(row) if v)
            if rem[c] % row[c]:
                return False
            q = rem[c] // row[c]
            rem = [a - q * b for a, b in zip(rem, row)]
        return not any(rem)


# -- exact linear algebra -------------------------------------------------------


def bareiss_determinant(matrix: Sequence[Sequence[int]]) -> int:
    """Fraction-free Gaussian elimination; exact for integer matrices."""
    m = [list(row) for row in matrix]
    n = len(m)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for i in range(n - 1):
        if m[i][i] == 0:
            for j in range(i + 1, n):
                if m[j][i]:
                    m[i], m[j] = m[j], m[i]
                    sign = -sign
                    break
            else:
                return 0
        for j in range(i + 1, n):
            for c in range(i + 1, n):
                m[j][c] = (m[j][c] * m[i][i] - m[j][i] * m[i][c]) // prev
        prev = m[i][i]
    return sign * m[n - 1][n - 1]


def gram_determinant(vectors: Sequence[Sequence[int]]) -> int:
    gram = [[sum(a * b for a, b in zip(u, v)) for v in vectors] for u in vectors]
    return bareiss_determinant(gram)


def maximal_minors(vectors: Sequence[Sequence[int]], n: int):
    """Yield det B_I for every r-subset I of the n coordinates."""
    r = len(vectors)
    for cols in itertools.combinations(range(n), r):
        yield bareiss_determinant([[v[c] for c in cols] for v in vectors])


def hermite_normal_form(rows: Sequence[Sequence[int]], n: int) -> list[Vector]:
    """Row-style HNF of the lattice spanned by ``rows``; zero rows are dropped."""
    a = [list(r) for r in rows]
    m = len(a)
    piv = 0
    for c in range(n):
        if piv == m:
            break
        while True:
            nz = [i for i in range(piv, m) if a[i][c]]
            if not nz:
                break
            i0 = min(nz, key=lambda i: abs(a[i][c]))
            a[piv], a[i0] = a[i0], a[piv]
            head = a[piv]
            clean = True
            for i in range(piv + 1, m):
                if a[i][c]:
                    q = a[i][c] // head[c]
                    a[i] = [x - q * y for x, y in zip(a[i], head)]
                    clean = clean and a[i][c] == 0
            if clean:
                break
        if not any(a[i][c] for i in range(piv, m)):
            continue
        if a[piv][c] < 0:
            a[piv] = [-x for x in a[piv]]
        head = a[piv]
        for i in range(piv):
            q = a[i][c] // head[c]
            if q:
                a[i] = [x - q * y for x, y in zip(a[i], head)]
        piv += 1
    return [tuple(r) for r in a[:piv]]


def integer_kernel(rows: Sequence[Sequence[int]], n: int) -> list[Vector]:
    """Basis of {x in Z^n : row . x = 0 for every row}, in HNF."""
    r = len(rows)
    if r == 0:
        return [tuple(int(i == j) for j in range(n)) for i in range(n)]
    augmented = [[row[j] for row in rows] + [int(i == j) for i in range(n)] for j in range(n)]
    h = hermite_normal_form(augmented, r + n)
    kernel = [v[r:] for v in h if not any(v[:r])]
    return hermite_normal_form(kernel, n)


# -- lattice invariants ------------------------------------------------------------


def _require_rank(basis: LatticeBasis) -> None:
    if basis.rank == 0:
        raise DomainError("operation needs a lattice of positive rank")


def discriminant_squared_minors(basis: LatticeBasis) -> int:
    _require_rank(basis)
    return sum(d * d for d in maximal_minors(basis.vectors, basis.ambient_dim))


def discriminant_squared(basis: LatticeBasis) -> int:
    """d(L)^2 as the Gram determinant, cross-checked against the minor sum."""
    _require_rank(basis)
    gram = gram_determinant(basis.vectors)
    if gram <= 0:
        raise DomainError("basis vectors are linearly dependent")
    minors = discriminant_squared_minors(basis)
    if gram != minors:
        raise ArithmeticError(f"Gram route {gram} disagrees with minor route {minors}")
    return gram


def minor_gcd(basis: LatticeBasis) -> int:
    """gcd of all maximal minors of the basis matrix."""
    _require_rank(basis)
    g = 0
    for d in maximal_minors(basis.vectors, basis.ambient_dim):
        g = math.gcd(g, d)
    if g == 0:
        raise DomainError("basis vectors are linearly dependent")
    return g


def dual_lattice(basis: LatticeBasis) -> LatticeBasis:
    """Integer vectors orthogonal to every basis vector, rank n - r, canonical."""
    kernel = integer_kernel(basis.vectors, basis.ambient_dim)
    return LatticeBasis(basis.ambient_dim, tuple(kernel))


def coefficient_lattice(x: Sequence[int], k: int) -> LatticeBasis:
    """Lattice of all a in Z^s with sum a_j x_j^k = 0."""
    if not any(x):
        raise DomainError("x must be nonzero")
    powers = tuple(int(v) ** k for v in x)
    return dual_lattice(LatticeBasis(len(x), (powers,)))


def enumerate_box(basis: LatticeBasis, A: int, cap: int = DEFAULT_BOX_CAP) -> list[Vector]:
    """All lattice points with sup-norm <= A, origin included, each once.

    Walks integer combinations of the HNF basis row by row; the pivot of row i
    pins the range of its multiplier given the earlier ones.  Output is in
    lexicographic order of the multiplier vector.
    """
    if A < 0:
        raise DomainError("box bound must be nonnegative")
    n = basis.ambient_dim
    rows = basis.canonical().vectors
    if not rows:
        return [tuple([0] * n)]
    pivots = [next(i for i, v in enumerate(row) if v) for row in rows]
    # columns fixed once rows 0..i are chosen (rows > i vanish there)
    settled = [range(pivots[i] + 1, pivots[i + 1]) for i in range(len(rows) - 1)]
    settled.append(range(pivots[-1] + 1, n))
    out: list[Vector] = []

    def walk(i: int, acc: list[int]) -> None:
        row, c = rows[i], pivots[i]
        h = row[c]
        lo = -((A + acc[c]) // h)
        hi = (A - acc[c]) // h
        for t in range(lo, hi + 1):
            cur = [x + t * y for x, y in zip(acc, row)]
            if any(abs(cur[j]) > A for j in settled[i]):
                continue
            if i + 1 == len(rows):
                out.append(tuple(cur))
                if len(out) > cap:
                    raise ResourceError(f"box enumeration exceeds cap of {cap} points", cap=cap)
            else:
                walk(i + 1, cur)

    walk(0, [0] * n)
    return out
