"""Exact rational linear algebra and integer lattice utilities.

Vectors are tuples of ints or Fractions, matrices are tuples of row
vectors.  Everything in this module is exact; floating point never
enters, so the combinatorial layers built on top can certify their
identities by equality instead of tolerances.

All values are immutable after construction and safe to share between
threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Sequence

Scalar = "int | Fraction"
Vec = "tuple[int | Fraction, ...]"
IntVec = "tuple[int, ...]"


class DimensionMismatch(ValueError):
    """Operands have inconsistent dimensions."""


class SingularMatrix(ValueError):
    """Exact solve or inversion hit a rank-deficient matrix."""


def vec(entries) -> tuple:
    """Coerce an iterable of numbers to a tuple of exact rationals."""
    return tuple(x if isinstance(x, (int, Fraction)) else Fraction(x) for x in entries)


def pair(alpha, x) -> "int | Fraction":
    """Bilinear pairing sum_i alpha_i * x_i between dual vectors.

    Raises DimensionMismatch when the lengths differ.
    """
    if len(alpha) != len(x):
        raise DimensionMismatch(f"pairing {len(alpha)}-vector with {len(x)}-vector")
    return sum(a * b for a, b in zip(alpha, x))


def vadd(u, v):
    if len(u) != len(v):
        raise DimensionMismatch("vector addition")
    return tuple(a + b for a, b in zip(u, v))


def vsub(u, v):
    if len(u) != len(v):
        raise DimensionMismatch("vector subtraction")
    return tuple(a - b for a, b in zip(u, v))


def vneg(u):
    return tuple(-a for a in u)


def vscale(c, u):
    return tuple(c * a for a in u)


def is_zero_vec(u) -> bool:
    return all(a == 0 for a in u)


def unit_vector(i: int, n: int) -> tuple:
    return tuple(1 if j == i else 0 for j in range(n))


def mat_vec(rows, x) -> tuple:
    return tuple(pair(r, x) for r in rows)


def transpose(rows) -> tuple:
    return tuple(zip(*rows)) if rows else ()


def gcd_vec(v) -> int:
    g = 0
    for a in v:
        g = gcd(g, abs(int(a)))
    return g


def primitive(v) -> tuple:
    """Primitive integer vector spanning the same ray as v.

    Accepts rational entries: denominators are cleared first, then the
    gcd is divided out.  The direction (sign) is preserved.  Raises on
    the zero vector.
    """
    fracs = [Fraction(a) for a in v]
    if all(f == 0 for f in fracs):
        raise ValueError("zero vector has no primitive representative")
    denom_lcm = 1
    for f in fracs:
        d = f.denominator
        denom_lcm = denom_lcm * d // gcd(denom_lcm, d)
    ints = [int(f * denom_lcm) for f in fracs]
    g = gcd_vec(ints)
    return tuple(a // g for a in ints)


def is_primitive(v) -> bool:
    return all(isinstance(a, int) or Fraction(a).denominator == 1 for a in v) and gcd_vec(v) == 1


def rank(rows) -> int:
    """Rank of a matrix over the rationals, by exact elimination."""
    work = [[Fraction(a) for a in r] for r in rows]
    if not work:
        return 0
    m, n = len(work), len(work[0])
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if work[i][c] != 0), None)
        if piv is None:
            continue
        work[r], work[piv] = work[piv], work[r]
        inv = 1 / work[r][c]
        work[r] = [a * inv for a in work[r]]
        for i in range(m):
            if i != r and work[i][c] != 0:
                f = work[i][c]
                work[i] = [a - f * b for a, b in zip(work[i], work[r])]
        r += 1
        if r == m:
            break
    return r


def invert(rows) -> tuple:
    """Exact inverse of a square rational matrix (rows of rows)."""
    m = len(rows)
    if any(len(r) != m for r in rows):
        raise DimensionMismatch("inversion needs a square matrix")
    work = [[Fraction(a) for a in r] + [Fraction(int(i == j)) for j in range(m)] for i, r in enumerate(rows)]
    for c in range(m):
        piv = next((i for i in range(c, m) if work[i][c] != 0), None)
        if piv is None:
            raise SingularMatrix("matrix is singular")
        work[c], work[piv] = work[piv], work[c]
        inv = 1 / work[c][c]
        work[c] = [a * inv for a in work[c]]
        for i in range(m):
            if i != c and work[i][c] != 0:
                f = work[i][c]
                work[i] = [a - f * b for a, b in zip(work[i], work[c])]
    return tuple(tuple(row[m:]) for row in work)


def dual_basis(basis: Sequence) -> tuple:
    """Basis beta_1..beta_n dual to B_1..B_n: pair(beta_i, B_j) = delta_ij.

    The input vectors must be linearly independent over Q; the result is
    exact (rows of the inverse-transpose).
    """
    n = len(basis)
    if any(len(b) != n for b in basis):
        raise DimensionMismatch("dual basis needs n vectors of length n")
    inv = invert(basis)
    return transpose(inv)


def solve_in_basis(basis: Sequence, x) -> "tuple | None":
    """Coordinates u with sum_j u_j * basis_j = x, or None if x is off-span.

    The basis vectors must be linearly independent (k of them, ambient
    dimension n >= k); uniqueness then holds whenever a solution exists.
    """
    k = len(basis)
    if k == 0:
        return () if is_zero_vec(x) else None
    n = len(basis[0])
    if len(x) != n:
        raise DimensionMismatch("solve_in_basis")
    # Row-reduce the augmented system [B^T | x].
    work = [[Fraction(basis[j][i]) for j in range(k)] + [Fraction(x[i])] for i in range(n)]
    pivots = []
    r = 0
    for c in range(k):
        piv = next((i for i in range(r, n) if work[i][c] != 0), None)
        if piv is None:
            raise SingularMatrix("basis vectors are linearly dependent")
        work[r], work[piv] = work[piv], work[r]
        inv = 1 / work[r][c]
        work[r] = [a * inv for a in work[r]]
        for i in range(n):
            if i != r and work[i][c] != 0:
                f = work[i][c]
                work[i] = [a - f * b for a, b in zip(work[i], work[r])]
        pivots.append(c)
        r += 1
    for i in range(r, n):
        if work[i][k] != 0:
            return None
    return tuple(work[j][k] for j in range(k))


def row_hermite(rows: Sequence) -> tuple:
    """Integer row echelon form H = U @ A with U unimodular.

    Pivot rows are placed on top, pivots are positive; entries above the
    pivots are not reduced (full Hermite normalization is not needed by
    the lattice quotients built on this).
    """
    m = len(rows)
    n = len(rows[0]) if m else 0
    H = [[int(a) for a in r] for r in rows]
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    r = 0
    for c in range(n):
        if r == m:
            break
        while True:
            nz = [i for i in range(r, m) if H[i][c] != 0]
            if not nz:
                break
            i0 = min(nz, key=lambda i: abs(H[i][c]))
            if i0 != r:
                H[r], H[i0] = H[i0], H[r]
                U[r], U[i0] = U[i0], U[r]
            clean = True
            for i in range(r + 1, m):
                if H[i][c] != 0:
                    q = H[i][c] // H[r][c]
                    H[i] = [a - q * b for a, b in zip(H[i], H[r])]
                    U[i] = [a - q * b for a, b in zip(U[i], U[r])]
                    if H[i][c] != 0:
                        clean = False
            if clean:
                break
        if r < m and H[r][c] != 0:
            if H[r][c] < 0:
                H[r] = [-a for a in H[r]]
                U[r] = [-a for a in U[r]]
            r += 1
    return tuple(tuple(row) for row in H), tuple(tuple(row) for row in U)


@dataclass(frozen=True)
class LatticeProjection:
    """Surjection Z^n -> Z^(n-k) whose kernel is a saturated sublattice.

    matrix   : the (n-k) x n projection.
    kernel   : lattice basis (k vectors) of the kernel, i.e. the
               saturation of the span of the defining generators.
    section  : n-vectors s_1..s_(n-k) with matrix @ s_i = e_i, witnessing
               surjectivity.
    """

    matrix: tuple
    kernel: tuple
    section: tuple
    source_dim: int
    target_dim: int

    def apply(self, v) -> tuple:
        if len(v) != self.source_dim:
            raise DimensionMismatch("projection applied to wrong dimension")
        return tuple(pair(row, v) for row in self.matrix)


def quotient_projection(gens: Sequence, n: int) -> LatticeProjection:
    """Projection of Z^n along the saturation of the span of gens.

    The kernel is torsion-free by construction (no index: the kernel is
    the saturated span, so the quotient is again a lattice).  Rank-zero
    input yields the identity.
    """
    gens = [tuple(int(a) for a in g) for g in gens]
    for g in gens:
        if len(g) != n:
            raise DimensionMismatch("generator has wrong length")
    if not gens:
        ident = tuple(unit_vector(i, n) for i in range(n))
        return LatticeProjection(matrix=ident, kernel=(), section=ident, source_dim=n, target_dim=n)
    # Columns of A are the generators; U @ A has its k nonzero rows on top.
    A = [tuple(g[i] for g in gens) for i in range(n)]
    H, U = row_hermite(A)
    k = sum(1 for row in H if not is_zero_vec(row))
    uinv = invert(U)
    for row in uinv:
        for a in row:
            if Fraction(a).denominator != 1:
                raise AssertionError("unimodular inverse must be integral")
    uinv_cols = transpose(tuple(tuple(int(a) for a in row) for row in uinv))
    return LatticeProjection(
        matrix=tuple(tuple(int(a) for a in U[i]) for i in range(k, n)),
        kernel=tuple(uinv_cols[:k]),
        section=tuple(uinv_cols[k:]),
        source_dim=n,
        target_dim=n - k,
    )
