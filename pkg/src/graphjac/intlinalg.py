"""Exact arbitrary-precision integer and rational matrix arithmetic.

Matrices are plain lists of lists of Python ints (Fractions for the rational
routines), so nothing here can overflow.  Smith normal form with unimodular
transforms is the workhorse everything else builds on.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

IntMatrix = list[list[int]]


class SingularMatrixError(ArithmeticError):
    """Exact inverse requested for a matrix with determinant zero."""


def dims(mat: IntMatrix) -> tuple[int, int]:
    m = len(mat)
    n = len(mat[0]) if m else 0
    if any(len(row) != n for row in mat):
        raise ValueError("ragged matrix")
    return m, n


def identity(n: int) -> IntMatrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul(a, b):
    ma, na = dims(a)
    mb, nb = dims(b)
    if na != mb:
        raise ValueError("dimension mismatch")
    bt = list(zip(*b)) if mb else [[]] * nb
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def mat_vec(a, v):
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def transpose(a):
    return [list(col) for col in zip(*a)] if a else []


@dataclass(frozen=True)
class SnfResult:
    """Smith normal form data: U @ M @ V == D.

    U and V are unimodular, D is diagonal with nonnegative entries forming a
    divisibility chain d1 | d2 | ... (zeros, if any, last).  U_inv and V_inv
    are tracked on request; the columns of U_inv are integer lifts of the
    cokernel generators.
    """

    U: IntMatrix
    D: IntMatrix
    V: IntMatrix
    U_inv: IntMatrix | None = None
    V_inv: IntMatrix | None = None

    def diagonal(self) -> tuple[int, ...]:
        m, n = dims(self.D)
        return tuple(self.D[i][i] for i in range(min(m, n)))


def _nearest_quotient(a: int, b: int) -> int:
    """Quotient of a/b (b > 0) with remainder in (-b/2, b/2]."""
    return (2 * a + b) // (2 * b)


def _snf_engine(mat, want_uv: bool, want_inverses: bool):
    m, n = dims(mat)
    A = [list(map(int, row)) for row in mat]
    U = identity(m) if want_uv else None
    V = identity(n) if want_uv else None
    Uinv = identity(m) if want_inverses else None
    Vinv = identity(n) if want_inverses else None

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        if U is not None:
            U[i], U[j] = U[j], U[i]
        if Uinv is not None:
            for r in range(m):
                row = Uinv[r]
                row[i], row[j] = row[j], row[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        if V is not None:
            for row in V:
                row[i], row[j] = row[j], row[i]
        if Vinv is not None:
            Vinv[i], Vinv[j] = Vinv[j], Vinv[i]

    def negate_row(i):
        A[i] = [-x for x in A[i]]
        if U is not None:
            U[i] = [-x for x in U[i]]
        if Uinv is not None:
            for r in range(m):
                Uinv[r][i] = -Uinv[r][i]

    def row_op(i, k, q):
        # row_i -= q * row_k; inverse transform: col_k of Uinv += q * col_i
        A[i] = [x - q * y for x, y in zip(A[i], A[k])]
        if U is not None:
            U[i] = [x - q * y for x, y in zip(U[i], U[k])]
        if Uinv is not None:
            for r in range(m):
                row = Uinv[r]
                row[k] += q * row[i]

    def col_op(j, k, q):
        # col_j -= q * col_k; inverse transform: row_k of Vinv += q * row_j
        for row in A:
            row[j] -= q * row[k]
        if V is not None:
            for row in V:
                row[j] -= q * row[k]
        if Vinv is not None:
            Vinv[k] = [x + q * y for x, y in zip(Vinv[k], Vinv[j])]

    def find_pivot(k):
        # minimal |entry|, row-major tie break
        best = None
        for i in range(k, m):
            row = A[i]
            for j in range(k, n):
                v = row[j]
                if v:
                    a = -v if v < 0 else v
                    if best is None or a < best[0]:
                        if a == 1:
                            return (1, i, j)
                        best = (a, i, j)
        return best

    for k in range(min(m, n)):
        while True:
            best = find_pivot(k)
            if best is None:
                return A, U, V, Uinv, Vinv  # remaining block is zero
            _, pi, pj = best
            if pi != k:
                swap_rows(k, pi)
            if pj != k:
                swap_cols(k, pj)
            if A[k][k] < 0:
                negate_row(k)
            p = A[k][k]
            clean = True
            for i in range(k + 1, m):
                a = A[i][k]
                if a:
                    q = _nearest_quotient(a, p)
                    if q:
                        row_op(i, k, q)
                    if A[i][k]:
                        clean = False
            for j in range(k + 1, n):
                a = A[k][j]
                if a:
                    q = _nearest_quotient(a, p)
                    if q:
                        col_op(j, k, q)
                    if A[k][j]:
                        clean = False
            if not clean:
                continue
            # pivot must divide the untouched block, else fold a bad row in
            bad = None
            for i in range(k + 1, m):
                row = A[i]
                for j in range(k + 1, n):
                    if row[j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            row_op(k, bad, -1)
    return A, U, V, Uinv, Vinv


def smith_normal_form(mat: IntMatrix, want_inverses: bool = False) -> SnfResult:
    """Diagonalize an integer matrix by unimodular row/column operations.

    Pivots are taken with minimal absolute value to limit coefficient growth;
    a pivot is frozen only once it divides the whole remaining block, which
    yields the divisibility chain directly.
    """
    D, U, V, Uinv, Vinv = _snf_engine(mat, True, want_inverses)
    return SnfResult(U=U, D=D, V=V, U_inv=Uinv, V_inv=Vinv)


def snf_diagonal(mat: IntMatrix) -> tuple[int, ...]:
    """Diagonal of the Smith form without transform bookkeeping (faster)."""
    m, n = dims(mat)
    D, _, _, _, _ = _snf_engine(mat, False, False)
    return tuple(D[i][i] for i in range(min(m, n)))


def cokernel_invariants(mat: IntMatrix) -> tuple[int, ...]:
    """Invariant factors (> 1) of the torsion part of Z^rows / mat Z^cols."""
    return tuple(d for d in snf_diagonal(mat) if d > 1)


def determinant(mat: IntMatrix) -> int:
    """Exact determinant by fraction-free Bareiss elimination."""
    m, n = dims(mat)
    if m != n:
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return 1
    A = [list(map(int, row)) for row in mat]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for i in range(k + 1, n):
                if A[i][k]:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return 0
        pk = A[k][k]
        for i in range(k + 1, n):
            Ai = A[i]
            Ak = A[k]
            aik = Ai[k]
            for j in range(k + 1, n):
                Ai[j] = (Ai[j] * pk - aik * Ak[j]) // prev
            Ai[k] = 0
        prev = pk
    return sign * A[n - 1][n - 1]


def rational_inverse(mat: IntMatrix) -> list[list[Fraction]]:
    """Exact inverse over Q.  Raises SingularMatrixError when det == 0."""
    m, n = dims(mat)
    if m != n:
        raise ValueError("inverse of a non-square matrix")
    A = [[Fraction(x) for x in row] for row in mat]
    B = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for k in range(n):
        piv = None
        for i in range(k, n):
            if A[i][k]:
                piv = i
                break
        if piv is None:
            raise SingularMatrixError("matrix is singular")
        if piv != k:
            A[k], A[piv] = A[piv], A[k]
            B[k], B[piv] = B[piv], B[k]
        inv = 1 / A[k][k]
        A[k] = [x * inv for x in A[k]]
        B[k] = [x * inv for x in B[k]]
        for i in range(n):
            if i != k and A[i][k]:
                c = A[i][k]
                A[i] = [x - c * y for x, y in zip(A[i], A[k])]
                B[i] = [x - c * y for x, y in zip(B[i], B[k])]
    return B


def integer_inverse(mat: IntMatrix) -> IntMatrix:
    """Inverse of a unimodular integer matrix, as an integer matrix."""
    inv = rational_inverse(mat)
    out = []
    for row in inv:
        irow = []
        for x in row:
            if x.denominator != 1:
                raise ValueError("matrix is not unimodular")
            irow.append(x.numerator)
        out.append(irow)
    return out
