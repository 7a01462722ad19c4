"""Exact linear algebra over Q and over number fields.

Rational matrices are lists of rows of :class:`fractions.Fraction`.  Row
reduction over Q is fraction-free: rows are cleared to integers, eliminated
with integer cross-multiplication and kept primitive (content divided out),
and only the final pivot normalisation introduces fractions.  Pivots are
chosen by smallest bit size, ties broken by lowest row index.

Matrices over a number field hold :class:`adbundle.numfield.FieldElement`
entries (anything supporting ``+ - * /`` and ``== 0``) and use the generic
Gauss-Jordan routine with the same pivot rule.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Callable, Iterable, Sequence

Vector = list
Matrix = list


class SingularMatrixError(ArithmeticError):
    pass


def parse_rational(s) -> Fraction:
    """Parse ``"p/q"``, ``"p"``, an int or a Fraction."""
    if isinstance(s, Fraction):
        return s
    if isinstance(s, int):
        return Fraction(s)
    if isinstance(s, str):
        return Fraction(s.strip())
    raise TypeError(f"cannot read {s!r} as a rational")


def format_rational(x: Fraction) -> str:
    return str(x)


def zeros(m: int, n: int) -> Matrix:
    return [[Fraction(0)] * n for _ in range(m)]


def identity(n: int) -> Matrix:
    out = zeros(n, n)
    for i in range(n):
        out[i][i] = Fraction(1)
    return out


def transpose(A: Matrix) -> Matrix:
    return [list(col) for col in zip(*A)]


def matmul(A: Matrix, B: Matrix) -> Matrix:
    Bt = transpose(B)
    out = []
    for row in A:
        nz = [(k, a) for k, a in enumerate(row) if a]
        out.append([sum((a * col[k] for k, a in nz), Fraction(0)) for col in Bt])
    return out


def matvec(A: Matrix, v: Sequence) -> Vector:
    out = []
    nz = [(k, x) for k, x in enumerate(v) if x]
    for row in A:
        out.append(sum((row[k] * x for k, x in nz), Fraction(0)))
    return out


def kron(A: Matrix, B: Matrix) -> Matrix:
    out = []
    for a_row in A:
        for b_row in B:
            out.append([a * b for a in a_row for b in b_row])
    return out


def _primitive(row: list[int]) -> list[int]:
    g = gcd(*row)
    if g > 1:
        return [x // g for x in row]
    return row


def _clear_denominators(row: Sequence[Fraction]) -> list[int]:
    den = 1
    for x in row:
        if x:
            den = lcm(den, Fraction(x).denominator)
    return [int(Fraction(x) * den) for x in row]


def rref(rows: Iterable[Sequence], ncols: int | None = None,
         pivot_limit: int | None = None) -> tuple[Matrix, list[int]]:
    """Reduced row-echelon form of a rational matrix.

    Returns the nonzero rows of the RREF and the list of pivot columns.
    With ``pivot_limit`` only the first ``pivot_limit`` columns may hold
    pivots (used for augmented systems).
    """
    rows = [r for r in rows]
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    limit = ncols if pivot_limit is None else pivot_limit
    M = []
    for r in rows:
        ir = _clear_denominators(r)
        if any(ir):
            M.append(_primitive(ir))
    pivots: list[int] = []
    r = 0
    m = len(M)
    for c in range(limit):
        if r == m:
            break
        best = None
        for i in range(r, m):
            v = M[i][c]
            if v:
                key = abs(v).bit_length()
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            continue
        p = best[1]
        M[r], M[p] = M[p], M[r]
        pr = M[r]
        pv = pr[c]
        nzc = [j for j in range(c, ncols) if pr[j]]
        for i in range(m):
            if i == r:
                continue
            row = M[i]
            a = row[c]
            if not a:
                continue
            new = [pv * x for x in row]
            for j in nzc:
                new[j] -= a * pr[j]
            M[i] = _primitive(new) if any(new) else new
        pivots.append(c)
        r += 1
    out = []
    for k, c in enumerate(pivots):
        pv = M[k][c]
        out.append([Fraction(x, pv) for x in M[k]])
    for k in range(len(pivots), m):
        if any(M[k]):
            # only reachable with pivot_limit: residue outside the pivot block
            out.append([Fraction(x) for x in M[k]])
    return out, pivots


def rank(rows: Iterable[Sequence], ncols: int | None = None) -> int:
    return len(rref(rows, ncols)[1])


def nullspace(rows: Iterable[Sequence], ncols: int) -> Matrix:
    """Basis of ``{x : A x = 0}``, one vector per free column."""
    R, pivots = rref(rows, ncols)
    pset = set(pivots)
    basis = []
    for f in range(ncols):
        if f in pset:
            continue
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for k, c in enumerate(pivots):
            v[c] = -R[k][f]
        basis.append(v)
    return basis


def solve(A: Matrix, B: Matrix) -> Matrix | None:
    """Solve ``A X = B`` (B given as a matrix of right-hand-side columns).

    Returns one solution (free variables set to zero) or ``None`` when the
    system is inconsistent.
    """
    n = len(A[0]) if A else 0
    k = len(B[0]) if B else 0
    aug = [list(a) + list(b) for a, b in zip(A, B)]
    R, pivots = rref(aug, n + k, pivot_limit=n)
    for row in R[len(pivots):]:
        if any(row[n:]):
            return None
    X = zeros(n, k)
    for r, c in enumerate(pivots):
        for j in range(k):
            X[c][j] = R[r][n + j]
    return X


def inverse(A: Matrix) -> Matrix:
    n = len(A)
    R, pivots = rref([list(a) + e for a, e in zip(A, identity(n))], 2 * n, pivot_limit=n)
    if len(pivots) != n:
        raise SingularMatrixError("matrix is singular")
    return [row[n:] for row in R]


def row_space_basis(rows: Iterable[Sequence], ncols: int) -> Matrix:
    return rref(rows, ncols)[0]


def in_span(basis_rref: Matrix, pivots: list[int], v: Sequence) -> bool:
    """Membership of ``v`` in the row space of an RREF basis."""
    w = list(v)
    for row, c in zip(basis_rref, pivots):
        a = w[c]
        if a:
            w = [x - a * y for x, y in zip(w, row)]
    return not any(w)


class Projector:
    """Coordinates with respect to a fixed list of linearly independent vectors.

    Selects a square nonsingular block of the column matrix once, so each
    coordinate query costs one matrix-vector product plus a membership check.
    """

    def __init__(self, vectors: Sequence[Sequence[Fraction]], dim: int):
        self.vectors = [list(v) for v in vectors]
        self.dim = dim
        m = len(self.vectors)
        cols = self.vectors
        # rows of A are coordinates of the ambient space; choose m independent ones
        A_rows = [[cols[j][i] for j in range(m)] for i in range(dim)]
        _, piv = rref(cols, dim)
        if len(piv) != m:
            raise SingularMatrixError("vectors are linearly dependent")
        self.rows = piv
        square = [A_rows[i] for i in piv]
        self.inv = inverse(square)

    def coords(self, w: Sequence[Fraction], check: bool = True) -> Vector | None:
        x = matvec(self.inv, [w[i] for i in self.rows])
        if check:
            nz = [(j, c) for j, c in enumerate(x) if c]
            for i in range(self.dim):
                s = sum((c * self.vectors[j][i] for j, c in nz), Fraction(0))
                if s != w[i]:
                    return None
        return x


# ---------------------------------------------------------------------------
# generic elimination over number fields


def _size(x) -> int:
    s = getattr(x, "bit_size", None)
    if s is not None:
        return s()
    x = Fraction(x)
    return x.numerator.bit_length() + x.denominator.bit_length()


def gauss_jordan(rows: Sequence[Sequence], ncols: int, pivot_limit: int | None = None,
                 size: Callable = _size):
    """Gauss-Jordan elimination for matrices over any exact field.

    Returns ``(R, pivots)`` with the same conventions as :func:`rref`.
    """
    M = [list(r) for r in rows]
    limit = ncols if pivot_limit is None else pivot_limit
    m = len(M)
    pivots = []
    r = 0
    for c in range(limit):
        if r == m:
            break
        best = None
        for i in range(r, m):
            v = M[i][c]
            if not v == 0:
                key = size(v)
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            continue
        p = best[1]
        M[r], M[p] = M[p], M[r]
        inv = 1 / M[r][c]
        M[r] = [x * inv if not x == 0 else x for x in M[r]]
        pr = M[r]
        nzc = [j for j in range(c, ncols) if not pr[j] == 0]
        for i in range(m):
            if i == r:
                continue
            a = M[i][c]
            if a == 0:
                continue
            row = M[i]
            for j in nzc:
                row[j] = row[j] - a * pr[j]
        pivots.append(c)
        r += 1
    return M, pivots


def inverse_over(A: Sequence[Sequence], one, zero) -> Matrix:
    n = len(A)
    aug = [list(A[i]) + [one if i == j else zero for j in range(n)] for i in range(n)]
    R, pivots = gauss_jordan(aug, 2 * n, pivot_limit=n)
    if len(pivots) != n:
        raise SingularMatrixError("matrix is singular")
    return [row[n:] for row in R[:n]]


def rank_over(A: Sequence[Sequence], ncols: int) -> int:
    return len(gauss_jordan(A, ncols)[1])


def matmul_over(A, B, zero):
    n = len(B[0]) if B else 0
    out = []
    for row in A:
        nz = [(k, a) for k, a in enumerate(row) if not a == 0]
        new = []
        for j in range(n):
            s = zero
            for k, a in nz:
                b = B[k][j]
                if not b == 0:
                    s = s + a * b
            new.append(s)
        out.append(new)
    return out
