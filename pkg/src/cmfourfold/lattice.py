"""Integer row-lattice helpers: Hermite normal form, kernels, saturation.

Matrices are lists of integer rows.  The Hermite normal form used here is the
row-style one: rows span the same lattice, nonzero rows come first, pivots
are positive and strictly move right, entries above a pivot are reduced into
[0, pivot).  It is unique for a given row lattice, which is what makes it
usable as a canonical form.
"""

from __future__ import annotations

from fractions import Fraction


def _xgcd(a, b):
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    return old_r, old_s, old_t


def hnf_with_transform(A):
    """Return (H, U) with U unimodular and U A = H in Hermite normal form."""
    H = [list(map(int, row)) for row in A]
    m = len(H)
    ncols = len(H[0]) if H else 0
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    r = 0
    for c in range(ncols):
        if r == m:
            break
        for i in range(r + 1, m):
            if H[i][c]:
                a, b = H[r][c], H[i][c]
                g, s, t = _xgcd(a, b)
                x, y = a // g, b // g
                # [[s, t], [-y, x]] has determinant 1
                H[r], H[i] = ([s * p + t * q for p, q in zip(H[r], H[i])],
                              [-y * p + x * q for p, q in zip(H[r], H[i])])
                U[r], U[i] = ([s * p + t * q for p, q in zip(U[r], U[i])],
                              [-y * p + x * q for p, q in zip(U[r], U[i])])
        if H[r][c] == 0:
            continue
        if H[r][c] < 0:
            H[r] = [-v for v in H[r]]
            U[r] = [-v for v in U[r]]
        p = H[r][c]
        for i in range(r):
            q = H[i][c] // p
            if q:
                H[i] = [a - q * b for a, b in zip(H[i], H[r])]
                U[i] = [a - q * b for a, b in zip(U[i], U[r])]
        r += 1
    return H, U


def hnf(A):
    """Nonzero rows of the Hermite normal form of A."""
    H, _ = hnf_with_transform(A)
    return [row for row in H if any(row)]


def rank(A) -> int:
    if not A:
        return 0
    return len(hnf(A))


def integer_kernel(A, ncols=None):
    """Z-basis (as rows) of {x in Z^n : A x = 0}."""
    if not A:
        n = ncols
        return [[int(i == j) for j in range(n)] for i in range(n)]
    n = len(A[0])
    At = [list(col) for col in zip(*A)]
    H, U = hnf_with_transform(At)
    return [U[i] for i in range(n) if not any(H[i])]


def saturation(A):
    """HNF basis of (Q-span of the rows of A) intersected with Z^n."""
    n = len(A[0])
    K = integer_kernel(A)
    return hnf(integer_kernel(K, ncols=n)) if K else [[int(i == j) for j in range(n)]
                                                      for i in range(n)]


def transpose(A):
    return [list(col) for col in zip(*A)]


def determinant(M):
    """Exact determinant of a square matrix of ints or Fractions (Bareiss)."""
    A = [[Fraction(x) for x in row] for row in M]
    n = len(A)
    sign = 1
    prev = Fraction(1)
    for k in range(n - 1):
        if A[k][k] == 0:
            for i in range(k + 1, n):
                if A[i][k] != 0:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) / prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1] if n else Fraction(1)


def inverse(M):
    """Exact inverse of a square rational matrix by Gauss-Jordan."""
    n = len(M)
    A = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(M)]
    for c in range(n):
        piv = next((i for i in range(c, n) if A[i][c] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        A[c], A[piv] = A[piv], A[c]
        p = A[c][c]
        A[c] = [v / p for v in A[c]]
        for i in range(n):
            if i != c and A[i][c] != 0:
                f = A[i][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[c])]
    return [row[n:] for row in A]
