"""Small exact lattice routines: HNF, coordinates, integer kernels."""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """g, x, y with a*x + b*y = g = gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def hnf(rows, n: int, full_rank: bool = True) -> tuple[tuple[int, ...], ...]:
    """Row Hermite normal form of the Z-span of integer rows in Z^n.

    Upper triangular, positive pivots, entries above a pivot reduced into
    [0, pivot). With full_rank=False, zero pivots are skipped (echelon form).
    """
    work = [list(map(int, r)) for r in rows if any(r)]
    out = []
    for j in range(n):
        pivot = None
        rest = []
        for r in work:
            if r[j] == 0:
                rest.append(r)
                continue
            if pivot is None:
                pivot = r
                continue
            a, b = pivot[j], r[j]
            g, x, y = xgcd(a, b)
            new_p = [x * p + y * q for p, q in zip(pivot, r)]
            new_r = [(b // g) * p - (a // g) * q for p, q in zip(pivot, r)]
            pivot = new_p
            if any(new_r):
                rest.append(new_r)
        work = rest
        if pivot is None:
            if full_rank:
                raise ValueError("lattice is not of full rank")
            continue
        if pivot[j] < 0:
            pivot = [-v for v in pivot]
        out.append((j, pivot))
    if work and any(any(r) for r in work):
        raise AssertionError("HNF elimination left residual rows")
    rows_out = [r for _, r in out]
    cols = [j for j, _ in out]
    for k in range(len(rows_out)):
        j = cols[k]
        for i in range(k):
            q = rows_out[i][j] // rows_out[k][j]
            if q:
                rows_out[i] = [u - q * v for u, v in zip(rows_out[i], rows_out[k])]
    return tuple(tuple(r) for r in rows_out)


def common_denominator(values) -> int:
    d = 1
    for v in values:
        d = math.lcm(d, Fraction(v).denominator)
    return d


def hnf_rational(rows, n: int) -> tuple[tuple[Fraction, ...], ...]:
    """HNF of a full-rank Z-lattice in Q^n spanned by rational rows."""
    rows = [[Fraction(v) for v in r] for r in rows]
    L = common_denominator(v for r in rows for v in r)
    H = hnf([[int(v * L) for v in r] for r in rows], n)
    return tuple(tuple(Fraction(v, L) for v in r) for r in H)


def det(M) -> Fraction:
    n = len(M)
    if n == 1:
        return Fraction(M[0][0])
    if n == 2:
        return Fraction(M[0][0]) * M[1][1] - Fraction(M[0][1]) * M[1][0]
    if n == 3:
        a = M
        return (Fraction(a[0][0]) * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
                - Fraction(a[0][1]) * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
                + Fraction(a[0][2]) * (a[1][0] * a[2][1] - a[1][1] * a[2][0]))
    raise ValueError("dimension > 3 not supported")


def solve_upper(H, v) -> tuple[Fraction, ...]:
    """Coefficients m with m @ H == v, for upper triangular H."""
    n = len(H)
    v = [Fraction(x) for x in v]
    m = [Fraction(0)] * n
    for j in range(n):
        s = v[j] - sum(m[i] * H[i][j] for i in range(j))
        m[j] = s / H[j][j]
    return tuple(m)


def in_lattice(H, v) -> bool:
    return all(c.denominator == 1 for c in solve_upper(H, v))


def reduce_mod_hnf(H, C: np.ndarray) -> np.ndarray:
    """Canonical representatives of integer row vectors C modulo the integer HNF H."""
    C = np.array(C, dtype=np.int64, copy=True)
    for j in range(len(H)):
        row = np.array(H[j], dtype=np.int64)
        q = np.floor_divide(C[:, j], row[j])
        C -= q[:, None] * row[None, :]
    return C


def membership_mask(H, C: np.ndarray) -> np.ndarray:
    """Vectorized test that the integer rows of C lie in the lattice with integer HNF H."""
    return np.all(reduce_mod_hnf(H, C) == 0, axis=1)


def integer_kernel(rows, values) -> list[tuple[int, ...]]:
    """Basis of {sum c_i rows_i : sum c_i values_i = 0}, as vectors in the row space."""
    k = len(rows)
    # unimodular transform U with U @ values = (g, 0, ..., 0)
    U = [[int(i == j) for j in range(k)] for i in range(k)]
    vals = [int(v) for v in values]
    for i in range(1, k):
        a, b = vals[0], vals[i]
        if b == 0:
            continue
        g, x, y = xgcd(a, b)
        r0 = [x * p + y * q for p, q in zip(U[0], U[i])]
        ri = [(b // g) * p - (a // g) * q for p, q in zip(U[0], U[i])]
        U[0], U[i] = r0, ri
        vals[0], vals[i] = g, 0
    start = 1 if vals[0] != 0 else 0
    out = []
    for i in range(start, k):
        vec = [sum(U[i][j] * rows[j][c] for j in range(k)) for c in range(len(rows[0]))]
        if any(vec):
            out.append(tuple(vec))
    return out
