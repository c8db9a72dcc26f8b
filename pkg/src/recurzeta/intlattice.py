"""Exact integer linear algebra on row lattices: HNF, kernels, intersections, LLL.

Lattices are given by lists of integer row vectors.  All routines use Python
integers only and are deterministic (fixed pivoting order).
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Vector = tuple[int, ...]


def _hnf_core(rows: list[list[int]], track: bool):
    """Row-style Hermite normal form with optional unimodular transform.

    Returns ``(H, U)`` with ``U @ A == H``; zero rows of ``H`` are kept at the
    bottom so their rows in ``U`` span the left kernel of ``A``.
    """
    a = [list(r) for r in rows]
    m = len(a)
    n = len(a[0]) if m else 0
    u = [[int(i == j) for j in range(m)] for i in range(m)] if track else None

    def swap(i, j):
        a[i], a[j] = a[j], a[i]
        if track:
            u[i], u[j] = u[j], u[i]

    def sub(i, j, q):  # row_i -= q * row_j
        if q == 0:
            return
        ri, rj = a[i], a[j]
        for c in range(n):
            ri[c] -= q * rj[c]
        if track:
            ui, uj = u[i], u[j]
            for c in range(m):
                ui[c] -= q * uj[c]

    def negate(i):
        a[i] = [-x for x in a[i]]
        if track:
            u[i] = [-x for x in u[i]]

    k = 0
    for col in range(n):
        if k >= m:
            break
        while True:
            nz = [i for i in range(k, m) if a[i][col] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda i: (abs(a[i][col]), i))
            swap(k, piv)
            done = True
            for i in range(k + 1, m):
                if a[i][col]:
                    sub(i, k, a[i][col] // a[k][col])
                    if a[i][col]:
                        done = False
            if done:
                break
        if a[k][col] == 0:
            continue
        if a[k][col] < 0:
            negate(k)
        p = a[k][col]
        for i in range(k):
            sub(i, k, a[i][col] // p)
        k += 1
    return a, u, k


def hnf(rows: Sequence[Sequence[int]]) -> list[Vector]:
    """Hermite normal form basis (nonzero rows only) of the lattice spanned by ``rows``."""
    rows = [list(r) for r in rows if any(r)]
    if not rows:
        return []
    h, _, k = _hnf_core(rows, track=False)
    return [tuple(r) for r in h[:k]]


def left_kernel(rows: Sequence[Sequence[int]]) -> list[Vector]:
    """Basis (in HNF) of ``{c : c @ A == 0}`` for the matrix with the given rows."""
    rows = [list(r) for r in rows]
    if not rows:
        return []
    _, u, k = _hnf_core(rows, track=True)
    return hnf(u[k:])


def rank(rows: Sequence[Sequence[int]]) -> int:
    return len(hnf(rows))


def pivots(basis: Sequence[Vector]) -> list[int]:
    out = []
    for r in basis:
        out.append(next(i for i, x in enumerate(r) if x))
    return out


def reduce_mod(v: Sequence[int], basis: Sequence[Vector]) -> Vector:
    """Canonical representative of ``v + L`` for ``L`` given by an HNF basis."""
    w = list(v)
    for row, p in zip(basis, pivots(basis)):
        q = w[p] // row[p]
        if q:
            for c in range(len(w)):
                w[c] -= q * row[c]
    return tuple(w)


def contains(basis: Sequence[Vector], v: Sequence[int]) -> bool:
    return not any(reduce_mod(v, basis))


def lattice_sum(a: Sequence[Vector], b: Sequence[Vector]) -> list[Vector]:
    return hnf(list(a) + list(b))


def intersection(a: Sequence[Vector], b: Sequence[Vector]) -> list[Vector]:
    """HNF basis of the intersection of two lattices in the same ambient space."""
    if not a or not b:
        return []
    stacked = [list(r) for r in a] + [[-x for x in r] for r in b]
    ker = left_kernel(stacked)
    ka = len(a)
    n = len(a[0])
    out = []
    for c in ker:
        out.append([sum(c[i] * a[i][j] for i in range(ka)) for j in range(n)])
    return hnf(out)


def kernel_of_functional(basis: Sequence[Vector], weights: Sequence[int]) -> list[Vector]:
    """HNF basis of ``{x in L : weights . x == 0}``."""
    if not basis:
        return []
    values = [[sum(w * x for w, x in zip(weights, row))] for row in basis]
    ker = left_kernel(values)
    n = len(basis[0])
    out = [[sum(c[i] * basis[i][j] for i in range(len(basis))) for j in range(n)] for c in ker]
    return hnf(out)


def lll(basis: Sequence[Sequence[int]], delta: Fraction = Fraction(99, 100)) -> list[list[int]]:
    """Integral LLL reduction (all-integer Gram-Schmidt bookkeeping).

    The input rows must be linearly independent.
    """
    b = [list(map(int, r)) for r in basis]
    n = len(b)
    if n <= 1:
        return b
    p, q = delta.numerator, delta.denominator

    def dot(x, y):
        return sum(xi * yi for xi, yi in zip(x, y))

    # 1-based bookkeeping: d[0] = 1, lam[k][j] for j < k
    d = [1] + [0] * n
    lam = [[0] * (n + 1) for _ in range(n + 1)]
    bb = [None] + b

    def red(k, l):
        if 2 * abs(lam[k][l]) > d[l]:
            qq = (2 * lam[k][l] + d[l]) // (2 * d[l])
            bk, bl = bb[k], bb[l]
            for c in range(len(bk)):
                bk[c] -= qq * bl[c]
            lam[k][l] -= qq * d[l]
            for i in range(1, l):
                lam[k][i] -= qq * lam[l][i]

    def swap(k, kmax):
        bb[k], bb[k - 1] = bb[k - 1], bb[k]
        for j in range(1, k - 1):
            lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
        lm = lam[k][k - 1]
        bnew = (d[k - 2] * d[k] + lm * lm) // d[k - 1]
        for i in range(k + 1, kmax + 1):
            t = lam[i][k]
            lam[i][k] = (d[k] * lam[i][k - 1] - lm * t) // d[k - 1]
            lam[i][k - 1] = (bnew * t + lm * lam[i][k]) // d[k]
        d[k - 1] = bnew

    d[1] = dot(bb[1], bb[1])
    if d[1] == 0:
        raise ValueError("dependent rows in LLL input")
    k, kmax = 2, 1
    while k <= n:
        if k > kmax:
            kmax = k
            for j in range(1, k + 1):
                u = dot(bb[k], bb[j])
                for i in range(1, j):
                    u = (d[i] * u - lam[k][i] * lam[j][i]) // d[i - 1]
                if j < k:
                    lam[k][j] = u
                else:
                    if u == 0:
                        raise ValueError("dependent rows in LLL input")
                    d[k] = u
        while True:
            red(k, k - 1)
            lhs = q * d[k] * d[k - 2]
            rhs = p * d[k - 1] * d[k - 1] - q * lam[k][k - 1] ** 2
            if lhs < rhs:
                swap(k, kmax)
                k = max(2, k - 1)
                continue
            for l in range(k - 2, 0, -1):
                red(k, l)
            k += 1
            break
    return bb[1:]
