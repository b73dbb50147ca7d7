"""Independent reference computations used only by the tests."""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations, product
from math import gcd


def bareiss_det(M):
    """Fraction-free determinant of a square integer matrix."""
    A = [list(r) for r in M]
    n = len(A)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for r in range(k + 1, n):
                if A[r][k]:
                    A[k], A[r] = A[r], A[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def determinantal_divisors(M):
    """Elementary divisors via gcds of k x k minors: e_k = D_k / D_{k-1}."""
    rows = len(M)
    cols = len(M[0]) if rows else 0
    out, prev = [], 1
    for k in range(1, min(rows, cols) + 1):
        g = 0
        for R in combinations(range(rows), k):
            for C in combinations(range(cols), k):
                g = gcd(g, bareiss_det([[M[r][c] for c in C] for r in R]))
        if g == 0:
            break
        out.append(g // prev)
        prev = g
    return out


def rational_rank(M):
    A = [[Fraction(x) for x in r] for r in M]
    rank, rows = 0, len(A)
    cols = len(A[0]) if rows else 0
    for c in range(cols):
        piv = next((r for r in range(rank, rows) if A[r][c] != 0), None)
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        for r in range(rows):
            if r != rank and A[r][c] != 0:
                f = A[r][c] / A[rank][c]
                A[r] = [a - f * b for a, b in zip(A[r], A[rank])]
        rank += 1
    return rank


def rank_mod_p(M, p):
    A = [[x % p for x in r] for r in M]
    rank, rows = 0, len(A)
    cols = len(A[0]) if rows else 0
    for c in range(cols):
        piv = next((r for r in range(rank, rows) if A[r][c]), None)
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        inv = pow(A[rank][c], -1, p)
        A[rank] = [x * inv % p for x in A[rank]]
        for r in range(rows):
            if r != rank and A[r][c]:
                f = A[r][c]
                A[r] = [(a - f * b) % p for a, b in zip(A[r], A[rank])]
        rank += 1
    return rank


def brute_force_cocycles(q: int, k: int, n: int):
    """All Z/q-valued k-cochains on Delta^n with zero coboundary, by definition."""
    faces = list(combinations(range(n + 1), k + 1))
    idx = {s: i for i, s in enumerate(faces)}
    cofaces = list(combinations(range(n + 1), k + 2))
    out = []
    for labels in product(range(q), repeat=len(faces)):
        ok = True
        for T in cofaces:
            s = sum((-1) ** i * labels[idx[T[:i] + T[i + 1:]]] for i in range(k + 2))
            if s % q:
                ok = False
                break
        if ok:
            out.append(labels)
    return out
