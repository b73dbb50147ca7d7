"""Exact integer linear algebra: Smith normal form, kernels, spans.

Everything is done with Python integers.  Matrices here are small and often
sparse, so a straightforward smallest-pivot elimination is used.

Localization at a prime ``p`` is handled by valuation queries: an integer
is a unit of ``Z_(p)`` exactly when ``p`` does not divide it.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence


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


def require_prime(p: int) -> None:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")


def p_valuation(n: int, p: int) -> int:
    """Exponent of ``p`` in ``n``; ``n`` must be nonzero."""
    if n == 0:
        raise ValueError("valuation of zero is infinite")
    n, v = abs(n), 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def prime_factors(n: int) -> list[int]:
    n, out, f = abs(n), [], 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


class IntMatrix:
    """Dense matrix of arbitrary-precision integers."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, data: Iterable[Sequence[int]], rows: int | None = None,
                 cols: int | None = None):
        self.data = [list(map(int, r)) for r in data]
        self.rows = len(self.data) if rows is None else rows
        if cols is None:
            cols = len(self.data[0]) if self.data else 0
        self.cols = cols
        if len(self.data) != self.rows or any(len(r) != cols for r in self.data):
            raise ValueError("ragged or mis-sized matrix data")

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls([[0] * cols for _ in range(rows)], rows, cols)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        m = cls.zeros(n, n)
        for i in range(n):
            m.data[i][i] = 1
        return m

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: int) -> "IntMatrix":
        return cls([[c[i] for c in columns] for i in range(rows)], rows, len(columns))

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def copy(self) -> "IntMatrix":
        return IntMatrix(self.data, self.rows, self.cols)

    def column(self, j: int) -> list[int]:
        return [r[j] for r in self.data]

    def columns(self) -> list[list[int]]:
        return [self.column(j) for j in range(self.cols)]

    def select_columns(self, js: Sequence[int]) -> "IntMatrix":
        return IntMatrix([[r[j] for j in js] for r in self.data], self.rows, len(js))

    @property
    def T(self) -> "IntMatrix":
        return IntMatrix([[r[j] for r in self.data] for j in range(self.cols)],
                         self.cols, self.rows)

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        cols = other.T.data
        return IntMatrix(
            [[sum(a * b for a, b in zip(r, c)) for c in cols] for r in self.data],
            self.rows, other.cols,
        )

    def apply(self, v: Sequence[int]) -> list[int]:
        return [sum(a * b for a, b in zip(r, v)) for r in self.data]

    def hstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.rows != other.rows:
            raise ValueError("row counts differ")
        return IntMatrix([a + b for a, b in zip(self.data, other.data)],
                         self.rows, self.cols + other.cols)

    def is_zero(self) -> bool:
        return not any(any(r) for r in self.data)

    def __eq__(self, other) -> bool:
        return isinstance(other, IntMatrix) and self.shape == other.shape and self.data == other.data

    def __repr__(self) -> str:
        return f"IntMatrix({self.data!r})"

    def rank(self) -> int:
        return smith_form(self).rank

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.data]


@dataclass
class SmithForm:
    """``U @ M @ V == D`` with ``D`` diagonal and ``d_1 | d_2 | ...``."""

    divisors: list[int]
    rank: int
    D: IntMatrix
    U: IntMatrix | None = None
    V: IntMatrix | None = None
    Vinv: IntMatrix | None = None


def smith_form(M: IntMatrix, transforms: bool = False) -> SmithForm:
    """Smith normal form by greedy smallest-entry pivoting.

    With ``transforms=True`` the unimodular ``U``, ``V`` and ``V^{-1}`` are
    kept as well.
    """
    m, n = M.shape
    a = [list(r) for r in M.data]
    U = [[int(i == j) for j in range(m)] for i in range(m)] if transforms else None
    V = [[int(i == j) for j in range(n)] for i in range(n)] if transforms else None
    Vi = [[int(i == j) for j in range(n)] for i in range(n)] if transforms else None

    def swap_rows(i, k):
        a[i], a[k] = a[k], a[i]
        if U is not None:
            U[i], U[k] = U[k], U[i]

    def swap_cols(j, k):
        for r in a:
            r[j], r[k] = r[k], r[j]
        if V is not None:
            for r in V:
                r[j], r[k] = r[k], r[j]
            Vi[j], Vi[k] = Vi[k], Vi[j]

    def add_row(i, k, c):  # row_i += c * row_k
        ri, rk = a[i], a[k]
        for j in range(n):
            if rk[j]:
                ri[j] += c * rk[j]
        if U is not None:
            ui, uk = U[i], U[k]
            for j in range(m):
                if uk[j]:
                    ui[j] += c * uk[j]

    def add_col(j, k, c):  # col_j += c * col_k
        for r in a:
            if r[k]:
                r[j] += c * r[k]
        if V is not None:
            for r in V:
                if r[k]:
                    r[j] += c * r[k]
            vk, vj = Vi[k], Vi[j]
            for t in range(n):
                if vj[t]:
                    vk[t] -= c * vj[t]

    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            row = a[i]
            for j in range(t, n):
                v = row[j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best and best[0] == 1:
                break
        if best is None:
            break
        swap_rows(t, best[1])
        swap_cols(t, best[2])
        while True:
            p = a[t][t]
            clean = True
            for i in range(t + 1, m):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // p))
                    clean = clean and not a[i][t]
            for j in range(t + 1, n):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // p))
                    clean = clean and not a[t][j]
            if not clean:
                cand = [(abs(a[i][t]), i, t) for i in range(t + 1, m) if a[i][t]]
                cand += [(abs(a[t][j]), t, j) for j in range(t + 1, n) if a[t][j]]
                _, i, j = min(cand)
                swap_rows(t, i)
                swap_cols(t, j)
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if a[i][j] % p), None
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            if U is not None:
                U[t] = [-x for x in U[t]]
        t += 1
    divisors = [a[i][i] for i in range(t)]
    return SmithForm(
        divisors, t, IntMatrix(a, m, n),
        IntMatrix(U, m, m) if transforms else None,
        IntMatrix(V, n, n) if transforms else None,
        IntMatrix(Vi, n, n) if transforms else None,
    )


def smith_normal_form(M: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """``(U, D, V)`` with ``D = U M V`` in Smith normal form."""
    sf = smith_form(M, transforms=True)
    return sf.U, sf.D, sf.V


def elementary_divisors(M: IntMatrix) -> list[int]:
    return smith_form(M).divisors


def kernel_basis(M: IntMatrix) -> IntMatrix:
    """Integral basis of ``ker M`` as columns.

    The integral kernel is saturated, so it is also a basis over every
    ``Z_(p)`` and over ``Q``.
    """
    sf = smith_form(M, transforms=True)
    return sf.V.select_columns(range(sf.rank, M.cols))


def local_kernel_basis(M: IntMatrix, p: int) -> IntMatrix:
    """Basis of ``ker M`` over ``Z_(p)`` (integral columns)."""
    require_prime(p)
    return kernel_basis(M)


def _is_local_unit(x: int, p: int | None) -> bool:
    return abs(x) == 1 if p is None else x % p != 0


def _divides(d: int, x: int, p: int | None) -> bool:
    """``d | x`` in ``Z`` (p is None) or in ``Z_(p)``."""
    if x == 0:
        return True
    if p is None:
        return x % d == 0
    return p_valuation(x, p) >= p_valuation(d, p)


class SpanTester:
    """Membership in the column span of ``B`` over ``Z`` or ``Z_(p)``."""

    def __init__(self, B: IntMatrix, p: int | None = None):
        self.p = p
        self.sf = smith_form(B, transforms=True)
        self.rows = B.rows

    def __contains__(self, v: Sequence[int]) -> bool:
        w = self.sf.U.apply(v)
        r = self.sf.rank
        if any(w[r:]):
            return False
        return all(_divides(d, x, self.p) for d, x in zip(self.sf.divisors, w))


def span_contains(B: IntMatrix, A: IntMatrix, p: int | None = None) -> bool:
    """Whether every column of ``A`` lies in the span of the columns of ``B``."""
    tester = SpanTester(B, p)
    return all(c in tester for c in A.columns())


def spans_everything(A: IntMatrix, p: int | None = None) -> bool:
    """Whether the columns of ``A`` generate the free module on its rows."""
    sf = smith_form(A)
    return sf.rank == A.rows and all(_is_local_unit(d, p) for d in sf.divisors)


def solve_mod(A: IntMatrix, b: Sequence[int], q: int) -> list[int] | None:
    """Some ``x`` with ``A x = b (mod q)``, or ``None`` if unsolvable."""
    sf = smith_form(A, transforms=True)
    c = [x % q for x in sf.U.apply(b)]
    y = [0] * A.cols
    for i in range(A.rows):
        if i < sf.rank:
            d = sf.divisors[i] % q
            g = gcd(d, q)
            if c[i] % g:
                return None
            qq = q // g
            y[i] = (c[i] // g) * pow(d // g, -1, qq) % qq if qq > 1 else 0
        elif c[i]:
            return None
    return [x % q for x in sf.V.apply(y)]


def rational_solve(A: IntMatrix, b: Sequence[int], p: int | None = None) -> list[Fraction]:
    """Unique rational ``x`` with ``A x = b`` for ``A`` of full column rank.

    When ``p`` is given every denominator must be prime to ``p``; a
    violation raises ``ArithmeticError``.
    """
    m, n = A.shape
    rows = [[Fraction(v) for v in r] + [Fraction(bb)] for r, bb in zip(A.data, b)]
    piv_cols, r = [], 0
    for j in range(n):
        k = next((i for i in range(r, m) if rows[i][j]), None)
        if k is None:
            raise ValueError("matrix does not have full column rank")
        rows[r], rows[k] = rows[k], rows[r]
        pv = rows[r][j]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(m):
            if i != r and rows[i][j]:
                f = rows[i][j]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        piv_cols.append(j)
        r += 1
    if any(rows[i][n] for i in range(r, m)):
        raise ValueError("system is inconsistent")
    x = [rows[i][n] for i in range(n)]
    if p is not None and any(v.denominator % p == 0 for v in x):
        raise ArithmeticError(f"solution has a denominator divisible by {p}")
    return x


def solve_columns(A: IntMatrix, B: IntMatrix, p: int | None = None) -> list[list[Fraction]]:
    """Solve ``A X = B`` column by column for ``A`` of full column rank.

    One elimination serves every right-hand side.  Returns the columns of
    ``X``.  Denominators must be prime to ``p`` when ``p`` is given.
    """
    m, n = A.shape
    k = B.cols
    rows = [[Fraction(v) for v in A.data[i]] + [Fraction(v) for v in B.data[i]] for i in range(m)]
    r = 0
    for j in range(n):
        piv = next((i for i in range(r, m) if rows[i][j]), None)
        if piv is None:
            raise ValueError("matrix does not have full column rank")
        rows[r], rows[piv] = rows[piv], rows[r]
        pv = rows[r][j]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(m):
            if i != r and rows[i][j]:
                f = rows[i][j]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        r += 1
    if any(rows[i][n + c] for i in range(r, m) for c in range(k)):
        raise ValueError("system is inconsistent")
    out = [[rows[i][n + c] for i in range(n)] for c in range(k)]
    if p is not None and any(v.denominator % p == 0 for col in out for v in col):
        raise ArithmeticError(f"solution has a denominator divisible by {p}")
    return out


def integral_coordinates(A: IntMatrix, B: IntMatrix) -> IntMatrix:
    """Integer ``X`` with ``A X = B``; raises if some solution is not integral."""
    cols = solve_columns(A, B)
    if any(v.denominator != 1 for col in cols for v in col):
        raise ArithmeticError("coordinates are not integral")
    return IntMatrix.from_columns([[int(v) for v in col] for col in cols], A.cols)
