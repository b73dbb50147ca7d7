"""Finite abelian groups in invariant-factor form.

Elements are encoded as integers ``0 .. order-1`` (mixed radix over the
invariant factors, first factor least significant).  For a cyclic group the
code is simply the residue.  ``vector``/``element`` convert between codes and
residue vectors.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import prod
from typing import Iterable, Sequence

from .linalg import p_valuation, prime_factors, require_prime


@dataclass(frozen=True)
class FiniteAbelianGroup:
    invariant_factors: tuple[int, ...] = ()

    def __post_init__(self):
        f = tuple(int(x) for x in self.invariant_factors)
        object.__setattr__(self, "invariant_factors", f)
        if any(x < 2 for x in f):
            raise ValueError(f"invariant factors must be >= 2: {f}")
        if any(b % a for a, b in zip(f, f[1:])):
            raise ValueError(f"invariant factors must divide each other: {f}")

    @classmethod
    def cyclic(cls, n: int) -> "FiniteAbelianGroup":
        return cls((n,) if n > 1 else ())

    @classmethod
    def from_orders(cls, orders: Iterable[int]) -> "FiniteAbelianGroup":
        """Normalize a direct sum of cyclic groups ``Z/o`` to invariant factors."""
        return cls(invariant_factors_of(orders))

    def __str__(self) -> str:
        return " + ".join(f"Z/{q}" for q in self.invariant_factors) or "0"

    @property
    def order(self) -> int:
        return prod(self.invariant_factors)

    @property
    def is_trivial(self) -> bool:
        return not self.invariant_factors

    def elements(self) -> range:
        return range(self.order)

    zero = 0

    def vector(self, code: int) -> tuple[int, ...]:
        out = []
        for q in self.invariant_factors:
            code, r = divmod(code, q)
            out.append(r)
        return tuple(out)

    def element(self, vector: int | Sequence[int]) -> int:
        """Code of a residue vector; a plain int is read as a code and reduced."""
        if isinstance(vector, int):
            return vector % self.order
        if len(vector) != len(self.invariant_factors):
            raise ValueError(f"{vector} does not match factors {self.invariant_factors}")
        code, scale = 0, 1
        for x, q in zip(vector, self.invariant_factors):
            code += (x % q) * scale
            scale *= q
        return code

    @cached_property
    def _tables(self):
        n = self.order
        vec = [self.vector(c) for c in range(n)]
        add = [[self.element(tuple(x + y for x, y in zip(vec[a], vec[b]))) for b in range(n)]
               for a in range(n)]
        neg = [self.element(tuple(-x for x in vec[a])) for a in range(n)]
        return add, neg

    def add(self, a: int, b: int) -> int:
        if len(self.invariant_factors) <= 1:
            return (a + b) % self.order if self.order > 1 else 0
        return self._tables[0][a][b]

    def neg(self, a: int) -> int:
        if len(self.invariant_factors) <= 1:
            return -a % self.order if self.order > 1 else 0
        return self._tables[1][a]

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def lincomb(self, coeffs: Sequence[int], codes: Sequence[int]) -> int:
        """``sum(c * x)`` for integer coefficients."""
        if len(self.invariant_factors) <= 1:
            q = self.order
            return sum(c * x for c, x in zip(coeffs, codes)) % q if q > 1 else 0
        acc = [0] * len(self.invariant_factors)
        for c, x in zip(coeffs, codes):
            for t, v in enumerate(self.vector(x)):
                acc[t] += c * v
        return self.element(acc)

    def primary_part(self, p: int) -> "FiniteAbelianGroup":
        """The ``p``-primary summand, again in invariant-factor form."""
        require_prime(p)
        parts = [p ** p_valuation(q, p) for q in self.invariant_factors]
        return FiniteAbelianGroup(tuple(x for x in parts if x > 1))

    def primes(self) -> list[int]:
        return prime_factors(self.order) if self.order > 1 else []


def invariant_factors_of(orders: Iterable[int]) -> tuple[int, ...]:
    """Invariant factors of ``⊕ Z/o`` (orders 0 and 1 are dropped)."""
    powers: dict[int, list[int]] = {}
    for o in orders:
        if o < 0:
            raise ValueError("orders must be non-negative")
        if o <= 1:
            continue
        for p in prime_factors(o):
            powers.setdefault(p, []).append(p ** p_valuation(o, p))
    if not powers:
        return ()
    length = max(len(v) for v in powers.values())
    factors = [1] * length
    for v in powers.values():
        v.sort()
        for i, x in enumerate(v):
            factors[length - len(v) + i] *= x
    return tuple(f for f in factors if f > 1)
