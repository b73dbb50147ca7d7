"""Normalized chain complexes and their integral and p-local homology."""
from __future__ import annotations

from dataclasses import dataclass, field
from math import prod
from typing import Mapping, Sequence

from .linalg import (
    IntMatrix,
    SpanTester,
    integral_coordinates,
    kernel_basis,
    p_valuation,
    prime_factors,
    require_prime,
    smith_form,
    spans_everything,
)
from .sset import FinSimplicialSet, SimplicialError, SimplicialMap


class InfiniteHomologyError(ValueError):
    """Homology with a free summand above degree 0."""


@dataclass(frozen=True)
class HomologyGroup:
    """``Z^free_rank`` plus cyclic torsion with divisors ``t_1 | t_2 | ...``."""

    free_rank: int = 0
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        t = tuple(int(x) for x in self.torsion)
        object.__setattr__(self, "torsion", t)
        if self.free_rank < 0:
            raise ValueError("free rank must be non-negative")
        if any(x < 2 for x in t) or any(b % a for a, b in zip(t, t[1:])):
            raise ValueError(f"torsion {t} is not a divisor chain of integers >= 2")

    @classmethod
    def from_divisors(cls, free_rank: int, divisors: Sequence[int]) -> "HomologyGroup":
        """Normalize arbitrary cyclic orders (1s dropped) into a divisor chain."""
        from .groups import invariant_factors_of

        return cls(free_rank, invariant_factors_of(divisors))

    def __str__(self) -> str:
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts += [f"Z/{t}" for t in self.torsion]
        return " ⊕ ".join(parts) or "0"

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    @property
    def order(self) -> int | None:
        return prod(self.torsion) if self.is_finite else None

    def local(self, p: int) -> "HomologyGroup":
        """The ``Z_(p)``-module ``H (x) Z_(p)``, written with its p-power divisors."""
        require_prime(p)
        parts = [p ** p_valuation(t, p) for t in self.torsion]
        return HomologyGroup(self.free_rank, tuple(x for x in parts if x > 1))

    def rank_p(self, p: int) -> int:
        """Minimal number of generators of ``H (x) Z_(p)``."""
        return self.free_rank + len(self.local(p).torsion)

    def exponent_p(self, p: int) -> int:
        """Smallest ``b`` with ``p^b`` killing the p-torsion."""
        require_prime(p)
        return max((p_valuation(t, p) for t in self.torsion), default=0)

    def as_dict(self) -> dict:
        return {"free": self.free_rank, "torsion": list(self.torsion)}


@dataclass(frozen=True, eq=False)
class ChainComplexZ:
    """Free chain complex ``C_0 <- C_1 <- ... <- C_top``.

    ``boundaries[n]`` is ``d_n : C_n -> C_{n-1}`` (``boundaries[0]`` has no
    rows).  ``labels[n]`` names the basis of ``C_n``.  Degrees above ``top``
    are zero.
    """

    boundaries: tuple[IntMatrix, ...]
    labels: tuple[tuple, ...] = field(default=())

    @property
    def top(self) -> int:
        return len(self.boundaries) - 1

    def rank(self, n: int) -> int:
        return self.boundaries[n].cols if 0 <= n <= self.top else 0

    def boundary(self, n: int) -> IntMatrix:
        """``d_n``; the zero map outside ``1..top``."""
        if 1 <= n <= self.top:
            return self.boundaries[n]
        return IntMatrix.zeros(self.rank(n - 1), self.rank(n))

    def violations(self) -> list[int]:
        """Degrees ``n`` with ``d_{n-1} d_n != 0``."""
        return [n for n in range(2, self.top + 1)
                if not (self.boundary(n - 1) @ self.boundary(n)).is_zero()]

    def truncate(self, top: int) -> "ChainComplexZ":
        return ChainComplexZ(self.boundaries[: top + 1], self.labels[: top + 1])


def normalized_chain_complex(S: FinSimplicialSet) -> ChainComplexZ:
    """One basis element per generator; degenerate faces contribute nothing."""
    mats = [IntMatrix.zeros(0, S.count(0))]
    for n in range(1, S.top_degree + 1):
        cols = []
        for row in S.faces[n]:
            col = [0] * S.count(n - 1)
            for i, f in enumerate(row):
                if not f.word:
                    col[f.index] += -1 if i % 2 else 1
            cols.append(col)
        mats.append(IntMatrix.from_columns(cols, S.count(n - 1)))
    return ChainComplexZ(tuple(mats), tuple(S.names))


def _check_degree(C: ChainComplexZ, n: int):
    if not 0 <= n <= C.top:
        raise IndexError(f"degree {n} outside the complex (0..{C.top})")


def homology(C: ChainComplexZ, n: int) -> HomologyGroup:
    """``H_n = ker d_n / im d_{n+1}``.

    In the top degree this is the homology of the truncated complex, which
    only agrees with the untruncated one when nothing lives above ``top``.
    """
    _check_degree(C, n)
    dn = smith_form(C.boundary(n))
    dn1 = smith_form(C.boundary(n + 1))
    free = C.rank(n) - dn.rank - dn1.rank
    return HomologyGroup(free, tuple(d for d in dn1.divisors if d > 1))


def local_homology(C: ChainComplexZ, n: int, p: int) -> HomologyGroup:
    """``H_n(C; Z_(p))``: same free rank, only the p-power torsion."""
    require_prime(p)
    return homology(C, n).local(p)


# -- invariants -------------------------------------------------------------


@dataclass(frozen=True)
class Invariants:
    """``h_p``, ``m_p`` per prime and the combined ``h``, ``m``, ``N``."""

    h_p: Mapping[int, int]
    m_p: Mapping[int, int]
    h: int
    m: int
    N: int
    d: int

    def as_dict(self) -> dict:
        return {
            "d": self.d,
            "h_p": {str(p): v for p, v in sorted(self.h_p.items())},
            "m_p": {str(p): v for p, v in sorted(self.m_p.items())},
            "h": self.h, "m": self.m, "N": self.N,
        }


@dataclass(frozen=True)
class HomologyProfile:
    """Homology in degrees ``0..d``."""

    groups: tuple[HomologyGroup, ...]

    @property
    def d(self) -> int:
        return len(self.groups) - 1

    @classmethod
    def of(cls, S: FinSimplicialSet, d: int | None = None) -> "HomologyProfile":
        """Profile of a finite set through its dimension (or through ``d``)."""
        C = normalized_chain_complex(S)
        top = max(S.dimension, 0) if d is None else d
        if top > C.top:
            raise ValueError(f"homology through {top} needs the set through degree {top}")
        return cls(tuple(homology(C, n) for n in range(top + 1)))

    def primes(self) -> list[int]:
        ps = set()
        for g in self.groups:
            for t in g.torsion:
                ps.update(prime_factors(t))
        return sorted(ps)

    def invariants(self) -> Invariants:
        return invariants(self)

    def lines(self) -> list[str]:
        return [f"H_{n} = {g}" for n, g in enumerate(self.groups)]


def invariants(profile: HomologyProfile) -> Invariants:
    """``h_p = sum_{k>=1} rank_p H_k``, ``m_p = sum_{k>=0}`` p-exponents,
    ``h``/``m`` their maxima and ``N`` the product of primes with ``h_p > 0``."""
    for k, g in enumerate(profile.groups):
        if k >= 1 and not g.is_finite:
            raise InfiniteHomologyError(f"H_{k} = {g} is infinite")
    h_p, m_p = {}, {}
    for p in profile.primes():
        h_p[p] = sum(g.rank_p(p) for g in profile.groups[1:])
        m_p[p] = sum(g.exponent_p(p) for g in profile.groups)
    N = prod(p for p, v in h_p.items() if v)
    return Invariants(h_p, m_p, max(h_p.values(), default=0), max(m_p.values(), default=0),
                      N, profile.d)


# -- chain maps and homology isomorphisms -------------------------------------


def chain_map(f: SimplicialMap, n: int) -> IntMatrix:
    """``f_# : C_n(source) -> C_n(target)`` on normalized chains."""
    S, T = f.source, f.target
    M = IntMatrix.zeros(T.count(n), S.count(n))
    for g in range(S.count(n)):
        img = f.images[n][g]
        if not img.word:
            M.data[img.index][g] += 1
    return M


@dataclass(frozen=True)
class DegreeVerdict:
    degree: int
    injective: bool
    surjective: bool

    @property
    def iso(self) -> bool:
        return self.injective and self.surjective


def induced_map_verdict(C: ChainComplexZ, D: ChainComplexZ, F: IntMatrix, n: int,
                        p: int | None = None) -> DegreeVerdict:
    """Whether ``F : C_n -> D_n`` induces an injection/surjection on ``H_n``.

    ``F`` must be the degree-``n`` part of a chain map.  Coefficients are
    ``Z`` (``p is None``) or ``Z_(p)``.
    """
    KC, KD = kernel_basis(C.boundary(n)), kernel_basis(D.boundary(n))
    a, b = KC.cols, KD.cols
    AC = integral_coordinates(KC, C.boundary(n + 1)) if a else IntMatrix.zeros(0, C.rank(n + 1))
    AD = integral_coordinates(KD, D.boundary(n + 1)) if b else IntMatrix.zeros(0, D.rank(n + 1))
    if b:
        Fk = integral_coordinates(KD, F @ KC)
    else:
        Fk = IntMatrix.zeros(0, a)
    surjective = b == 0 or spans_everything(Fk.hstack(AD), p)
    if a == 0:
        return DegreeVerdict(n, True, surjective)
    # x is in ker H_n(F) iff (x, y) solves F x = A_D y for some y
    negAD = IntMatrix([[-v for v in r] for r in AD.data], AD.rows, AD.cols)
    K = kernel_basis(Fk.hstack(negAD)) if b else IntMatrix.identity(a)
    xs = IntMatrix(K.data[:a], a, K.cols)
    tester = SpanTester(AC, p)
    injective = all(x in tester for x in xs.columns())
    return DegreeVerdict(n, injective, surjective)


@dataclass(frozen=True)
class IsoReport:
    p: int | None
    degrees: tuple[DegreeVerdict, ...]

    @property
    def ok(self) -> bool:
        return all(v.iso for v in self.degrees)

    def failures(self) -> list[int]:
        return [v.degree for v in self.degrees if not v.iso]


def homology_iso_report(f: SimplicialMap, through: int, p: int | None = None,
                        check_simplicial: bool = True) -> IsoReport:
    """Check ``H_n(f)`` for ``n <= through`` over ``Z`` or ``Z_(p)``."""
    if p is not None:
        require_prime(p)
    if check_simplicial:
        bad = f.violations()
        if bad:
            raise SimplicialError(f"map is not simplicial: first violation {bad[0]}")
    C = normalized_chain_complex(f.source)
    D = normalized_chain_complex(f.target)
    top = min(C.top, D.top)
    if through > top:
        raise ValueError(f"cannot check degree {through}: sets are truncated at {top}")
    verdicts = []
    for n in range(through + 1):
        # H_n needs C_{n+1}; truncation at n would make it unreliable
        verdicts.append(induced_map_verdict(C, D, chain_map(f, n), n, p))
    return IsoReport(p, tuple(verdicts))
