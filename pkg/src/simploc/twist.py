"""Twisting operators and twisted Cartesian products.

Groups are written additively.  A twisting operator ``tau`` from a base
``B`` to a simplicial group ``G`` sends ``B_n -> G_{n-1}`` and satisfies

* ``d_0 tau(b) = tau(d_1 b) - tau(d_0 b)``
* ``d_i tau(b) = tau(d_{i+1} b)`` for ``i >= 1``
* ``s_i tau(b) = tau(s_{i+1} b)``
* ``tau(s_0 b) = 0``

The twisted product ``F x_tau B`` has the Cartesian operators except
``d_0 (f, b) = (d_0 f + tau(b), d_0 b)``, with ``G`` acting on ``F``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import islice, product as _cartesian
from typing import Callable, Hashable, NamedTuple

from .em import (
    E_SPACE,
    K_SPACE,
    Cochain,
    EMModel,
    _coboundary,
    _cone,
    subset_index,
    subsets,
)
from .groups import FiniteAbelianGroup
from .sset import DEFAULT_BUDGET, BudgetExceeded, FinSimplicialSet, SimplicialError, from_model, is_degenerate


class TwistingAxiomError(SimplicialError):
    pass


@dataclass(frozen=True, eq=False)
class TwistingOperator:
    """``rule(b, n)`` gives ``tau(b)`` in ``G_{n-1}`` for ``b`` in ``B_n``.

    ``base`` and ``group`` are models with ``face_n``/``degeneracy_n``;
    ``group`` also has ``add``, ``neg`` and ``zero(n)``.
    """

    base: object
    group: object
    rule: Callable[[Hashable, int], Hashable]
    name: str = "tau"

    def __call__(self, b, n: int):
        if n < 1:
            raise ValueError("twisting operators start in degree 1")
        return self.rule(b, n)


@lru_cache(maxsize=None)
def _tau_plan(ell: int, k: int) -> tuple[tuple[int, int], ...]:
    """Index pairs ``(z(0, I+1), z(1, I+1))`` for every ``(k+1)``-subset ``I`` of ``[ell-1]``.

    ``-1`` marks a subset with a repeated vertex (label 0).
    """
    idx = subset_index(ell, k + 2)
    plan = []
    for I in subsets(ell - 1, k + 1):
        J = tuple(i + 1 for i in I)
        first = idx[(0,) + J]
        second = idx[(1,) + J] if J[0] != 1 else -1
        plan.append((first, second))
    return tuple(plan)


def _canonical_tau_raw(group: FiniteAbelianGroup, z: tuple, ell: int, k: int, sign: int = -1) -> tuple:
    out = []
    for a, b in _tau_plan(ell, k):
        x = z[a]
        y = z[b] if b >= 0 else 0
        out.append(group.lincomb((1, sign), (x, y)))
    return tuple(out)


def canonical_tau(z: Cochain) -> Cochain:
    """``(tau z)(i_0..i_k) = z(0, i_0+1, .., i_k+1) - z(1, i_0+1, .., i_k+1)``.

    ``z`` is a ``(k+1)``-cocycle on ``Delta^ell``; the result is a
    ``k``-cocycle on ``Delta^{ell-1}``.  Labels of subsets with a repeated
    vertex count as 0.
    """
    if z.dim < 1:
        raise ValueError("canonical tau needs a simplex of dimension >= 1")
    if z.degree < 1:
        raise ValueError("canonical tau needs a cocycle of degree >= 1")
    k = z.degree - 1
    return Cochain(z.group, z.dim - 1, k, _canonical_tau_raw(z.group, z.labels, z.dim, k))


def canonical_twisting(group: FiniteAbelianGroup, k: int, sign: int = -1) -> TwistingOperator:
    """``tau : K(pi, k+1) -> K(pi, k)`` from :func:`canonical_tau`.

    ``sign=+1`` gives the sign-flipped variant ``z(0, ..) + z(1, ..)``, which
    is not a twisting operator unless ``2 pi = 0``; it exists for negative tests.
    """
    base = EMModel(group, k + 1, K_SPACE)
    fiber = EMModel(group, k, K_SPACE)
    name = "canonical" if sign == -1 else "sign-flipped"
    return TwistingOperator(base, fiber, lambda z, n: _canonical_tau_raw(group, z, n, k, sign), name)


def trivial_twisting(base, group) -> TwistingOperator:
    """The constant operator ``tau(b) = 0``."""
    return TwistingOperator(base, group, lambda b, n: group.zero(n - 1), "trivial")


class AxiomViolation(NamedTuple):
    axiom: str
    degree: int
    simplex: Hashable
    index: int


@dataclass
class AxiomReport:
    operator: str
    up_to: int
    checked: int = 0
    violations: list[AxiomViolation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def check_twisting_axioms(tau: TwistingOperator, up_to: int, limit: int | None = None) -> AxiomReport:
    """Evaluate the four axioms on every base simplex of degree ``1..up_to``.

    ``limit`` caps the number of simplices examined per degree.
    """
    B, G = tau.base, tau.group
    report = AxiomReport(tau.name, up_to)
    for n in range(1, up_to + 1):
        for b in islice(B.simplices(n), limit):
            report.checked += 1
            t = tau(b, n)
            bad = report.violations.append
            if n >= 2:
                want = G.add(tau(B.face_n(b, n, 1), n - 1), G.neg(tau(B.face_n(b, n, 0), n - 1)))
                if G.face_n(t, n - 1, 0) != want:
                    bad(AxiomViolation("d_0", n, b, 0))
                for i in range(1, n):
                    if G.face_n(t, n - 1, i) != tau(B.face_n(b, n, i + 1), n - 1):
                        bad(AxiomViolation("d_i", n, b, i))
            for i in range(n):
                if G.degeneracy_n(t, n - 1, i) != tau(B.degeneracy_n(b, n, i + 1), n + 1):
                    bad(AxiomViolation("s_i", n, b, i))
        # tau(s_0 b) for b of degree n-1, so that tau is evaluated in degree n
        for b in islice(B.simplices(n - 1), limit):
            if tau(B.degeneracy_n(b, n - 1, 0), n) != G.zero(n - 1):
                report.violations.append(AxiomViolation("s_0", n, b, 0))
    return report


class TwistedProductModel:
    """Model of ``F x_tau B``; ``act(f, g, n)`` is the right action of ``G`` on ``F``."""

    def __init__(self, F, B, tau: TwistingOperator, act: Callable | None = None):
        self.F, self.B, self.tau = F, B, tau
        self.act = act or (lambda f, g, n: tau.group.add(f, g))

    def face_n(self, x, n, i):
        f, b = x
        if i == 0:
            return (self.act(self.F.face_n(f, n, 0), self.tau(b, n), n - 1), self.B.face_n(b, n, 0))
        return (self.F.face_n(f, n, i), self.B.face_n(b, n, i))

    def degeneracy_n(self, x, n, i):
        f, b = x
        return (self.F.degeneracy_n(f, n, i), self.B.degeneracy_n(b, n, i))

    def simplices(self, n):
        return _cartesian(self.F.simplices(n), list(self.B.simplices(n)))

    def cardinality(self, n):
        return self.F.cardinality(n) * self.B.cardinality(n)

    def nondegenerate(self, n):
        for x in self.simplices(n):
            if not is_degenerate(self, x, n):
                yield x

    def project(self, x):
        return x[1]


def twisted_product(F, B, tau: TwistingOperator, up_to: int, budget: int | None = DEFAULT_BUDGET,
                    verify: bool = True, act: Callable | None = None) -> FinSimplicialSet:
    """Materialize ``F x_tau B`` through degree ``up_to``.

    With ``verify`` the axioms are checked first on all base simplices in
    range and a :class:`TwistingAxiomError` is raised on failure.
    """
    if verify:
        rep = check_twisting_axioms(tau, up_to)
        if not rep.ok:
            v = rep.violations[0]
            raise TwistingAxiomError(
                f"{len(rep.violations)} axiom violations; first: {v.axiom} in degree {v.degree}"
            )
    return from_model(TwistedProductModel(F, B, tau, act), up_to, budget)


# -- E(pi, k) as a twisted product ------------------------------------------


def split(group: FiniteAbelianGroup, e: tuple, n: int, k: int) -> tuple[tuple, tuple]:
    """``e -> (e - h(delta e), delta e)`` with ``h`` the cone lift at vertex 0."""
    b = _coboundary(group, e, n, k)
    hb = _cone(b, n, k)
    f = tuple(group.sub(x, y) for x, y in zip(e, hb))
    return f, b


def unsplit(group: FiniteAbelianGroup, f: tuple, b: tuple, n: int, k: int) -> tuple:
    return tuple(group.add(x, y) for x, y in zip(f, _cone(b, n, k)))


SECTION_DESCRIPTION = (
    "e -> (e - h(delta e), delta e) where (h z)(S) = z({0} u S) for 0 not in S and 0 otherwise"
)


@dataclass(frozen=True)
class IsoDegree:
    degree: int
    size_E: int
    size_pairs: int
    bijective: bool
    faces_ok: bool
    twisted_d0_ok: bool
    degeneracies_ok: bool

    @property
    def ok(self) -> bool:
        return self.bijective and self.faces_ok and self.twisted_d0_ok and self.degeneracies_ok


@dataclass(frozen=True)
class IsoReport:
    group: FiniteAbelianGroup
    k: int
    section: str
    degrees: tuple[IsoDegree, ...]

    @property
    def ok(self) -> bool:
        return all(d.ok for d in self.degrees)


def e_as_twisted_product_iso(group: FiniteAbelianGroup, k: int, up_to: int,
                             budget: int | None = DEFAULT_BUDGET) -> IsoReport:
    """Verify ``E(pi,k) = K(pi,k) x_tau K(pi,k+1)`` degreewise through ``up_to``.

    Every ``e`` in ``E(pi,k)_n`` is split; the report records whether the
    split lands in the product, is a bijection, and commutes with ``d_i``
    (``i >= 1``), ``s_i`` and the twisted ``d_0``.
    """
    if k < 0:
        raise ValueError("degree must be non-negative")
    E = EMModel(group, k, E_SPACE)
    Kf = EMModel(group, k, K_SPACE)
    Kb = EMModel(group, k + 1, K_SPACE)
    tau = canonical_twisting(group, k)
    T = TwistedProductModel(Kf, Kb, tau)

    out = []
    for n in range(up_to + 1):
        size = E.cardinality(n)
        if budget is not None and size > budget:
            raise BudgetExceeded(n, size, budget)
        pairs_expected = Kf.cardinality(n) * Kb.cardinality(n)
        seen = set()
        bij = faces = d0 = degen = True
        for e in E.simplices(n):
            f, b = split(group, e, n, k)
            if any(_coboundary(group, f, n, k)) or unsplit(group, f, b, n, k) != e:
                bij = False
            seen.add((f, b))
            if n >= 1:
                if split(group, E.face_n(e, n, 0), n - 1, k) != T.face_n((f, b), n, 0):
                    d0 = False
                for i in range(1, n + 1):
                    if split(group, E.face_n(e, n, i), n - 1, k) != T.face_n((f, b), n, i):
                        faces = False
            for i in range(n + 1):
                if split(group, E.degeneracy_n(e, n, i), n + 1, k) != T.degeneracy_n((f, b), n, i):
                    degen = False
        bij = bij and len(seen) == size == pairs_expected
        out.append(IsoDegree(n, size, pairs_expected, bij, faces, d0, degen))
    return IsoReport(group, k, SECTION_DESCRIPTION, tuple(out))
