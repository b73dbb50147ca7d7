"""Standard simplicial models of ``K(pi, k)`` and ``E(pi, k)``.

An ``n``-simplex of ``E(pi, k)`` is a ``k``-cochain on ``Delta^n``: a label in
``pi`` for every ``(k+1)``-element subset of ``{0..n}``.  The ``n``-simplices
of ``K(pi, k)`` are the cochains that are cocycles.  Simplicial operators act
by pulling cochains back along monotone maps.

Internally a cochain is just the tuple of element codes, ordered like
``itertools.combinations(range(n + 1), k + 1)``; :class:`Cochain` wraps that
tuple together with its group and shape for the public API.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, product
from math import comb
from typing import Iterator, Mapping, Sequence

import numpy as np

from .groups import FiniteAbelianGroup
from .linalg import IntMatrix, smith_form
from .sset import DEFAULT_BUDGET, BudgetExceeded, FinSimplicialSet, MonotoneMap, from_model

K_SPACE = "K"
E_SPACE = "E"


# -- combinatorics of Delta^n -----------------------------------------------


@lru_cache(maxsize=None)
def subsets(n: int, size: int) -> tuple[tuple[int, ...], ...]:
    """``size``-element subsets of ``{0..n}`` in lexicographic order."""
    if size < 0:
        return ()
    return tuple(combinations(range(n + 1), size))


@lru_cache(maxsize=None)
def subset_index(n: int, size: int) -> dict[tuple[int, ...], int]:
    return {s: i for i, s in enumerate(subsets(n, size))}


@lru_cache(maxsize=None)
def free_subsets(n: int, k: int) -> tuple[tuple[int, ...], ...]:
    """The ``(k+1)``-subsets containing vertex 0; ``C(n, k)`` of them."""
    return tuple(s for s in subsets(n, k + 1) if s[0] == 0)


@lru_cache(maxsize=None)
def _pullback_plan(n: int, k: int, values: tuple[int, ...]) -> tuple[int, ...]:
    """Source index for each ``(k+1)``-subset of ``[m]``; ``-1`` means label 0."""
    m = len(values) - 1
    idx = subset_index(n, k + 1)
    plan = []
    for S in subsets(m, k + 1):
        image = tuple(values[s] for s in S)
        plan.append(idx[image] if len(set(image)) == len(image) else -1)
    return tuple(plan)


def _pull(labels: tuple, n: int, k: int, values: tuple[int, ...]) -> tuple:
    return tuple(labels[j] if j >= 0 else 0 for j in _pullback_plan(n, k, values))


@lru_cache(maxsize=None)
def _face_values(n: int, i: int) -> tuple[int, ...]:
    return MonotoneMap.coface(n, i).values


@lru_cache(maxsize=None)
def _degen_values(n: int, i: int) -> tuple[int, ...]:
    return MonotoneMap.codegeneracy(n, i).values


@lru_cache(maxsize=None)
def coboundary_matrix(n: int, k: int) -> IntMatrix:
    """Integer matrix of ``delta: C^k(Delta^n) -> C^{k+1}(Delta^n)``."""
    src = subset_index(n, k + 1)
    rows = []
    for T in subsets(n, k + 2):
        row = [0] * len(src)
        for i in range(len(T)):
            row[src[T[:i] + T[i + 1:]]] += (-1) ** i
        rows.append(row)
    return IntMatrix(rows, len(rows), len(src))


@lru_cache(maxsize=None)
def _coboundary_terms(n: int, k: int):
    src = subset_index(n, k + 1)
    return tuple(
        (tuple((-1) ** i for i in range(len(T))), tuple(src[T[:i] + T[i + 1:]] for i in range(len(T))))
        for T in subsets(n, k + 2)
    )


@lru_cache(maxsize=None)
def _extension_terms(n: int, k: int):
    """For every ``(k+1)``-subset: its free position, or the signed free terms."""
    free = {s: i for i, s in enumerate(free_subsets(n, k))}
    plan = []
    for S in subsets(n, k + 1):
        if S[0] == 0:
            plan.append(free[S])
        else:
            terms = [((-1) ** i, free[(0,) + S[:i] + S[i + 1:]]) for i in range(len(S))]
            plan.append(tuple(terms))
    return tuple(plan)


@lru_cache(maxsize=None)
def _cone_plan(n: int, k: int) -> tuple[int, ...]:
    """For the lift of a ``(k+1)``-cochain to a ``k``-cochain; see :func:`cone_lift`."""
    idx = subset_index(n, k + 2)
    return tuple(-1 if S[0] == 0 else idx[(0,) + S] for S in subsets(n, k + 1))


# -- raw label operations ---------------------------------------------------


def _coboundary(group: FiniteAbelianGroup, labels: tuple, n: int, k: int) -> tuple:
    return tuple(group.lincomb(signs, [labels[j] for j in pos])
                 for signs, pos in _coboundary_terms(n, k))


def _extend(group: FiniteAbelianGroup, free: Sequence[int], n: int, k: int) -> tuple:
    out = []
    for t in _extension_terms(n, k):
        if isinstance(t, int):
            out.append(free[t])
        else:
            out.append(group.lincomb([s for s, _ in t], [free[j] for _, j in t]))
    return tuple(out)


def _cone(labels: tuple, n: int, k: int) -> tuple:
    return tuple(labels[j] if j >= 0 else 0 for j in _cone_plan(n, k))


def _add(group: FiniteAbelianGroup, a: tuple, b: tuple) -> tuple:
    return tuple(group.add(x, y) for x, y in zip(a, b))


def _neg(group: FiniteAbelianGroup, a: tuple) -> tuple:
    return tuple(group.neg(x) for x in a)


# -- public cochain API -----------------------------------------------------


@dataclass(frozen=True)
class Cochain:
    """A ``degree``-cochain on ``Delta^dim`` with values in ``group``."""

    group: FiniteAbelianGroup
    dim: int
    degree: int
    labels: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        expected = comb(self.dim + 1, self.degree + 1)
        if len(self.labels) != expected:
            raise ValueError(f"{len(self.labels)} labels given, {expected} needed")
        if any(not 0 <= x < max(self.group.order, 1) for x in self.labels):
            raise ValueError("labels must be reduced element codes")

    @classmethod
    def zero(cls, group, dim, degree) -> "Cochain":
        return cls(group, dim, degree, (0,) * comb(dim + 1, degree + 1))

    @classmethod
    def from_mapping(cls, group, dim, degree, mapping: Mapping) -> "Cochain":
        """Build from ``{subset: element}``; missing subsets are labeled 0."""
        idx = subset_index(dim, degree + 1)
        labels = [0] * len(idx)
        for S, v in mapping.items():
            S = tuple(sorted(S))
            if S not in idx:
                raise KeyError(f"{S} is not a {degree}-face of Delta^{dim}")
            labels[idx[S]] = group.element(v)
        return cls(group, dim, degree, tuple(labels))

    def subsets(self):
        return subsets(self.dim, self.degree + 1)

    def __getitem__(self, S) -> int:
        S = tuple(sorted(S))
        if len(set(S)) != len(S):
            return 0
        return self.labels[subset_index(self.dim, self.degree + 1)[S]]

    def as_dict(self) -> dict:
        return dict(zip(self.subsets(), self.labels))

    def __add__(self, other: "Cochain") -> "Cochain":
        self._check_compatible(other)
        return Cochain(self.group, self.dim, self.degree, _add(self.group, self.labels, other.labels))

    def __neg__(self) -> "Cochain":
        return Cochain(self.group, self.dim, self.degree, _neg(self.group, self.labels))

    def __sub__(self, other: "Cochain") -> "Cochain":
        return self + (-other)

    def _check_compatible(self, other):
        if (self.group, self.dim, self.degree) != (other.group, other.dim, other.degree):
            raise ValueError("cochains live in different groups or shapes")

    def face(self, i: int) -> "Cochain":
        return em_operator(self, MonotoneMap.coface(self.dim, i))

    def degeneracy(self, i: int) -> "Cochain":
        return em_operator(self, MonotoneMap.codegeneracy(self.dim, i))


def is_cocycle(c: Cochain) -> bool:
    """Whether the coboundary of ``c`` vanishes on every face of ``Delta^dim``."""
    return not any(_coboundary(c.group, c.labels, c.dim, c.degree))


def em_operator(c: Cochain, f: MonotoneMap) -> Cochain:
    """Pull ``c`` back along ``f``; subsets on which ``f`` is not injective get 0."""
    if f.target_dim != c.dim:
        raise ValueError(f"map targets Delta^{f.target_dim}, cochain lives on Delta^{c.dim}")
    return Cochain(c.group, f.source_dim, c.degree, _pull(c.labels, c.dim, c.degree, f.values))


def coboundary_map(e: Cochain) -> Cochain:
    """``delta e``, a ``(degree+1)``-cocycle."""
    return Cochain(e.group, e.dim, e.degree + 1, _coboundary(e.group, e.labels, e.dim, e.degree))


def cone_lift(z: Cochain) -> Cochain:
    """Lift of a cocycle through ``delta`` by coning off vertex 0.

    ``(h z)(S) = z({0} + S)`` for ``0 not in S`` and ``0`` otherwise.  For a
    cocycle ``z`` of degree >= 1 this satisfies ``delta(h z) = z``, and ``h``
    commutes with every face except ``d_0`` and with every degeneracy.
    """
    if z.degree < 1:
        raise ValueError("cone lift needs a cochain of degree >= 1")
    return Cochain(z.group, z.dim, z.degree - 1, _cone(z.labels, z.dim, z.degree - 1))


def extend_free_labels(free, n: int, k: int, group: FiniteAbelianGroup) -> Cochain:
    """The unique ``k``-cocycle on ``Delta^n`` with the given labels on the
    subsets ``{0, a_1, .., a_k}``.

    ``free`` is either a mapping from those subsets to elements or a
    sequence ordered like :func:`free_subsets`.  Every other subset
    ``{a_0 < .. < a_k}`` gets ``sum_i (-1)^i z({0, a_0, .., a_i omitted, .., a_k})``.
    """
    fs = free_subsets(n, k)
    if isinstance(free, Mapping):
        vals = [group.element(free.get(S, 0)) for S in fs]
        unknown = set(map(lambda s: tuple(sorted(s)), free)) - set(fs)
        if unknown:
            raise KeyError(f"not free subsets: {sorted(unknown)}")
    else:
        vals = [group.element(v) for v in free]
        if len(vals) != len(fs):
            raise ValueError(f"{len(vals)} free labels given, {len(fs)} needed")
    return Cochain(group, n, k, _extend(group, vals, n, k))


def em_cardinality(group: FiniteAbelianGroup, k: int, n: int, space: str = K_SPACE) -> int:
    """``|K(pi,k)_n| = |pi|^C(n,k)`` and ``|E(pi,k)_n| = |pi|^C(n+1,k+1)``."""
    if space == K_SPACE:
        return group.order ** comb(n, k)
    if space == E_SPACE:
        return group.order ** comb(n + 1, k + 1)
    raise ValueError(f"unknown space {space!r}")


def count_cocycles(group: FiniteAbelianGroup, k: int, n: int) -> int:
    """``|Z^k(Delta^n; pi)|`` from the Smith form of the coboundary matrix.

    Over ``Z/q`` the kernel of an integer matrix with ``c`` columns, rank
    ``s`` and divisors ``d_i`` has ``q^(c-s) * prod gcd(d_i, q)`` elements.
    """
    from math import gcd

    A = coboundary_matrix(n, k)
    sf = smith_form(A)
    total = 1
    for q in group.invariant_factors:
        size = q ** (A.cols - sf.rank)
        for d in sf.divisors:
            size *= gcd(d, q)
        total *= size
    return total


def enumerate_cocycles(group: FiniteAbelianGroup, k: int, n: int) -> np.ndarray:
    """All of ``K(pi,k)_n`` as an array of label codes, via free labelings.

    Row ``r`` is the cocycle whose free labels are the base-``|pi|`` digits of
    ``r`` (same extension rule as :func:`extend_free_labels`).
    """
    fs = free_subsets(n, k)
    total_subsets = comb(n + 1, k + 1)
    order = group.order
    count = order ** len(fs)
    codes = np.arange(count, dtype=np.int64)
    free_codes = np.empty((count, len(fs)), dtype=np.int64)
    for j in range(len(fs)):
        codes, free_codes[:, j] = np.divmod(codes, order) if order > 1 else (codes, 0)
    ext = np.zeros((len(fs), total_subsets), dtype=np.int64)
    for col, t in enumerate(_extension_terms(n, k)):
        if isinstance(t, int):
            ext[t, col] = 1
        else:
            for s, j in t:
                ext[j, col] += s
    out = np.zeros((count, total_subsets), dtype=np.int64)
    scale = 1
    rest = free_codes
    for q in group.invariant_factors:
        comp, rest = rest % q, rest // q
        out += (comp @ ext % q) * scale
        scale *= q
    return out


def cochains_are_cocycles(group: FiniteAbelianGroup, k: int, n: int, labels: np.ndarray) -> np.ndarray:
    """Row-wise cocycle test for an array of label codes."""
    M = coboundary_matrix(n, k)
    delta = np.array(M.data, dtype=np.int64).reshape(M.rows, M.cols)
    ok = np.ones(labels.shape[0], dtype=bool)
    rest = labels
    for q in group.invariant_factors:
        comp, rest = rest % q, rest // q
        ok &= ~np.any(comp @ delta.T % q, axis=1)
    return ok


# -- the simplicial models --------------------------------------------------


class EMModel:
    """Simplicial model of ``K(pi, k)`` (cocycles) or ``E(pi, k)`` (cochains).

    Simplices are raw label tuples.  The model is also a simplicial group
    under labelwise addition.
    """

    def __init__(self, group: FiniteAbelianGroup, k: int, space: str = K_SPACE):
        if k < 0:
            raise ValueError("degree must be non-negative")
        if space not in (K_SPACE, E_SPACE):
            raise ValueError(f"unknown space {space!r}")
        self.group, self.k, self.space = group, k, space

    def __repr__(self):
        return f"EMModel({self.group}, {self.k}, {self.space!r})"

    @staticmethod
    def dim_of(x: tuple, k: int) -> int:
        n = k
        while comb(n + 1, k + 1) < len(x):
            n += 1
        return n

    def face(self, x: tuple, i: int) -> tuple:
        n = self.dim_of(x, self.k)
        return _pull(x, n, self.k, _face_values(n, i))

    def degeneracy(self, x: tuple, i: int) -> tuple:
        n = self.dim_of(x, self.k)
        return _pull(x, n, self.k, _degen_values(n, i))

    def face_n(self, x, n, i):
        return _pull(x, n, self.k, _face_values(n, i))

    def degeneracy_n(self, x, n, i):
        return _pull(x, n, self.k, _degen_values(n, i))

    def cardinality(self, n: int) -> int:
        return em_cardinality(self.group, self.k, n, self.space)

    def simplices(self, n: int) -> Iterator[tuple]:
        elems = self.group.elements()
        if self.space == E_SPACE:
            yield from product(elems, repeat=comb(n + 1, self.k + 1))
        else:
            for free in product(elems, repeat=comb(n, self.k)):
                yield _extend(self.group, free, n, self.k)

    def is_degenerate(self, x: tuple, n: int) -> bool:
        # x = s_i y forces y = d_i x
        return any(self.degeneracy_n(self.face_n(x, n, i), n - 1, i) == x for i in range(n))

    def nondegenerate(self, n: int) -> Iterator[tuple]:
        for x in self.simplices(n):
            if n == 0 or not self.is_degenerate(x, n):
                yield x

    # simplicial group structure
    def add(self, x, y):
        return _add(self.group, x, y)

    def neg(self, x):
        return _neg(self.group, x)

    def zero(self, n: int) -> tuple:
        return (0,) * comb(n + 1, self.k + 1)

    def cochain(self, x: tuple) -> Cochain:
        return Cochain(self.group, self.dim_of(x, self.k), self.k, x)


def build_em_skeleton(group: FiniteAbelianGroup, k: int, space: str = K_SPACE, up_to: int = 3,
                      budget: int | None = DEFAULT_BUDGET) -> FinSimplicialSet:
    """Materialize ``K(pi,k)`` or ``E(pi,k)`` through degree ``up_to``.

    Generator names are the raw label tuples; ``budget`` bounds the number of
    simplices enumerated per degree.
    """
    if k < 1:
        raise ValueError("Eilenberg-MacLane models are built for k >= 1 only")
    model = EMModel(group, k, space)
    if budget is not None:
        for n in range(up_to + 1):
            c = model.cardinality(n)
            if c > budget:
                raise BudgetExceeded(n, c, budget)
    return from_model(model, up_to, budget)


def cochain_of(S: FinSimplicialSet, n: int, i: int) -> Cochain:
    """The cochain naming generator ``(n, i)`` of a materialized EM set."""
    model = S.model
    if not isinstance(model, EMModel):
        raise TypeError("not an Eilenberg-MacLane skeleton")
    return Cochain(model.group, n, model.k, S.names[n][i])
