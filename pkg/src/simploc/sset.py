"""Finitely generated simplicial sets in Eilenberg-Zilber normal form.

Only nondegenerate simplices are stored.  Every simplex is addressed by a
:class:`SimplexRef`: a generator ``(gen_degree, index)`` together with a word
``s_{i_1} ... s_{i_r}`` of degeneracy operators in normal form
(``i_1 > ... > i_r``).  Face maps are resolved through the face table of the
generators using the simplicial identities.

Sets that are too large to write down by hand (Eilenberg-MacLane models,
products, pullbacks) are produced from a *model*: any object providing

``nondegenerate(n)``
    iterable over the nondegenerate ``n``-simplices, in a fixed order
``face(x, i)`` / ``degeneracy(x, i)``
    the simplicial operators on hashable simplex values

and optionally ``cardinality(n)`` (total number of ``n``-simplices) for the
size guard.  Models whose simplex values do not determine their degree also
provide ``face_n(x, n, i)`` and ``degeneracy_n(x, n, i)``.  :func:`from_model` materializes such a model through a given
degree.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field
from itertools import combinations, product as _cartesian
from math import comb
from typing import Hashable, Iterable, Iterator, NamedTuple, Sequence

DEFAULT_BUDGET = 10**6


class SimplicialError(ValueError):
    """Raised for malformed simplicial data."""


class BudgetExceeded(SimplicialError):
    """A construction would exceed the configured number of simplices."""

    def __init__(self, degree: int, count: int, budget: int):
        self.degree = degree
        self.count = count
        self.budget = budget
        super().__init__(
            f"degree {degree} needs {count} simplices, budget is {budget}"
        )


# -- degeneracy words -------------------------------------------------------

DegeneracyWord = tuple  # strictly decreasing tuple of ints; () is the identity


def normalize_word(word: Iterable[int]) -> DegeneracyWord:
    """Rewrite a composite ``s_{w[0]} s_{w[1]} ...`` into normal form.

    Uses ``s_i s_j = s_{j+1} s_i`` for ``i <= j`` until the indices are
    strictly decreasing.

    >>> normalize_word([1, 1])
    (2, 1)
    >>> normalize_word([0, 2])
    (3, 0)
    """
    w = list(word)
    if any(i < 0 for i in w):
        raise ValueError(f"negative degeneracy index in {w}")
    changed = True
    while changed:
        changed = False
        for a in range(len(w) - 1):
            if w[a] <= w[a + 1]:
                w[a], w[a + 1] = w[a + 1] + 1, w[a]
                changed = True
    return tuple(w)


class SimplexRef(NamedTuple):
    """A possibly degenerate simplex ``s_word(generator)``."""

    gen_degree: int
    index: int
    word: DegeneracyWord = ()

    @property
    def degree(self) -> int:
        return self.gen_degree + len(self.word)

    @property
    def is_degenerate(self) -> bool:
        return bool(self.word)

    @property
    def generator(self) -> "SimplexRef":
        return SimplexRef(self.gen_degree, self.index, ())


@dataclass(frozen=True)
class MonotoneMap:
    """A weakly increasing map ``[source_dim] -> [target_dim]``."""

    source_dim: int
    target_dim: int
    values: tuple[int, ...]

    def __post_init__(self):
        v = self.values
        if len(v) != self.source_dim + 1:
            raise ValueError("monotone map needs source_dim + 1 values")
        if any(a > b for a, b in zip(v, v[1:])):
            raise ValueError(f"values {v} are not weakly increasing")
        if v and (v[0] < 0 or v[-1] > self.target_dim):
            raise ValueError(f"values {v} out of range [0, {self.target_dim}]")

    @classmethod
    def identity(cls, n: int) -> "MonotoneMap":
        return cls(n, n, tuple(range(n + 1)))

    @classmethod
    def coface(cls, n: int, i: int) -> "MonotoneMap":
        """``[n-1] -> [n]`` skipping ``i``; pulls back along ``d_i``."""
        if not 0 <= i <= n:
            raise ValueError(f"coface index {i} out of range for n={n}")
        return cls(n - 1, n, tuple(j if j < i else j + 1 for j in range(n)))

    @classmethod
    def codegeneracy(cls, n: int, i: int) -> "MonotoneMap":
        """``[n+1] -> [n]`` hitting ``i`` twice; pulls back along ``s_i``."""
        if not 0 <= i <= n:
            raise ValueError(f"codegeneracy index {i} out of range for n={n}")
        return cls(n + 1, n, tuple(j if j <= i else j - 1 for j in range(n + 2)))

    def then(self, other: "MonotoneMap") -> "MonotoneMap":
        """Composite ``other o self``."""
        if other.source_dim != self.target_dim:
            raise ValueError("dimension mismatch in composition")
        return MonotoneMap(
            self.source_dim, other.target_dim, tuple(other.values[v] for v in self.values)
        )


# -- finite simplicial sets -------------------------------------------------


class Violation(NamedTuple):
    degree: int
    index: int
    i: int
    j: int


@dataclass(frozen=True, eq=False)
class FinSimplicialSet:
    """Nondegenerate generators and their faces, truncated at ``top_degree``.

    ``names[n]`` lists the degree-``n`` generators (any hashable values);
    ``faces[n][g]`` is the tuple ``(d_0 g, ..., d_n g)`` of :class:`SimplexRef`
    (empty for ``n = 0``).  ``model`` is the generating model, if any; it is
    what :meth:`locate` uses to find the normal form of a model simplex.
    """

    names: tuple[tuple[Hashable, ...], ...]
    faces: tuple[tuple[tuple[SimplexRef, ...], ...], ...]
    model: object = field(default=None, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)
    _index: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if len(self.names) != len(self.faces) or not self.names:
            raise SimplicialError("names and faces must cover degrees 0..top")
        for n, (gens, table) in enumerate(zip(self.names, self.faces)):
            if len(gens) != len(table):
                raise SimplicialError(f"degree {n}: {len(gens)} names, {len(table)} face rows")
            for g, row in enumerate(table):
                if len(row) != (n + 1 if n else 0):
                    raise SimplicialError(f"generator ({n},{g}) has {len(row)} faces")
                for i, ref in enumerate(row):
                    self._check_ref(ref, n - 1, where=f"d_{i} of ({n},{g})")

    def _check_ref(self, ref, degree, where=""):
        if not isinstance(ref, SimplexRef):
            raise SimplicialError(f"{where}: not a SimplexRef: {ref!r}")
        if ref.degree != degree:
            raise SimplicialError(f"{where}: {ref} has degree {ref.degree}, expected {degree}")
        if not 0 <= ref.gen_degree < len(self.names) or not (
            0 <= ref.index < len(self.names[ref.gen_degree])
        ):
            raise SimplicialError(f"{where}: unresolved generator {ref[:2]}")
        w = ref.word
        if any(a <= b for a, b in zip(w, w[1:])) or (w and w[-1] > ref.gen_degree):
            raise SimplicialError(f"{where}: word {w} not in normal form")

    # basic queries

    @property
    def top_degree(self) -> int:
        return len(self.names) - 1

    def count(self, n: int) -> int:
        """Number of nondegenerate ``n``-simplices."""
        return len(self.names[n]) if 0 <= n <= self.top_degree else 0

    def counts(self) -> tuple[int, ...]:
        return tuple(len(g) for g in self.names)

    @property
    def dimension(self) -> int:
        """Highest degree carrying a generator (-1 if empty)."""
        return max((n for n, g in enumerate(self.names) if g), default=-1)

    def total_count(self, n: int) -> int:
        """Number of all ``n``-simplices, degenerate ones included."""
        return sum(len(self.names[m]) * comb(n, m) for m in range(min(n, self.top_degree) + 1))

    def gen(self, n: int, i: int) -> SimplexRef:
        return SimplexRef(n, i, ())

    def generators(self, n: int) -> list[SimplexRef]:
        return [SimplexRef(n, i, ()) for i in range(self.count(n))]

    def index_of(self, n: int, name: Hashable) -> int:
        table = self._index.get(n)
        if table is None:
            with self._lock:
                table = self._index.get(n)
                if table is None:
                    table = {nm: i for i, nm in enumerate(self.names[n])}
                    self._index[n] = table
        return table[name]

    def name(self, x: SimplexRef) -> Hashable:
        return self.names[x.gen_degree][x.index]

    # simplicial operators

    def face(self, x: SimplexRef, i: int) -> SimplexRef:
        """``d_i x`` in normal form."""
        n = x.degree
        if n < 1 or not 0 <= i <= n:
            raise IndexError(f"face d_{i} undefined on a {n}-simplex")
        prefix: list[int] = []
        word = x.word
        for pos, j in enumerate(word):
            if i < j:
                prefix.append(j - 1)
            elif i == j or i == j + 1:
                rest = prefix + list(word[pos + 1:])
                return SimplexRef(x.gen_degree, x.index, normalize_word(rest))
            else:
                prefix.append(j)
                i -= 1
        f = self.faces[x.gen_degree][x.index][i]
        if not prefix:
            return f
        return SimplexRef(f.gen_degree, f.index, normalize_word(prefix + list(f.word)))

    def degeneracy(self, x: SimplexRef, i: int) -> SimplexRef:
        """``s_i x`` in normal form."""
        if not 0 <= i <= x.degree:
            raise IndexError(f"degeneracy s_{i} undefined on a {x.degree}-simplex")
        return SimplexRef(x.gen_degree, x.index, normalize_word((i,) + tuple(x.word)))

    def restrict(self, x: SimplexRef, vertices: Sequence[int]) -> SimplexRef:
        """Restriction of ``x`` to the face spanned by ``vertices``."""
        keep = set(vertices)
        for v in range(x.degree, -1, -1):
            if v not in keep:
                x = self.face(x, v)
        return x

    def simplices(self, n: int) -> Iterator[SimplexRef]:
        """All ``n``-simplices, nondegenerate ones first."""
        for m in range(min(n, self.top_degree), -1, -1):
            words = [tuple(sorted(c, reverse=True)) for c in combinations(range(n), n - m)]
            for g in range(len(self.names[m])):
                for w in words:
                    yield SimplexRef(m, g, w)

    def locate(self, simplex: Hashable, degree: int) -> SimplexRef:
        """Normal form of a model simplex (requires ``model``)."""
        if self.model is None:
            raise SimplicialError("set has no generating model")
        core, m, word = eilenberg_zilber(self.model, simplex, degree)
        try:
            return SimplexRef(m, self.index_of(m, core), word)
        except (KeyError, IndexError):
            raise SimplicialError(f"simplex {simplex!r} is not in this set") from None


def _face_n(model, x, n, i):
    f = getattr(model, "face_n", None)
    return f(x, n, i) if f else model.face(x, i)


def _degeneracy_n(model, x, n, i):
    f = getattr(model, "degeneracy_n", None)
    return f(x, n, i) if f else model.degeneracy(x, i)


def eilenberg_zilber(model, x, n: int):
    """Split a model simplex as ``s_word(core)`` with ``core`` nondegenerate.

    Returns ``(core, core_degree, word)``.
    """
    word = []
    while n > 0:
        for i in range(n):
            y = _face_n(model, x, n, i)
            if _degeneracy_n(model, y, n - 1, i) == x:
                word.append(i)
                x = y
                n -= 1
                break
        else:
            break
    return x, n, normalize_word(word)


def is_degenerate(model, x, n: int) -> bool:
    return any(_degeneracy_n(model, _face_n(model, x, n, i), n - 1, i) == x for i in range(n))


def from_model(model, up_to: int, budget: int | None = DEFAULT_BUDGET) -> FinSimplicialSet:
    """Materialize a simplicial model through degree ``up_to``."""
    names: list[tuple] = []
    faces: list[tuple] = []
    index: list[dict] = []
    for n in range(up_to + 1):
        if budget is not None and hasattr(model, "cardinality"):
            total = model.cardinality(n)
            if total > budget:
                raise BudgetExceeded(n, total, budget)
        gens = tuple(model.nondegenerate(n))
        if budget is not None and len(gens) > budget:
            raise BudgetExceeded(n, len(gens), budget)
        index.append({g: i for i, g in enumerate(gens)})
        rows = []
        for x in gens:
            row = []
            for i in range(n + 1 if n else 0):
                core, m, word = eilenberg_zilber(model, _face_n(model, x, n, i), n - 1)
                try:
                    row.append(SimplexRef(m, index[m][core], word))
                except KeyError:
                    raise SimplicialError(
                        f"d_{i} of a degree-{n} simplex reduces to an unlisted {m}-simplex"
                    ) from None
            rows.append(tuple(row))
        names.append(gens)
        faces.append(tuple(rows))
    S = FinSimplicialSet(tuple(names), tuple(faces), model=model)
    S._index.update(dict(enumerate(index)))
    return S


class _SetModel:
    """A finite simplicial set viewed as a model on :class:`SimplexRef` values."""

    def __init__(self, S: FinSimplicialSet):
        self.S = S

    def face(self, x, i):
        return self.S.face(x, i)

    def degeneracy(self, x, i):
        return self.S.degeneracy(x, i)

    def nondegenerate(self, n):
        return self.S.generators(n)

    def cardinality(self, n):
        return self.S.total_count(n)


# -- checks and constructions -----------------------------------------------


def check_simplicial_identities(S: FinSimplicialSet) -> list[Violation]:
    """All ``(degree, index, i, j)`` with ``d_i d_j g != d_{j-1} d_i g``, ``i < j``."""
    bad = []
    for n in range(2, S.top_degree + 1):
        for g in range(S.count(n)):
            x = SimplexRef(n, g, ())
            fs = [S.face(x, i) for i in range(n + 1)]
            for j in range(1, n + 1):
                for i in range(j):
                    if S.face(fs[j], i) != S.face(fs[i], j - 1):
                        bad.append(Violation(n, g, i, j))
    return bad


def skeleton(S: FinSimplicialSet, k: int) -> FinSimplicialSet:
    """The ``k``-skeleton; ``S`` itself when ``k >= top_degree``."""
    if k < 0:
        raise ValueError("skeleton degree must be non-negative")
    if k >= S.top_degree:
        return S
    return FinSimplicialSet(S.names[: k + 1], S.faces[: k + 1], model=S.model)


def pad(S: FinSimplicialSet, top: int) -> FinSimplicialSet:
    """Raise the truncation of a finite set to ``top`` (no new generators)."""
    if top <= S.top_degree:
        return S
    extra = top - S.top_degree
    return FinSimplicialSet(S.names + ((),) * extra, S.faces + ((),) * extra, model=S.model)


def subcomplex(S: FinSimplicialSet, keep: dict[int, Sequence[int]]) -> tuple[FinSimplicialSet, dict]:
    """Keep only the listed generators in the given degrees (others untouched).

    Returns the new set and the map ``(degree, old index) -> new index``.
    Faces of kept generators must land on kept generators.
    """
    remap: dict[tuple[int, int], int] = {}
    names, faces = [], []
    for n in range(S.top_degree + 1):
        chosen = sorted(keep[n]) if n in keep else range(S.count(n))
        for new, old in enumerate(chosen):
            remap[(n, old)] = new
        names.append(tuple(S.names[n][g] for g in chosen))
        rows = []
        for g in chosen:
            row = []
            for ref in S.faces[n][g]:
                key = (ref.gen_degree, ref.index)
                if key not in remap:
                    raise SimplicialError(f"face {ref} of kept generator ({n},{g}) was removed")
                row.append(SimplexRef(ref.gen_degree, remap[key], ref.word))
            rows.append(tuple(row))
        faces.append(tuple(rows))
    return FinSimplicialSet(tuple(names), tuple(faces)), remap


class ProductModel:
    """Cartesian product of two finite simplicial sets."""

    def __init__(self, A: FinSimplicialSet, B: FinSimplicialSet):
        self.A, self.B = A, B

    def face(self, x, i):
        return (self.A.face(x[0], i), self.B.face(x[1], i))

    def degeneracy(self, x, i):
        return (self.A.degeneracy(x[0], i), self.B.degeneracy(x[1], i))

    def cardinality(self, n):
        return self.A.total_count(n) * self.B.total_count(n)

    def nondegenerate(self, n):
        # nondegenerate iff the two degeneracy words share no index
        bs = list(self.B.simplices(n))
        for a in self.A.simplices(n):
            wa = set(a.word)
            for b in bs:
                if wa.isdisjoint(b.word):
                    yield (a, b)


def product(A: FinSimplicialSet, B: FinSimplicialSet, up_to: int,
            budget: int | None = DEFAULT_BUDGET) -> FinSimplicialSet:
    """``A x B`` through degree ``up_to``.

    A set without a generating model is taken to be finite, so it may be
    used above its truncation degree (it only has degenerate simplices
    there).  Model-generated sets are truncations and may not.
    """
    limits = [S.top_degree for S in (A, B) if S.model is not None]
    if limits and up_to > min(limits):
        raise ValueError(
            f"product through degree {up_to} exceeds the truncation degree {min(limits)}"
        )
    return from_model(ProductModel(A, B), up_to, budget)


# -- simplicial maps --------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SimplicialMap:
    """A map given by the image of every generator of ``source``."""

    source: FinSimplicialSet
    target: FinSimplicialSet
    images: tuple[tuple[SimplexRef, ...], ...]

    def __post_init__(self):
        if len(self.images) != self.source.top_degree + 1:
            raise SimplicialError("images must cover every source degree")
        for n, row in enumerate(self.images):
            if len(row) != self.source.count(n):
                raise SimplicialError(f"degree {n}: wrong number of images")
            for ref in row:
                if ref.degree != n:
                    raise SimplicialError(f"image {ref} has degree {ref.degree}, expected {n}")

    def image(self, x: SimplexRef) -> SimplexRef:
        f = self.images[x.gen_degree][x.index]
        if not x.word:
            return f
        return SimplexRef(f.gen_degree, f.index, normalize_word(tuple(x.word) + tuple(f.word)))

    def violations(self) -> list[tuple[int, int, int]]:
        """``(degree, index, i)`` where ``d_i f(g) != f(d_i g)``."""
        bad = []
        S, T = self.source, self.target
        for n in range(1, S.top_degree + 1):
            for g in range(S.count(n)):
                x = SimplexRef(n, g, ())
                fx = self.image(x)
                for i in range(n + 1):
                    if T.face(fx, i) != self.image(S.face(x, i)):
                        bad.append((n, g, i))
        return bad

    @classmethod
    def constant(cls, source: FinSimplicialSet, target: FinSimplicialSet, vertex: int = 0):
        """The map collapsing everything onto a vertex of ``target``."""
        rows = []
        for n in range(source.top_degree + 1):
            ref = SimplexRef(0, vertex, tuple(range(n - 1, -1, -1)))
            rows.append(tuple(ref for _ in range(source.count(n))))
        return cls(source, target, tuple(rows))

    @classmethod
    def identity(cls, S: FinSimplicialSet):
        return cls(S, S, tuple(tuple(S.generators(n)) for n in range(S.top_degree + 1)))


# -- standard sets ----------------------------------------------------------


def from_simplicial_complex(facets: Iterable[Sequence[int]], top_degree: int | None = None,
                            ) -> FinSimplicialSet:
    """Ordered simplicial complex generated by ``facets`` (vertex labels sortable)."""
    simplices: set[tuple] = set()
    for f in facets:
        f = tuple(sorted(set(f)))
        for r in range(1, len(f) + 1):
            simplices.update(combinations(f, r))
    dim = max((len(s) - 1 for s in simplices), default=0)
    top = dim if top_degree is None else top_degree
    if top < dim:
        raise ValueError("top_degree below the complex dimension")
    by_deg = [sorted(s for s in simplices if len(s) == n + 1) for n in range(top + 1)]
    idx = [{s: i for i, s in enumerate(ss)} for ss in by_deg]
    faces = []
    for n, ss in enumerate(by_deg):
        rows = []
        for s in ss:
            if n == 0:
                rows.append(())
                continue
            rows.append(tuple(
                SimplexRef(n - 1, idx[n - 1][s[:i] + s[i + 1:]], ()) for i in range(n + 1)
            ))
        faces.append(tuple(rows))
    return FinSimplicialSet(tuple(tuple(ss) for ss in by_deg), tuple(faces))


def standard_simplex(n: int, top_degree: int | None = None) -> FinSimplicialSet:
    """``Delta^n`` with generators the vertex tuples ``(a_0 < ... < a_k)``."""
    return from_simplicial_complex([range(n + 1)], top_degree)


def boundary_simplex(n: int, top_degree: int | None = None) -> FinSimplicialSet:
    """``boundary(Delta^n)``, an ``(n-1)``-sphere."""
    facets = [tuple(j for j in range(n + 1) if j != i) for i in range(n + 1)]
    return from_simplicial_complex(facets, top_degree)


def point(top_degree: int = 0) -> FinSimplicialSet:
    names = (("*",),) + ((),) * top_degree
    faces = (((),),) + ((),) * top_degree
    return FinSimplicialSet(names, faces)


def sphere(n: int, top_degree: int | None = None) -> FinSimplicialSet:
    """``Delta^n / boundary``: one vertex and one ``n``-simplex."""
    if n < 1:
        raise ValueError("sphere dimension must be >= 1")
    top = n if top_degree is None else top_degree
    names = [("*",)] + [() for _ in range(top)]
    faces = [((),)] + [() for _ in range(top)]
    names[n] = ("sigma",)
    base = SimplexRef(0, 0, tuple(range(n - 2, -1, -1)))
    faces[n] = (tuple(base for _ in range(n + 1)),)
    return FinSimplicialSet(tuple(names), tuple(faces))


def delta_action(word: Sequence[int], simplex: Sequence[int]) -> tuple[int, ...]:
    """Apply ``s_{word[0]} ... s_{word[-1]}`` to a simplex of ``Delta^m``.

    Simplices of ``Delta^m`` are weakly increasing vertex sequences; ``s_i``
    repeats the ``i``-th entry.
    """
    x = list(simplex)
    for i in reversed(word):
        x.insert(i, x[i])
    return tuple(x)


def all_delta_simplices(m: int, n: int) -> Iterator[tuple[int, ...]]:
    """Every ``n``-simplex of ``Delta^m`` (weakly increasing sequences)."""
    for c in _cartesian(range(m + 1), repeat=n + 1):
        if all(a <= b for a, b in zip(c, c[1:])):
            yield c
