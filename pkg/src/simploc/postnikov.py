"""Postnikov stages by pullback, the Hurewicz bootstrap, and p-local pruning.

The pipeline turns a finite simply connected ``X`` with finite homology into
a finite ``Y`` with a map ``X -> Y`` that is an isomorphism on
``Z_(p)``-homology:

1. ``P_2 = K(H_2 X, 2)`` with ``phi_2`` from a 2-cocycle realizing
   ``H_2 X -> pi_2`` (Hurewicz).
2. ``P_k`` is the pullback of ``delta_* : E(pi_k, k) -> K(pi_k, k+1)`` along
   a supplied k-invariant ``P_{k-1} -> K(pi_k, k+1)``; ``phi_k`` lifts
   ``phi_{k-1}`` through a cochain solving ``delta c = phi^* kinv``.
3. ``W = sk_{d+2} P_{d+1}`` and ``Y`` keeps only a set ``T`` of
   ``(d+2)``-generators whose boundaries form a ``Z_(p)``-basis of the
   boundaries in degree ``d+1``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .em import K_SPACE, EMModel, _cone, build_em_skeleton, subsets
from .groups import FiniteAbelianGroup
from .homology import (
    HomologyProfile,
    IsoReport,
    homology_iso_report,
    invariants,
    local_homology,
    normalized_chain_complex,
)
from .linalg import (
    IntMatrix,
    kernel_basis,
    require_prime,
    smith_form,
    solve_columns,
    solve_mod,
    spans_everything,
)
from .sset import (
    DEFAULT_BUDGET,
    FinSimplicialSet,
    SimplexRef,
    SimplicialError,
    SimplicialMap,
    check_simplicial_identities,
    from_model,
    is_degenerate,
    pad,
    point,
    skeleton,
    subcomplex,
)


class PipelineError(ValueError):
    """An input violates a hypothesis of the construction."""


class MissingKInvariants(PipelineError):
    pass


# -- cocycle maps -----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CocycleMap:
    """A simplicial map ``P -> K(group, degree)``, stored as a normalized cocycle.

    ``values[i]`` is the label of the ``i``-th degree-``degree`` generator.
    An ``n``-simplex ``x`` maps to the cochain on ``Delta^n`` whose label on
    ``S`` is the value of ``x`` restricted to ``S`` (0 when degenerate).
    """

    source: FinSimplicialSet
    group: FiniteAbelianGroup
    degree: int
    values: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.group.element(v) for v in self.values))
        if len(self.values) != self.source.count(self.degree):
            raise ValueError(
                f"{len(self.values)} values for {self.source.count(self.degree)} generators"
            )

    @classmethod
    def zero(cls, source, group, degree) -> "CocycleMap":
        return cls(source, group, degree, (0,) * source.count(degree))

    @classmethod
    def from_assignment(cls, source: FinSimplicialSet, group: FiniteAbelianGroup, degree: int,
                        assignment: Mapping) -> "CocycleMap":
        """From ``{SimplexRef or (n, i): label tuple}`` on generators.

        The assignment must be simplicial: the label tuple of every listed
        generator must agree with the cocycle read off in degree ``degree``.
        """
        vals = [0] * source.count(degree)
        norm = {}
        for key, labels in assignment.items():
            ref = key if isinstance(key, SimplexRef) else SimplexRef(key[0], key[1], ())
            labels = tuple(getattr(labels, "labels", labels))
            norm[ref] = labels
            if ref.gen_degree == degree:
                if len(labels) != 1:
                    raise ValueError(f"{ref}: expected a single label in degree {degree}")
                vals[ref.index] = labels[0]
        out = cls(source, group, degree, tuple(vals))
        for ref, labels in norm.items():
            if tuple(group.element(v) for v in labels) != out.image(ref):
                raise SimplicialError(f"assignment on {ref} is not simplicial")
        return out

    @property
    def k(self) -> int:
        return self.degree - 1

    def value(self, x: SimplexRef) -> int:
        if x.degree != self.degree:
            raise ValueError("value is defined on simplices of the cocycle degree")
        return 0 if x.word else self.values[x.index]

    def image(self, x: SimplexRef) -> tuple[int, ...]:
        n = x.degree
        return tuple(self.value(self.source.restrict(x, S)) for S in subsets(n, self.degree + 1))

    def cocycle_violations(self) -> list[int]:
        """Indices of ``(degree+1)``-generators on which ``delta`` is nonzero."""
        S, g = self.source, self.group
        bad = []
        for y in range(S.count(self.degree + 1)):
            row = S.faces[self.degree + 1][y]
            terms = [(-1) ** i for i in range(len(row))]
            if g.lincomb(terms, [self.value(f) for f in row]):
                bad.append(y)
        return bad

    def is_cocycle(self) -> bool:
        return not self.cocycle_violations()

    def pullback(self, f: SimplicialMap) -> "CocycleMap":
        """``f^*`` of this cocycle, on ``f.source``."""
        vals = tuple(self.value(f.image(x)) for x in f.source.generators(self.degree))
        return CocycleMap(f.source, self.group, self.degree, vals)

    def to_simplicial_map(self, target: FinSimplicialSet) -> SimplicialMap:
        """The map into a materialized ``K(group, degree)`` skeleton."""
        rows = []
        for n in range(self.source.top_degree + 1):
            rows.append(tuple(target.locate(self.image(x), n) for x in self.source.generators(n)))
        return SimplicialMap(self.source, target, tuple(rows))


KInvariantMap = CocycleMap


# -- stages -----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PostnikovStage:
    space: FinSimplicialSet
    k: int
    group: FiniteAbelianGroup
    previous: FinSimplicialSet | None = None
    projection: SimplicialMap | None = None

    def counts(self) -> tuple[int, ...]:
        return self.space.counts()

    def total_counts(self) -> tuple[int, ...]:
        return tuple(self.space.total_count(n) for n in range(self.space.top_degree + 1))


class PullbackModel:
    """Pairs ``(b, e)`` with ``b`` in ``P_prev`` and ``delta e = kinv(b)``."""

    def __init__(self, kinv: CocycleMap):
        self.P = kinv.source
        self.kinv = kinv
        self.E = EMModel(kinv.group, kinv.k, "E")
        self.fiber = EMModel(kinv.group, kinv.k, K_SPACE)

    def face_n(self, x, n, i):
        return (self.P.face(x[0], i), self.E.face_n(x[1], n, i))

    def degeneracy_n(self, x, n, i):
        return (self.P.degeneracy(x[0], i), self.E.degeneracy_n(x[1], n, i))

    def cardinality(self, n):
        return self.P.total_count(n) * self.fiber.cardinality(n)

    def simplices(self, n):
        g, k = self.kinv.group, self.kinv.k
        fiber = list(self.fiber.simplices(n))
        for b in self.P.simplices(n):
            base = _cone(self.kinv.image(b), n, k)
            for c in fiber:
                yield (b, tuple(g.add(x, y) for x, y in zip(base, c)))

    def nondegenerate(self, n):
        for x in self.simplices(n):
            if not is_degenerate(self, x, n):
                yield x


def pullback_stage(kinv: CocycleMap, up_to: int | None = None,
                   budget: int | None = DEFAULT_BUDGET, verify: bool = True) -> PostnikovStage:
    """``P_k = P_prev x_{K(pi,k+1)} E(pi,k)`` through degree ``up_to``.

    ``kinv`` lives on ``P_prev`` with values in ``pi``, degree ``k+1``.
    """
    P = kinv.source
    up_to = P.top_degree if up_to is None else up_to
    if up_to > P.top_degree:
        raise ValueError(f"previous stage is only known through degree {P.top_degree}")
    if kinv.degree < 2:
        raise ValueError("k-invariants have degree >= 2")
    if verify and not kinv.is_cocycle():
        raise SimplicialError("k-invariant is not a cocycle, so it is not a simplicial map")
    S = from_model(PullbackModel(kinv), up_to, budget)
    proj = SimplicialMap(S, P, tuple(
        tuple(S.names[n][i][0] for i in range(S.count(n))) for n in range(up_to + 1)
    ))
    return PostnikovStage(S, kinv.k, kinv.group, P, proj)


# -- Hurewicz stage ---------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Stage2:
    stage: PostnikovStage
    pi2: FiniteAbelianGroup
    cocycle: CocycleMap
    phi: SimplicialMap


def _hurewicz_cocycle(X: FinSimplicialSet) -> tuple[FiniteAbelianGroup, tuple[int, ...]]:
    """``pi_2 = H_2 X`` and a 2-cocycle whose restriction to cycles is the quotient map."""
    C = normalized_chain_complex(X)
    d2, d3 = C.boundary(2), C.boundary(3)
    s2 = smith_form(d2, transforms=True)
    r2 = s2.rank
    rows = (s2.Vinv @ d3).data[r2:]
    a = C.rank(2) - r2
    W = IntMatrix(rows, a, d3.cols)
    sw = smith_form(W, transforms=True)
    if sw.rank < a:
        raise PipelineError("H_2 is infinite")
    keep = [i for i, dv in enumerate(sw.divisors) if dv > 1]
    group = FiniteAbelianGroup(tuple(sw.divisors[i] for i in keep))
    proj = (sw.U @ IntMatrix(s2.Vinv.data[r2:], a, C.rank(2))) if a else IntMatrix.zeros(0, C.rank(2))
    values = []
    for g in range(C.rank(2)):
        col = [proj.data[i][g] for i in keep]
        values.append(group.element(col) if group.invariant_factors else 0)
    return group, tuple(values)


def check_simply_connected_homology(X: FinSimplicialSet) -> HomologyProfile:
    """Profile of ``X`` after checking ``H_0 = Z`` and ``H_1 = 0``.

    These are necessary conditions only; simple connectivity itself is the
    caller's assertion.
    """
    prof = HomologyProfile.of(pad(X, max(X.dimension, 1) + 1), max(X.dimension, 1))
    if str(prof.groups[0]) != "Z":
        raise PipelineError(f"X is not connected: H_0 = {prof.groups[0]}")
    if not prof.groups[1].is_trivial:
        raise PipelineError(f"H_1 = {prof.groups[1]} is nonzero, so X is not simply connected")
    return prof


def hurewicz_stage2(X: FinSimplicialSet, up_to: int | None = None,
                    budget: int | None = DEFAULT_BUDGET) -> Stage2:
    """``P_2 = K(H_2 X, 2)`` through ``up_to`` (default ``dim X + 2``) and ``phi_2``."""
    check_simply_connected_homology(X)
    top = X.dimension + 2 if up_to is None else up_to
    Xp = pad(X, max(top, 3))
    group, values = _hurewicz_cocycle(Xp)
    Xt = pad(X, top) if top >= X.top_degree else skeleton(X, top)
    if group.is_trivial:
        P = point(top)
        phi = SimplicialMap.constant(Xt, P)
        z = CocycleMap.zero(Xt, group, 2)
    else:
        P = build_em_skeleton(group, 2, K_SPACE, top, budget)
        z = CocycleMap(Xt, group, 2, values[: Xt.count(2)])
        phi = z.to_simplicial_map(P)
    return Stage2(PostnikovStage(P, 2, group), group, z, phi)


# -- lifting phi through a stage --------------------------------------------


def lift_map(phi: SimplicialMap, stage: PostnikovStage, kinv: CocycleMap) -> SimplicialMap:
    """Lift ``phi : X -> P_prev`` to ``X -> P_k``.

    Solves ``delta c = phi^* kinv`` for a normalized cochain ``c`` on ``X``
    (componentwise modulo the invariant factors) and sends ``x`` to
    ``(phi(x), c restricted to x)``.
    """
    X = phi.source
    w = kinv.pullback(phi)
    q, k, g = kinv.degree, kinv.k, kinv.group
    C = normalized_chain_complex(pad(X, q))
    A = C.boundary(q).T  # delta on C^k
    comps = []
    for j, m in enumerate(g.invariant_factors):
        rhs = [g.vector(v)[j] for v in w.values]
        sol = solve_mod(A, rhs, m)
        if sol is None:
            raise PipelineError(
                f"the k-invariant does not pull back to a coboundary on X (stage {k})"
            )
        comps.append(sol)
    c = [g.element(tuple(col[i] for col in comps)) for i in range(X.count(k))] if comps else \
        [0] * X.count(k)
    lift_c = CocycleMap(X, g, k, tuple(c)) if k >= 1 else None
    S = stage.space
    rows = []
    for n in range(X.top_degree + 1):
        row = []
        for x in X.generators(n):
            e = lift_c.image(x) if lift_c else ()
            row.append(S.locate((phi.image(x), e), n))
        rows.append(tuple(row))
    return SimplicialMap(X, S, tuple(rows))


def verify_homology_iso(f: SimplicialMap, through: int, p: int | None = None) -> IsoReport:
    """``H_n(f)`` iso for ``n <= through`` over ``Z`` or ``Z_(p)``.

    Finite sources are padded with empty degrees so that ``through`` may
    exceed their dimension.
    """
    src = f.source
    if src.model is None and through >= src.top_degree:
        src = pad(src, through + 1)
        f = SimplicialMap(src, f.target, f.images + ((),) * (src.top_degree + 1 - len(f.images)))
    return homology_iso_report(f, through, p)


# -- unit-column selection and pruning -----------------------------------------


def select_unit_columns(A: Sequence[Sequence], p: int) -> list[int]:
    """Columns whose span is everything over ``Z_(p)``, chosen greedily.

    ``A`` is a matrix (rows of integers or Fractions with p-prime
    denominators) whose columns generate ``Z_(p)^rows``.  Each round picks
    the lowest-index column with a p-unit entry, then passes to the
    quotient by that column.  Raises ``ArithmeticError`` if no column has a
    unit entry while rows remain (the columns do not generate).
    """
    require_prime(p)
    rows = [[Fraction(v) for v in r] for r in A]
    ncols = len(rows[0]) if rows else 0
    chosen: list[int] = []
    live = list(range(ncols))

    def unit(x: Fraction) -> bool:
        return x != 0 and x.numerator % p != 0

    while rows:
        pick = None
        for j in live:
            r = next((i for i, row in enumerate(rows) if unit(row[j])), None)
            if r is not None:
                pick = (j, r)
                break
        if pick is None:
            raise ArithmeticError("no column has a p-unit entry; columns do not generate")
        j, r = pick
        chosen.append(j)
        live.remove(j)
        piv = rows[r]
        rest = []
        for i, row in enumerate(rows):
            if i == r:
                continue
            f = row[j] / piv[j]
            rest.append([x - f * y for x, y in zip(row, piv)])
        rows = rest
    return chosen


@dataclass(frozen=True)
class Selection:
    degree: int
    generators: tuple[int, ...]  # in selection order
    cycle_rank: int
    coordinates: IntMatrix  # boundaries of all (d+2)-generators in the cycle basis


def _cycle_coordinates(W: FinSimplicialSet, d: int, p: int) -> IntMatrix:
    """Boundaries of the ``(d+2)``-generators in an integral basis of ``Z_{d+1}``.

    The basis is saturated, so coordinates are integral; ``p`` only feeds the
    denominator assertion of the solver.
    """
    C = normalized_chain_complex(W)
    B = kernel_basis(C.boundary(d + 1))
    D = C.boundary(d + 2)
    if B.cols == 0:
        return IntMatrix.zeros(0, D.cols)
    cols = solve_columns(B, D, p)
    if any(v.denominator != 1 for c in cols for v in c):
        raise ArithmeticError("boundary coordinates in the cycle basis are not integral")
    return IntMatrix.from_columns([[int(v) for v in c] for c in cols], B.cols)


def _selection(W: FinSimplicialSet, d: int, p: int) -> Selection:
    require_prime(p)
    if W.top_degree < d + 1:
        raise ValueError(f"set must be known through degree {d + 1}")
    C = normalized_chain_complex(W)
    h = local_homology(C, d + 1, p)
    if not h.is_trivial:
        raise PipelineError(
            f"H_{d + 1}(W; Z_({p})) = {h} is nonzero; boundaries do not fill the cycles"
        )
    A = _cycle_coordinates(W, d, p)
    chosen = select_unit_columns(A.data, p) if A.rows else []
    return Selection(d + 2, tuple(chosen), A.rows, A)


def select_basis_simplices(W: FinSimplicialSet, d: int, p: int) -> list[int]:
    """Indices of ``(d+2)``-generators whose boundaries are a ``Z_(p)``-basis of ``Z_{d+1}``."""
    return sorted(_selection(W, d, p).generators)


@dataclass(frozen=True, eq=False)
class PrunedSet:
    Y: FinSimplicialSet
    T: tuple[int, ...]
    p: int
    d: int
    source: FinSimplicialSet

    def counts(self) -> tuple[int, ...]:
        return self.Y.counts()


def boundary_basis_check(Y: FinSimplicialSet, d: int, p: int) -> tuple[bool, bool]:
    """(independent, spanning) over ``Z_(p)`` for the boundaries of the top generators."""
    D = normalized_chain_complex(Y).boundary(d + 2)
    independent = smith_form(D).rank == D.cols
    A = _cycle_coordinates(Y, d, p)
    return independent, A.rows == 0 or spans_everything(A, p)


def prune(W: FinSimplicialSet, d: int, p: int, verify: bool = True) -> PrunedSet:
    """Keep degrees ``<= d+1`` of ``W`` and only the selected ``(d+2)``-generators."""
    W2 = skeleton(W, d + 2) if W.top_degree > d + 2 else pad(W, d + 2)
    T = select_basis_simplices(W2, d, p)
    Y, _ = subcomplex(W2, {d + 2: T})
    if verify:
        C = normalized_chain_complex(Y)
        for n in (d + 1, d + 2):
            h = local_homology(C, n, p)
            if not h.is_trivial:
                raise PipelineError(f"pruning left H_{n}(Y; Z_({p})) = {h}")
        ind, span = boundary_basis_check(Y, d, p)
        if not (ind and span):
            raise PipelineError("selected boundaries are not a Z_(p)-basis")
    return PrunedSet(Y, tuple(T), p, d, W2)


# -- the pipeline -------------------------------------------------------------


@dataclass
class Verdict:
    step: str
    status: str  # pass / fail / skipped
    detail: str = ""


@dataclass
class StageSummary:
    k: int
    group: FiniteAbelianGroup
    counts: tuple[int, ...]
    total_counts: tuple[int, ...]
    size_bound: int | None = None


@dataclass
class PipelineResult:
    p: int
    d: int
    d_effective: int
    profile: HomologyProfile
    pruned: PrunedSet
    phi: SimplicialMap
    iso: IsoReport | None
    stages: list[StageSummary] = field(default_factory=list)
    verdicts: list[Verdict] = field(default_factory=list)
    bootstrap: bool = False

    @property
    def Y(self) -> FinSimplicialSet:
        return self.pruned.Y

    @property
    def ok(self) -> bool:
        return all(v.status != "fail" for v in self.verdicts)


def _compose(f: SimplicialMap, g: SimplicialMap) -> SimplicialMap:
    rows = tuple(tuple(g.image(f.images[n][i]) for i in range(f.source.count(n)))
                 for n in range(f.source.top_degree + 1))
    return SimplicialMap(f.source, g.target, rows)


def _into_pruned(phi: SimplicialMap, pruned: PrunedSet) -> SimplicialMap:
    """Re-target ``phi`` at ``Y``; images must avoid removed top generators."""
    Y = pruned.Y
    top = pruned.d + 2
    keep = {old: new for new, old in enumerate(pruned.T)}
    rows = []
    for n, row in enumerate(phi.images):
        new_row = []
        for ref in row:
            if ref.gen_degree == top:
                if ref.index not in keep:
                    raise PipelineError("phi hits a pruned generator")
                ref = SimplexRef(top, keep[ref.index], ref.word)
            new_row.append(ref)
        rows.append(tuple(new_row))
    return SimplicialMap(phi.source, Y, tuple(rows))


def pipeline(X: FinSimplicialSet, p: int, kinvs: Sequence = (), bootstrap: bool = False,
             budget: int | None = DEFAULT_BUDGET, verify: bool = True) -> PipelineResult:
    """Run the construction on ``X`` at the prime ``p``.

    ``kinvs`` supplies, for ``k = 3 .. d+1`` in order, a callable taking the
    previous stage set and returning its :class:`CocycleMap`.  A plain
    :class:`CocycleMap` is accepted when its source is that stage.  With
    ``bootstrap=True`` and no k-invariants, only stage 2 is built and ``d``
    is treated as 2.
    """
    from .bounds import stage_size_bound

    require_prime(p)
    verdicts: list[Verdict] = []
    if verify:
        bad = check_simplicial_identities(X)
        if bad:
            raise SimplicialError(f"input violates simplicial identities at {bad[0]}")
    check_simply_connected_homology(X)
    d = max(X.dimension, 2)
    profile = HomologyProfile.of(pad(X, d + 1), d)
    invariants(profile)  # raises on infinite homology
    verdicts.append(Verdict("input", "pass", "connected, H_1 = 0, finite homology"))

    acyclic = all(g.is_trivial for g in profile.groups[1:])
    need = list(range(3, d + 2))
    if acyclic:
        d_eff = d
    elif need and not kinvs:
        if not bootstrap:
            raise MissingKInvariants(
                f"stages {need[0]}..{need[-1]} need k-invariants (d = {d})"
            )
        d_eff = 2
    else:
        if len(kinvs) != len(need):
            raise MissingKInvariants(f"{len(need)} k-invariants needed, {len(kinvs)} given")
        d_eff = d
    top = d_eff + 2

    s2 = hurewicz_stage2(X, up_to=top, budget=budget)
    stage, phi = s2.stage, s2.phi
    orders = [s2.pi2.order]
    stages = [StageSummary(2, s2.pi2, stage.counts(), stage.total_counts(),
                           stage_size_bound(top, 2, orders))]
    if verify:
        rep = verify_homology_iso(phi, 2, p)
        verdicts.append(Verdict("stage 2 H_2 iso", "pass" if rep.ok else "fail",
                                f"pi_2 = {s2.pi2}"))

    if acyclic:
        for k in need:
            verdicts.append(Verdict(f"stage {k}", "skipped", "X is acyclic; all stages are points"))
    elif d_eff == 2 and need:
        for k in need:
            verdicts.append(Verdict(f"stage {k}", "skipped", "k-invariant not supplied (bootstrap)"))
    else:
        for k, supplied in zip(need, kinvs):
            kinv = supplied(stage.space) if callable(supplied) else supplied
            if kinv.source is not stage.space:
                raise PipelineError(f"k-invariant for stage {k} lives on a different set")
            if kinv.degree != k + 1:
                raise PipelineError(f"k-invariant for stage {k} has degree {kinv.degree}")
            stage = pullback_stage(kinv, top, budget, verify)
            prev_phi, phi = phi, lift_map(phi, stage, kinv)
            if verify:
                commutes = all(stage.projection.image(phi.images[n][i]) == prev_phi.images[n][i]
                               for n in range(X.top_degree + 1) for i in range(X.count(n)))
                verdicts.append(Verdict(f"stage {k} lift commutes", "pass" if commutes else "fail"))
            orders.append(kinv.group.order)
            stages.append(StageSummary(k, kinv.group, stage.counts(), stage.total_counts(),
                                       stage_size_bound(top, k, orders)))
            if verify:
                viol = check_simplicial_identities(stage.space)
                verdicts.append(Verdict(f"stage {k}", "pass" if not viol else "fail",
                                        f"pi_{k} = {kinv.group}"))

    W = skeleton(stage.space, top) if stage.space.top_degree > top else pad(stage.space, top)
    pruned = prune(W, d_eff, p, verify)
    phi_y = _into_pruned(phi, pruned)
    iso = None
    if verify:
        viol = check_simplicial_identities(pruned.Y)
        verdicts.append(Verdict("pruned identities", "pass" if not viol else "fail",
                                f"{len(viol)} violations"))
        if phi_y.violations():
            verdicts.append(Verdict("phi simplicial", "fail", "phi is not simplicial"))
        else:
            verdicts.append(Verdict("phi simplicial", "pass"))
            iso = verify_homology_iso(phi_y, top, p)
            verdicts.append(Verdict(
                f"H_n iso over Z_({p}), n <= {top}", "pass" if iso.ok else "fail",
                "" if iso.ok else f"fails in degrees {iso.failures()}",
            ))
    return PipelineResult(p, d, d_eff, profile, pruned, phi_y, iso, stages, verdicts,
                          bootstrap=(d_eff != d))
