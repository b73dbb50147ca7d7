"""Text formats: SSET/1 simplicial sets, KINV/1 k-invariants, profile JSON.

See ``docs/formats.md`` for the grammars.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Hashable

from .groups import FiniteAbelianGroup
from .homology import HomologyGroup, HomologyProfile
from .sset import (
    FinSimplicialSet,
    SimplexRef,
    SimplicialError,
    check_simplicial_identities,
    normalize_word,
)

_DEGEN = re.compile(r"s(\d+)\Z")
_NAME = re.compile(r"[^\s=,#]+\Z")


class FormatError(ValueError):
    """A syntax or resolution error at a given line and column (1-based)."""

    def __init__(self, msg: str, line: int = 0, col: int = 0):
        self.line, self.col = line, col
        where = f"line {line}, column {col}: " if line else ""
        super().__init__(where + msg)


def _valid_name(s) -> bool:
    return isinstance(s, str) and bool(_NAME.match(s)) and not _DEGEN.match(s)


def _strip(raw: str) -> str:
    return raw.split("#", 1)[0].rstrip()


def _tokens(line: str):
    """``(token, column)`` pairs, columns 1-based."""
    return [(m.group(), m.start() + 1) for m in re.finditer(r"[^\s,]+|,", line)]


# -- SSET/1 -------------------------------------------------------------------


def parse_sset(text: str, verify: bool = True) -> FinSimplicialSet:
    """Parse SSET/1 text.  With ``verify`` the simplicial identities are checked."""
    lines = text.splitlines()
    body = [(i + 1, _strip(l)) for i, l in enumerate(lines)]
    body = [(n, l) for n, l in body if l.strip()]
    if not body or body[0][1].strip() != "SSET/1":
        n = body[0][0] if body else 1
        raise FormatError("expected header 'SSET/1'", n, 1)
    top = None
    names: dict[int, list[str]] = {}
    where: dict[str, tuple[int, int]] = {}
    face_lines = []
    for lineno, line in body[1:]:
        toks = _tokens(line)
        head, col = toks[0]
        if head == "top_degree":
            if top is not None:
                raise FormatError("top_degree given twice", lineno, col)
            if len(toks) != 2 or not toks[1][0].isdigit():
                raise FormatError("expected 'top_degree <n>'", lineno, col)
            top = int(toks[1][0])
        elif head == "gens":
            m = re.match(r"\s*gens\s+(\d+)\s*:(.*)\Z", line)
            if not m:
                raise FormatError("expected 'gens <n>: name ...'", lineno, col)
            deg = int(m.group(1))
            offset = m.start(2)
            for t in re.finditer(r"\S+", m.group(2)):
                name, c = t.group(), offset + t.start() + 1
                if not _valid_name(name):
                    raise FormatError(f"invalid generator name {name!r}", lineno, c)
                if name in where:
                    raise FormatError(f"duplicate generator name {name!r}", lineno, c)
                names.setdefault(deg, []).append(name)
                where[name] = (deg, len(names[deg]) - 1)
        elif head in ("d", "faces"):
            face_lines.append((lineno, toks))
        else:
            raise FormatError(f"unknown directive {head!r}", lineno, col)
    if top is None:
        raise FormatError("missing 'top_degree'", body[0][0], 1)
    for deg in names:
        if deg > top:
            raise FormatError(f"generators in degree {deg} above top_degree {top}", 0, 0)

    faces: dict[tuple[int, int], list] = {}

    def ref(toks, lineno) -> SimplexRef:
        if not toks:
            raise FormatError("missing face reference", lineno, 0)
        *ops, (gname, c) = toks
        word = []
        for t, tc in ops:
            m = _DEGEN.match(t)
            if not m:
                raise FormatError(f"expected a degeneracy 's<j>', got {t!r}", lineno, tc)
            word.append(int(m.group(1)))
        if gname not in where:
            raise FormatError(f"unresolved generator {gname!r}", lineno, c)
        deg, idx = where[gname]
        return SimplexRef(deg, idx, normalize_word(word))

    for lineno, toks in face_lines:
        head = toks[0][0]
        if head == "d":
            if len(toks) < 5 or not toks[1][0].isdigit() or toks[3][0] != "=":
                raise FormatError("expected 'd <i> <gen> = [s<j> ...] <gen>'", lineno, toks[0][1])
            i = int(toks[1][0])
            gname, gc = toks[2]
            targets = [(i, toks[4:])]
        else:
            if len(toks) < 4 or toks[2][0] != "=":
                raise FormatError("expected 'faces <gen> = ref, ref, ...'", lineno, toks[0][1])
            gname, gc = toks[1]
            groups, cur = [], []
            for t in toks[3:]:
                if t[0] == ",":
                    groups.append(cur)
                    cur = []
                else:
                    cur.append(t)
            groups.append(cur)
            targets = list(enumerate(groups))
        if gname not in where:
            raise FormatError(f"unresolved generator {gname!r}", lineno, gc)
        deg, idx = where[gname]
        for i, rt in targets:
            if deg == 0:
                raise FormatError("vertices have no faces", lineno, gc)
            if not 0 <= i <= deg:
                raise FormatError(f"face index {i} out of range for degree {deg}", lineno, gc)
            r = ref(rt, lineno)
            if r.degree != deg - 1:
                raise FormatError(
                    f"face d_{i} of {gname!r} has degree {r.degree}, expected {deg - 1}",
                    lineno, rt[-1][1])
            slot = faces.setdefault((deg, idx), [None] * (deg + 1))
            if slot[i] is not None:
                raise FormatError(f"face d_{i} of {gname!r} given twice", lineno, gc)
            slot[i] = r
    gens, table = [], []
    for n in range(top + 1):
        gens.append(tuple(names.get(n, ())))
        rows = []
        for idx, nm in enumerate(names.get(n, ())):
            if n == 0:
                rows.append(())
                continue
            row = faces.get((n, idx))
            if row is None or any(x is None for x in row):
                missing = [i for i in range(n + 1) if row is None or row[i] is None]
                raise FormatError(f"generator {nm!r} is missing faces {missing}", 0, 0)
            rows.append(tuple(row))
        table.append(tuple(rows))
    try:
        S = FinSimplicialSet(tuple(gens), tuple(table))
    except SimplicialError as e:
        raise FormatError(str(e)) from None
    if verify:
        bad = check_simplicial_identities(S)
        if bad:
            v = bad[0]
            raise SimplicialError(
                f"{len(bad)} simplicial identity violations; first: d_{v.i} d_{v.j} on "
                f"{S.names[v.degree][v.index]!r}"
            )
    return S


def generator_names(S: FinSimplicialSet) -> tuple[tuple[str, ...], ...]:
    """Names used when writing ``S``: its own if they are valid and unique,
    otherwise ``x<n>_<i>`` throughout."""
    flat = [nm for row in S.names for nm in row]
    if all(_valid_name(nm) for nm in flat) and len(set(flat)) == len(flat):
        return tuple(tuple(row) for row in S.names)
    return tuple(tuple(f"x{n}_{i}" for i in range(len(row))) for n, row in enumerate(S.names))


def _ref_text(r: SimplexRef, names) -> str:
    ops = " ".join(f"s{j}" for j in r.word)
    nm = names[r.gen_degree][r.index]
    return f"{ops} {nm}" if ops else nm


def serialize_sset(S: FinSimplicialSet, comment: str | None = None) -> str:
    names = generator_names(S)
    out = ["SSET/1"]
    if comment:
        out += [f"# {c}" for c in comment.splitlines()]
    out.append(f"top_degree {S.top_degree}")
    for n, row in enumerate(names):
        if row:
            out.append(f"gens {n}: " + " ".join(row))
    for n in range(1, S.top_degree + 1):
        for g, row in enumerate(S.faces[n]):
            for i, r in enumerate(row):
                out.append(f"d {i} {names[n][g]} = {_ref_text(r, names)}")
    return "\n".join(out) + "\n"


def read_sset(path, verify: bool = True) -> FinSimplicialSet:
    with open(path, encoding="utf-8") as fh:
        return parse_sset(fh.read(), verify)


# -- KINV/1 -------------------------------------------------------------------


@dataclass
class KInvariantSpec:
    """A k-invariant read from text, still to be bound to its source set."""

    group: FiniteAbelianGroup
    degree: int
    values: dict[str, tuple[int, ...]] = field(default_factory=dict)
    stage: int | None = None
    lines: dict[str, int] = field(default_factory=dict)

    def bind(self, P: FinSimplicialSet):
        """The :class:`CocycleMap` on ``P`` (names as in :func:`generator_names`)."""
        from .postnikov import CocycleMap

        names = generator_names(P)
        if self.degree > P.top_degree:
            raise FormatError(f"degree {self.degree} is above the stage's top degree")
        index = {nm: i for i, nm in enumerate(names[self.degree])}
        vals = [0] * P.count(self.degree)
        for nm, vec in self.values.items():
            if nm not in index:
                raise FormatError(f"unresolved generator {nm!r} in degree {self.degree}",
                                  self.lines.get(nm, 0), 1)
            vals[index[nm]] = self.group.element(vec)
        return CocycleMap(P, self.group, self.degree, tuple(vals))

    __call__ = bind


def parse_kinv(text: str) -> KInvariantSpec:
    body = [(i + 1, _strip(l)) for i, l in enumerate(text.splitlines())]
    body = [(n, l) for n, l in body if l.strip()]
    if not body or body[0][1].strip() != "KINV/1":
        raise FormatError("expected header 'KINV/1'", body[0][0] if body else 1, 1)
    group = degree = stage = None
    values, where = {}, {}
    for lineno, line in body[1:]:
        toks = _tokens(line)
        head, col = toks[0]
        if head == "group":
            try:
                group = FiniteAbelianGroup.from_orders(int(t) for t, _ in toks[1:])
            except ValueError:
                raise FormatError("expected 'group <order> ...'", lineno, col) from None
        elif head == "degree":
            if len(toks) != 2 or not toks[1][0].isdigit():
                raise FormatError("expected 'degree <n>'", lineno, col)
            degree = int(toks[1][0])
        elif head == "stage":
            if len(toks) != 2 or not toks[1][0].isdigit():
                raise FormatError("expected 'stage <k>'", lineno, col)
            stage = int(toks[1][0])
        else:
            if len(toks) < 3 or toks[1][0] != "=":
                raise FormatError("expected '<generator> = <value> ...'", lineno, col)
            try:
                vec = tuple(int(t) for t, _ in toks[2:])
            except ValueError:
                raise FormatError("values must be integers", lineno, toks[2][1]) from None
            if head in values:
                raise FormatError(f"generator {head!r} assigned twice", lineno, col)
            values[head] = vec
            where[head] = lineno
    if group is None or degree is None:
        raise FormatError("KINV/1 needs 'group' and 'degree'")
    if stage is not None and stage + 1 != degree:
        raise FormatError(f"stage {stage} needs degree {stage + 1}, got {degree}")
    nf = len(group.invariant_factors)
    for nm, vec in values.items():
        if len(vec) != nf and not (nf <= 1 and len(vec) == 1):
            raise FormatError(f"value for {nm!r} has {len(vec)} entries, group has {nf} factors",
                              where[nm], 1)
        if len(vec) == 1:
            values[nm] = vec[0]
    return KInvariantSpec(group, degree, values, stage, where)


def serialize_kinv(kinv, stage: int | None = None) -> str:
    names = generator_names(kinv.source)[kinv.degree]
    out = ["KINV/1", "group " + " ".join(map(str, kinv.group.invariant_factors)),
           f"degree {kinv.degree}"]
    if stage is not None:
        out.append(f"stage {stage}")
    for nm, v in zip(names, kinv.values):
        if v:
            vec = kinv.group.vector(v)
            out.append(f"{nm} = " + " ".join(map(str, vec)))
    return "\n".join(out) + "\n"


# -- profile JSON -------------------------------------------------------------


def parse_profile(text: str) -> HomologyProfile:
    """``{"groups": [{"free": r, "torsion": [...]}, ...]}``, entry ``n`` is ``H_n``."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"invalid JSON: {e.msg}", e.lineno, e.colno) from None
    if not isinstance(data, dict) or not isinstance(data.get("groups", []), list):
        raise FormatError("profile must be an object with a 'groups' list")
    groups = []
    for n, g in enumerate(data.get("groups", [])):
        if not isinstance(g, dict):
            raise FormatError(f"groups[{n}] must be an object")
        free = g.get("free", 0)
        tors = g.get("torsion", [])
        if not isinstance(free, int) or free < 0 or not all(isinstance(t, int) and t >= 0 for t in tors):
            raise FormatError(f"groups[{n}]: 'free' and 'torsion' must be non-negative integers")
        groups.append(HomologyGroup.from_divisors(free, tors))
    return HomologyProfile(tuple(groups))


def serialize_profile(profile: HomologyProfile) -> str:
    return json.dumps({"groups": [g.as_dict() for g in profile.groups]}, indent=2) + "\n"
