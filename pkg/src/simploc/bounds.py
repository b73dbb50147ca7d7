"""Size and homotopy-order bounds, evaluated in log space with interval arithmetic.

The bounds are doubly exponential, so every value is carried as the natural
log of the bound, enclosed in an interval (50 significant digits, outward
rounded).  Exact integers are kept where they are cheap.

The O(log(n)^3) terms need a constant.  ``BoundConfig.C_log3`` is the
constant inside ``f(n) = exp(C log(n)^3)``.  Each absorption step in the
derivations (swallowing ``log 2n``, a binomial ``2^(d+2)``, a shift
``log(d+1) -> log d``, and ``log log(d+3) + log d``) needs a larger constant.
In ``"absorbed"`` mode these are made explicit:

====  =========================================================
C7    ``C + log 4 / log(2)^3``   (``log 2n <= (C7-C) log(n)^3``, n >= 2)
C4    ``C7 + log 4 / log(3)^3``  (``2^(d+2)`` instead of ``2^d``, d >= 2)
C5    ``C4 (log 3 / log 2)^3``   (``log(d+1)^3 <= (log 3/log 2)^3 log(d)^3``)
C8    ``C5 + (log log 5 + log 2) / log(2)^3``
====  =========================================================

In ``"literal"`` mode every step reuses ``C``, which is what the O-notation
suggests but does not hold numerically; the chain checker shows where.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, log as _flog
from typing import Sequence

import mpmath

from .linalg import require_prime

iv = mpmath.ctx_iv.MPIntervalContext()
iv.dps = 50

MODES = ("absorbed", "literal")
_EXACT_LIMIT = 4096  # largest log2 of a bound kept as an exact integer


def _I(x) -> "iv.mpf":
    if isinstance(x, Fraction):
        return iv.mpf(x.numerator) / x.denominator
    return iv.mpf(x)


def _ln(x):
    return iv.log(_I(x))


def _lo(x):
    return x.a


def _hi(x):
    return x.b


def _lo_mpf(x):
    return mpmath.mpf(x._mpi_[0])


def _hi_mpf(x):
    return mpmath.mpf(x._mpi_[1])


@dataclass(frozen=True)
class BoundConfig:
    C_log3: Fraction = Fraction(1)
    f_mode: str = "absorbed"

    def __post_init__(self):
        object.__setattr__(self, "C_log3", Fraction(self.C_log3))
        if self.C_log3 < 0:
            raise ValueError("C_log3 must be non-negative")
        if self.f_mode not in MODES:
            raise ValueError(f"f_mode must be one of {MODES}")

    @property
    def C(self):
        return _I(self.C_log3)

    def constants(self) -> dict[str, "iv.mpf"]:
        C = self.C
        if self.f_mode == "literal":
            return {"C": C, "C7": C, "C4": C, "C5": C, "C8": C}
        l2, l3 = _ln(2), _ln(3)
        C7 = C + _ln(4) / l2 ** 3
        C4 = C7 + _ln(4) / l3 ** 3
        C5 = C4 * (l3 / l2) ** 3
        C8 = C5 + (iv.log(_ln(5)) + l2) / l2 ** 3
        return {"C": C, "C7": C7, "C4": C4, "C5": C5, "C8": C8}

    def describe(self) -> str:
        consts = self.constants()
        parts = [f"C_log3 = {self.C_log3}", f"mode = {self.f_mode}"]
        parts += [f"{k} = {float(_hi_mpf(v)):.6g}" for k, v in consts.items() if k != "C"]
        return ", ".join(parts)


@dataclass(frozen=True)
class BoundValue:
    """A non-negative bound given by ``log`` (interval) or as exactly zero."""

    log: object = None  # iv.mpf interval for ln(value); None means the value is 0
    exact: int | None = None
    note: str = ""

    @classmethod
    def one(cls, note: str = "") -> "BoundValue":
        return cls(_I(0), 1, note)

    @classmethod
    def zero(cls, note: str = "") -> "BoundValue":
        return cls(None, 0, note)

    @classmethod
    def from_int(cls, v: int, note: str = "") -> "BoundValue":
        if v < 0:
            raise ValueError("bounds are non-negative")
        return cls(_ln(v) if v else None, v, note)

    @property
    def is_zero(self) -> bool:
        return self.log is None

    @property
    def log_lo(self):
        return None if self.log is None else _lo(self.log)

    @property
    def log_hi(self):
        return None if self.log is None else _hi(self.log)

    def log10_hi(self) -> float | None:
        if self.log is None:
            return None
        return float(_hi_mpf(self.log / _ln(10)))

    def sci(self) -> str:
        """Upper end of the enclosure in scientific notation."""
        if self.exact is not None and self.exact < 10 ** 15:
            return str(self.exact)
        if self.log is None:
            return "0"
        with mpmath.workdps(30):
            l10 = _hi_mpf(self.log / _ln(10))
            e = int(mpmath.floor(l10))
            return f"{mpmath.nstr(mpmath.power(10, l10 - e), 6)}e+{e}"

    def __le__(self, other: "BoundValue") -> bool:
        """Certainly ``self <= other`` (upper end of self below lower end of other)."""
        if self.is_zero:
            return True
        if other.is_zero:
            return False
        return _hi(self.log) <= _lo(other.log)

    def not_above(self, other: "BoundValue") -> bool:
        """``self <= other`` is not refuted by the enclosures."""
        if self.is_zero:
            return True
        if other.is_zero:
            return False
        return _lo(self.log) <= _hi(other.log)

    def as_dict(self) -> dict:
        d = {"log_lo": None, "log_hi": None, "scientific": self.sci()}
        if self.log is not None:
            d["log_lo"] = mpmath.nstr(_lo_mpf(self.log), 20)
            d["log_hi"] = mpmath.nstr(_hi_mpf(self.log), 20)
        if self.exact is not None:
            d["exact"] = self.exact
        if self.note:
            d["note"] = self.note
        return d


def _from_log(L, exact_log2=None, base: int | None = None, note: str = "") -> BoundValue:
    """Wrap ``ln(value) = L``; ``base ** exact_log2`` is attached when small."""
    exact = None
    if base is not None and exact_log2 is not None and exact_log2 * _flog(base, 2) <= _EXACT_LIMIT:
        exact = base ** exact_log2
    return BoundValue(L, exact, note)


def f_log3(n: int, cfg: BoundConfig):
    """``ln f(n) = C log(n)^3``."""
    return cfg.C * _ln(n) ** 3


# -- homotopy groups ----------------------------------------------------------


def rank_bound(n: int, h_p: int, cfg: BoundConfig = BoundConfig()) -> BoundValue:
    """``f(n) h_p^n``."""
    if n < 2:
        raise ValueError("rank bound is stated for n >= 2")
    if h_p < 0:
        raise ValueError("h_p must be non-negative")
    if h_p == 0:
        return BoundValue.zero("h_p = 0")
    L = f_log3(n, cfg) + n * _ln(h_p)
    exact = h_p ** n if cfg.C_log3 == 0 else None
    return BoundValue(L, exact)


def torsion_exponent_bound(n: int, m_p: int) -> int:
    """``c n`` with ``c = 2 m_p``: ``p^(c n)`` kills ``pi_n`` localized at p."""
    if n < 2:
        raise ValueError("torsion exponent bound is stated for n >= 2")
    if m_p < 0:
        raise ValueError("m_p must be non-negative")
    return 2 * m_p * n


@dataclass(frozen=True)
class PrimeOrderBound:
    n: int
    p: int
    closed: BoundValue | None  # None when h_p <= 1
    pre_absorption: BoundValue
    degenerate: bool
    note: str = ""

    @property
    def value(self) -> BoundValue:
        return self.pre_absorption if self.degenerate else self.closed


def _pre_log(n, p, m, h, cfg):
    """``ln p^(2 m n h^n f(n))``."""
    if m == 0 or h == 0:
        return _I(0)
    return _ln(p) * 2 * m * n * _I(h) ** n * iv.exp(f_log3(n, cfg))


def homotopy_order_bound_p(n: int, p: int, m_p: int, h_p: int,
                           cfg: BoundConfig = BoundConfig()) -> PrimeOrderBound:
    """Bound on ``|pi_n|`` localized at ``p``.

    ``closed = exp(m_p log p exp(n log h_p + C7 log(n)^3))`` and the sharper
    ``pre_absorption = p^(2 m_p n h_p^n f(n))``.  For ``h_p <= 1`` the closed
    form is flagged as degenerate and the pre-absorption value is used.
    """
    require_prime(p)
    if n < 2:
        raise ValueError("homotopy bounds are stated for n >= 2")
    if m_p < 0 or h_p < 0:
        raise ValueError("invariants must be non-negative")
    pre_L = _pre_log(n, p, m_p, h_p, cfg)
    exp2 = 2 * m_p * n * h_p ** n if cfg.C_log3 == 0 else None
    pre = _from_log(pre_L, exp2, p)
    if m_p == 0:
        one = BoundValue.one("m_p = 0")
        return PrimeOrderBound(n, p, one, one, False, "m_p = 0")
    if h_p <= 1:
        note = f"h_p = {h_p}: closed form degenerates (log h_p <= 0); using p^(2 m_p n h_p^n f(n))"
        return PrimeOrderBound(n, p, None, pre, True, note)
    K = cfg.constants()["C7"]
    L = m_p * _ln(p) * iv.exp(n * _ln(h_p) + K * _ln(n) ** 3)
    return PrimeOrderBound(n, p, BoundValue(L), pre, False)


def homotopy_order_bound(n: int, m: int, N: int, h: int,
                         cfg: BoundConfig = BoundConfig()) -> BoundValue:
    """``exp(m log N exp(n log h + C7 log(n)^3))``; 1 when ``N = 1`` or ``m = 0``.

    For ``h <= 1`` the product form ``N^(2 m n h^n f(n))`` is returned with a note.
    """
    if n < 2:
        raise ValueError("homotopy bounds are stated for n >= 2")
    if min(m, h) < 0 or N < 1:
        raise ValueError("invalid invariants")
    if N == 1 or m == 0:
        return BoundValue.one("trivial: no primes" if N == 1 else "trivial: m = 0")
    if h <= 1:
        L = _pre_log(n, N, m, h, cfg) if h else _I(0)
        return BoundValue(L, None, f"h = {h}: closed form degenerates; product form used")
    K = cfg.constants()["C7"]
    return BoundValue(m * _ln(N) * iv.exp(n * _ln(h) + K * _ln(n) ** 3))


@dataclass(frozen=True)
class HomotopyOrderBound:
    n: int
    per_prime: dict
    combined: BoundValue
    product_of_primes: BoundValue

    @property
    def consistent(self) -> bool:
        """Combined bound is not below the product of the per-prime bounds."""
        return self.product_of_primes.not_above(self.combined)


def homotopy_bounds(n: int, h_p: dict, m_p: dict, cfg: BoundConfig = BoundConfig()) -> HomotopyOrderBound:
    """Per-prime bounds, their product and the combined bound."""
    per = {p: homotopy_order_bound_p(n, p, m_p.get(p, 0), h_p.get(p, 0), cfg) for p in sorted(h_p)}
    total = _I(0)
    for b in per.values():
        total = total + b.value.log
    N = 1
    for p, v in h_p.items():
        if v:
            N *= p
    h = max(h_p.values(), default=0)
    m = max(m_p.values(), default=0)
    return HomotopyOrderBound(n, per, homotopy_order_bound(n, m, N, h, cfg), BoundValue(total))


# -- Postnikov stage sizes ------------------------------------------------------


def stage_size_bound(n: int, k: int, orders: Sequence[int]) -> int:
    """``sum_{l=0}^n prod_{j=2}^k |pi_j|^C(l, j)`` exactly.

    ``orders`` lists ``|pi_2| .. |pi_k|``.
    """
    if len(orders) != max(k - 1, 0):
        raise ValueError(f"need {k - 1} orders for stages 2..{k}, got {len(orders)}")
    if any(o < 1 for o in orders):
        raise ValueError("group orders are >= 1")
    total = 0
    for ell in range(n + 1):
        term = 1
        for j, o in enumerate(orders, start=2):
            term *= o ** comb(ell, j)
        total += term
    return total


def _logsumexp(logs):
    top = logs[0]
    for L in logs[1:]:
        top = iv.mpf([max(_lo(top), _lo(L)), max(_hi(top), _hi(L))])
    s = _I(0)
    for L in logs:
        s = s + iv.exp(L - top)
    return top + iv.log(s)


def log_stage_size_bound(n: int, k: int, log_orders: Sequence) -> "iv.mpf":
    """Log of :func:`stage_size_bound` for orders given by their logs."""
    terms = []
    for ell in range(n + 1):
        t = _I(0)
        for j, L in enumerate(log_orders, start=2):
            t = t + comb(ell, j) * L
        terms.append(t)
    return _logsumexp(terms)


def tower_size_bound(d: int, m: int, h: int, N: int, cfg: BoundConfig = BoundConfig()) -> BoundValue:
    """Stage bound for ``sk_{d+2} P_{d+1}`` with ``|pi_j|`` replaced by its bound."""
    logs = []
    for j in range(2, d + 2):
        b = homotopy_order_bound(j, m, N, h, cfg)
        logs.append(b.log if b.log is not None else _I(0))
    return BoundValue(log_stage_size_bound(d + 2, d + 1, logs))


def tower_degree_bound(d: int, m: int, h: int, N: int, cfg: BoundConfig = BoundConfig()) -> BoundValue:
    """Per-degree bound ``prod_j |pi_j|^C(d+2, j)`` in the top degree ``d+2``."""
    L, trivial = _I(0), True
    for j in range(2, d + 2):
        b = homotopy_order_bound(j, m, N, h, cfg)
        if b.log is not None and not (b.exact == 1):
            L = L + comb(d + 2, j) * b.log
            trivial = False
    return BoundValue.one("all groups trivial") if trivial else BoundValue(L)


def final_bound(d: int, m: int, h: int, N: int, cfg: BoundConfig = BoundConfig()) -> BoundValue:
    """``exp(m h log N exp(log(2h) d + C8 log(d)^3))``, or 1 with a note when trivial."""
    if d < 2:
        raise ValueError("the size bound is stated for d >= 2")
    if min(m, h) < 0 or N < 1:
        raise ValueError("invalid invariants")
    if N == 1:
        return BoundValue.one("N = 1: no torsion, trivial bound")
    if h == 0 or m == 0:
        return BoundValue.one(f"{'h' if h == 0 else 'm'} = 0: trivial bound")
    K = cfg.constants()["C8"]
    return BoundValue(m * h * _ln(N) * iv.exp(_ln(2 * h) * d + K * _ln(d) ** 3))


# -- inequality chains --------------------------------------------------------


@dataclass(frozen=True)
class ChainLine:
    label: str
    log: object  # interval for ln(value)


@dataclass(frozen=True)
class StepCheck:
    step: str
    kind: str  # "le" or "eq"
    status: str  # "holds", "fails" or "skipped"
    note: str = ""


def homotopy_chain_lines(n: int, p: int, m_p: int, h_p: int, cfg: BoundConfig = BoundConfig()) -> list[ChainLine]:
    """The displayed chain for one prime, from ``p^(c n r^n f(n))`` (with
    ``c = 2 m_p``, ``r = h_p``) down to the closed form."""
    C = cfg.C
    K = cfg.constants()["C7"]
    lp, ln_ = _ln(p), _ln(n)
    l3 = ln_ ** 3
    c, r = 2 * m_p, h_p
    L2 = lp * c * n * _I(r) ** n * iv.exp(C * l3)
    L3 = lp * 2 * m_p * n * _I(h_p) ** n * iv.exp(C * l3)
    L4 = lp * 2 * m_p * n * _I(h_p) ** n * iv.exp(C * l3)
    L5 = m_p * lp * iv.exp(iv.log(2 * n * _I(h_p) ** n) + C * l3)
    L6 = m_p * lp * iv.exp(_ln(2 * n) + n * _ln(h_p) + C * l3)
    L7 = m_p * lp * iv.exp(n * _ln(h_p) + K * l3)
    return [ChainLine("p^(c n r^n f(n))", L2), ChainLine("p^(2 m_p n h_p^n f(n))", L3),
            ChainLine("exp(log p 2 m_p n h_p^n exp(C log^3 n))", L4),
            ChainLine("exp(m_p log p exp(log(2 n h_p^n) + C log^3 n))", L5),
            ChainLine("exp(m_p log p exp(log 2n + n log h_p + C log^3 n))", L6),
            ChainLine("exp(m_p log p exp(n log h_p + C7 log^3 n))", L7)]


HOMOTOPY_CHAIN_KINDS = ("eq", "eq", "eq", "eq", "le")


def size_chain_lines(d: int, m: int, h: int, N: int, cfg: BoundConfig = BoundConfig()) -> list[ChainLine]:
    """The chain from the stage bound with plugged-in homotopy bounds to the
    final closed form.  ``log(h^2)`` in one intermediate line is read as ``log h``."""
    k = cfg.constants()
    K, C4, C5, C8 = k["C7"], k["C4"], k["C5"], k["C8"]
    lN, lh, ld = _ln(N), _ln(h), _ln(d)
    l2 = _ln(2)
    L_j = {j: m * lN * iv.exp(j * lh + K * _ln(j) ** 3) for j in range(2, d + 2)}
    Q1 = log_stage_size_bound(d + 2, d + 1, [L_j[j] for j in range(2, d + 2)])
    Q2 = _ln(d + 3) + sum((comb(d + 2, j) * L_j[j] for j in range(2, d + 2)), _I(0))
    Q3 = _ln(d + 3) + m * lN * sum(
        (comb(d + 2, j) * iv.exp(j * lh + K * _ln(j) ** 3) for j in range(2, d + 2)), _I(0))
    Q4 = _ln(d + 3) + m * lN * d * iv.exp(l2 * d + (d + 1) * lh + C4 * _ln(d + 1) ** 3)
    Q5 = _ln(d + 3) + m * lN * iv.exp(ld) * iv.exp(l2 * d + d * lh + lh + C5 * ld ** 3)
    Q6 = _ln(d + 3) * m * lN * iv.exp(ld + _ln(2 * h) * d + lh + C5 * ld ** 3)
    Q7 = m * lN * iv.exp(iv.log(_ln(d + 3)) + ld + _ln(2 * h) * d + lh + C5 * ld ** 3)
    Q8 = m * lN * iv.exp(_ln(2 * h) * d + lh + C8 * ld ** 3)
    Q9 = m * h * lN * iv.exp(_ln(2 * h) * d + C8 * ld ** 3)
    labels = [
        "sum_l prod_j |pi_j|^C(l,j), |pi_j| bounded",
        "(d+3) prod_j (...)^C(d+2,j)",
        "(d+3) exp(m log N sum_j C(d+2,j) exp(j log h + ...))",
        "(d+3) exp(m log N d 2^d exp((d+1) log h + C4 log^3(d+1)))",
        "exp(log(d+3) + m log N exp(log d) exp(d log 2 + d log h + log h + C5 log^3 d))",
        "exp(log(d+3) m log N exp(log d + d log 2h + log h + C5 log^3 d))",
        "exp(m log N exp(loglog(d+3) + log d + d log 2h + log h + C5 log^3 d))",
        "exp(m log N exp(d log 2h + log h + C8 log^3 d))",
        "exp(m h log N exp(d log 2h + C8 log^3 d))",
    ]
    return [ChainLine(lbl, L) for lbl, L in zip(labels, (Q1, Q2, Q3, Q4, Q5, Q6, Q7, Q8, Q9))]


SIZE_CHAIN_KINDS = ("le", "eq", "le", "le", "le", "eq", "le", "eq")
_CAVEAT_STEP = 4  # line 5 -> 6 uses a + b <= ab


def check_chain(lines: Sequence[ChainLine], kinds: Sequence[str],
                caveat: dict[int, bool] | None = None) -> list[StepCheck]:
    """Check consecutive lines.

    A step holds when the lower end of line ``i`` does not exceed the upper
    end of line ``i+1``.  Equality steps additionally need the reverse.
    ``caveat`` maps step indices to whether their side condition applies;
    steps outside it are still evaluated and carry a note.
    """
    out = []
    for i, kind in enumerate(kinds):
        a, b = lines[i].log, lines[i + 1].log
        name = f"{i + 1}->{i + 2}"
        ok = _lo(a) <= _hi(b)
        if kind == "eq":
            ok = ok and _lo(b) <= _hi(a)
        note = ""
        if caveat is not None and i in caveat and not caveat[i]:
            note = "side condition a, b >= 2 not met; evaluated directly"
        out.append(StepCheck(name, kind, "holds" if ok else "fails", note))
    return out


def check_homotopy_chain(n, p, m_p, h_p, cfg: BoundConfig = BoundConfig()) -> list[StepCheck]:
    return check_chain(homotopy_chain_lines(n, p, m_p, h_p, cfg), HOMOTOPY_CHAIN_KINDS)


def check_size_chain(d, m, h, N, cfg: BoundConfig = BoundConfig()) -> list[StepCheck]:
    lines = size_chain_lines(d, m, h, N, cfg)
    a = _ln(d + 3)
    b = m * _ln(N) * iv.exp(_ln(d)) * iv.exp(_ln(2) * d + d * _ln(h) + _ln(h)
                                           + cfg.constants()["C5"] * _ln(d) ** 3)
    applies = _lo(a) >= 2 and _lo(b) >= 2
    return check_chain(lines, SIZE_CHAIN_KINDS, {_CAVEAT_STEP: applies})


@dataclass
class SweepResult:
    checked: int = 0
    skipped: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def sweep_chains(cfg_list: Sequence[BoundConfig] = (BoundConfig(0), BoundConfig(1)),
                 max_n: int = 8, hs=(2, 3, 4), ms=(1, 2, 3), primes=(2, 3, 5),
                 Ns=(2, 6, 30)) -> SweepResult:
    """Every step of both chains over the grid ``n, d in 2..max_n``."""
    res = SweepResult()
    for cfg in cfg_list:
        for n in range(2, max_n + 1):
            for h in hs:
                for m in ms:
                    for p in primes:
                        for s in check_homotopy_chain(n, p, m, h, cfg):
                            res.checked += 1
                            if s.status == "fails":
                                res.failures.append(("homotopy", cfg, n, p, m, h, s.step))
                    for N in Ns:
                        for s in check_size_chain(n, m, h, N, cfg):
                            if s.status == "skipped":
                                res.skipped += 1
                                continue
                            res.checked += 1
                            if s.status == "fails":
                                res.failures.append(("size", cfg, n, m, h, N, s.step))
    return res


def profile_bounds(inv, degree: int, cfg: BoundConfig = BoundConfig()) -> dict:
    """All bounds for an invariant set: per-prime and combined homotopy
    bounds in ``degree``, stage bounds and the final size bound."""
    out = {"config": cfg.describe(), "degree": degree}
    if degree >= 2:
        hb = homotopy_bounds(degree, dict(inv.h_p), dict(inv.m_p), cfg)
        out["per_prime"] = {
            str(p): {"h_p": inv.h_p[p], "m_p": inv.m_p[p],
                     "rank": rank_bound(degree, inv.h_p[p], cfg).as_dict(),
                     "torsion_exponent": torsion_exponent_bound(degree, inv.m_p[p]),
                     "closed": b.closed.as_dict() if b.closed else None,
                     "pre_absorption": b.pre_absorption.as_dict(),
                     "degenerate": b.degenerate, "note": b.note}
            for p, b in hb.per_prime.items()
        }
        out["combined"] = hb.combined.as_dict()
    d = max(inv.d, 2)
    out["d"] = d
    out["tower_degree_bound"] = tower_degree_bound(d, inv.m, inv.h, inv.N, cfg).as_dict()
    out["tower_skeleton_total"] = tower_size_bound(d, inv.m, inv.h, inv.N, cfg).as_dict()
    out["final"] = final_bound(d, inv.m, inv.h, inv.N, cfg).as_dict()
    return out
