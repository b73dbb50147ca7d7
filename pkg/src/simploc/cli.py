"""Command-line entry point: ``simploc <command> ...``.

Exit codes: 0 all checks pass, 1 a verification failed, 2 bad input or
budget exceeded.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

from . import __version__
from .bounds import BoundConfig, profile_bounds
from .em import (
    E_SPACE,
    K_SPACE,
    build_em_skeleton,
    cochains_are_cocycles,
    count_cocycles,
    em_cardinality,
    enumerate_cocycles,
)
from .groups import FiniteAbelianGroup
from .homology import (
    HomologyProfile,
    InfiniteHomologyError,
    homology,
    invariants,
    local_homology,
    normalized_chain_complex,
)
from .io import FormatError, parse_kinv, parse_profile, parse_sset, serialize_sset
from .linalg import require_prime
from .postnikov import PipelineError, pipeline
from .sset import DEFAULT_BUDGET, BudgetExceeded, SimplicialError, check_simplicial_identities
from .twist import canonical_twisting, check_twisting_axioms, e_as_twisted_product_iso

PASS, FAIL, SKIPPED = "pass", "fail", "skipped"


class InputError(Exception):
    """Anything that should end the run with exit code 2."""


@dataclass
class RunReport:
    """Ordered sections of ``key: value`` lines plus verdicts.

    Everything except the header (timestamp and timings) is deterministic.
    """

    command: str
    inputs: list[tuple[str, str]] = field(default_factory=list)
    sections: dict[str, list[tuple[str, object]]] = field(default_factory=dict)
    verdicts: list[tuple[str, str, str]] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)
    error: str | None = None

    def add_input(self, path: str):
        data = Path(path).read_bytes()
        self.inputs.append((Path(path).name, hashlib.sha256(data).hexdigest()))
        return data.decode("utf-8")

    def put(self, section: str, key: str, value):
        self.sections.setdefault(section, []).append((key, value))

    def verdict(self, step: str, status: str, reason: str = ""):
        assert status in (PASS, FAIL, SKIPPED)
        self.verdicts.append((step, status, reason))

    @contextmanager
    def timed(self, step: str):
        t0 = time.perf_counter()
        try:
            yield
        finally:
            self.timings[step] = self.timings.get(step, 0.0) + time.perf_counter() - t0

    @property
    def failed(self) -> bool:
        return any(s == FAIL for _, s, _ in self.verdicts)

    def _header(self) -> dict:
        return {"generated": datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ"),
                "timings_s": {k: round(v, 4) for k, v in self.timings.items()}}

    def as_dict(self) -> dict:
        return {
            "command": self.command,
            "inputs": [{"file": n, "sha256": h} for n, h in self.inputs],
            "sections": {s: {k: v for k, v in kv} for s, kv in self.sections.items()},
            "verdicts": [{"step": a, "status": b, "reason": c} for a, b, c in self.verdicts],
            "error": self.error,
        }

    def render_json(self) -> str:
        d = {"header": self._header(), **self.as_dict()}
        # header stays on the first line; the rest is stable
        head = json.dumps({"header": d.pop("header")}, sort_keys=True)
        return head + "\n" + json.dumps(d, indent=2, ensure_ascii=False) + "\n"

    def render_text(self) -> str:
        h = self._header()
        t = ", ".join(f"{k}={v:.3f}s" for k, v in h["timings_s"].items())
        out = [f"# simploc {__version__} report generated {h['generated']}; timings: {t or 'none'}",
               f"command: {self.command}"]
        for name, digest in self.inputs:
            out.append(f"input: {name} sha256={digest}")
        for sec, kv in self.sections.items():
            out.append(f"[{sec}]")
            for k, v in kv:
                if isinstance(v, (dict, list)):
                    v = json.dumps(v, sort_keys=False, ensure_ascii=False)
                out.append(f"{k}: {v}")
        out.append("[verdicts]")
        for step, status, reason in self.verdicts:
            out.append(f"{step}: {status}" + (f" ({reason})" if reason else ""))
        if self.error:
            out.append(f"error: {self.error}")
        return "\n".join(out) + "\n"


# -- argument helpers ---------------------------------------------------------


def _group(text: str) -> FiniteAbelianGroup:
    try:
        orders = [int(t) for t in text.replace("x", ",").split(",") if t.strip()]
        if not orders or any(o < 1 for o in orders):
            raise ValueError
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid group {text!r}; use orders like 2 or 2,2") from None
    return FiniteAbelianGroup.from_orders(orders)


def _prime(text: str) -> int:
    try:
        p = int(text)
        require_prime(p)
        return p
    except (ValueError, TypeError):
        raise argparse.ArgumentTypeError(f"{text!r} is not a prime") from None


def _nonneg(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("expected a non-negative integer")
    return v


def _budget(text: str):
    return None if text.lower() in ("none", "inf") else _nonneg(text)


def _load_sset(report: RunReport, path: str, args):
    with report.timed("parse"):
        text = report.add_input(path)
        return parse_sset(text, verify=not args.no_verify)


# -- commands -----------------------------------------------------------------


def cmd_homology(args, report: RunReport):
    S = _load_sset(report, args.input, args)
    with report.timed("homology"):
        C = normalized_chain_complex(S)
        report.put("set", "counts", list(S.counts()))
        for n in range(S.top_degree + 1):
            key = f"H_{n}" + ("" if args.prime is None else f"(Z_({args.prime}))")
            g = local_homology(C, n, args.prime) if args.prime else homology(C, n)
            report.put("homology", key, str(g))
    report.verdict("chain complex d^2 = 0", FAIL if C.violations() else PASS)


def _profile_from_args(args, report: RunReport) -> HomologyProfile:
    if args.profile:
        with report.timed("parse"):
            return parse_profile(report.add_input(args.profile))
    if args.input:
        S = _load_sset(report, args.input, args)
        with report.timed("homology"):
            return HomologyProfile.of(S)
    raise InputError("give --input or --profile")


def cmd_invariants(args, report: RunReport):
    prof = _profile_from_args(args, report)
    for line in prof.lines():
        k, v = line.split(" = ")
        report.put("homology", k, v)
    inv = invariants(prof)
    for k, v in inv.as_dict().items():
        report.put("invariants", k, v)
    report.verdict("finite homology above degree 0", PASS)


def cmd_em_size(args, report: RunReport):
    g, k = args.group, args.degree
    report.put("em", "group", str(g))
    report.put("em", "space", f"{args.space}({g}, {k})")
    for n in range(args.up_to + 1):
        report.put("cardinality", f"n={n}", em_cardinality(g, k, n, args.space))


def cmd_em_build(args, report: RunReport):
    g, k = args.group, args.degree
    with report.timed("build"):
        S = build_em_skeleton(g, k, args.space, args.up_to, args.budget)
    report.put("em", "space", f"{args.space}({g}, {k})")
    report.put("em", "nondegenerate counts", list(S.counts()))
    if not args.no_verify:
        with report.timed("verify"):
            bad = check_simplicial_identities(S)
        report.verdict("simplicial identities", FAIL if bad else PASS, f"{len(bad)} violations")
    text = serialize_sset(S, comment=f"{args.space}({g}, {k}) through degree {args.up_to}")
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        report.put("output", "file", Path(args.out).name)
        report.put("output", "sha256", hashlib.sha256(text.encode()).hexdigest())


def cmd_em_verify(args, report: RunReport):
    g, k = args.group, args.degree
    report.put("em", "group", str(g))
    report.put("em", "degree", k)
    with report.timed("enumerate"):
        for n in range(args.up_to + 1):
            expected = em_cardinality(g, k, n, K_SPACE)
            if args.budget is not None and expected > args.budget:
                raise BudgetExceeded(n, expected, args.budget)
            labels = enumerate_cocycles(g, k, n)
            distinct = len({tuple(r) for r in labels.tolist()}) if labels.size else len(labels)
            ok = (len(labels) == distinct == expected == count_cocycles(g, k, n)
                  and bool(cochains_are_cocycles(g, k, n, labels).all()))
            report.put("cocycle bijection", f"n={n}", f"{distinct} / {expected}")
            report.verdict(f"free labels <-> cocycles, n={n}", PASS if ok else FAIL)
    with report.timed("build"):
        for space in (K_SPACE, E_SPACE):
            S = build_em_skeleton(g, k, space, args.up_to, args.budget)
            report.put("nondegenerate counts", space, list(S.counts()))
            bad = check_simplicial_identities(S)
            report.verdict(f"{space} simplicial identities", FAIL if bad else PASS,
                           f"{len(bad)} violations")
            totals = [S.total_count(n) for n in range(args.up_to + 1)]
            want = [em_cardinality(g, k, n, space) for n in range(args.up_to + 1)]
            report.verdict(f"{space} degeneracy decomposition", PASS if totals == want else FAIL,
                           f"totals {totals}")


def cmd_twist_verify(args, report: RunReport):
    g, k = args.group, args.degree
    report.put("twist", "group", str(g))
    report.put("twist", "fiber degree", k)
    with report.timed("axioms"):
        ax = check_twisting_axioms(canonical_twisting(g, k), args.up_to)
    report.put("axioms", "simplices checked", ax.checked)
    report.verdict("twisting axioms", PASS if ax.ok else FAIL, f"{len(ax.violations)} violations")
    with report.timed("iso"):
        iso = e_as_twisted_product_iso(g, k, args.up_to, args.budget)
    report.put("iso", "section", iso.section)
    for deg in iso.degrees:
        report.put("iso", f"n={deg.degree}", f"|E| = {deg.size_E}, |K x K| = {deg.size_pairs}")
        report.verdict(f"E = K x_tau K, n={deg.degree}", PASS if deg.ok else FAIL,
                       "" if deg.ok else f"bijective={deg.bijective} faces={deg.faces_ok} "
                       f"d0={deg.twisted_d0_ok} degeneracies={deg.degeneracies_ok}")


def cmd_pipeline_run(args, report: RunReport):
    X = _load_sset(report, args.input, args)
    kinvs = []
    for path in args.kinv or ():
        kinvs.append(parse_kinv(report.add_input(path)))
    with report.timed("pipeline"):
        res = pipeline(X, args.prime, kinvs, bootstrap=not kinvs, budget=args.budget,
                       verify=not args.no_verify)
    report.put("input", "counts", list(X.counts()))
    report.put("input", "d", res.d)
    for line in res.profile.lines():
        k, v = line.split(" = ")
        report.put("input", k, v)
    if res.bootstrap:
        report.put("input", "effective d", f"{res.d_effective} (no k-invariants supplied)")
    for st in res.stages:
        sec = f"stage {st.k}"
        report.put(sec, "pi", str(st.group))
        report.put(sec, "nondegenerate counts", list(st.counts))
        report.put(sec, "total counts", list(st.total_counts))
        report.put(sec, "size bound (top degree)", st.size_bound)
        if st.size_bound is not None and st.total_counts[-1] > st.size_bound:
            report.verdict(f"stage {st.k} within size bound", FAIL)
        else:
            report.verdict(f"stage {st.k} within size bound", PASS)
    report.put("pruned", "kept top generators", list(res.pruned.T))
    report.put("pruned", "counts", list(res.Y.counts()))
    for step in res.verdicts:
        report.verdict(step.step, step.status, step.detail)
    try:
        inv = invariants(res.profile)
        b = profile_bounds(inv, max(res.d, 2), BoundConfig())
        report.put("bounds", "final", b["final"]["scientific"])
        report.put("bounds", "log final (upper)", b["final"]["log_hi"])
    except InfiniteHomologyError:
        pass
    text = serialize_sset(res.Y, comment=f"pruned output at p = {args.prime}")
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        report.put("output", "file", Path(args.out).name)
        report.put("output", "sha256", hashlib.sha256(text.encode()).hexdigest())


def cmd_bound(args, report: RunReport):
    prof = _profile_from_args(args, report)
    cfg = BoundConfig(args.constant, args.mode)
    inv = invariants(prof)
    degree = args.degree if args.degree is not None else max(prof.d, 2)
    with report.timed("bounds"):
        b = profile_bounds(inv, degree, cfg)
    report.put("config", "constants", b["config"])
    report.put("config", "degree", degree)
    for k, v in inv.as_dict().items():
        report.put("invariants", k, v)
    for p, entry in b.get("per_prime", {}).items():
        sec = f"prime {p}"
        report.put(sec, "rank bound", entry["rank"]["scientific"])
        report.put(sec, "torsion exponent bound", entry["torsion_exponent"])
        if entry["closed"]:
            report.put(sec, "order bound", entry["closed"]["scientific"])
            report.put(sec, "log order bound (upper)", entry["closed"]["log_hi"])
        report.put(sec, "order bound before absorption", entry["pre_absorption"]["scientific"])
        if entry["note"]:
            report.put(sec, "note", entry["note"])
    if "combined" in b:
        report.put("homotopy", "combined order bound", b["combined"]["scientific"])
        report.put("homotopy", "log combined (upper)", b["combined"]["log_hi"])
    report.put("size", "d", b["d"])
    report.put("size", f"stage bound in degree {b['d'] + 2}", b["tower_degree_bound"]["scientific"])
    report.put("size", f"skeleton total through degree {b['d'] + 2}", b["tower_skeleton_total"]["scientific"])
    report.put("size", "final bound", b["final"]["scientific"])
    report.put("size", "log final (upper)", b["final"]["log_hi"])
    report.verdict("bounds evaluated", PASS)


def cmd_verify(args, report: RunReport):
    with report.timed("parse"):
        text = report.add_input(args.input)
        S = parse_sset(text, verify=False)
    report.put("set", "counts", list(S.counts()))
    with report.timed("verify"):
        bad = check_simplicial_identities(S)
        dd = normalized_chain_complex(S).violations()
    report.verdict("simplicial identities", FAIL if bad else PASS, f"{len(bad)} violations")
    for v in bad[:20]:
        report.put("violations", f"d_{v.i} d_{v.j}", f"{S.names[v.degree][v.index]} (degree {v.degree})")
    report.verdict("chain complex d^2 = 0", FAIL if dd else PASS,
                   f"degrees {dd}" if dd else "")


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit the report as JSON")
    common.add_argument("--report", metavar="PATH", help="write the report here instead of stdout")
    common.add_argument("--budget", type=_budget, default=DEFAULT_BUDGET,
                        help="max simplices per degree (default 10^6; 'none' disables)")
    common.add_argument("--no-verify", action="store_true", help="skip identity checks")

    p = argparse.ArgumentParser(prog="simploc", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"simploc {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    h = sub.add_parser("homology", parents=[common], help="homology of an SSET/1 file")
    h.add_argument("--input", required=True)
    h.add_argument("--prime", type=_prime, help="report Z_(p) homology")
    h.set_defaults(func=cmd_homology)

    i = sub.add_parser("invariants", parents=[common], help="h_p, m_p, h, m, N")
    i.add_argument("--input")
    i.add_argument("--profile")
    i.set_defaults(func=cmd_invariants)

    em = sub.add_parser("em", help="Eilenberg-MacLane models")
    emsub = em.add_subparsers(dest="em_command", required=True)
    for name, fn, hlp in (("size", cmd_em_size, "cardinalities"),
                          ("build", cmd_em_build, "materialize a skeleton as SSET/1"),
                          ("verify", cmd_em_verify, "bijection and identity checks")):
        e = emsub.add_parser(name, parents=[common], help=hlp)
        e.add_argument("--group", type=_group, required=True, help="cyclic orders, e.g. 2 or 2,2")
        e.add_argument("--degree", type=_nonneg, required=True, help="k")
        e.add_argument("--up-to", type=_nonneg, default=4)
        if name != "verify":
            e.add_argument("--space", choices=(K_SPACE, E_SPACE), default=K_SPACE)
        if name == "build":
            e.add_argument("--out")
        e.set_defaults(func=fn)

    tw = sub.add_parser("twist", help="twisting operators")
    twsub = tw.add_subparsers(dest="twist_command", required=True)
    tv = twsub.add_parser("verify", parents=[common], help="axioms and E = K x_tau K")
    tv.add_argument("--group", type=_group, required=True)
    tv.add_argument("--degree", type=_nonneg, required=True)
    tv.add_argument("--up-to", type=_nonneg, default=3)
    tv.set_defaults(func=cmd_twist_verify)

    pl = sub.add_parser("pipeline", help="p-local model construction")
    plsub = pl.add_subparsers(dest="pipeline_command", required=True)
    pr = plsub.add_parser("run", parents=[common])
    pr.add_argument("--input", required=True)
    pr.add_argument("--prime", type=_prime, required=True)
    pr.add_argument("--kinv", nargs="+", metavar="FILE", help="KINV/1 files, stage 3 first")
    pr.add_argument("--out", help="write the pruned set as SSET/1")
    pr.set_defaults(func=cmd_pipeline_run)

    b = sub.add_parser("bound", parents=[common], help="homotopy and size bounds")
    b.add_argument("--profile")
    b.add_argument("--input")
    b.add_argument("--degree", type=_nonneg)
    b.add_argument("--constant", type=Fraction, default=Fraction(1), help="C in log f(n) = C log(n)^3")
    b.add_argument("--mode", choices=("absorbed", "literal"), default="absorbed")
    b.set_defaults(func=cmd_bound)

    v = sub.add_parser("verify", parents=[common], help="check simplicial identities of a file")
    v.add_argument("--input", required=True)
    v.set_defaults(func=cmd_verify)
    return p


def _echo(argv) -> str:
    # path arguments are echoed by base name so reports do not depend on cwd
    out, in_path = [], False
    for a in argv:
        if a.startswith("--"):
            in_path = a in ("--input", "--profile", "--out", "--report", "--kinv")
            out.append(a)
        else:
            out.append(Path(a).name if in_path else a)
    return " ".join(out)


def run(argv=None) -> tuple[int, RunReport | None]:
    """Parse ``argv``, run the command; returns ``(exit_code, report)``."""
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0), None
    report = RunReport(_echo(argv))
    code = 0
    try:
        args.func(args, report)
        code = 1 if report.failed else 0
    except BudgetExceeded as e:
        report.error = f"budget exceeded in degree {e.degree}: {e.count} simplices > {e.budget}"
        code = 2
    except (FormatError, SimplicialError, PipelineError, InfiniteHomologyError, InputError,
            ValueError, OSError) as e:
        report.error = f"{type(e).__name__}: {e}"
        code = 2
    text = report.render_json() if args.json else report.render_text()
    if args.report:
        Path(args.report).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if report.error:
        print(f"simploc: {report.error}", file=sys.stderr)
    return code, report


def main(argv=None) -> int:
    return run(argv)[0]


if __name__ == "__main__":
    sys.exit(main())
