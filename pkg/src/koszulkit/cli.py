"""Command-line interface: ``koszulkit <command> <file> [options]``.

Exit codes: 0 success, 1 user error, 2 precondition or verdict failure,
3 internal invariant violation.  Reports contain no timing, so identical input
and flags give byte-identical output for every thread count.
"""
from __future__ import annotations

import argparse
import json
import os
import random
import sys
from concurrent.futures import ProcessPoolExecutor

from . import __version__
from .bimodule import AlgebraError, is_projective_left
from .cdg import CdgRingSlice, build_cdg_dual
from .complexes import ComplexError, WindowError
from .corpus import random_presentation
from .io import DocumentError, load, save
from .koszul import (
    dual_koszul_complex,
    first_koszul_complex,
    koszul_complex_exact,
    koszul_pair,
    second_koszul_complex,
)
from .linalg import DimensionError, Field
from .nonhomog import ConsistencyError, NonhomogPresentation, verify_self_consistency
from .pbw import pbw_reconstruct
from .quadratic import (
    GradedAlgebraSlice,
    PreconditionError,
    QuadraticPresentation,
    build_quadratic_slice,
    check_generated_and_quadratic,
    check_koszul_distributive,
    check_koszul_tor,
    opposite_bimodule,
    quadratic_dual,
)
from .twisted import (
    bimodule_resolution,
    conversion_bimodule,
    frobenius_check,
    nonhomog_koszul_complex,
    two_sided_data,
)

EXIT_OK, EXIT_USER, EXIT_VERDICT, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class InternalError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


class Report:
    """Ordered sections rendered either as text lines or as JSON."""

    def __init__(self, command: list):
        self.data = {"command": command, "verdicts": {}, "tables": {}, "witnesses": {}}
        self.lines: list = []
        self.code = EXIT_OK

    def say(self, line: str):
        self.lines.append(line)

    def verdict(self, key: str, value):
        self.data["verdicts"][key] = value

    def table(self, key: str, value):
        self.data["tables"][key] = value

    def witness(self, key: str, value):
        self.data["witnesses"][key] = value

    def fail(self, code: int):
        self.code = max(self.code, code)

    def render(self, as_json: bool) -> str:
        if as_json:
            return json.dumps(_plain(self.data), indent=2, sort_keys=True) + "\n"
        return "\n".join(self.lines) + "\n"


def _plain(x):
    """JSON-safe copy: tuples become lists, dict keys strings, field elements strings."""
    if isinstance(x, dict):
        return {_key(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, (bool, int, float, str)) or x is None:
        return x
    return str(x)


def _key(k) -> str:
    if isinstance(k, tuple):
        return ",".join(str(v) for v in k)
    return str(k)


# ---------------------------------------------------------------------------
# loading helpers


def _load(args):
    F = Field.parse(args.field) if args.field else None
    try:
        return load(args.file, F)
    except FileNotFoundError:
        raise UsageError(f"{args.file}: no such file") from None


def _quadratic_of(obj) -> QuadraticPresentation:
    if isinstance(obj, NonhomogPresentation):
        return obj.quad
    if isinstance(obj, QuadraticPresentation):
        return obj
    raise UsageError("this command needs a quadratic or nonhomogeneous presentation")


def _nonhomog_of(obj) -> NonhomogPresentation:
    if isinstance(obj, NonhomogPresentation):
        return obj
    if isinstance(obj, QuadraticPresentation):
        return NonhomogPresentation.homogeneous(obj)
    raise UsageError("this command needs a presentation file")


def _dims(S: GradedAlgebraSlice) -> list:
    return S.dims()


def _fmt_table(table: dict) -> str:
    return ", ".join(f"{_key(k)}: {v}" for k, v in table.items())


# ---------------------------------------------------------------------------
# commands


def cmd_check_quadratic(args, rep: Report):
    Q = _quadratic_of(_load(args))
    rep.say(f"presentation {Q.name or '(unnamed)'} over {Q.field}")
    rep.say(f"base ring dimension {Q.R.dim}, generators {Q.V.dim}, relations {Q.relation_dim} (over R)")
    left = is_projective_left(Q.V)
    right = is_projective_left(opposite_bimodule(Q.V))
    rep.verdict("left_projective", left)
    rep.verdict("right_projective", right)
    rep.say(f"generators left projective: {'yes' if left else 'no'}; right projective: {'yes' if right else 'no'}")
    S = build_quadratic_slice(Q, args.degree)
    rep.table("dims", _dims(S))
    rep.say(f"dimensions through degree {args.degree}: {_dims(S)}")
    gq = check_generated_and_quadratic(S, args.degree)
    for key in ("generated", "quadratic"):
        rep.verdict(key, gq[key].ok)
        rep.say(f"{key}: {'yes' if gq[key].ok else 'no'} through degree {args.degree}")
        if not gq[key].ok:
            rep.witness(key, gq[key].failure)
            rep.fail(EXIT_INTERNAL)


def cmd_dualize(args, rep: Report):
    Q = _quadratic_of(_load(args))
    D = quadratic_dual(Q)
    A = build_quadratic_slice(Q, args.degree)
    B = build_quadratic_slice(D, args.degree)
    rep.table("dims", _dims(A))
    rep.table("dual_dims", _dims(B))
    rep.say(f"dual of {Q.name or '(unnamed)'}: generators {D.V.dim}, relations {D.relation_dim}, side {D.side}")
    rep.say(f"dimensions:      {_dims(A)}")
    rep.say(f"dual dimensions: {_dims(B)}")
    if args.output:
        save(D, args.output)
        rep.say(f"wrote {args.output}")


def cmd_koszul(args, rep: Report):
    Q = _quadratic_of(_load(args))
    N = args.degree
    verdicts = {}
    if args.method in ("distributive", "both"):
        verdicts["distributive"] = check_koszul_distributive(Q, N)
    if args.method in ("tor", "both"):
        verdicts["tor"] = check_koszul_tor(Q, N)
    for name, v in verdicts.items():
        rep.verdict(name, v.ok)
        if not v.ok:
            rep.witness(name, v.failure)
    if "tor" in verdicts:
        rep.table("tor", verdicts["tor"].detail.get("tor", {}))
    oks = {v.ok for v in verdicts.values()}
    if len(oks) > 1:
        rep.say(f"methods DISAGREE up to {N}: " + ", ".join(f"{k} {'KOSZUL' if v.ok else 'NOT KOSZUL'}"
                                                           for k, v in verdicts.items()))
        rep.fail(EXIT_INTERNAL)
        return
    ok = oks.pop()
    line = f"{'KOSZUL' if ok else 'NOT KOSZUL'} up to {N}"
    if len(verdicts) > 1:
        line += "; methods agree"
    rep.say(line)
    for name, v in verdicts.items():
        if not v.ok:
            rep.say(f"{name} witness: {v.failure}")
    if not ok:
        rep.fail(EXIT_VERDICT)


def cmd_nonhomog_check(args, rep: Report):
    obj = _load(args)
    if not isinstance(obj, NonhomogPresentation):
        raise UsageError("nonhomog-check needs a nonhomogeneous presentation")
    r = verify_self_consistency(obj)
    for eq, ok in r.results.items():
        rep.verdict(f"({eq})", ok)
        if ok:
            rep.say(f"({eq}) holds")
        else:
            rep.say(f"({eq}) FAILS: witness {json.dumps(_plain(r.witnesses.get(eq)), sort_keys=True)}")
            rep.witness(f"({eq})", r.witnesses.get(eq))
    rep.say("self-consistent" if r.ok else f"not self-consistent; first failure ({r.first_failure()})")
    if not r.ok:
        rep.fail(EXIT_VERDICT)


def _cdg_from(args, obj, N: int) -> CdgRingSlice:
    if isinstance(obj, CdgRingSlice):
        return obj
    return build_cdg_dual(_nonhomog_of(obj), N, force=getattr(args, "force", False))


def cmd_cdg_dual(args, rep: Report):
    C = _cdg_from(args, _load(args), args.degree)
    rep.table("dims", C.dims())
    rep.say(f"CDG slice {C.name}: dimensions {C.dims()}")
    a = C.check_axioms()
    for name, ok in a.results.items():
        rep.verdict(name, ok)
        rep.say(f"{name}: {'ok' if ok else 'FAILS'}")
        if not ok:
            w = a.failures.get(name)
            rep.witness(name, {k: v for k, v in w.items() if k in ("degree", "degrees")}
                        if isinstance(w, dict) else None)
    if not a.ok:
        rep.fail(EXIT_VERDICT)
    if args.output:
        save(C, args.output)
        rep.say(f"wrote {args.output}")


def cmd_pbw(args, rep: Report):
    C = _cdg_from(args, _load(args), 3)
    res = pbw_reconstruct(C, args.degree, force=getattr(args, "force", False))
    dims = res.slice.dims()
    rep.table("filtration_dims", dims)
    rep.table("gr_cumulative", res.filtration_dims)
    rep.verdict("central", res.central)
    rep.verdict("t_injective", dict(res.t_injective))
    rep.verdict("gr_iso", dict(res.gr_iso))
    rep.say(f"dim F_n: {dims}")
    rep.say(f"cumulative gr dims: {res.filtration_dims}")
    if res.ok:
        rep.say(f"PBW certified through degree {args.degree}")
    else:
        bad = min([n for n, ok in res.t_injective.items() if not ok] +
                  [n for n, ok in res.gr_iso.items() if not ok] + [args.degree + 1])
        rep.witness("first_failure_degree", bad)
        rep.say(f"PBW FAILS; first counterexample degree {bad}")
        rep.fail(EXIT_VERDICT)


def cmd_complexes(args, rep: Report):
    obj = _load(args)
    M = args.budget
    if args.which in ("first", "second", "dual"):
        kp = koszul_pair(_quadratic_of(obj), M)
        K = {"first": first_koszul_complex, "second": second_koszul_complex,
             "dual": dual_koszul_complex}[args.which](kp)
        table = K.homology_table()
        rep.table("homology", table)
        rep.say(f"{K.name}, internal degrees through {M}")
        for s in K.internal_degrees():
            row = {p: table[(p, s)] for p in K.positions(s) if (p, s) in table}
            rep.say(f"  s={s}: " + ", ".join(f"H^{p}={v}" for p, v in row.items()))
        if args.which != "dual":
            exact = koszul_complex_exact(K, M)
            rep.verdict("exact", exact)
            rep.say("exact in internal degrees 1.." + str(M) if all(exact.values())
                    else f"NOT exact in degrees {[n for n, ok in exact.items() if not ok]}")
            if not all(exact.values()):
                rep.fail(EXIT_VERDICT)
        return
    C = _cdg_from(args, obj, max(3, min(M, 4)))
    D = two_sided_data(C, M)
    W = bimodule_resolution(D, M) if args.which == "resolution" else nonhomog_koszul_complex(D, M)
    table = W.complex.homology_table()
    rep.table("homology", table)
    rep.table("dims", W.complex.dims)
    rep.verdict("exact", W.exact)
    rep.say(f"{W.complex.name}, filtration layers through {M}")
    for s in W.complex.internal_degrees():
        row = {p: table[(p, s)] for p in W.complex.positions(s) if (p, s) in table}
        rep.say(f"  L={s}: " + ", ".join(f"H^{p}={v}" for p, v in row.items()))
    if W.complex.truncated:
        rep.say(f"  edge positions (no verdict): {sorted(W.complex.truncated)}")
    rep.say("exact" if W.exact else f"NOT exact: {_fmt_table(W.nonzero)}")
    if not W.exact:
        rep.witness("nonzero", W.nonzero)
        rep.fail(EXIT_VERDICT)


def cmd_frobenius(args, rep: Report):
    obj = _load(args)
    m = args.top
    if isinstance(obj, CdgRingSlice):
        S = obj.slice
    else:
        Q = _quadratic_of(obj)
        if args.dual:
            Q = quadratic_dual(Q)
        S = build_quadratic_slice(Q, m + 1)
    r = frobenius_check(S, m)
    for k, ok in r.checks.items():
        rep.verdict(k, ok)
        rep.say(f"{k}: {'ok' if ok else 'FAILS'}")
    rep.say(f"relatively Frobenius with top degree {m}" if r.ok
            else f"NOT relatively Frobenius with top degree {m} ({r.first_failure()})")
    if not r.ok:
        rep.fail(EXIT_VERDICT)


def cmd_convert(args, rep: Report):
    obj = _load(args)
    C = _cdg_from(args, obj, 3)
    D = two_sided_data(C, args.budget, opposite=True)
    r = conversion_bimodule(D, args.budget, args.top)
    rep.table("E_dims", r.E_dims)
    rep.verdict("acyclic_below_top", r.acyclic_below_top)
    rep.verdict("left_iso", r.left_iso)
    rep.verdict("right_iso", r.right_iso)
    rep.verdict("coherent", r.coherent)
    rep.verdict("opposite_iso", "not asserted" if r.opposite_iso is None else r.opposite_iso)
    rep.say(f"top degree m = {r.m}, filtration budget {r.M}")
    rep.say(f"dim E by layer: {_fmt_table(r.E_dims)}")
    rep.say(f"vanishing below degree {r.m}: {'ok' if r.acyclic_below_top else 'FAILS'}")
    rep.say(f"E = A~# (x) T on every layer: {'ok' if all(r.left_iso.values()) else 'FAILS'}")
    rep.say(f"E = T (x) A~ on every layer: {'ok' if all(r.right_iso.values()) else 'FAILS'}")
    rep.say(f"identifications agree on T: {'ok' if r.coherent else 'FAILS'}")
    op = "not asserted" if r.opposite_iso is None else ("ok" if r.opposite_iso else "FAILS")
    rep.say(f"A~# = A~^op: {op}")
    if not r.ok:
        rep.fail(EXIT_VERDICT)


def fuzz_one(seed: int, index: int, field: str, degree: int) -> dict:
    """One randomized cross-check; self-contained so it can run in a worker process."""
    F = Field.parse(field)
    rng = random.Random(f"{seed}:{index}")
    Q = random_presentation(F, rng)
    dist = check_koszul_distributive(Q, degree)
    tor = check_koszul_tor(Q, degree)
    kp = koszul_pair(Q, degree)
    first = all(koszul_complex_exact(first_koszul_complex(kp), degree).values())
    second = all(koszul_complex_exact(second_koszul_complex(kp), degree).values())
    agree = dist.ok == tor.ok == first == second
    return {"index": index, "name": Q.name, "dim": Q.V.dim, "base": Q.R.dim, "relations": Q.relation_dim,
            "distributive": dist.ok, "tor": tor.ok, "first": first, "second": second, "agree": agree}


def _threads(args) -> int:
    n = args.threads
    if n is None:
        env = os.environ.get("KOSZULKIT_THREADS")
        try:
            n = int(env) if env else 1
        except ValueError:
            raise UsageError(f"KOSZULKIT_THREADS={env!r} is not an integer") from None
    if n < 1:
        raise UsageError("--threads must be at least 1")
    return n


def cmd_fuzz(args, rep: Report):
    field = args.field or "fp:5"
    Field.parse(field)
    seed = 0 if args.seed is None else args.seed
    n = _threads(args)
    jobs = range(args.count)
    if n > 1:
        with ProcessPoolExecutor(max_workers=n) as ex:
            results = list(ex.map(fuzz_one, [seed] * args.count, jobs, [field] * args.count,
                                  [args.degree] * args.count))
    else:
        results = [fuzz_one(seed, i, field, args.degree) for i in jobs]
    bad = [r for r in results if not r["agree"]]
    koszul = sum(1 for r in results if r["tor"])
    rep.table("cases", results)
    rep.verdict("disagreements", len(bad))
    rep.say(f"{args.count} random presentations over {field}, seed {seed}, degree {args.degree}")
    rep.say(f"Koszul: {koszul}, not Koszul: {args.count - koszul}")
    rep.say(f"disagreements: {len(bad)}")
    for r in bad:
        rep.say(f"  case {r['index']} ({r['name']}): distributive {r['distributive']}, tor {r['tor']}, "
                f"first {r['first']}, second {r['second']}")
        rep.witness(f"case {r['index']}", r)
    if bad:
        rep.fail(EXIT_INTERNAL)


COMMANDS = {
    "check-quadratic": cmd_check_quadratic,
    "dualize": cmd_dualize,
    "koszul": cmd_koszul,
    "nonhomog-check": cmd_nonhomog_check,
    "cdg-dual": cmd_cdg_dual,
    "pbw": cmd_pbw,
    "complexes": cmd_complexes,
    "frobenius": cmd_frobenius,
    "convert": cmd_convert,
    "fuzz": cmd_fuzz,
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable report")
    common.add_argument("--field", help="q or fp:<p>; reinterprets the file's scalars")
    common.add_argument("--seed", type=int, help="seed for randomized commands")
    common.add_argument("--threads", type=int, help="worker count (wall time only); default KOSZULKIT_THREADS")

    p = _Parser(prog="koszulkit", description="Koszul duality computations on finite presentations.",
                parents=[common])
    p.add_argument("--version", action="version", version=f"koszulkit {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help_, degree=None, budget=False):
        sp = sub.add_parser(name, help=help_, parents=[common])
        if name != "fuzz":
            sp.add_argument("file")
        if degree is not None:
            sp.add_argument("--degree", type=int, default=degree)
        if budget:
            sp.add_argument("--budget", type=int, default=3)
        return sp

    add("check-quadratic", "invariants, projectivity and generation report", degree=4)
    sp = add("dualize", "quadratic dual and dimension tables", degree=4)
    sp.add_argument("-o", "--output")
    sp = add("koszul", "Koszulity verdict", degree=4)
    sp.add_argument("--method", choices=["distributive", "tor", "both"], default="both")
    add("nonhomog-check", "self-consistency equations of a nonhomogeneous presentation")
    sp = add("cdg-dual", "dual CDG-ring slice and its axioms", degree=3)
    sp.add_argument("-o", "--output")
    sp.add_argument("--force", action="store_true", help="build even when self-consistency fails")
    sp = add("pbw", "filtered dimensions and the PBW certificate", degree=4)
    sp.add_argument("--force", action="store_true", help="build even when self-consistency fails")
    sp = add("complexes", "homology of Koszul-type complexes", budget=True)
    sp.add_argument("--which", choices=["first", "second", "dual", "nonhomog", "resolution"], required=True)
    sp = add("frobenius", "relatively Frobenius check")
    sp.add_argument("--top", type=int, required=True)
    sp.add_argument("--dual", action="store_true", help="check the quadratic dual of the presented ring")
    sp = add("convert", "conversion bimodule and its one-sided identifications", budget=True)
    sp.add_argument("--top", type=int, help="top degree of B (default: the last nonzero degree)")
    sp = add("fuzz", "randomized agreement of the Koszulity checkers", degree=4)
    sp.add_argument("--count", type=int, default=200)
    return p


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
        for name in ("degree", "budget", "top", "count"):
            v = getattr(args, name, None)
            if v is not None and v < 0:
                raise UsageError(f"--{name} must be nonnegative")
        if args.field:
            try:
                Field.parse(args.field)
            except ValueError as exc:
                raise UsageError(str(exc)) from None
        _threads(args)
    except UsageError as exc:
        sys.stderr.write(f"koszulkit: error: {exc}\n")
        return EXIT_USER
    rep = Report(argv)
    try:
        COMMANDS[args.command](args, rep)
    except (UsageError, DocumentError) as exc:
        sys.stderr.write(f"koszulkit: error: {exc}\n")
        return EXIT_USER
    except (PreconditionError, ConsistencyError, WindowError) as exc:
        rep.say(f"precondition failed: {exc}")
        rep.verdict("precondition", str(exc))
        rep.fail(EXIT_VERDICT)
    except (ComplexError, InternalError) as exc:
        sys.stderr.write(f"koszulkit: internal invariant violated: {exc}\n")
        return EXIT_INTERNAL
    except (AlgebraError, DimensionError, ValueError) as exc:
        sys.stderr.write(f"koszulkit: error: {exc}\n")
        return EXIT_USER
    sys.stdout.write(rep.render(args.json))
    return rep.code


if __name__ == "__main__":
    sys.exit(main())
