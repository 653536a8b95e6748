"""Command-line interface.

Exit codes: 0 ok, 1 usage or input error, 2 budget exceeded, 3 resource cap
hit (a partial trace is still written), 4 cost-model version mismatch,
5 verification failed.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from . import enumeration as E
from . import serialize as J
from .density import DensityTrace, build_dense_subset
from .evaluate import evaluate, evaluate_bounded
from .documents import verify_document
from .ideal import IdealTrace, PsiFixture, build_ideal, coding_reduction
from .sparse import SparseTrace, build_sparse
from .syntax import ParseError, parse, render
from .terms import ArityError

EXIT_OK, EXIT_USAGE, EXIT_BUDGET, EXIT_CAP, EXIT_VERSION, EXIT_VERIFY = 0, 1, 2, 3, 4, 5


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit with 2, which means "budget" here
        raise UsageError(message)


def _nat(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a natural number: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"not a natural number: {text!r}")
    return v


def _pos(text: str) -> int:
    v = _nat(text)
    if v == 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="prm", description="Step-counted primitive recursive workbench.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ev = sub.add_parser("eval", help="evaluate a term or an enumerated index")
    ev.add_argument("term", help="term text, or an index with --index")
    ev.add_argument("args", nargs="*", type=_nat)
    ev.add_argument("--index", action="store_true", help="treat TERM as a unary index")
    ev.add_argument("--budget", type=_nat)

    en = sub.add_parser("enum", help="numbering utilities")
    esub = en.add_subparsers(dest="action", required=True, parser_class=_Parser)
    d = esub.add_parser("decode")
    d.add_argument("index", type=_nat)
    c = esub.add_parser("encode")
    c.add_argument("term")
    s = esub.add_parser("scan", help="least K covering all unary terms up to a size")
    s.add_argument("--size", type=_pos, default=3)

    b = sub.add_parser("build", help="run a construction and write its trace")
    bsub = b.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    bs = bsub.add_parser("sparse")
    bs.add_argument("--stages", type=_pos, required=True)
    bs.add_argument("--cap", type=_pos, help="frame cap per stage (default $PRM_RESOURCE_CAP or 10^7)")
    bs.add_argument("--out", required=True)
    bd = bsub.add_parser("density")
    bd.add_argument("--sparse", required=True)
    grp = bd.add_mutually_exclusive_group(required=True)
    grp.add_argument("--x-index", type=_nat)
    grp.add_argument("--x-term")
    bd.add_argument("--ticks", type=_pos, default=10**6)
    bd.add_argument("--requirements", type=_pos, default=3)
    bd.add_argument("--out", required=True)
    bi = bsub.add_parser("ideal")
    bi.add_argument("--sparse", required=True)
    bi.add_argument("--psi", default="constant:0", help="constant:U | eventually:U0:U1:AT | two:U0:U1")
    bi.add_argument("--out", required=True)

    v = sub.add_parser("verify", help="re-derive and check a trace")
    v.add_argument("trace")
    v.add_argument("--sparse", help="the sparse trace a density or ideal trace was built on")
    v.add_argument("--requirements", type=_pos, default=1, help="coding certificates to check (ideal)")

    i = sub.add_parser("inspect", help="summarize a trace")
    i.add_argument("trace")
    return p


def _load(path: str) -> dict:
    try:
        return J.load(path)
    except FileNotFoundError:
        raise UsageError(f"no such file: {path}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: not JSON ({exc})") from None


def _load_sparse(path: str) -> SparseTrace:
    return SparseTrace.from_json(_load(path))


def _resolve_term(text: str, as_index: bool):
    if as_index:
        try:
            return E.decode(int(text))
        except ValueError:
            raise UsageError(f"not an index: {text!r}") from None
    return parse(text)


def cmd_eval(ns, out) -> int:
    term = _resolve_term(ns.term, ns.index)
    try:
        if ns.budget is None:
            res = evaluate(term, ns.args)
        else:
            res = evaluate_bounded(term, ns.args, ns.budget)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if res is None:
        print(f"exceeded budget {ns.budget}", file=out)
        return EXIT_BUDGET
    print(f"value {res.value} steps {res.steps}", file=out)
    return EXIT_OK


def cmd_enum(ns, out) -> int:
    if ns.action == "decode":
        print(render(E.decode(ns.index)), file=out)
    elif ns.action == "encode":
        try:
            print(E.encode(parse(ns.term)), file=out)
        except ValueError as exc:
            if isinstance(exc, (ParseError, ArityError)):
                raise
            raise UsageError(str(exc)) from None
    else:
        k = E.coverage_scan(ns.size)
        if k is None:
            print("scan limit reached", file=out)
            return EXIT_CAP
        print(k, file=out)
    return EXIT_OK


def cmd_build(ns, out) -> int:
    if ns.kind == "sparse":
        tr = build_sparse(ns.stages, cap=ns.cap)
        J.dump(tr.to_json(), ns.out)
        print(f"sparse: {tr.stages_completed} stages, prefix {tr.prefix_end}, "
              f"|A| = {len(tr.members())}", file=out)
        if tr.truncated:
            print(f"truncated: {tr.truncated}", file=out)
            return EXIT_CAP
        return EXIT_OK
    sp = _load_sparse(ns.sparse)
    if ns.kind == "density":
        x = ns.x_index if ns.x_term is None else E.encode(parse(ns.x_term))
        dt = build_dense_subset(x, sp, ns.requirements, ns.ticks)
        J.dump(dt.to_json(), ns.out)
        states = ", ".join(f"R{s['i']}:{s['status']}" for s in dt.statuses)
        print(f"density: Y prefix {len(dt.y_bits)}, ticks {dt.ticks_run}, {states}"
              + (" (prefix exhausted)" if dt.exhausted else ""), file=out)
        return EXIT_OK
    try:
        psi = PsiFixture.parse(ns.psi)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    it = build_ideal(sp, psi)
    J.dump(it.to_json(), ns.out)
    cr = coding_reduction(0, it, sp)
    print(f"ideal: g on [0, {len(it.g_table)}), {len(it.records)} coding locations, "
          f"requirement 0: {cr.status}", file=out)
    return EXIT_OK


def cmd_verify(ns, out) -> int:
    doc = _load(ns.trace)
    if not isinstance(doc, dict):
        raise UsageError(f"{ns.trace}: not a trace document")
    J.check_version(doc)
    sparse = _load_sparse(ns.sparse) if ns.sparse else None
    try:
        rep = verify_document(doc, sparse, ns.requirements)
    except ValueError as exc:
        if isinstance(exc, J.VersionMismatch):
            raise
        raise UsageError(str(exc)) from None
    print(json.dumps(rep.to_json(), sort_keys=True), file=out)
    return EXIT_OK if rep.passed else EXIT_VERIFY


def cmd_inspect(ns, out) -> int:
    doc = _load(ns.trace)
    kind = doc.get("kind")
    if kind == "sparse":
        tr = SparseTrace.from_json(doc)
        print(f"sparse trace, {tr.stages_completed} stages", file=out)
        print(f"  f = {tr.f_table}", file=out)
        print(f"  A = {tr.members()}", file=out)
        for r in tr.records:
            print(f"  stage {r.stage}: z={r.z} N={r.N} w={r.w} A(f(s))={r.a_bit}", file=out)
    elif kind == "density":
        dt = DensityTrace.from_json(doc)
        print(f"density trace for X index {dt.x_index}, Y prefix {len(dt.y_bits)}", file=out)
        for s in dt.statuses:
            print("  " + ", ".join(f"{k}={v}" for k, v in s.items()), file=out)
    elif kind == "ideal":
        it = IdealTrace.from_json(doc)
        print(f"ideal trace, psi {it.psi.kind}{list(it.psi.params)}, g on [0, {len(it.g_table)})",
              file=out)
        print(f"  C = {[x for x, b in enumerate(it.ci_bits) if b]}", file=out)
        print(f"  coding locations = {[r.x for r in it.records]}", file=out)
    else:
        raise UsageError(f"unknown trace kind {kind!r}")
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        ns = build_parser().parse_args(argv)
        handler = {"eval": cmd_eval, "enum": cmd_enum, "build": cmd_build,
                   "verify": cmd_verify, "inspect": cmd_inspect}[ns.command]
        return handler(ns, out)
    except UsageError as exc:
        print(f"prm: {exc}", file=err)
        return EXIT_USAGE
    except (ParseError, ArityError) as exc:
        print(f"prm: {exc}", file=err)
        return EXIT_USAGE
    except J.VersionMismatch as exc:
        print(f"prm: {exc}", file=err)
        return EXIT_VERSION
    except J.TraceFormatError as exc:
        print(f"prm: malformed trace: {exc}", file=err)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
