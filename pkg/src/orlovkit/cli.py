"""``orlov`` command line front end.

Exit codes: 0 all checks pass, 1 parse or usage error, 2 precondition failed,
3 certificate or factorization check failed, 4 resource cap hit.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from . import __version__
from .complexes import NotAComplex, NotChainMap, WindowExceeded, cohomology_slice
from .errors import CertificateViolation, NotGorensteinInWindow, UnsupportedBase
from .formats import parse_mf_text, parse_module_text, parse_ring_text
from .grmod import PresentedModule, truncate_geq
from .grring import GradedRing, InhomogeneousRelation, NegativeWeight, ParseError, ResourceCapExceeded
from .mf import (
    MFIdentityViolation,
    PeriodicityNotDetected,
    complete_intersection,
    hom_over_R,
    hypersurface,
    mf_coker,
    mf_hom,
    psi,
    stabilize,
)
from .orlov import (
    CechUnstable,
    Probe,
    _measure,
    b_functor,
    free_module,
    gorenstein_parameters,
    local_cohomology,
    residue_module,
    truncation_triangle,
    verify_sod,
)
from .resolve import resolve, verify_escape

EXIT_OK, EXIT_PARSE, EXIT_PRECONDITION, EXIT_CERTIFICATE, EXIT_RESOURCE = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def load_ring(path: str) -> GradedRing:
    return parse_ring_text(_read(path))


def load_module(ring: GradedRing, source: Optional[str], default: str = "A") -> PresentedModule:
    """``A`` and ``A0`` name the ring and its degree-0 quotient; anything else is a file."""
    source = source or default
    if source == "A":
        return free_module(ring, 0)
    if source == "A0":
        return residue_module(ring)
    return parse_module_text(ring, _read(source))


def _describe(mod) -> dict:
    return mod.describe()


# -- subcommands: each returns (result dict, checks list) --------------------


def cmd_resolve(args):
    ring = load_ring(args.ring)
    M = load_module(ring, args.module)
    res = resolve(M, None, args.length, allow_general=True)
    P = res.complex
    checks = [{"name": "escape_table", "pass": verify_escape(res)}]
    for e in range(-args.e_window, args.e_window + 1):
        for j in range(P.lo + 1, 1):
            h = _measure(cohomology_slice(P, j, e))
            want = _measure(M.slice(e).base_module()) if j == 0 else 0
            checks.append({"name": "H^%d_%d" % (j, e), "got": h, "expected": want, "pass": h == want})
    result = {
        "lo": P.lo,
        "generator_degrees": {str(j): d for j, d in sorted(res.generator_degrees().items())},
        "escape": {str(i): j for i, j in sorted(res.escape.table.items())},
    }
    return result, checks


def cmd_gorenstein(args):
    ring = load_ring(args.ring)
    gd = gorenstein_parameters(ring, e_max=args.e_max)
    result = {"n": gd.n, "a": gd.a, "verified_window": gd.verified_window,
              "degree_window": list(gd.degree_window)}
    return result, [{"name": "unique_rank_one_ext", "pass": True}]


def cmd_truncate(args):
    ring = load_ring(args.ring)
    M = load_module(ring, args.module)
    tr = truncate_geq(M, args.i)
    window = range(-args.e_window, args.e_window + 1)
    rows = truncation_triangle(M, args.i, window)
    checks = [{"name": "slice_%d" % r["e"], "sub_quotient": r["lhs"], "whole": r["rhs"], "pass": r["pass"]}
              for r in rows]
    result = {"i": args.i, "sub_gens": list(tr.sub.gens), "quotient_gens": list(tr.quotient.gens)}
    return result, checks


def cmd_lc(args):
    ring = load_ring(args.ring)
    M = load_module(ring, args.module)
    j_max = args.j_max if args.j_max is not None else len(ring.pos_vars)
    table = local_cohomology(M, j_max, tuple(args.window))
    return table.to_json(), []


def cmd_bi(args):
    ring = load_ring(args.ring)
    M = load_module(ring, args.module, "A0")
    b = b_functor(M, args.i)
    C = b.module_complex
    rows = []
    for j in range(C.lo, C.hi + 1):
        for e in range(-args.e_window, args.e_window + 1):
            d = _measure(cohomology_slice(C, j, e))
            if d:
                rows.append({"j": j, "e": e, "dim": d})
    result = {"i": b.i, "t": b.t, "lo": C.lo, "hi": C.hi, "cohomology": rows}
    return result, []


def cmd_sod(args):
    ring = load_ring(args.ring)
    probes = [Probe(p, load_module(ring, p)) for p in (args.probe or [])]
    report = verify_sod(ring, args.i, args.case, probes=probes, m_max=args.m_max,
                        e_window=args.e_window, workers=args.workers)
    body = report.to_json()
    checks = body.pop("checks") + body.pop("triangles")
    body.pop("pass")
    return body, checks


def _load_mf(path: str):
    return parse_mf_text(_read(path))


def cmd_mf(args):
    if args.mf_command == "check":
        hd, E = _load_mf(args.file)
        return E.to_json(), [{"name": "identities", "pass": True}]
    if args.mf_command == "hom":
        hd, E = _load_mf(args.source)
        _, F = parse_mf_text(_read(args.target), hd.S)
        return {"dim": mf_hom(E, F)}, []
    if args.mf_command == "coker":
        hd, E = _load_mf(args.file)
        M = mf_coker(E)
        rows = [{"e": e, **_describe(M.slice(e).base_module())} for e in range(-args.e_window, args.e_window + 1)]
        return {"gens": list(M.gens), "slices": rows}, []
    # stabilize: the ring file is S/(W) with a single relation
    A = load_ring(args.ring)
    if len(A.relations) != 1:
        raise ValueError("stabilize needs a ring with exactly one relation W")
    S = GradedRing(A.field, A.names, A.weights, [])
    hd = hypersurface(S, A.relations[0])
    M = load_module(hd.A, args.module, "A0")
    E = stabilize(M, hd)
    return E.to_json(), [{"name": "identities", "pass": True}]


def cmd_psi(args):
    Q = load_ring(args.ring)
    ci = complete_intersection(Q, args.f)
    M = load_module(ci.R, args.module, "A")
    E = psi(ci, M)
    result = E.to_json()
    checks = []
    if args.check_hom:
        got, want = mf_hom(E, E), hom_over_R(ci, M, M)
        checks.append({"name": "end_matches", "got": got, "expected": want, "pass": got == want})
    return result, checks


# -- output ------------------------------------------------------------------


def build_report(command: str, result: dict, checks: list) -> dict:
    return {
        "metadata": {"tool": "orlovkit", "version": __version__},
        "command": command,
        "result": result,
        "checks": checks,
        "pass": all(c["pass"] for c in checks),
    }


def emit(report: dict, mode: str) -> str:
    if mode == "json":
        return json.dumps(report, sort_keys=True, indent=2, default=str) + "\n"
    lines = ["orlov %s (orlovkit %s)" % (report["command"], report["metadata"]["version"])]
    for k in sorted(report["result"]):
        lines.append("  %s: %s" % (k, json.dumps(report["result"][k], sort_keys=True, default=str)))
    checks = report["checks"]
    if checks:
        lines.append("")
        lines.append("  %-6s %s" % ("status", "check"))
        for c in checks:
            rest = ", ".join("%s=%s" % (k, c[k]) for k in sorted(c) if k != "pass")
            lines.append("  %-6s %s" % ("PASS" if c["pass"] else "FAIL", rest))
    lines.append("")
    lines.append("%d checks, %d failed" % (len(checks), sum(1 for c in checks if not c["pass"])))
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="orlov", description="Graded Gorenstein algebra certificates.")
    p.add_argument("--version", action="version", version="orlovkit " + __version__)
    p.add_argument("--json", action="store_true", help="emit a JSON report")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def ring_cmd(name, fn, help):
        sp = sub.add_parser(name, help=help)
        sp.add_argument("ring")
        sp.set_defaults(fn=fn)
        return sp

    sp = ring_cmd("resolve", cmd_resolve, "banded free resolution")
    sp.add_argument("--module")
    sp.add_argument("--length", type=int, default=6)
    sp.add_argument("--e-window", type=int, default=3)

    sp = ring_cmd("gorenstein", cmd_gorenstein, "Gorenstein parameters (n, a)")
    sp.add_argument("--e-max", type=int, default=6)

    sp = ring_cmd("truncate", cmd_truncate, "truncation M_{>=i}")
    sp.add_argument("--module")
    sp.add_argument("--i", type=int, default=0)
    sp.add_argument("--e-window", type=int, default=6)

    sp = ring_cmd("lc", cmd_lc, "local cohomology table")
    sp.add_argument("--module")
    sp.add_argument("--j-max", type=int)
    sp.add_argument("--window", type=int, nargs=2, default=[-6, 6], metavar=("LO", "HI"))

    sp = ring_cmd("bi", cmd_bi, "the functor b_i")
    sp.add_argument("--module")
    sp.add_argument("--i", type=int, default=0)
    sp.add_argument("--e-window", type=int, default=4)

    sp = ring_cmd("sod", cmd_sod, "verify a semiorthogonal decomposition")
    sp.add_argument("--case", required=True, choices=["TRUNCATION", "PERFECT", "TORSION", "MAIN"])
    sp.add_argument("--i", type=int, default=0)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--m-max", type=int, default=4)
    sp.add_argument("--e-window", type=int, default=3)
    sp.add_argument("--probe", action="append", help="extra module file (repeatable)")

    mf = sub.add_parser("mf", help="matrix factorizations")
    mf.set_defaults(fn=cmd_mf)
    msub = mf.add_subparsers(dest="mf_command", required=True, parser_class=_Parser)
    m = msub.add_parser("check")
    m.add_argument("file")
    m = msub.add_parser("hom")
    m.add_argument("source")
    m.add_argument("target")
    m = msub.add_parser("coker")
    m.add_argument("file")
    m.add_argument("--e-window", type=int, default=4)
    m = msub.add_parser("stabilize")
    m.add_argument("ring", help="ring file with the single relation W")
    m.add_argument("--module")

    sp = ring_cmd("psi", cmd_psi, "complete intersection to matrix factorization")
    sp.add_argument("--f", action="append", required=True, help="defining polynomial (repeatable)")
    sp.add_argument("--module")
    sp.add_argument("--check-hom", action="store_true")
    return p


def run(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        command = args.command + (" " + args.mf_command if args.command == "mf" else "")
        result, checks = args.fn(args)
    except (UsageError, ParseError, NegativeWeight, InhomogeneousRelation, OSError, UnicodeDecodeError) as ex:
        err.write("orlov: parse error: %s\n" % ex)
        return EXIT_PARSE
    except (CertificateViolation, MFIdentityViolation, NotChainMap, NotAComplex) as ex:
        err.write("orlov: check failed: %s: %s\n" % (type(ex).__name__, ex))
        return EXIT_CERTIFICATE
    except (ResourceCapExceeded, WindowExceeded, CechUnstable, PeriodicityNotDetected, RecursionError) as ex:
        err.write("orlov: resource cap: %s: %s\n" % (type(ex).__name__, ex))
        return EXIT_RESOURCE
    except (UnsupportedBase, NotGorensteinInWindow, ValueError) as ex:
        err.write("orlov: precondition: %s: %s\n" % (type(ex).__name__, ex))
        return EXIT_PRECONDITION
    report = build_report(command, result, checks)
    out.write(emit(report, "json" if args.json else "text"))
    return EXIT_OK if report["pass"] else EXIT_CERTIFICATE


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        return run(argv)
    except SystemExit as ex:  # --help / --version
        return int(ex.code or 0)


if __name__ == "__main__":
    sys.exit(main())
