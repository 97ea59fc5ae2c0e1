"""Command-line front end.

Exit codes: 0 success, 1 usage or input error, 2 certificate failure,
3 budget or precision exhausted.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import mpmath

from . import generators, lattice, report, torus
from .errors import BudgetError, CertificateError, ErrInvalidQuadruple, InputError, PoorToriError
from .exact import RationalPoly

EXIT_OK, EXIT_USAGE, EXIT_CERT, EXIT_BUDGET = 0, 1, 2, 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _common(p: argparse.ArgumentParser):
    p.add_argument("--out", help="write JSON here instead of stdout")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--prime-budget", type=int, default=report.DEFAULT_GALOIS_BUDGET)


def _torus_flags(p):
    p.add_argument("--signature", help="embedding bitstring of length g")
    p.add_argument("--precision", type=int, default=torus.DEFAULT_PRECISION, help="bits")
    p.add_argument("--height-bound", type=int, default=lattice.DEFAULT_HEIGHT)
    p.add_argument("--tol", default="1e-40")
    p.add_argument("--basis", help="JSON integer matrix; columns are lattice basis vectors in the power basis")


def _source_flags(p):
    p.add_argument("--poly", help="polynomial file (JSON or text)")
    p.add_argument("--kind", choices=("exp", "selmer", "mori"), help="generate instead of reading --poly")
    p.add_argument("--g", type=int)
    p.add_argument("--l", type=int)
    p.add_argument("--p", type=int)
    p.add_argument("--b", type=int)
    p.add_argument("--c", type=int)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="poortori", description="Certified poor complex tori from explicit number fields.")
    sub = ap.add_subparsers(dest="cmd", parser_class=_Parser)

    for name in ("gen-exp", "gen-selmer"):
        p = sub.add_parser(name)
        p.add_argument("--g", type=int, required=True)
        p.add_argument("--certify", action="store_true")
        _common(p)

    p = sub.add_parser("gen-mori")
    p.add_argument("--g", type=int, required=True)
    for k in ("l", "p", "b", "c"):
        p.add_argument(f"--{k}", type=int)
    p.add_argument("--certify", action="store_true")
    p.add_argument("--force", action="store_true", help="emit the polynomial even if the quadruple is not admissible")
    p.add_argument("--c-budget", type=int, default=generators.DEFAULT_C_BUDGET)
    _common(p)

    p = sub.add_parser("certify")
    _source_flags(p)
    _common(p)

    for name in ("torus", "invariants"):
        p = sub.add_parser(name)
        _source_flags(p)
        _torus_flags(p)
        _common(p)

    p = sub.add_parser("family")
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--out")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--prime-budget", type=int, default=generators.DEFAULT_PRIME_BUDGET)
    p.add_argument("--c-budget", type=int, default=generators.DEFAULT_C_BUDGET)

    p = sub.add_parser("selfcheck")
    p.add_argument("--out")
    p.add_argument("--format", choices=("json", "text"), default="text")
    return ap


def _emit(args, payload: bytes, text: str):
    data = payload if args.format == "json" else text.encode()
    if args.out:
        Path(args.out).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        if not data.endswith(b"\n"):
            sys.stdout.buffer.write(b"\n")
        sys.stdout.flush()


def _read_poly(path: str) -> RationalPoly:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise _UsageError(f"cannot read {path}: {exc.strerror}") from exc
    return RationalPoly.parse(text)


def _need(args, *names):
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        raise _UsageError("missing " + ", ".join("--" + n for n in missing))


def _mori_params(args):
    _need(args, "g")
    given = [getattr(args, k) for k in ("l", "p", "b", "c")]
    if all(v is None for v in given):
        q = generators.search_quadruple(
            args.g, c_budget=getattr(args, "c_budget", generators.DEFAULT_C_BUDGET)
        )
        return q.l, q.p, q.b, q.c
    _need(args, "l", "p", "b", "c")
    return args.l, args.p, args.b, args.c


def _source_report(args, **kw) -> report.TorusReport:
    if args.poly and args.kind:
        raise _UsageError("--poly and --kind are exclusive")
    if args.poly:
        return report.custom_report(_read_poly(args.poly), **kw)
    if args.kind is None:
        raise _UsageError("one of --poly or --kind is required")
    _need(args, "g")
    if args.kind == "exp":
        return report.exp_report(args.g, **kw)
    if args.kind == "selmer":
        return report.selmer_report(args.g, **kw)
    return report.mori_report(args.g, *_mori_params(args), **kw)


def _finish(args, rep: report.TorusReport) -> int:
    _emit(args, report.serialize(rep), report.render_text(rep))
    return EXIT_CERT if rep.status != "OK" else EXIT_OK


def _torus_kw(args) -> dict:
    try:
        tol = mpmath.mpf(args.tol)
    except (ValueError, TypeError) as exc:
        raise _UsageError(f"bad --tol {args.tol!r}") from exc
    basis = None
    if args.basis:
        try:
            basis = json.loads(Path(args.basis).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise _UsageError(f"cannot read basis matrix {args.basis}: {exc}") from exc
    return dict(signature=args.signature, precision=args.precision, H=args.height_bound, tol=tol, basis=basis)


def _cmd_gen(args) -> int:
    kw = dict(certify=args.certify, prime_budget=args.prime_budget)
    if args.cmd == "gen-exp":
        return _finish(args, report.exp_report(args.g, **kw))
    if args.cmd == "gen-selmer":
        return _finish(args, report.selmer_report(args.g, **kw))
    g, (l, p, b, c) = args.g, _mori_params(args)
    quad = generators.is_admissible(g, l, p, b, c)
    if not quad.valid and not (args.force or args.certify):
        raise ErrInvalidQuadruple(f"quadruple fails {quad.failed()}; use --force or --certify")
    return _finish(args, report.mori_report(g, l, p, b, c, **kw))


def _cmd_family(args) -> int:
    fam = generators.build_family(args.g, args.count, prime_budget=args.prime_budget, c_budget=args.c_budget)
    obj = report.family_json(fam)
    lines = []
    for i, m in enumerate(fam.members):
        q = m.quadruple
        w = f"ell={m.witness.ell} v={m.witness.disc_valuation}" if m.witness else "-"
        lines.append(f"member {i}: (l,p,b,c)=({q.l},{q.p},{q.b},{q.c}) {m.poly}  witness {w}")
    _emit(args, json.dumps(obj, sort_keys=True, indent=2).encode(), "\n".join(lines) + "\n")
    return EXIT_OK


def selfcheck() -> tuple[bool, list[str]]:
    lines, ok = [], True
    J = torus.complex_structure(torus.gaussian_period_matrix(2))
    ns, end = lattice.ns_rank(J, 10**6), lattice.end_rank(J, 10**6)
    good = ns.rank == 4 and end.rank == 8 and ns.method == lattice.EXACT
    ok &= good
    lines.append(f"{'PASS' if good else 'FAIL'} gaussian control: ns={ns.rank} end={end.rank} ({ns.method})")
    rep = report.mori_report(2, 3, 7, 5, -16, invariants=True)
    inv = rep.invariants
    good = rep.status == "OK" and inv["nsRank"]["rank"] == "0" and inv["endRank"]["rank"] == "4"
    ok &= good
    lines.append(
        f"{'PASS' if good else 'FAIL'} mori (3,7,5,-16): status={rep.status} "
        f"ns={inv['nsRank']['rank'] if inv else '-'} end={inv['endRank']['rank'] if inv else '-'}"
    )
    return ok, lines


def _dispatch(args) -> int:
    if args.cmd is None:
        raise _UsageError("a subcommand is required")
    if args.cmd.startswith("gen-"):
        return _cmd_gen(args)
    if args.cmd == "certify":
        return _finish(args, _source_report(args, certify=True, prime_budget=args.prime_budget))
    if args.cmd == "torus":
        return _finish(args, _source_report(args, build_torus=True, prime_budget=args.prime_budget, **_torus_kw(args)))
    if args.cmd == "invariants":
        return _finish(args, _source_report(args, invariants=True, prime_budget=args.prime_budget, **_torus_kw(args)))
    if args.cmd == "family":
        return _cmd_family(args)
    ok, lines = selfcheck()
    text = "\n".join(lines) + "\n"
    _emit(args, json.dumps({"ok": ok, "checks": lines}, sort_keys=True, indent=2).encode(), text)
    return EXIT_OK if ok else EXIT_CERT


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return _dispatch(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InputError as exc:
        print(f"input error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CertificateError as exc:
        print(f"certificate failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CERT
    except BudgetError as exc:
        print(f"budget exhausted: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except PoorToriError as exc:
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
