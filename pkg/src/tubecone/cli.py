"""Command-line entry point: validate | info | certify | refute | oracle-gap | verify."""

from __future__ import annotations

import argparse
import json
import re
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from .categories import Category, builtin, load_category
from .cone import Certificate, CertificateError, ConeSupport, SOSMap, verify_certificate
from .fusion_ring import FusionDataError, LaplacianSpec, build_laplacian, validate_fusion_data
from .oracle import OracleError, admissible_spectrum, build_gns
from .scalars import format_rational, is_exact
from .sdp import SDPError, SolverOptions, SupportTooSmall, build_refutation_problem, certify, extract_refutation, solve
from .skeleton import SkeletonError, dimension_crosscheck, pentagon_check, standard_solution, unitarity_check
from .tube import TubeAlgebra, tube_axiom_report

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3

_RATIONAL = re.compile(r"^\s*-?\d+(\s*/\s*\d+)?\s*$")


class InputError(ValueError):
    pass


def exact_rational(text: str, what: str) -> Fraction:
    """Parse "num/den" or an integer; decimals are refused."""
    if not _RATIONAL.match(text):
        raise InputError(f"{what} must be an exact rational written num/den, got {text!r}")
    try:
        return Fraction(text.replace(" ", ""))
    except ZeroDivisionError as exc:
        raise InputError(f"{what} has a zero denominator") from exc


# -- configuration ----------------------------------------------------------------------------
def load_from_args(args) -> Category:
    if bool(args.builtin) == bool(args.file):
        raise InputError("give exactly one of --builtin or --file")
    if args.builtin:
        try:
            return builtin(args.builtin)
        except KeyError as exc:
            raise InputError(exc.args[0]) from exc
    path = Path(args.file)
    if not path.is_file():
        raise InputError(f"category file {path} does not exist")
    return load_category(path)


def laplacian_from_args(args, cat: Category, alg: TubeAlgebra):
    data = cat.data
    if args.S:
        names = [s.strip() for s in args.S.split(",") if s.strip()]
    else:
        names = [n for i, n in enumerate(data.names) if i != data.unit]
    for n in names:
        if n not in data.names:
            raise InputError(f"--S names unknown simple {n!r}; simples are {list(data.names)}")
    nu = None
    if args.nu:
        nu = {}
        for item in args.nu.split(","):
            if "=" not in item:
                raise InputError(f"--nu entries look like name=num/den, got {item!r}")
            k, v = item.split("=", 1)
            nu[k.strip()] = exact_rational(v, f"weight of {k.strip()}")
        missing = [n for n in names if n not in nu]
        if missing:
            raise InputError(f"--nu gives no weight for {missing}")
    spec = LaplacianSpec.create(data, names, alg.dims, nu)
    return spec, build_laplacian(spec, data)


def support_from_args(args, alg: TubeAlgebra, spec) -> ConeSupport:
    if args.radius is None:
        return ConeSupport(alg)
    if args.radius < 0:
        raise InputError("--radius must be non-negative")
    return ConeSupport.ball(alg, spec.S, args.radius)


def options_from_args(args, default_tol: float) -> SolverOptions:
    return SolverOptions(tol=args.tol if args.tol is not None else default_tol, seed=args.seed)


def _fmt(x, digits=12) -> str:
    return f"{float(x):.{digits}f}"


def _dim_text(d) -> str:
    if hasattr(d, "to_sympy"):
        return f"{_fmt(d)} = {d.to_sympy()}"
    if is_exact(d):
        return format_rational(d)
    return _fmt(complex(d).real)


# -- commands ---------------------------------------------------------------------------------
def cmd_validate(args, out) -> int:
    cat = load_from_args(args)
    data, F = cat.data, cat.F
    failures = []

    def check(label, ok, detail):
        print(f"{'pass' if ok else 'FAIL'}  {label}: {detail}", file=out)
        if not ok:
            failures.append(label)

    rep = validate_fusion_data(data)
    check("fusion rules", rep.ok, "consistent" if rep.ok else "; ".join(rep.violations))
    pent = pentagon_check(F)
    check("pentagon equation", pent < 1e-9, f"max residual {pent:.3e}")
    uni = unitarity_check(F)
    check("F-matrix unitarity", uni < 1e-9, f"max residual {uni:.3e}")
    for z in range(data.rank):
        name = data.names[z]
        try:
            res = standard_solution(z, F).residuals()
        except SkeletonError as exc:
            check(f"conjugate equations for {name}", False, str(exc))
            continue
        worst = max(res.values())
        check(f"conjugate equations for {name}", worst < 1e-10,
              ", ".join(f"{k} {v:.1e}" for k, v in res.items()))
    if failures:
        print(f"validation failed: {', '.join(failures)}", file=out)
        return EXIT_FAIL
    dc = dimension_crosscheck(F)
    check("dimensions against Frobenius-Perron", dc < 1e-9, f"max deviation {dc:.3e}")
    alg = TubeAlgebra(F).to_float()
    tr = tube_axiom_report(alg, trials=args.trials, seed=args.seed)
    check("tube algebra axioms", tr.ok(), f"{args.trials} random triples")
    for line in tr.lines():
        print(f"      {line}", file=out)
    if failures:
        print(f"validation failed: {', '.join(failures)}", file=out)
        return EXIT_FAIL
    print("validation passed", file=out)
    return EXIT_OK


def cmd_info(args, out) -> int:
    cat = load_from_args(args)
    data, F = cat.data, cat.F
    print(f"category {cat.name}  field {cat.field_tag}  rank {data.rank}", file=out)
    print(f"simples {', '.join(data.names)}  unit {data.names[data.unit]}", file=out)
    print("duals " + ", ".join(f"{data.names[a]}->{data.names[data.dual[a]]}" for a in range(data.rank)), file=out)
    for a, d in enumerate(F.dims()):
        print(f"d({data.names[a]}) = {_dim_text(d)}", file=out)
    for a in range(data.rank):
        rows = "; ".join(" ".join(str(int(v)) for v in row) for row in data.fusion_matrix(a))
        print(f"N_{data.names[a]} = [{rows}]", file=out)
    alg = TubeAlgebra(F)
    print(f"tube algebra dimension {alg.dim}", file=out)
    sizes = ConeSupport(alg).block_sizes()
    print("cone blocks " + ", ".join(f"{data.names[x]}:{n}" for x, n in sizes.items()), file=out)
    return EXIT_OK


def _gap_report(alg: TubeAlgebra, delta, tol: float):
    model = build_gns(alg)
    return admissible_spectrum(model, delta, tol)


def cmd_oracle(args, out) -> int:
    cat = load_from_args(args)
    alg = TubeAlgebra(cat.F)
    spec, delta = laplacian_from_args(args, cat, alg)
    rep = _gap_report(alg, delta, args.tol if args.tol is not None else 1e-9)
    for line in rep.lines():
        print(line, file=out)
    record = {"category": cat.name, "S": [cat.data.names[s] for s in spec.S],
              "spectrum": [round(float(v), 12) + 0.0 for v in rep.eigenvalues],
              "gap": None if rep.gap is None else round(rep.gap, 12),
              "zero_multiplicity": rep.zero_multiplicity}
    text = json.dumps(record, sort_keys=True)
    print(f"json {text}", file=out)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    return EXIT_OK


def _witness_path(out_path: str) -> Path:
    p = Path(out_path)
    return p.with_name(p.stem + ".witness.json")


def cmd_refute(args, out) -> int:
    cat = load_from_args(args)
    if args.k is None:
        raise InputError("refute needs --k")
    k = exact_rational(args.k, "k")
    alg = TubeAlgebra(cat.F).to_float()
    spec, delta = laplacian_from_args(args, cat, alg)
    sosmap = SOSMap(support_from_args(args, alg, spec))
    options = options_from_args(args, 1e-10)
    prob = build_refutation_problem(sosmap, delta, k, options)
    sol = solve(prob, options)
    print(f"refutation solve: status {sol.status}, optimum u = {sol.u:.9f}", file=out)
    witness = extract_refutation(prob, sol, delta, k)
    path = Path(args.out or "witness.json")
    witness.save(path)
    phi = ", ".join(f"phi({n}) = {complex(v).real:.9f}" for n, v in witness.values.items())
    print(phi, file=out)
    print(f"phi(Delta^2 - k Delta) = {witness.value:.9f}, cone margin {witness.margin:.3e}", file=out)
    print(f"witness written to {path}", file=out)
    if witness.value < 0 and witness.margin >= -1e-8:
        print(f"k = {format_rational(k)} is refuted on this support", file=out)
        return EXIT_OK
    print(f"k = {format_rational(k)} is not refuted", file=out)
    return EXIT_FAIL


def cmd_certify(args, out) -> int:
    cat = load_from_args(args)
    if args.eps is None:
        raise InputError("certify needs --eps")
    eps = exact_rational(args.eps, "eps")
    if eps <= 0:
        raise InputError("eps must be positive")
    k = None
    if args.k is not None:
        k = exact_rational(args.k, "k")
    alg = TubeAlgebra(cat.F)
    spec, delta = laplacian_from_args(args, cat, alg)
    try:
        rep = _gap_report(alg, delta, 1e-9)
        print(f"oracle gap {'none' if rep.gap is None else f'{rep.gap:.12f}'}", file=out)
    except OracleError as exc:
        print(f"oracle unavailable: {exc}", file=out)
    support = support_from_args(args, alg, spec)
    options = options_from_args(args, 1e-12)
    res = certify(cat, spec, delta, eps, k=k, sosmap=SOSMap(support), options=options)
    for m in res.messages:
        print(m, file=out)
    path = Path(args.out or "certificate.json")
    if res.ok:
        res.certificate.save(path)
        again = verify_certificate(Certificate.load(path))
        if not again.accepted:
            print("certificate failed to re-verify from file", file=out)
            return EXIT_FAIL
        print(f"certified: Delta^2 - ({format_rational(res.k)}) Delta + ({format_rational(eps)}) 1 "
              f"is a sum of squares; k = {float(res.k):.12f}", file=out)
        print(f"certificate written to {path}", file=out)
        return EXIT_OK
    if res.witness is not None:
        wpath = _witness_path(str(path))
        res.witness.save(wpath)
        print(f"refutation witness written to {wpath}", file=out)
        return EXIT_FAIL
    if res.k is None:
        return EXIT_NUMERIC
    print("no certificate and no refutation at this k; try a larger --radius or a smaller k", file=out)
    return EXIT_FAIL


def cmd_verify(args, out) -> int:
    if not args.certificate:
        raise InputError("verify needs a certificate path")
    path = Path(args.certificate)
    if not path.is_file():
        raise InputError(f"certificate file {path} does not exist")
    cert = Certificate.load(path)
    verdict = verify_certificate(cert)
    print(verdict.summary(), file=out)
    return EXIT_OK if verdict.accepted else EXIT_FAIL


COMMANDS = {
    "validate": cmd_validate,
    "info": cmd_info,
    "certify": cmd_certify,
    "refute": cmd_refute,
    "oracle-gap": cmd_oracle,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tubecone",
                                description="Tube algebras of fusion categories and sum-of-squares certificates.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("certificate", nargs="?", help="certificate file (verify only)")
    p.add_argument("--builtin", help="built-in category: vec_z2, vec_z3, fib, ising or vec_zN")
    p.add_argument("--file", help="category JSON file")
    p.add_argument("--S", help="comma-separated generating set (default: all non-unit simples)")
    p.add_argument("--nu", help="weights as name=num/den,... (default: 1 on S)")
    p.add_argument("--eps", help="epsilon as num/den")
    p.add_argument("--k", help="fixed k as num/den (certify searches for k when omitted)")
    p.add_argument("--radius", type=int, help="truncate the cone support to this ball radius")
    p.add_argument("--tol", type=float, help="solver (or oracle) tolerance")
    p.add_argument("--seed", type=int, default=0, help="solver seed")
    p.add_argument("--trials", type=int, default=100, help="random triples for validate")
    p.add_argument("--out", help="output file")
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_INPUT
    try:
        return COMMANDS[args.command](args, out)
    except (InputError, FusionDataError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CertificateError as exc:
        print(f"certificate error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC if args.command == "certify" else EXIT_FAIL
    except SupportTooSmall as exc:
        print(f"{exc}; try a larger --radius", file=sys.stderr)
        return EXIT_FAIL
    except (SkeletonError, SDPError, OracleError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
