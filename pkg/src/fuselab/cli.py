"""Command-line driver: ``fuselab validate|amen|norm|pf-dim|catalog``.

Exit codes: validate 0 (clean) / 1 (violations); amen 0 (AMENABLE_NUMERIC),
3 (NOT_AMENABLE_CERTIFIED), 4 (INCONCLUSIVE); 2 for usage and input errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import re
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__, catalog
from .algebra import DEFAULT_EPS_DIM, FusionAlgebra, pf_dimension, validate_axioms
from .elements import RingElement
from .errors import FuselabError
from .module import FusionModule, regular_module, validate_module
from .spectral import (
    POWER_MAX_ITER,
    POWER_TOL,
    START_VECTOR,
    AffineWeights,
    ProbabilityMeasure,
    TableWeights,
    Verdict,
    amenability_test,
    build_gamma,
    enumerate_ball,
    module_verdict,
    norm_lower_bound,
)
from .specfile import build, parse_spec

log = logging.getLogger("fuselab")

EXIT_OK = 0
EXIT_VIOLATIONS = 1
EXIT_USAGE = 2
VERDICT_EXIT = {
    Verdict.AMENABLE_NUMERIC: 0,
    Verdict.NOT_AMENABLE_CERTIFIED: 3,
    Verdict.INCONCLUSIVE: 4,
}
DEFAULT_RADII = "25,50,100,200"
DEFAULT_AMEN_TOL = 1e-3


class UsageError(Exception):
    pass


def _digest(target: str) -> str:
    path = Path(target)
    data = path.read_bytes() if path.is_file() else target.encode()
    return hashlib.sha256(data).hexdigest()


def load_target(target: str) -> FusionAlgebra | FusionModule:
    """A spec file path, or a catalog id."""
    if Path(target).is_file():
        return build(parse_spec(target))
    return catalog.resolve(target)


def load_module(target: str) -> FusionModule:
    obj = load_target(target)
    return obj if isinstance(obj, FusionModule) else regular_module(obj)


def load_certificate(M: FusionModule, ref: str):
    """Catalog family name (``affine``, ``constant``, ``dimension``) or a JSON file.

    File form: ``{"pattern": "u{k}", "slope": 1, "intercept": 1, "lower": 0,
    "translation_invariant": true, "C": "4"}`` or ``{"weights": {...}, "C": ...}``.
    """
    path = Path(ref)
    if not path.is_file():
        return catalog.weight_family(M, ref), None
    data = json.loads(path.read_text(encoding="utf-8"))
    C = data.get("C")
    C = None if C is None else Fraction(str(C))
    if "weights" in data:
        return TableWeights(data["weights"], name=path.name), C
    pattern = data["pattern"]
    if pattern.count("{k}") != 1:
        raise UsageError("certificate pattern must contain exactly one '{k}'")
    head, tail = pattern.split("{k}")
    rx = re.compile("^" + re.escape(head) + r"(-?\d+)" + re.escape(tail) + "$")

    def index(label: str) -> int:
        m = rx.match(label)
        if not m:
            raise UsageError(f"label {label!r} does not match certificate pattern {pattern!r}")
        return int(m.group(1))

    fam = AffineWeights(
        index,
        lambda k: f"{head}{k}{tail}",
        Fraction(str(data.get("slope", 0))),
        Fraction(str(data.get("intercept", 1))),
        lower=data.get("lower", 0),
        name=path.name,
        translation_invariant=bool(data.get("translation_invariant", False)),
    )
    return fam, C


def _radii(text: str) -> list[int]:
    try:
        radii = [int(r) for r in text.split(",") if r.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad radius list {text!r}") from None
    if not radii or min(radii) < 0:
        raise argparse.ArgumentTypeError("radii must be nonnegative integers")
    return radii


def _base_report(args, command: str) -> dict:
    return {
        "command": command,
        "argv": list(args.argv),
        "target": args.target,
        "input_sha256": _digest(args.target),
        "version": __version__,
        "power_iteration": {"start": START_VECTOR, "max_iter": POWER_MAX_ITER, "tol": POWER_TOL},
    }


def cmd_validate(args, out) -> tuple[int, dict]:
    if args.radius < 1:
        raise UsageError("--radius must be >= 1")
    obj = load_target(args.target)
    report = _base_report(args, "validate")
    report.update({"radius": args.radius, "eps_dim": args.tol})
    results = []
    if isinstance(obj, FusionModule):
        results.append(validate_axioms(obj.algebra, args.radius, args.tol))
        results.append(validate_module(obj, args.radius, args.tol))
    else:
        results.append(validate_axioms(obj, args.radius, args.tol))
    report["checks"] = []
    total = 0
    for rep in results:
        print(f"{rep.subject}: radius {rep.radius}, {sum(rep.checks.values())} checks, "
              f"{len(rep.violations)} violations", file=out)
        for v in rep.violations:
            print(f"  VIOLATION {v}", file=out)
        total += len(rep.violations)
        report["checks"].append({
            "subject": rep.subject,
            "counts": rep.checks,
            "violations": [{"kind": v.kind, "labels": list(v.labels), "detail": v.detail} for v in rep.violations],
        })
    report["ok"] = total == 0
    print("OK" if total == 0 else f"FAILED ({total} violations)", file=out)
    return (EXIT_OK if total == 0 else EXIT_VIOLATIONS), report


def cmd_amen(args, out) -> tuple[int, dict]:
    M = load_module(args.target)
    tests: list = [RingElement.parse(t) for t in (args.test or [])]
    tests += [ProbabilityMeasure.parse(m) for m in (args.measure or [])]
    if not tests:
        tests = [RingElement.parse(g) for g in M.algebra.generators]
    certificate = None
    if args.certificate:
        fam, C = load_certificate(M, args.certificate)
        certificate = (fam, C)
    report = _base_report(args, "amen")
    report.update({"radii": args.radii, "tol": args.tol, "results": []})
    reports = []
    for t in tests:
        cert = certificate if isinstance(t, RingElement) else None
        rep = amenability_test(M, t, args.radii, tol=args.tol, certificate=cert)
        reports.append(rep)
        report["results"].append(rep.to_dict())
        print(f"module {M.name}  test {rep.test}  symmetrized {rep.symmetrized}  target {rep.target:.12g}", file=out)
        print(f"  {'radius':>7} {'window':>7} {'bound':>18} {'iters':>7} conv", file=out)
        for t_ in rep.trace:
            print(f"  {t_.radius:>7} {t_.window_size:>7} {t_.bound:>18.12f} {t_.iterations:>7} {'yes' if t_.converged else 'no'}", file=out)
        if rep.upper_certificate is not None:
            c = rep.upper_certificate
            state = "certified" if c.certified else "rejected"
            print(f"  certificate {c.family}: {state} bound {c.bound} ({float(c.bound):.12g})", file=out)
            for line in c.log:
                print(f"    {line}", file=out)
        print(f"  verdict {rep.verdict.value} (final bound {rep.final_bound:.12g}, tol {rep.tol:g})", file=out)
    verdict = module_verdict(reports)
    report["verdict"] = verdict.value
    if len(reports) > 1:
        print(f"module verdict {verdict.value}", file=out)
    return VERDICT_EXIT[verdict], report


def cmd_norm(args, out) -> tuple[int, dict]:
    M = load_module(args.target)
    u = M.algebra.element(RingElement.parse(args.element))
    window = enumerate_ball(M, u, args.radius)
    nb = norm_lower_bound(build_gamma(M, u, window))
    ceiling = float(M.algebra.dim_of(u))
    ok = nb.value <= ceiling * (1 + DEFAULT_EPS_DIM) + DEFAULT_EPS_DIM
    print(f"{'radius':>7} {'window':>7} {'bound':>18} {'ceiling':>18}", file=out)
    print(f"{args.radius:>7} {len(window):>7} {nb.value:>18.12f} {ceiling:>18.12g}", file=out)
    if not ok:
        print("ERROR: lower bound exceeds the dimension ceiling", file=out)
    report = _base_report(args, "norm")
    report.update({"element": str(u), "radius": args.radius, "window": len(window), "bound": nb.value,
                   "iterations": nb.iterations, "converged": nb.converged, "ceiling": ceiling, "ok": ok})
    return (EXIT_OK if ok else EXIT_VIOLATIONS), report


def cmd_pf_dim(args, out) -> tuple[int, dict]:
    obj = load_target(args.target)
    A = obj.algebra if isinstance(obj, FusionModule) else obj
    dims = pf_dimension(A)
    worst = 0.0
    for x in A.basis:
        for y in A.basis:
            lhs = dims[x] * dims[y]
            rhs = sum(n * dims[z] for z, n in A.product(x, y).items())
            worst = max(worst, abs(lhs - rhs) / max(lhs, 1.0))
    for lab in A.basis:
        print(f"{lab:>10} {dims[lab]:.12f}", file=out)
    ok = worst <= args.tol
    print(f"max relative multiplicativity defect {worst:.3e} ({'ok' if ok else 'FAILED'})", file=out)
    report = _base_report(args, "pf-dim")
    report.update({"dimensions": dims, "max_defect": worst, "ok": ok})
    return (EXIT_OK if ok else EXIT_VIOLATIONS), report


def cmd_catalog(args, out) -> tuple[int, dict]:
    rows = []
    for e in catalog.ENTRIES:
        print(f"{e.id:<10} {e.kind:<8} {e.parameters:<22} {e.description}", file=out)
        print(f"{'':<10} examples: {', '.join(e.examples)}; {e.expectations}", file=out)
        rows.append(vars(e) | {"examples": list(e.examples)})
    return EXIT_OK, {"command": "catalog", "entries": rows}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fuselab", description="Fusion modules and their amenability.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def target(p):
        p.add_argument("target", help="catalog id (e.g. torus:N=2) or spec file path")
        p.add_argument("--json", metavar="PATH", help="write a machine-readable report")

    p = sub.add_parser("validate", help="check fusion algebra / module axioms on a ball")
    target(p)
    p.add_argument("--radius", type=int, default=8)
    p.add_argument("--tol", type=float, default=DEFAULT_EPS_DIM)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("amen", help="amenability verdict for test elements")
    target(p)
    p.add_argument("--test", action="append", help="positive element, e.g. '2*u1 + u3' (repeatable)")
    p.add_argument("--measure", action="append", help="probability measure, e.g. '1/2:u0, 1/2:u1'")
    p.add_argument("--radii", type=_radii, default=_radii(DEFAULT_RADII))
    p.add_argument("--tol", type=float, default=DEFAULT_AMEN_TOL)
    p.add_argument("--certificate", help="weight family name (affine, constant, dimension) or JSON file")
    p.set_defaults(func=cmd_amen)

    p = sub.add_parser("norm", help="lower bound for ||Gamma_u|| against the dimension ceiling")
    target(p)
    p.add_argument("--element", required=True)
    p.add_argument("--radius", type=int, default=50)
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("pf-dim", help="Perron-Frobenius dimensions of a finite algebra")
    target(p)
    p.add_argument("--tol", type=float, default=DEFAULT_EPS_DIM)
    p.set_defaults(func=cmd_pf_dim)

    p = sub.add_parser("catalog", help="list catalog entries")
    p.add_argument("--json", metavar="PATH")
    p.set_defaults(func=cmd_catalog)
    return parser


def main(argv: list[str] | None = None, out=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    out = sys.stdout if out is None else out
    parser = build_parser()
    args = parser.parse_args(argv)
    args.argv = argv
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.command == "validate" and args.radius < 1:
        parser.error("--radius must be >= 1")
    start = time.perf_counter()
    try:
        code, report = args.func(args, out)
    except (FuselabError, UsageError, ValueError, KeyError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report["exit_code"] = code
    report["seconds"] = round(time.perf_counter() - start, 6)
    if args.json:
        Path(args.json).write_text(json.dumps(report, indent=2, default=str) + "\n", encoding="utf-8")
    return code


if __name__ == "__main__":
    sys.exit(main())
