"""Command line interface: ``toric-heights <command> ...``.

Exit codes: 0 on success, 2 for invalid input (bad files, failed
validation, violated preconditions), 1 for unexpected internal errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from typing import Sequence

from . import __version__
from .cones import Cone
from .counting import (count_table, fit_exponents, local_zeta_factor, local_zeta_truncated,
                       ratio_profile, tauberian_constant)
from .errors import FanValidationError, ToricError
from .fans import anticanonical_function, is_projective, PLFunction
from .formats import (csv_text, parse_fan_file, parse_grid, parse_matrix,
                      parse_rational, parse_vector, read_csv)
from .heights import TorusPoint, global_height
from .picard import line_bundle_data, picard_lattice
from .xfun import numeric_x, x_function, x_function_image, x_function_projected

log = logging.getLogger("toric_heights")


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _emit(payload: dict, fmt: str, out) -> None:
    if fmt == "json":
        json.dump(_jsonable(payload), out, indent=2, sort_keys=True)
        out.write("\n")
        return
    for key, val in payload.items():
        if isinstance(val, dict) and val:
            out.write(f"{key}:\n")
            for k, v in val.items():
                out.write(f"  {k}: {_jsonable(v)}\n")
        else:
            out.write(f"{key}: {_jsonable(val)}\n")


# -- commands ------------------------------------------------------------------------

def cmd_validate(args, out):
    fan, pl = parse_fan_file(args.fan)
    _emit({"valid": True, "rank": fan.rank, "rays": len(fan.rays),
           "max_cones": len(fan.max_cones), "projective": is_projective(fan),
           "pl_functions": sorted(pl)}, args.format, out)


def cmd_xfun(args, out):
    cone = Cone(len(parse_matrix(args.cone)[0]), parse_matrix(args.cone))
    if args.kernel and args.psi:
        raise ToricError("usage", "give at most one of --kernel and --psi")
    if args.kernel:
        x = x_function_projected(cone, parse_matrix(args.kernel))
    elif args.psi:
        x = x_function_image(cone, parse_matrix(args.psi))
    else:
        x = x_function(cone)
    payload = {"cone": [list(g) for g in x.cone.generators], "x_function": x.render()}
    if args.at:
        s = parse_vector(args.at)
        payload["value"] = x(s)
        if args.numeric:
            if args.kernel or args.psi:
                raise ToricError("usage", "--numeric needs a plain cone")
            est, err = numeric_x(cone, [float(v) for v in s], samples=args.samples, seed=args.seed)
            payload["numeric"] = est
            payload["numeric_error"] = err
    _emit(payload, args.format, out)


def _picard_payload(fan, pic, L=None):
    if L is None:
        return {"rank": pic.rank,
                "ray_classes": [list(c) for c in pic.ray_classes],
                "effective_cone_generators": [list(g) for g in pic.effective_cone.extremal_rays],
                "anticanonical": list(pic.project([1] * fan.n_rays))}
    return line_bundle_data(fan, L, pic).to_dict(pic)


def cmd_picard(args, out):
    fan, _ = parse_fan_file(args.fan)
    pic = picard_lattice(fan)
    L = parse_vector(args.L) if args.L else None
    _emit(_picard_payload(fan, pic, L), args.format, out)


def _resolve_pl(fan, named: dict, spec: str) -> PLFunction:
    if spec in named:
        return named[spec]
    if spec == "anticanonical":
        return anticanonical_function(fan)
    return PLFunction(fan, parse_vector(spec))


def cmd_height(args, out):
    fan, named = parse_fan_file(args.fan)
    phi = _resolve_pl(fan, named, args.pl)
    x = TorusPoint(parse_vector(args.point))
    h = global_height(x, phi)
    _emit({"point": [str(c) for c in x.coords], "height": _jsonable(h.value),
           "places": h.breakdown()}, args.format, out)


def _maybe_plot(table, fit, path, title):
    if path:
        from .plotting import plot_counts
        plot_counts(table, path, fit, title)
        log.info("wrote %s", path)


def cmd_count(args, out):
    fan, _ = parse_fan_file(args.fan)
    data = line_bundle_data(fan, parse_vector(args.L))
    table = count_table(fan, data.phi, parse_grid(args.B), partitions=args.partitions,
                        workers=args.workers, policy=args.policy)
    text = csv_text(table)
    if args.out:
        try:
            with open(args.out, "w") as fh:
                fh.write(text)
        except OSError as exc:
            raise ToricError("io-error", f"{args.out}: {exc.strerror}") from None
    elif args.format == "json":
        _emit({"a": data.a, "b": data.b,
               "rows": [{"B": r.B, "N": r.N, "ties": r.ties} for r in table]}, "json", out)
    else:
        out.write(text)
    if args.plot:
        fit = None
        try:
            fit = fit_exponents(table)
        except ToricError:
            pass
        _maybe_plot(table, fit, args.plot, f"{args.fan}, L = {args.L}")


def cmd_fit(args, out):
    table = read_csv(args.csv)
    fit = fit_exponents(table)
    payload = {"a": fit.a, "b": fit.b, "c": fit.c, "residual": fit.residual}
    if args.a is not None and args.b is not None:
        payload["ratio"] = {f"{B:g}": r for B, r in ratio_profile(table, parse_rational(args.a), args.b)}
    _emit(payload, args.format, out)
    _maybe_plot(table, fit, args.plot, str(args.csv))


def cmd_zeta_local(args, out):
    fan, _ = parse_fan_file(args.fan)
    u = parse_vector(args.u)
    payload = {"p": args.p, "u": list(u), "value": local_zeta_factor(fan, u, args.p)}
    if args.radius is not None:
        payload["truncated"] = local_zeta_truncated(fan, u, args.p, args.radius)
    for k in ("value", "truncated"):
        if k in payload and isinstance(payload[k], Fraction):
            payload[k + "_float"] = float(payload[k])
    _emit(payload, args.format, out)


def cmd_tauberian(args, out):
    a = parse_rational(args.a)
    g = parse_rational(args.g)
    c = tauberian_constant(a, args.b, g)
    _emit({"a": a, "b": args.b, "g": g, "constant": c}, args.format, out)


# -- parser -----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="toric-heights",
                                 description="Heights, X-functions and point counts on toric varieties.")
    ap.add_argument("--format", choices=("text", "json"), default="text")
    ap.add_argument("-v", "--verbose", action="store_true")
    ap.add_argument("--version", action="version", version=__version__)
    # --format is accepted before or after the command name
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default=argparse.SUPPRESS)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check the fan axioms")
    p.add_argument("fan")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("xfun", parents=[common], help="X-function of a cone, optionally of its image")
    p.add_argument("--cone", required=True, help='generators, e.g. "1,0;1,2"')
    p.add_argument("--kernel", help="kernel vectors of the quotient map")
    p.add_argument("--psi", help="integer matrix of the projection (rows)")
    p.add_argument("--at", help="evaluate at this point")
    p.add_argument("--numeric", action="store_true", help="also estimate the value by Monte Carlo")
    p.add_argument("--samples", type=int, default=200_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_xfun)

    p = sub.add_parser("picard", parents=[common], help="Picard lattice and a(L), b(L)")
    p.add_argument("fan")
    p.add_argument("-L", help="divisor class coordinates")
    p.set_defaults(func=cmd_picard)

    p = sub.add_parser("height", parents=[common], help="global height of a torus point")
    p.add_argument("fan")
    p.add_argument("--pl", default="anticanonical", help="named PL function or ray values")
    p.add_argument("--point", required=True, help='coordinates, e.g. "2/3,5"')
    p.set_defaults(func=cmd_height)

    p = sub.add_parser("count", parents=[common], help="count points of bounded height")
    p.add_argument("fan")
    p.add_argument("-L", required=True, help="divisor class coordinates")
    p.add_argument("-B", required=True, help='bounds: "4", "10,100,1000" or "1e2:1e5:13"')
    p.add_argument("--out", help="write the CSV here instead of stdout")
    p.add_argument("--plot", help="save a log-log figure (PNG)")
    p.add_argument("--partitions", type=int, default=1)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--policy", choices=("exact", "tolerance"), default="exact")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("fit", parents=[common], help="fit N ~ c B^a (log B)^(b-1) to a CSV table")
    p.add_argument("csv")
    p.add_argument("--plot", help="save a log-log figure (PNG)")
    p.add_argument("-a", help="report N / (B^a (log B)^(b-1)) for this a (needs -b)")
    p.add_argument("-b", type=int)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("zeta-local", parents=[common], help="local zeta factor at a prime")
    p.add_argument("fan")
    p.add_argument("-p", type=int, required=True)
    p.add_argument("-u", required=True, help="ray exponents")
    p.add_argument("--radius", type=int, help="also sum the lattice series up to this radius")
    p.set_defaults(func=cmd_zeta_local)

    p = sub.add_parser("tauberian", parents=[common], help="leading constant g / (a (b-1)!)")
    p.add_argument("-a", required=True)
    p.add_argument("-b", type=int, required=True)
    p.add_argument("-g", required=True)
    p.set_defaults(func=cmd_tauberian)
    return ap


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        args.func(args, out)
    except FanValidationError as exc:
        for v in exc.violations:
            print(f"error: {v}", file=sys.stderr)
        return 2
    except ToricError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        log.debug("internal error", exc_info=True)
        print(f"internal error: {exc!r}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
