"""Command-line front end.

Exit codes: 0 success, 2 usage error, 1 numeric failure (reported on stderr
as ``ERROR <code> <module> <detail>``).
"""
from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction
from math import pi
from typing import List, Optional

import numpy as np

from .basis import parse_basis
from .errors import FRKNError, InvalidParams
from .harness import FIGURE_NU_SWEEP, default_z_grid, empirical_order, method_spec, run_error_table
from .integrator import IntegratorConfig, integrate
from .problems import KeplerParams, linear_system, twobody_system
from .stability import radius_csv, region_csv, scan_region
from .tableau import as_nodes, derive_tableau, gauss_nodes, verify_orthogonality


class UsageError(Exception):
    pass


def parse_number(text: str) -> float:
    """Accept decimals, rationals like ``1/256`` and multiples of ``pi``."""
    text = text.strip().lower()
    try:
        if "pi" in text:
            coef = text.replace("*", "").replace("pi", "") or "1"
            num, _, den = coef.partition("/")
            value = pi * float(Fraction(num or "1"))
            return value / float(den) if den else value
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a number: {text!r}") from None


def parse_list(text: str) -> List[float]:
    """Comma list; ``a,b,...,z`` continues the geometric sequence a, b up to z."""
    items = [p.strip() for p in text.split(",") if p.strip()]
    if "..." not in items:
        return [parse_number(p) for p in items]
    k = items.index("...")
    if k < 2 or k != len(items) - 2:
        raise UsageError(f"'...' needs two leading terms and one final term: {text!r}")
    head = [parse_number(p) for p in items[:k]]
    last = parse_number(items[-1])
    ratio = head[-1] / head[-2]
    if ratio <= 0 or ratio == 1:
        raise UsageError(f"cannot continue sequence {items[:k]}")
    values = list(head)
    while True:
        nxt = values[-1] * ratio
        if (ratio < 1 and nxt < last * (1 - 1e-12)) or (ratio > 1 and nxt > last * (1 + 1e-12)):
            break
        values.append(nxt)
    if not np.isclose(values[-1], last, rtol=1e-12):
        raise UsageError(f"{items[-1]} is not reached by the sequence {items[:k]}")
    values[-1] = last
    return values


def parse_nodes(text: str) -> np.ndarray:
    text = text.strip().lower()
    if text.startswith("gauss"):
        _, _, s = text.partition(":")
        return gauss_nodes(int(s) if s else 2)
    try:
        return as_nodes(parse_list(text))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def format_sci(x: float, digits: int = 4) -> str:
    """Scientific notation without exponent padding, e.g. ``-6.6667e-2``."""
    mant, _, exp = f"{x:.{digits}e}".partition("e")
    return f"{mant}e{int(exp)}"


def _write(text: str, output: Optional[str]) -> None:
    if output in (None, "-"):
        sys.stdout.write(text)
        return
    with open(output, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def cmd_tableau(args) -> int:
    basis = parse_basis(args.basis)
    c = parse_nodes(args.nodes)
    if (args.h is None) == (args.nu is None):
        raise UsageError("give exactly one of --h or --nu")
    if args.h is not None:
        h = parse_number(args.h)
    else:
        nu = parse_number(args.nu)
        h = nu / basis.scale if basis.scale else nu
    tab = derive_tableau(basis, c, h, t=parse_number(args.t), extended=args.variant == "extended")
    if args.format == "json":
        _write(tab.to_json(), args.output)
    else:
        f = lambda v: format(float(v), ".17g")
        lines = ["name,values", "c," + ",".join(map(f, tab.c))]
        lines += [f"A{i + 1}," + ",".join(map(f, row)) for i, row in enumerate(tab.A)]
        lines += ["b," + ",".join(map(f, tab.b)), "d," + ",".join(map(f, tab.d))]
        if tab.extended is not None:
            lines += [f"d0x,{f(tab.extended[0])}", "dx," + ",".join(map(f, tab.extended[1]))]
        _write("\n".join(lines) + "\n", args.output)
    return 0


def cmd_integrate(args) -> int:
    if args.method:
        spec = method_spec(args.method)
        basis, c, variant = spec.basis, spec.nodes, spec.variant
    else:
        if not args.basis:
            raise UsageError("give --method or --basis")
        basis, c, variant = parse_basis(args.basis), parse_nodes(args.nodes), args.variant
    if args.problem == "twobody":
        sys_ = twobody_system(KeplerParams(parse_number(args.e)))
    else:
        y0 = parse_list(args.y0)
        yp0 = parse_list(args.yp0)
        sys_ = linear_system(parse_number(args.lam), y0, yp0)
    cfg = IntegratorConfig(stage_tol=args.stage_tol, variant=variant)
    traj = integrate(basis, sys_, 0.0, parse_number(args.t_end), parse_number(args.h), cfg, nodes=c)
    if args.format == "json":
        from .tableau import dump_json
        payload = {"t": traj.t.tolist(), "y": traj.y.tolist(), "yp": traj.yp.tolist()}
        _write(dump_json(payload) + "\n", args.output)
    else:
        _write(traj.to_csv(), args.output)
    return 0


def cmd_converge(args) -> int:
    h_list = parse_list(args.h_list)
    if any(h <= 0 for h in h_list):
        raise UsageError("step sizes must be positive")
    table = run_error_table(args.method, parse_number(args.e), h_list)
    text = table.to_json() if args.format == "json" else table.to_csv()
    output = args.output
    if output and os.path.isdir(output):
        output = os.path.join(output, table.filename(args.format))
    _write(text, output)
    if len(table.rows) >= 3:
        o1, o2 = empirical_order(table)
        print(f"# {table.method_label} e={table.e:g}: fitted order y1={o1:.3f} y2={o2:.3f}; "
              f"wall time {sum(table.seconds):.2f}s", file=sys.stderr)
    return 0


def cmd_stability(args) -> int:
    if args.method:
        spec = method_spec(args.method)
        basis, c = spec.basis, spec.nodes
    else:
        if not args.basis:
            raise UsageError("give --method or --basis")
        basis, c = parse_basis(args.basis), parse_nodes(args.nodes)
    nus = list(FIGURE_NU_SWEEP) if args.nu is None else parse_list(args.nu)
    z_min, z_max, dz = parse_number(args.z_min), parse_number(args.z_max), parse_number(args.z_step)
    if dz <= 0 or z_min > z_max or z_max > 0:
        raise UsageError("need z-step > 0 and z-min <= z-max <= 0")
    z_grid = default_z_grid(z_min, z_max, dz)
    samples = scan_region(basis, c, nus, z_grid)
    if args.curve:
        if len(nus) != 1:
            raise UsageError("--curve takes exactly one nu")
        _write(radius_csv(samples), args.output)
    else:
        _write(region_csv(samples), args.output)
    return 0


def cmd_orthogonality(args) -> int:
    c = parse_nodes(args.nodes)
    if args.q < 1:
        raise UsageError("--q must be >= 1")
    ok, residuals = verify_orthogonality(c, args.q)
    parts = ["true" if ok else "false"] + [f"residual{j}={format_sci(r)}" for j, r in enumerate(residuals)]
    _write(" ".join(parts) + "\n", args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="frkn", description="Functionally fitted RKN methods")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("tableau", help="derive a fitted tableau")
    p.add_argument("--basis", required=True, help='e.g. "trig:omega=1,n=1"')
    p.add_argument("--nodes", default="gauss", help='"gauss" or a comma list such as 0.2,1')
    p.add_argument("--h")
    p.add_argument("--nu", help="dimensionless step; h = nu / basis frequency")
    p.add_argument("--t", default="0")
    p.add_argument("--variant", choices=("standard", "extended"), default="standard")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--output")
    p.set_defaults(func=cmd_tableau)

    p = sub.add_parser("integrate", help="integrate a bundled problem, trajectory CSV")
    p.add_argument("--problem", choices=("twobody", "linear"), default="twobody")
    p.add_argument("--e", default="0.5")
    p.add_argument("--lambda", dest="lam", default="-1")
    p.add_argument("--y0", default="1")
    p.add_argument("--yp0", default="0")
    p.add_argument("--method", help="FRKN2G, RKN2G, FRKN2, FRKN2x, RKN2 or RKN2x")
    p.add_argument("--basis")
    p.add_argument("--nodes", default="gauss")
    p.add_argument("--variant", choices=("standard", "extended"), default="standard")
    p.add_argument("--h", required=True)
    p.add_argument("--t-end", default="20")
    p.add_argument("--stage-tol", type=float, default=1e-14)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output")
    p.set_defaults(func=cmd_integrate)

    p = sub.add_parser("converge", help="error table on the two-body problem")
    p.add_argument("--method", required=True)
    p.add_argument("--e", required=True)
    p.add_argument("--h-list", required=True, help='e.g. "1/2,1/4,...,1/256"')
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output", help="file, or directory for {method}_e{e}.csv")
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("stability", help="spectral radius scan on the negative z axis")
    p.add_argument("--method")
    p.add_argument("--basis")
    p.add_argument("--nodes", default="gauss")
    p.add_argument("--nu", help="comma list, accepts pi multiples (default: a sweep from 0.1 to 5.8)")
    p.add_argument("--z-min", default="-12")
    p.add_argument("--z-max", default="-0.01")
    p.add_argument("--z-step", default="0.01")
    p.add_argument("--curve", action="store_true", help="emit z,rho for a single nu")
    p.add_argument("--output")
    p.set_defaults(func=cmd_stability)

    p = sub.add_parser("orthogonality", help="check the node orthogonality conditions")
    p.add_argument("--nodes", required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--output")
    p.set_defaults(func=cmd_orthogonality)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, InvalidParams) as exc:
        print(f"frkn {args.subcommand}: error: {exc}", file=sys.stderr)
        return 2
    except FRKNError as exc:
        print(f"ERROR {exc.code} {exc.module} {exc.detail}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"frkn {args.subcommand}: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"ERROR IO_ERROR cli {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
