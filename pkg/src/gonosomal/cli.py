"""Command-line entry point: ``gonosomal simulate|verify|sweep|analyze``.

Exit codes: 0 success, 1 check failure, 2 invalid input, 3 numeric failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from typing import Optional, Sequence

from . import analysis, output, verify
from .core import Arith, GonosomalError, fixed_point, format_scalar, parse_state
from .operators import CrossTable, GonosomalOperator, hemophilia_operator
from .spectra import RootFindingStalled

EXIT_OK, EXIT_CHECK_FAILED, EXIT_INVALID, EXIT_NUMERIC = 0, 1, 2, 3


class InputError(Exception):
    pass


def _shared(p: argparse.ArgumentParser, arith_default: str):
    p.add_argument("--arith", choices=["exact", "f64"], default=arith_default, help=f"arithmetic mode (default {arith_default})")
    p.add_argument("--seed", type=int, default=42, help="random seed (default 42)")
    p.add_argument("--out", default=None, help="output file (default stdout)")
    p.add_argument("--svg", default=None, help="optional SVG chart path")
    p.add_argument("--config", default=None, help="JSON file of flag defaults; flags override it")
    p.add_argument("--table", default=None, help="cross table JSON (default: hemophilia)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gonosomal", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="iterate W from one initial state and write the orbit as CSV")
    _shared(p, "f64")
    p.add_argument("--initial", required=True, help="x,y,u,v as decimals or p/q fractions")
    p.add_argument("--steps", type=int, default=100, help="number of generations (default 100)")
    p.add_argument("--eps", type=float, default=None, help="stop once L1 distance to (1/2,0,1/2,0) < eps")

    p = sub.add_parser("verify", help="run the lemma/fixed-point/spectrum check suite")
    _shared(p, "exact")
    p.add_argument("--samples", type=int, default=1000, help="random initial states (default 1000)")
    p.add_argument("--orbit-length", type=int, default=30, help="steps per orbit (default 30)")
    p.add_argument("--suite", action="append", default=None, help="run only these checks (repeatable, comma lists ok)")

    p = sub.add_parser("sweep", help="basin sweep over a barycentric lattice of S^{2,2}")
    _shared(p, "f64")
    p.add_argument("--grid", type=int, default=10, help="lattice points per axis (default 10)")
    p.add_argument("--eps", type=float, default=1e-4, help="L1 distance counted as arrival (default 1e-4)")
    p.add_argument("--max-iter", type=int, default=100_000, help="iteration budget per point (default 1e5)")
    p.add_argument("--workers", type=int, default=1, help="worker processes (default 1)")
    p.add_argument("--slice", default="y=v", choices=sorted(output.SLICES), help="heatmap slice (default y=v)")

    p = sub.add_parser("analyze", help="fixed points, Jacobians, spectra and decay rate")
    _shared(p, "f64")
    p.add_argument("--grid", type=int, default=20, help="fixed-point search lattice (default 20)")
    p.add_argument("--ref-steps", type=int, default=10_000, help="reference orbit length (default 1e4)")
    p.add_argument("--initial", default="0,1/2,1/2,0", help="reference orbit start")
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: Sequence[str]) -> None:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    with open(known.config, encoding="utf-8") as fh:
        settings = json.load(fh)
    if not isinstance(settings, dict):
        raise InputError("config file must hold a JSON object")
    sub_action = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    for sub in sub_action.choices.values():
        dests = {a.dest for a in sub._actions}
        sub.set_defaults(**{k.replace("-", "_"): v for k, v in settings.items() if k.replace("-", "_") in dests})
        for action in sub._actions:
            if action.required and action.dest in settings:
                action.required = False


def _operator(args) -> GonosomalOperator:
    if not args.table:
        return hemophilia_operator()
    with open(args.table, encoding="utf-8") as fh:
        return GonosomalOperator(CrossTable.loads(fh.read()))


def cmd_simulate(args) -> int:
    arith = Arith.parse(args.arith)
    s0 = parse_state(args.initial, arith)
    if args.steps < 1:
        raise InputError("--steps must be >= 1")
    op = _operator(args)
    eps = args.eps if args.eps is not None else 0
    if args.eps is not None and args.eps <= 0:
        raise InputError("--eps must be positive")
    traj = analysis.iterate(op, s0, args.steps, eps=eps, target=fixed_point(arith), max_exact_steps=max(args.steps, 1))
    output.optional_write(args.out, output.trajectory_csv(traj), sys.stdout)
    if args.svg:
        output.optional_write(args.svg, output.trajectory_svg(traj), sys.stdout)
    if traj.stop_reason is analysis.StopReason.EXACT_CAP_EXCEEDED:
        print(
            f"exact iteration stopped after {traj.steps_taken} steps: iterate size exceeded "
            f"{analysis.MAX_EXACT_BITS} bits (use --arith f64 for long runs)",
            file=sys.stderr,
        )
    elif traj.stop_reason is analysis.StopReason.DEGENERATE_SEX:
        print(f"orbit entered Theta after {traj.steps_taken} steps", file=sys.stderr)
    return EXIT_OK


def cmd_verify(args) -> int:
    only = None
    if args.suite:
        only = [name for chunk in args.suite for name in chunk.split(",") if name]
    try:
        names = verify.select_checks(only)
    except KeyError as exc:
        raise InputError(exc.args[0]) from None
    cfg = verify.SuiteConfig(
        sample_count=args.samples, seed=args.seed, arithmetic=Arith.parse(args.arith), orbit_length=args.orbit_length
    )
    results = verify.run_suite(cfg, names)
    output.optional_write(args.out, verify.report_text(cfg, results), sys.stdout)
    for r in results:
        status = "ok" if r.passed else "FAIL"
        print(f"{r.check_id:16s} {status:4s} samples={r.samples} failures={r.failures} worst={r.worst_violation:.3g}", file=sys.stderr)
    failed = [r for r in results if not r.passed]
    if failed:
        print(f"first failing check: {failed[0].check_id}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    return EXIT_OK


def cmd_sweep(args) -> int:
    if args.grid < 2:
        raise InputError("--grid must be >= 2")
    if args.eps <= 0 or args.max_iter < 1:
        raise InputError("--eps must be positive and --max-iter >= 1")
    op = _operator(args)
    records = analysis.basin_sweep(op, args.grid, args.eps, args.max_iter, args.workers)
    exact = Arith.parse(args.arith) is Arith.EXACT
    try:
        output.optional_write(args.out, output.sweep_csv(records, exact_initial=exact), sys.stdout)
        if args.svg:
            output.optional_write(args.svg, output.sweep_svg(records, args.grid, args.slice), sys.stdout)
    except OSError as exc:
        print(f"I/O failure: {exc}", file=sys.stderr)
        return EXIT_INVALID
    summary = output.summarise_sweep(records)
    print(
        f"{summary['converged']}/{summary['points']} lattice points reached eps={args.eps:g}; "
        f"max iterations {summary['max_iterations']}",
        file=sys.stderr,
    )
    for row in summary["not_reached"]:
        print(f"not reached: {row}", file=sys.stderr)
    return EXIT_OK


def _matrix_text(m) -> str:
    return "\n".join("  [" + ", ".join(f"{float(e): .6g}" for e in row) + "]" for row in m)


def cmd_analyze(args) -> int:
    op = _operator(args)
    lines = []
    reports = analysis.find_fixed_points(op, args.grid)
    lines.append(f"fixed points found on a {args.grid}-per-axis lattice: {len(reports)}")
    doc = {"fixed_points": []}
    for rep in reports:
        loc = ", ".join(format_scalar(c) for c in rep.location)
        lines.append(f"  location ({loc})  residual {format_scalar(rep.residual)}  {rep.classification}")
        lines.append("  Jacobian of W (finite differences):")
        lines.append(_matrix_text(rep.jacobian))
        lines.append("  eigenvalues: " + ", ".join(f"{complex(e).real:.12g}{complex(e).imag:+.2g}j" for e in rep.eigenvalues))
        doc["fixed_points"].append(
            {
                "location": [format_scalar(c) for c in rep.location],
                "residual": format_scalar(rep.residual),
                "jacobian": [[repr(float(e)) for e in row] for row in rep.jacobian],
                "eigenvalues": [repr(complex(e)) for e in rep.eigenvalues],
                "classification": rep.classification,
            }
        )
    jac_f, eig_f = analysis.reduced_fixed_point_spectrum()
    lines.append("reduced system at (0, 0):")
    lines.append(_matrix_text(jac_f))
    lines.append("  eigenvalues: " + ", ".join(format_scalar(Fraction(e)) if not isinstance(e, complex) else repr(e) for e in eig_f))
    doc["reduced"] = {
        "jacobian": [[format_scalar(Fraction(e)) for e in row] for row in jac_f],
        "eigenvalues": [format_scalar(Fraction(e)) for e in eig_f],
    }
    s0 = parse_state(args.initial, Arith.FLOAT)
    traj = analysis.iterate(op, s0, args.ref_steps)
    try:
        fit = analysis.estimate_decay_exponent(traj)
        lines.append(
            f"decay of alpha+beta along the orbit from ({args.initial}), {traj.steps_taken} steps: "
            f"exponent p = {fit.exponent:.4f} (fit rms {fit.residual:.2e}, window drift {fit.drift:.2e}, "
            f"power law {'yes' if fit.power_law else 'no'})"
        )
        doc["decay"] = {"exponent": fit.exponent, "rms": fit.residual, "drift": fit.drift, "power_law": fit.power_law}
    except analysis.InsufficientData as exc:
        lines.append(f"decay: not estimated ({exc})")
        doc["decay"] = None
    print("\n".join(lines))
    if args.out:
        output.optional_write(args.out, json.dumps(doc, indent=2) + "\n", sys.stdout)
    return EXIT_OK


COMMANDS = {"simulate": cmd_simulate, "verify": cmd_verify, "sweep": cmd_sweep, "analyze": cmd_analyze}


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    logging.basicConfig(level=logging.ERROR, format="%(levelname)s %(name)s: %(message)s")
    if hasattr(sys, "set_int_max_str_digits"):
        # exact iterates can reach tens of thousands of digits before the bit cap
        sys.set_int_max_str_digits(0)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except (analysis.NoConvergence, RootFindingStalled) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (GonosomalError, InputError, ValueError, OSError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
