"""Command-line interface: parameter tables, fidelity sweeps and grids, verification.

Angles are given and reported in degrees.  Exit codes: 0 success, 1 user or
configuration error, 2 verification failure.

If ``COMPOSITE_PULSES_OUTPUT_DIR`` is set, relative ``--output`` paths are
resolved against it.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
from pathlib import Path

from composite_pulses.analysis import grid, sweep
from composite_pulses.exceptions import DomainError
from composite_pulses.families import (
    CorpseIndices,
    build_bb1,
    build_corpse,
    build_plain,
    build_scrofulous,
    corpse_angles,
    scrofulous_is_extrapolated,
    scrofulous_params,
    wn_phases,
)

OUTPUT_DIR_ENV = "COMPOSITE_PULSES_OUTPUT_DIR"
FAMILIES = ("plain", "corpse", "short-corpse", "scrofulous", "bb1")
TABLE_ANGLES_DEG = (30, 45, 90, 180)

EXIT_OK, EXIT_USER, EXIT_VERIFY = 0, 1, 2


class UserError(Exception):
    pass


def fmt_data(x: float) -> str:
    """12 significant digits, no negative zero."""
    s = f"{x:.12g}"
    return "0" if s in ("-0", "0") else s


def fmt_table(x: float) -> str:
    s = f"{x:.1f}"
    return "0.0" if s == "-0.0" else s


# ---------------------------------------------------------------------------
# Sequence selection
# ---------------------------------------------------------------------------


def _corpse_indices(args) -> CorpseIndices:
    if args.corpse_n is not None:
        return CorpseIndices(*args.corpse_n)
    return CorpseIndices(0, 1, 0) if args.family == "short-corpse" else CorpseIndices(1, 1, 0)


def _placements(args):
    n = args.wn
    if args.placements is None:
        return [0.0] * n
    return list(args.placements)


def build_sequence(args):
    theta = math.radians(args.theta)
    phi = math.radians(args.phi)
    if args.family == "plain":
        return build_plain(theta, phi)
    if args.family in ("corpse", "short-corpse"):
        return build_corpse(theta, _corpse_indices(args), phi)
    if args.family == "scrofulous":
        return build_scrofulous(theta, phi, args.sign)
    return build_bb1(theta, args.wn, _placements(args), phi)


def params_table(args) -> tuple[list[str], list[list[str]]]:
    theta = math.radians(args.theta)
    if args.family == "plain":
        return ["theta", "phi"], [[fmt_table(args.theta), fmt_table(args.phi % 360.0)]]
    if args.family in ("corpse", "short-corpse"):
        angles = corpse_angles(theta, _corpse_indices(args))
        return ["theta", "theta1", "theta2", "theta3"], [[fmt_table(args.theta), *(fmt_table(math.degrees(a)) for a in angles)]]
    if args.family == "scrofulous":
        values = scrofulous_params(theta, args.sign)
        row = [fmt_table(args.theta), *(fmt_table(math.degrees(v)) for v in values)]
        row.append("1" if scrofulous_is_extrapolated(theta) else "0")
        return ["theta", "theta1", "phi1", "theta2", "phi2", "extrapolated"], [row]
    phi1, phi2 = wn_phases(theta, args.wn)
    return ["theta", "phi1", "phi2"], [[fmt_table(args.theta), fmt_table(math.degrees(phi1)), fmt_table(math.degrees(phi2))]]


# ---------------------------------------------------------------------------
# Commands.  Each returns the full output text; nothing is written on error.
# ---------------------------------------------------------------------------


def _csv(header, rows) -> str:
    lines = [",".join(header)] + [",".join(r) for r in rows]
    return "\n".join(lines) + "\n"


def cmd_params(args) -> str:
    if args.format == "json":
        return json.dumps(build_sequence(args).to_dict(), indent=2) + "\n"
    build_sequence(args)  # runs the zero-error self-check
    return _csv(*params_table(args))


def cmd_tables(args) -> str:
    out = io.StringIO()
    out.write("# Table I: CORPSE, target theta_x, phases +x -x +x\n")
    out.write("theta,theta1,theta2,theta3\n")
    for d in TABLE_ANGLES_DEG:
        out.write(",".join([fmt_table(d), *(fmt_table(math.degrees(a)) for a in corpse_angles(math.radians(d)))]) + "\n")
    out.write("\n# Table II: SCROFULOUS, target theta_x, theta3=theta1 phi3=phi1\n")
    out.write("theta,theta1,phi1,theta2,phi2\n")
    for d in TABLE_ANGLES_DEG:
        out.write(",".join([fmt_table(d), *(fmt_table(math.degrees(a)) for a in scrofulous_params(math.radians(d)))]) + "\n")
    out.write("\n# Table III: W1 phases, target theta_x, pulses 180 360 180\n")
    out.write("theta,phi1,phi2\n")
    for d in TABLE_ANGLES_DEG:
        out.write(",".join([fmt_table(d), *(fmt_table(math.degrees(a)) for a in wn_phases(math.radians(d), 1))]) + "\n")
    return out.getvalue()


def cmd_sweep(args) -> str:
    seq = build_sequence(args)
    baseline = build_plain(seq.target.theta, seq.target.phi)
    res = sweep(seq, args.axis, args.lo, args.hi, args.count)
    base = sweep(baseline, args.axis, args.lo, args.hi, args.count)
    if args.format == "json":
        doc = {
            "axis": res.axis,
            "sequence_id": res.sequence_id,
            "sequence": seq.to_dict(),
            "samples": [
                {"error_value": float(fmt_data(e)), "fidelity_composite": float(fmt_data(fc)), "fidelity_plain": float(fmt_data(fp))}
                for e, fc, fp in zip(res.error_values, res.fidelities, base.fidelities)
            ],
        }
        return json.dumps(doc, indent=2) + "\n"
    rows = [[fmt_data(e), fmt_data(fc), fmt_data(fp)] for e, fc, fp in zip(res.error_values, res.fidelities, base.fidelities)]
    return _csv(["error_value", "fidelity_composite", "fidelity_plain"], rows)


def cmd_grid(args) -> str:
    seq = build_sequence(args)
    gr = grid(seq, tuple(args.f_range), tuple(args.g_range), tuple(args.counts))
    if args.format == "json":
        doc = {
            "sequence_id": gr.sequence_id,
            "f_values": [float(fmt_data(x)) for x in gr.f_values],
            "g_values": [float(fmt_data(x)) for x in gr.g_values],
            "fidelity": [[float(fmt_data(x)) for x in row] for row in gr.fidelity],
        }
        return json.dumps(doc) + "\n"
    out = io.StringIO()
    out.write("f,g,fidelity\n")
    f_txt = [fmt_data(x) for x in gr.f_values]
    for g, row in zip(gr.g_values, gr.fidelity):
        g_txt = fmt_data(g)
        out.writelines(f"{f},{g_txt},{fmt_data(v)}\n" for f, v in zip(f_txt, row))
    return out.getvalue()


def cmd_verify(args) -> tuple[str, bool]:
    from composite_pulses.verification import run_checks

    lines, all_ok = [], True
    for name, ok, detail in run_checks():
        all_ok &= ok
        lines.append(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
        if not args.quiet:
            print(lines[-1], flush=True)
    summary = f"{sum(l.startswith('PASS') for l in lines)}/{len(lines)} checks passed"
    if not args.quiet:
        print(summary)
    return "\n".join(lines + [summary]) + "\n", all_ok


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {v}")
    return v


def _finite(text):
    v = float(text)
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"must be finite, got {text}")
    return v


def _add_sequence_options(p):
    p.add_argument("--family", choices=FAMILIES, required=True)
    p.add_argument("--theta", type=_finite, required=True, help="target rotation angle, degrees")
    p.add_argument("--phi", type=_finite, default=0.0, help="target phase, degrees (default 0 = x)")
    p.add_argument("--corpse-n", type=int, nargs=3, metavar=("N1", "N2", "N3"), help="CORPSE family indices")
    p.add_argument("--wn", type=_positive_int, default=1, help="number of Wn correction blocks (bb1)")
    p.add_argument("--placements", type=_finite, nargs="+", help="block positions as fractions of theta (bb1)")
    p.add_argument("--sign", type=int, choices=(-1, 1), default=-1, help="SCROFULOUS phi2 branch")


def _add_output_options(p, formats=("csv", "json")):
    p.add_argument("--format", choices=formats, default=formats[0])
    p.add_argument("-o", "--output", help="output file (default: stdout)")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="composite-pulses", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("params", help="pulse parameters of one family member")
    _add_sequence_options(p)
    _add_output_options(p)

    p = sub.add_parser("tables", help="the three reference parameter tables")
    p.add_argument("-o", "--output")

    p = sub.add_parser("sweep", help="fidelity against one error, with the plain-pulse baseline")
    _add_sequence_options(p)
    p.add_argument("--axis", choices=("f", "g"), required=True)
    p.add_argument("--lo", type=_finite, required=True)
    p.add_argument("--hi", type=_finite, required=True)
    p.add_argument("--count", type=_positive_int, default=201)
    _add_output_options(p)

    p = sub.add_parser("grid", help="fidelity under simultaneous f and g errors")
    _add_sequence_options(p)
    p.add_argument("--f-range", type=_finite, nargs=2, default=[-1.0, 1.0], metavar=("LO", "HI"))
    p.add_argument("--g-range", type=_finite, nargs=2, default=[-0.99, 0.99], metavar=("LO", "HI"))
    p.add_argument("--counts", type=_positive_int, nargs=2, default=[201, 201], metavar=("NF", "NG"))
    _add_output_options(p)

    p = sub.add_parser("verify", help="run every reproduction and invariant check")
    p.add_argument("-o", "--output", help="also write the report here")
    p.add_argument("-q", "--quiet", action="store_true")
    return parser


def _resolve_output(path: str | None) -> Path | None:
    if path is None:
        return None
    p = Path(path)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not p.is_absolute():
        p = Path(base) / p
    return p


def _emit(text: str, path: Path | None):
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", newline="\n", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise UserError(f"cannot write {path}: {exc.strerror or exc}") from None


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USER
    try:
        out_path = _resolve_output(getattr(args, "output", None))
        if args.command == "verify":
            text, ok = cmd_verify(args)
            if out_path is not None:
                _emit(text, out_path)
            return EXIT_OK if ok else EXIT_VERIFY
        handler = {"params": cmd_params, "tables": cmd_tables, "sweep": cmd_sweep, "grid": cmd_grid}[args.command]
        _emit(handler(args), out_path)
    except (DomainError, UserError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USER
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
