"""Command-line surface: sweep, boundaries, discord, oddeven, validate.

Angles are given in units of pi at every external surface; radians never
appear in flags or files.  Exit codes: 0 success, 2 usage, 3 convergence,
4 coverage, 5 validation.  Failures emit a machine-readable JSON record on
stderr in addition to the exit code.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from . import io as tableio
from .density import BOND_KINDS, TwoQubitX, validate_density
from .eigensolver import TIEBREAKS, resolve_cache_dir
from .errors import (
    CellLookupError,
    ConvergenceError,
    CoverageError,
    DomainError,
    LadderError,
    PreconditionError,
    ValidationError,
)
from .hamiltonian import DENSE_LIMIT
from .measures import correlation_record, discord_audit
from .sweep import (
    DEFAULT_DELTA,
    RunOptions,
    SweepConfig,
    boundary_report,
    odd_even_report,
    run_sweep,
    theta_range,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONVERGENCE = 3
EXIT_COVERAGE = 4
EXIT_VALIDATION = 5

_CONFIG_KEYS = {
    "L", "theta", "theta_grid", "bond", "levels", "delta", "tiebreak",
    "oracle", "cache_dir", "workers", "seed", "out", "format", "tol",
    "eps_deg", "dense_limit",
}


class UsageError(LadderError, ValueError):
    """Bad flags or config fields; maps to exit code 2."""


def _parse_int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in str(text).split(","))
    except ValueError:
        raise UsageError("expected a comma list of integers, got %r" % (text,))


def _parse_float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in str(text).split(","))
    except ValueError:
        raise UsageError("expected a comma list of numbers, got %r" % (text,))


def _parse_bond_list(text: str) -> tuple[str, ...]:
    bonds = tuple(part.strip() for part in str(text).split(","))
    for bond in bonds:
        if bond not in BOND_KINDS:
            raise UsageError(
                "bond must be one of %s, got %r" % ("|".join(BOND_KINDS), bond)
            )
    return bonds


def _parse_grid_spec(spec) -> tuple[float, ...]:
    if isinstance(spec, (list, tuple)):
        parts = list(spec)
    else:
        parts = str(spec).split(":")
    if len(parts) != 3:
        raise UsageError(
            "theta grid must be start:stop:step in units of pi, got %r" % (spec,)
        )
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError:
        raise UsageError("non-numeric theta grid field in %r" % (spec,))
    try:
        return tuple(theta_range(start, stop, step))
    except DomainError as exc:
        raise UsageError(str(exc))


def _load_config_file(path: str) -> dict:
    try:
        with open(path) as handle:
            text = handle.read()
    except OSError as exc:
        raise UsageError("cannot read config %s: %s" % (path, exc))
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(
            "config %s: JSON parse error at line %d column %d (char %d): %s"
            % (path, exc.lineno, exc.colno, exc.pos, exc.msg)
        )
    if not isinstance(doc, dict):
        raise UsageError("config %s must hold a JSON object" % path)
    unknown = sorted(set(doc) - _CONFIG_KEYS)
    if unknown:
        raise UsageError("config %s: unknown field %r" % (path, unknown[0]))
    return doc


def _merged(args, key, fallback=None):
    value = getattr(args, key, None)
    if value is not None:
        return value
    config = getattr(args, "_config", {})
    if key in config and config[key] is not None:
        return config[key]
    return fallback


def _sweep_config(args) -> SweepConfig:
    sizes = _merged(args, "L")
    if sizes is None:
        raise UsageError("--L is required (comma list of even sizes)")
    if isinstance(sizes, str):
        sizes = _parse_int_list(sizes)
    elif isinstance(sizes, (int, float)):
        sizes = (int(sizes),)
    else:
        sizes = tuple(int(x) for x in sizes)

    thetas = _merged(args, "theta")
    grid_spec = _merged(args, "theta_grid")
    if (thetas is None) == (grid_spec is None):
        raise UsageError("exactly one of --theta or --theta-grid is required")
    if thetas is not None:
        if isinstance(thetas, str):
            grid = _parse_float_list(thetas)
        elif isinstance(thetas, (int, float)):
            grid = (float(thetas),)
        else:
            grid = tuple(float(t) for t in thetas)
        grid = tuple(sorted(grid))
    else:
        grid = _parse_grid_spec(grid_spec)

    bonds = _merged(args, "bond", "rung")
    if not isinstance(bonds, str):
        bonds = ",".join(bonds)
    try:
        return SweepConfig(
            theta_grid=grid,
            L_list=sizes,
            bonds=_parse_bond_list(bonds),
            levels=int(_merged(args, "levels", 2)),
            delta=float(_merged(args, "delta", DEFAULT_DELTA)),
        )
    except DomainError as exc:
        raise UsageError(str(exc))


def _run_options(args) -> RunOptions:
    cache = resolve_cache_dir(_merged(args, "cache_dir"))
    try:
        return RunOptions(
            cache_dir=str(cache) if cache else None,
            workers=int(_merged(args, "workers", 1)),
            seed=int(_merged(args, "seed", 0)),
            tol=float(_merged(args, "tol", 1e-10)),
            eps_deg=float(_merged(args, "eps_deg", 1e-8)),
            tiebreak=str(_merged(args, "tiebreak", "min-abs-sz")),
            oracle=bool(_merged(args, "oracle", False)),
            dense_limit=int(_merged(args, "dense_limit", DENSE_LIMIT)),
        )
    except DomainError as exc:
        raise UsageError(str(exc))


def _emit(text: str, out: str | None) -> None:
    if out:
        tableio.atomic_write_text(out, text)
    else:
        sys.stdout.write(text)


def cmd_sweep(args) -> int:
    config = _sweep_config(args)
    options = _run_options(args)
    table = run_sweep(config, options)
    fmt = str(_merged(args, "format", "csv"))
    if fmt not in ("csv", "json"):
        raise UsageError("--format must be csv or json, got %r" % fmt)
    text = (tableio.table_to_csv(table) if fmt == "csv"
            else tableio.table_to_json(table))
    _emit(text, _merged(args, "out"))
    if table.invalid:
        record = {
            "error": "ConvergenceError",
            "message": "%d sweep cells failed" % len(table.invalid),
            "cells": [
                {"theta_over_pi": t, "L": L, "reason": reason}
                for (t, L), reason in sorted(table.invalid.items())
            ],
        }
        print(json.dumps(record), file=sys.stderr)
        return EXIT_CONVERGENCE
    return EXIT_OK


def cmd_boundaries(args) -> int:
    table = tableio.read_table(args.table)
    sizes = _parse_int_list(args.extremum_L) if args.extremum_L else None
    report = boundary_report(
        table, L=int(args.L), delta=float(args.delta), bond=args.bond,
        extremum_sizes=sizes,
    )
    _emit(json.dumps(tableio.boundary_report_to_dict(report), indent=2) + "\n",
          args.out)
    return EXIT_OK


def cmd_discord(args) -> int:
    if (args.rho is None) == (args.file is None):
        raise UsageError("exactly one of --rho or --file is required")
    if args.rho is not None:
        values = _parse_float_list(args.rho)
        if len(values) != 6:
            raise UsageError(
                "--rho takes 6 numbers u,x,y,v,z,w; got %d" % len(values)
            )
        x = TwoQubitX(*values)
    else:
        try:
            with open(args.file) as handle:
                doc = json.load(handle)
        except OSError as exc:
            raise UsageError("cannot read %s: %s" % (args.file, exc))
        except json.JSONDecodeError as exc:
            raise UsageError(
                "%s: JSON parse error at line %d column %d (char %d): %s"
                % (args.file, exc.lineno, exc.colno, exc.pos, exc.msg)
            )
        try:
            x = TwoQubitX(**{k: float(doc[k]) for k in ("u", "x", "y", "v", "z", "w")})
        except KeyError as exc:
            raise UsageError("%s: missing X-state field %s" % (args.file, exc))
    validate_density(x.to_matrix())
    record = correlation_record(x)
    doc = dataclasses.asdict(record)
    if args.oracle:
        closed, brute, gap = discord_audit(x, grid_n=args.oracle_grid)
        doc["oracle_discord"] = brute
        doc["closed_oracle_gap"] = gap
    _emit(json.dumps(doc, indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_oddeven(args) -> int:
    table = tableio.read_table(args.table)
    report = odd_even_report(
        table, float(args.theta), _parse_int_list(args.L), bond=args.bond,
    )
    _emit(json.dumps(tableio.odd_even_report_to_dict(report), indent=2) + "\n",
          args.out)
    return EXIT_OK


def cmd_validate(args) -> int:
    from .validate import run_suite

    results = run_suite(quick=args.quick, seed=int(args.seed or 0))
    failed = [r for r in results if not r.passed]
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print("%s %-28s %s" % (status, r.name, r.detail))
    print("%d/%d checks passed" % (len(results) - len(failed), len(results)))
    return EXIT_OK if not failed else EXIT_VALIDATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ringladder",
        description=(
            "Exact-diagonalization sweeps and quantum-correlation analysis "
            "of the two-leg ring-exchange spin ladder"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser("sweep", help="solve a (theta, L) grid to a table")
    sweep.add_argument("--L", help="comma list of even ladder lengths")
    sweep.add_argument("--theta", help="comma list of angles in units of pi")
    sweep.add_argument("--theta-grid", dest="theta_grid", metavar="START:STOP:STEP",
                       help="inclusive uniform grid in units of pi")
    sweep.add_argument("--bond", help="comma list of rung|leg|diag")
    sweep.add_argument("--levels", type=int)
    sweep.add_argument("--delta", type=float)
    sweep.add_argument("--tiebreak", choices=sorted(TIEBREAKS))
    sweep.add_argument("--oracle", action="store_true", default=None,
                       help="audit each discord value against the grid oracle")
    sweep.add_argument("--cache-dir", dest="cache_dir")
    sweep.add_argument("--workers", type=int)
    sweep.add_argument("--seed", type=int)
    sweep.add_argument("--tol", type=float)
    sweep.add_argument("--out")
    sweep.add_argument("--format", choices=("csv", "json"))
    sweep.add_argument("--config", help="JSON file with the same fields")
    sweep.set_defaults(func=cmd_sweep)

    bounds = sub.add_parser("boundaries", help="detect boundaries from a table")
    bounds.add_argument("table", help="CSV or JSON table file")
    bounds.add_argument("--L", required=True, type=int)
    bounds.add_argument("--delta", type=float, default=DEFAULT_DELTA)
    bounds.add_argument("--bond", default="rung", choices=BOND_KINDS)
    bounds.add_argument("--extremum-L", dest="extremum_L",
                        help="comma list of sizes for the extremum check")
    bounds.add_argument("--out")
    bounds.set_defaults(func=cmd_boundaries)

    disc = sub.add_parser("discord", help="correlation record of one X state")
    disc.add_argument("--rho", help="6 numbers u,x,y,v,z,w")
    disc.add_argument("--file", help="JSON file with fields u,x,y,v,z,w")
    disc.add_argument("--oracle", action="store_true")
    disc.add_argument("--oracle-grid", dest="oracle_grid", type=int, default=64)
    disc.add_argument("--out")
    disc.set_defaults(func=cmd_discord)

    odd = sub.add_parser("oddeven", help="two-level report across sizes")
    odd.add_argument("table", help="CSV or JSON table file")
    odd.add_argument("--theta", required=True, type=float)
    odd.add_argument("--L", required=True, help="comma list of sizes")
    odd.add_argument("--bond", default="rung", choices=BOND_KINDS)
    odd.add_argument("--out")
    odd.set_defaults(func=cmd_oddeven)

    val = sub.add_parser("validate", help="run the embedded oracle suite")
    val.add_argument("--quick", action="store_true",
                     help="skip the L=6 dense oracle; runs in under a minute")
    val.add_argument("--seed", type=int, default=0)
    val.set_defaults(func=cmd_validate)

    return parser


def _fail(code: int, exc: Exception) -> int:
    record = {"error": type(exc).__name__, "message": str(exc)}
    print(json.dumps(record), file=sys.stderr)
    return code


# Flags whose values may begin with a minus sign (negative angles, seeds);
# argparse mistakes such values for option names unless fused with "=".
_SIGNED_VALUE_FLAGS = {"--theta", "--theta-grid", "--rho", "--delta",
                       "--tol", "--seed"}


def _normalize_argv(argv):
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if (tok in _SIGNED_VALUE_FLAGS and i + 1 < len(argv)
                and argv[i + 1].startswith("-")):
            out.append(tok + "=" + argv[i + 1])
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    try:
        args = parser.parse_args(_normalize_argv(list(argv)))
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if getattr(args, "config", None):
        try:
            args._config = _load_config_file(args.config)
        except UsageError as exc:
            return _fail(EXIT_USAGE, exc)
    else:
        args._config = {}
    try:
        return args.func(args)
    except UsageError as exc:
        return _fail(EXIT_USAGE, exc)
    except ConvergenceError as exc:
        return _fail(EXIT_CONVERGENCE, exc)
    except (CoverageError, CellLookupError) as exc:
        return _fail(EXIT_COVERAGE, exc)
    except (ValidationError, PreconditionError) as exc:
        return _fail(EXIT_VALIDATION, exc)
    except DomainError as exc:
        return _fail(EXIT_USAGE, exc)
    except OSError as exc:
        return _fail(1, exc)


if __name__ == "__main__":
    sys.exit(main())
