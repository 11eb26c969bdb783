"""Command-line surface for the index engines and model calculators.

Machine-readable JSON goes to standard output, human-readable notes to
standard error.  Exit codes: 0 success, 1 usage or input error, 2 a
non-Fredholm or numerically marginal verdict, 3 numerical non-convergence.
Any subcommand can read its parameters from a ``--config`` JSON file;
explicit flags win on conflict.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Any, Sequence

from . import selftest
from .hall import butterfly, landau_phase_grid, pup_matrix_element, write_butterfly_csv
from .laurent import (
    DEFAULT_BAND,
    LaurentPolynomial,
    NonConvergenceError,
    Verdict,
    ZeroSymbolError,
    index_shift_poly,
)
from .phase import (
    GRID_FORMATS,
    GridSpec,
    ParamFamily,
    boundary_report,
    sweep,
    write_grid,
)
from .winding import (
    DEFAULT_VANISH_TOL,
    CircleSymbol,
    UnresolvedWindingError,
    symbol_from_csv,
    toeplitz_index,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_MARGINAL = 2
EXIT_NONCONVERGENCE = 3

THREADS_ENV = "FREDHOLM_THREADS"


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; 2 is reserved for marginal
    # verdicts here, so usage problems are rerouted to exit 1.
    def error(self, message: str) -> None:  # type: ignore[override]
        raise _UsageError(message)


def _log(message: str) -> None:
    print(message, file=sys.stderr)


def _emit(payload: Any) -> None:
    print(json.dumps(payload, sort_keys=True))


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise _UsageError(f"{path}: config must be a JSON object")
    return data


def _pick(args: argparse.Namespace, config: dict, key: str, default=None):
    value = getattr(args, key, None)
    if value is not None:
        return value
    if key in config:
        return config[key]
    return default


def _threads(args: argparse.Namespace, config: dict) -> int:
    value = _pick(args, config, "threads")
    if value is None:
        value = os.environ.get(THREADS_ENV)
    threads = int(value) if value is not None else 1
    if threads < 1:
        raise _UsageError("threads must be at least 1")
    return threads


def _positive(name: str, value: float) -> float:
    value = float(value)
    if value <= 0:
        raise _UsageError(f"{name} must be positive")
    return value


def _read_poly(args: argparse.Namespace, config: dict) -> LaurentPolynomial:
    inline = _pick(args, config, "coeffs")
    path = _pick(args, config, "file")
    if inline is not None and path is not None:
        raise _UsageError("give either inline coefficients or a file, not both")
    if inline is not None:
        data = inline if isinstance(inline, dict) else json.loads(inline)
    elif path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    else:
        raise _UsageError("a Laurent JSON is required (--coeffs or --file)")
    return LaurentPolynomial.from_dict(data)


def _parse_grid(text: str, engine: str) -> GridSpec:
    parts = [part.strip() for part in str(text).split(",")]
    if len(parts) != 6:
        raise _UsageError("--grid needs x_min,x_max,nx,y_min,y_max,ny")
    try:
        return GridSpec(
            float(parts[0]), float(parts[1]), int(parts[2]),
            float(parts[3]), float(parts[4]), int(parts[5]),
            engine,
        )
    except ValueError as err:
        raise _UsageError(str(err)) from None


def _parse_family(text: str) -> ParamFamily:
    text = str(text).strip()
    if text.lower() in ("quadratic", "quadraticreal"):
        return ParamFamily.quadratic_real()
    if text.startswith("{"):
        data = json.loads(text)
    else:
        with open(text, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    return ParamFamily.from_dict(data)


def _cmd_index_poly(args: argparse.Namespace, config: dict) -> int:
    poly = _read_poly(args, config)
    band = _positive("band", _pick(args, config, "band", DEFAULT_BAND))
    result = index_shift_poly(poly, band=band)
    _emit(result.to_dict())
    return EXIT_OK if result.is_fredholm else EXIT_MARGINAL


def _cmd_winding(args: argparse.Namespace, config: dict) -> int:
    samples = _pick(args, config, "samples")
    if samples is not None:
        symbol = symbol_from_csv(samples)
    else:
        poly = _read_poly(args, config)
        symbol = CircleSymbol.from_laurent(poly)
    vanish_tol = _positive("vanish-tol", _pick(args, config, "vanish_tol", DEFAULT_VANISH_TOL))
    n0 = int(_pick(args, config, "n0", 64))
    result = toeplitz_index(symbol, vanish_tol=vanish_tol, n0=n0)
    payload = result.to_dict()
    payload["winding"] = result.certificate.winding
    _emit(payload)
    return EXIT_OK if result.is_fredholm else EXIT_MARGINAL


def _cmd_phase_diagram(args: argparse.Namespace, config: dict) -> int:
    family = _parse_family(_pick(args, config, "family", "quadratic"))
    engine = str(_pick(args, config, "engine", "roots")).lower()
    spec = _parse_grid(_pick(args, config, "grid", "-3,3,601,-2,2,401"), engine)
    fmt = str(_pick(args, config, "format", "pgm")).lower()
    if fmt not in GRID_FORMATS:
        raise _UsageError(f"format must be one of {GRID_FORMATS}")
    out = _pick(args, config, "out")
    if out is None:
        raise _UsageError("--out is required")
    band = _positive("band", _pick(args, config, "band", DEFAULT_BAND))
    vanish_tol = _positive("vanish-tol", _pick(args, config, "vanish_tol", DEFAULT_VANISH_TOL))
    grid = sweep(family, spec, band=band, vanish_tol=vanish_tol, threads=_threads(args, config))
    write_grid(grid, fmt, out)
    report = boundary_report(grid)
    _log(f"wrote {spec.nx}x{spec.ny} {fmt} raster to {out}")
    _emit({
        "out": str(out),
        "format": fmt,
        "nx": spec.nx,
        "ny": spec.ny,
        "engine": spec.engine,
        "marginal_fraction": report.marginal_fraction,
        "adjacent_jump_histogram": {str(k): v for k, v in sorted(report.adjacent_jump_histogram.items())},
    })
    return EXIT_OK


def _cmd_butterfly(args: argparse.Namespace, config: dict) -> int:
    q_max = int(_pick(args, config, "qmax", 12))
    k_grid = int(_pick(args, config, "kgrid", 64))
    out = _pick(args, config, "out")
    if out is None:
        raise _UsageError("--out is required")
    try:
        dataset = butterfly(q_max, k_grid)
    except ValueError as err:
        raise _UsageError(str(err)) from None
    write_butterfly_csv(dataset, out)
    _log(f"wrote {len(dataset.rows)} band rows to {out}")
    _emit({"out": str(out), "rows": len(dataset.rows), "q_max": q_max, "k_grid_n": k_grid})
    return EXIT_OK


def _cmd_landau(args: argparse.Namespace, config: dict) -> int:
    spec_text = _pick(args, config, "grid", "-2,2,401,0,10,401")
    parts = [part.strip() for part in str(spec_text).split(",")]
    if len(parts) != 6:
        raise _UsageError("--grid needs b_min,b_max,nx,e_min,e_max,ny")
    tol = _positive("tol", _pick(args, config, "tol", 1e-9))
    fmt = str(_pick(args, config, "format", "pgm")).lower()
    if fmt not in GRID_FORMATS:
        raise _UsageError(f"format must be one of {GRID_FORMATS}")
    out = _pick(args, config, "out")
    if out is None:
        raise _UsageError("--out is required")
    try:
        grid = landau_phase_grid(
            float(parts[0]), float(parts[1]), int(parts[2]),
            float(parts[3]), float(parts[4]), int(parts[5]),
            tol=tol,
            threads=_threads(args, config),
        )
    except ValueError as err:
        raise _UsageError(str(err)) from None
    write_grid(grid, fmt, out)
    report = boundary_report(grid)
    _log(f"wrote Landau raster to {out}")
    _emit({
        "out": str(out),
        "format": fmt,
        "nx": grid.spec.nx,
        "ny": grid.spec.ny,
        "marginal_fraction": report.marginal_fraction,
    })
    return EXIT_OK


def _cmd_pup(args: argparse.Namespace, config: dict) -> int:
    m = _pick(args, config, "m")
    m_max = _pick(args, config, "mmax")
    if (m is None) == (m_max is None):
        raise _UsageError("give exactly one of --m or --mmax")
    try:
        if m is not None:
            element = pup_matrix_element(int(m))
            _emit({"m": element.m, "value": element.value, "deviation": 1.0 - element.value})
        else:
            table = [pup_matrix_element(k) for k in range(int(m_max) + 1)]
            _emit([
                {"m": el.m, "value": el.value, "deviation": 1.0 - el.value}
                for el in table
            ])
    except ValueError as err:
        raise _UsageError(str(err)) from None
    return EXIT_OK


def _cmd_selftest(args: argparse.Namespace, config: dict) -> int:
    seed = int(_pick(args, config, "seed", selftest.DEFAULT_SEED))
    only_text = _pick(args, config, "only")
    only = None
    if only_text is not None:
        try:
            only = tuple(int(part) for part in str(only_text).split(",") if part.strip())
        except ValueError:
            raise _UsageError("--only takes a comma-separated list of criterion numbers") from None
        unknown = set(only) - set(selftest.CRITERION_NUMBERS)
        if unknown:
            raise _UsageError(f"unknown criteria: {sorted(unknown)}")
    results = selftest.run_all(seed=seed, only=only)
    for result in results:
        _log(selftest.format_result(result))
    _emit({
        "passed": sum(r.passed for r in results),
        "failed": sum(not r.passed for r in results),
        "seed": seed,
        "criteria": [
            {"number": r.number, "name": r.name, "passed": r.passed, "seconds": round(r.seconds, 3)}
            for r in results
        ],
    })
    return EXIT_OK if all(r.passed for r in results) else EXIT_USAGE


def _build_parser() -> _Parser:
    parser = _Parser(prog="fredholm", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: _Parser) -> None:
        p.add_argument("--config", help="JSON file with defaults for this subcommand")
        p.add_argument("--threads", type=int, help=f"parallelism cap (env {THREADS_ENV})")

    p = sub.add_parser("index-poly", help="index of a shift polynomial by root classification")
    common(p)
    p.add_argument("--coeffs", help="inline Laurent JSON {\"pole_order\": m, \"coeffs\": [[re,im],...]}")
    p.add_argument("--file", help="path to a Laurent JSON file")
    p.add_argument("--band", type=float, help="circle band for the marginal verdict")
    p.set_defaults(func=_cmd_index_poly)

    p = sub.add_parser("winding", help="Toeplitz index of a circle symbol by winding number")
    common(p)
    p.add_argument("--coeffs", help="inline Laurent JSON for the symbol")
    p.add_argument("--file", help="path to a Laurent JSON file for the symbol")
    p.add_argument("--samples", help="CSV of sampled values: theta,re,im rows")
    p.add_argument("--n0", type=int, help="starting sample count (power of two, >= 8)")
    p.add_argument("--vanish-tol", dest="vanish_tol", type=float, help="vanishing tolerance")
    p.set_defaults(func=_cmd_winding)

    p = sub.add_parser("phase-diagram", help="rasterize an index phase diagram")
    common(p)
    p.add_argument("--family", help="'quadratic', inline family JSON, or a JSON path")
    p.add_argument("--grid", help="x_min,x_max,nx,y_min,y_max,ny")
    p.add_argument("--engine", choices=("roots", "winding"), help="index engine")
    p.add_argument("--band", type=float)
    p.add_argument("--vanish-tol", dest="vanish_tol", type=float)
    p.add_argument("--out", help="output path")
    p.add_argument("--format", choices=GRID_FORMATS)
    p.set_defaults(func=_cmd_phase_diagram)

    p = sub.add_parser("butterfly", help="Harper band dataset over reduced fluxes")
    common(p)
    p.add_argument("--qmax", type=int, help="largest flux denominator")
    p.add_argument("--kgrid", type=int, help="k-grid resolution per axis")
    p.add_argument("--out", help="output CSV path")
    p.set_defaults(func=_cmd_butterfly)

    p = sub.add_parser("landau", help="Landau-plane index raster")
    common(p)
    p.add_argument("--grid", help="b_min,b_max,nx,e_min,e_max,ny")
    p.add_argument("--tol", type=float, help="margin around levels")
    p.add_argument("--out", help="output path")
    p.add_argument("--format", choices=GRID_FORMATS)
    p.set_defaults(func=_cmd_landau)

    p = sub.add_parser("pup", help="lowest-Landau-level matrix elements of the flux insertion")
    common(p)
    p.add_argument("--m", type=int, help="single offset")
    p.add_argument("--mmax", type=int, help="emit the table for m = 0..mmax")
    p.set_defaults(func=_cmd_pup)

    p = sub.add_parser("selftest", help="run the built-in acceptance criteria")
    common(p)
    p.add_argument("--seed", type=int, help="seed for the randomized suites")
    p.add_argument("--only", help="comma-separated criterion numbers")
    p.set_defaults(func=_cmd_selftest)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        config = _load_config(getattr(args, "config", None))
        return args.func(args, config)
    except _UsageError as err:
        _log(f"error: {err}")
        return EXIT_USAGE
    except (ZeroSymbolError, ValueError, KeyError, OSError, json.JSONDecodeError) as err:
        _log(f"error: {err}")
        return EXIT_USAGE
    except NonConvergenceError as err:
        _log(f"non-convergence: {err}")
        return EXIT_NONCONVERGENCE
    except UnresolvedWindingError as err:
        _log(f"non-convergence: {err}")
        return EXIT_NONCONVERGENCE


if __name__ == "__main__":
    sys.exit(main())
