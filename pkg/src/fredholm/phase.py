"""Index phase diagrams over 2-D parameter rectangles.

A parameter family maps a grid cell center to a shift polynomial; an index
engine (root classification or winding) turns it into a signed 8-bit cell
code: the certified integer index in [-100, 100], 127 for a marginal or
non-Fredholm verdict, 126 for a per-cell engine failure.  Per-cell failures
never abort a sweep.  Cells are pure functions of (family, coordinates), so
rows may be evaluated in parallel without changing the result.
"""

from __future__ import annotations

import datetime
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .laurent import (
    DEFAULT_BAND,
    IndexResult,
    LaurentPolynomial,
    Verdict,
    index_shift_poly,
    invert_argument,
)
from .winding import DEFAULT_VANISH_TOL, CircleSymbol, toeplitz_index

QUADRATIC_REAL = "QuadraticReal"
COEFFICIENT_PAIR = "CoefficientPair"
COMPLEX_COEFFICIENT = "ComplexCoefficient"

ENGINE_ROOTS = "roots"
ENGINE_WINDING = "winding"

MARGINAL_CODE = 127   # NumericallyMarginal / NotFredholm
ERROR_CODE = 126      # per-cell engine failure (incl. |index| > 100)
MAX_INDEX_CODE = 100

GRID_FORMATS = ("csv", "json", "pgm")


@dataclass(frozen=True)
class ParamFamily:
    """A 2-D slice through coefficient space.

    ``QuadraticReal`` sweeps ``z^2 + c1*z + c0`` with ``c1`` on the x axis
    and ``c0`` on the y axis.  ``CoefficientPair`` varies the real parts of
    two designated exponents of a template; ``ComplexCoefficient`` varies
    the real and imaginary part of a single designated exponent.
    """

    kind: str
    template: LaurentPolynomial | None = None
    vary: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "vary", tuple(int(e) for e in self.vary))
        if self.kind == QUADRATIC_REAL:
            if self.vary:
                raise ValueError("QuadraticReal takes no designated exponents")
            return
        if self.kind not in (COEFFICIENT_PAIR, COMPLEX_COEFFICIENT):
            raise ValueError(f"unknown family kind {self.kind!r}")
        want = 2 if self.kind == COEFFICIENT_PAIR else 1
        if self.template is None or self.template.is_zero:
            raise ValueError(f"{self.kind} needs a nonzero template")
        if len(self.vary) != want:
            raise ValueError(f"{self.kind} designates exactly {want} exponent(s)")
        for e in self.vary:
            if not self.template.min_exp <= e <= self.template.max_exp:
                raise ValueError(f"exponent {e} outside the template range")

    @classmethod
    def quadratic_real(cls) -> "ParamFamily":
        return cls(QUADRATIC_REAL)

    @classmethod
    def coefficient_pair(cls, template: LaurentPolynomial, x_exp: int, y_exp: int) -> "ParamFamily":
        return cls(COEFFICIENT_PAIR, template, (x_exp, y_exp))

    @classmethod
    def complex_coefficient(cls, template: LaurentPolynomial, exp: int) -> "ParamFamily":
        return cls(COMPLEX_COEFFICIENT, template, (exp,))

    def symbol_at(self, x: float, y: float) -> LaurentPolynomial:
        if self.kind == QUADRATIC_REAL:
            return LaurentPolynomial(0, (complex(y), complex(x), 1.0 + 0j))
        assert self.template is not None
        coeffs = list(self.template.coeffs)
        m = self.template.pole_order
        if self.kind == COEFFICIENT_PAIR:
            coeffs[self.vary[0] + m] = complex(x)
            coeffs[self.vary[1] + m] = complex(y)
        else:
            coeffs[self.vary[0] + m] = complex(x, y)
        return LaurentPolynomial(m, tuple(coeffs))

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "template": None if self.template is None else self.template.to_dict(),
            "vary": list(self.vary),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ParamFamily":
        template = None
        if data.get("template") is not None:
            template = LaurentPolynomial.from_dict(data["template"])
        if template is not None and data.get("fixed"):
            # Optional exponent -> [re, im] overrides applied to the template.
            coeffs = list(template.coeffs)
            for exp, (re, im) in data["fixed"].items():
                coeffs[int(exp) + template.pole_order] = complex(re, im)
            template = LaurentPolynomial(template.pole_order, tuple(coeffs))
        return cls(data["kind"], template, tuple(data.get("vary", ())))


@dataclass(frozen=True)
class GridSpec:
    """Cell-centered raster over [x_min, x_max] x [y_min, y_max]."""

    x_min: float
    x_max: float
    nx: int
    y_min: float
    y_max: float
    ny: int
    engine: str = ENGINE_ROOTS

    def __post_init__(self) -> None:
        if self.nx < 2 or self.ny < 2:
            raise ValueError("need at least 2 cells per axis")
        if not (self.x_max > self.x_min and self.y_max > self.y_min):
            raise ValueError("max must exceed min on both axes")
        engine = self.engine.lower()
        if engine not in (ENGINE_ROOTS, ENGINE_WINDING):
            raise ValueError(f"unknown engine {self.engine!r}")
        object.__setattr__(self, "engine", engine)

    def x_centers(self) -> np.ndarray:
        i = np.arange(self.nx)
        return self.x_min + (2 * i + 1) * (self.x_max - self.x_min) / (2 * self.nx)

    def y_centers(self) -> np.ndarray:
        j = np.arange(self.ny)
        return self.y_min + (2 * j + 1) * (self.y_max - self.y_min) / (2 * self.ny)

    def to_dict(self) -> dict:
        return {
            "x_min": self.x_min, "x_max": self.x_max, "nx": self.nx,
            "y_min": self.y_min, "y_max": self.y_max, "ny": self.ny,
            "engine": self.engine,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GridSpec":
        return cls(
            float(data["x_min"]), float(data["x_max"]), int(data["nx"]),
            float(data["y_min"]), float(data["y_max"]), int(data["ny"]),
            data.get("engine", ENGINE_ROOTS),
        )


@dataclass(frozen=True)
class Provenance:
    engine: str
    tolerances: tuple[tuple[str, float], ...]
    timestamp: str

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "tolerances", tuple(sorted((str(k), float(v)) for k, v in self.tolerances))
        )

    def to_dict(self) -> dict:
        return {
            "engine": self.engine,
            "tolerances": dict(self.tolerances),
            "timestamp": self.timestamp,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Provenance":
        return cls(data["engine"], tuple(data["tolerances"].items()), data["timestamp"])


def _default_timestamp() -> str:
    # SOURCE_DATE_EPOCH makes file outputs reproducible across runs.
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch is not None:
        moment = datetime.datetime.fromtimestamp(int(epoch), tz=datetime.timezone.utc)
    else:
        moment = datetime.datetime.now(tz=datetime.timezone.utc)
    return moment.isoformat()


@dataclass(frozen=True, eq=False)
class PhaseGrid:
    """Raster of index codes; row j of ``cells`` holds y center j (ascending y)."""

    spec: GridSpec
    family: ParamFamily | None
    cells: np.ndarray
    provenance: Provenance

    def __post_init__(self) -> None:
        cells = np.asarray(self.cells, dtype=np.int8)
        if cells.shape != (self.spec.ny, self.spec.nx):
            raise ValueError("cells shape must be (ny, nx)")
        cells.setflags(write=False)
        object.__setattr__(self, "cells", cells)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PhaseGrid):
            return NotImplemented
        return (
            self.spec == other.spec
            and self.family == other.family
            and self.provenance == other.provenance
            and np.array_equal(self.cells, other.cells)
        )


def _cell_code(cell_fn: Callable[[float, float], IndexResult], x: float, y: float) -> int:
    try:
        res = cell_fn(x, y)
    except Exception:
        return ERROR_CODE  # per-cell failures must never abort the sweep
    if res.status is Verdict.FREDHOLM:
        idx = res.index
        if idx is None or abs(idx) > MAX_INDEX_CODE:
            return ERROR_CODE  # not representable in the signed 8-bit scheme
        return int(idx)
    return MARGINAL_CODE


def rasterize(
    cell_fn: Callable[[float, float], IndexResult],
    spec: GridSpec,
    family: ParamFamily | None = None,
    engine_name: str | None = None,
    tolerances: tuple[tuple[str, float], ...] = (),
    threads: int = 1,
    timestamp: str | None = None,
) -> PhaseGrid:
    """Evaluate an arbitrary (x, y) -> IndexResult rule over the grid.

    This is the adapter hook that lets other index rules (for example the
    Landau-level diagram) reuse the grid writers.
    """
    if threads < 1:
        raise ValueError("threads must be at least 1")
    xs = spec.x_centers()
    ys = spec.y_centers()

    def row(j: int) -> np.ndarray:
        y = float(ys[j])
        out = np.empty(spec.nx, dtype=np.int8)
        for i in range(spec.nx):
            out[i] = _cell_code(cell_fn, float(xs[i]), y)
        return out

    if threads == 1:
        rows = [row(j) for j in range(spec.ny)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(row, range(spec.ny)))
    cells = np.vstack(rows)
    prov = Provenance(
        engine=engine_name or spec.engine,
        tolerances=tolerances,
        timestamp=timestamp or _default_timestamp(),
    )
    return PhaseGrid(spec, family, cells, prov)


def sweep(
    family: ParamFamily,
    spec: GridSpec,
    band: float = DEFAULT_BAND,
    vanish_tol: float = DEFAULT_VANISH_TOL,
    threads: int = 1,
    timestamp: str | None = None,
) -> PhaseGrid:
    """Rasterize the family with the engine named in the grid spec."""
    if spec.engine == ENGINE_ROOTS:
        def cell(x: float, y: float) -> IndexResult:
            return index_shift_poly(family.symbol_at(x, y), band=band)
    else:
        def cell(x: float, y: float) -> IndexResult:
            symbol = CircleSymbol.from_laurent(invert_argument(family.symbol_at(x, y)))
            return toeplitz_index(symbol, vanish_tol=vanish_tol)

    return rasterize(
        cell,
        spec,
        family=family,
        tolerances=(("band", band), ("vanish_tol", vanish_tol)),
        threads=threads,
        timestamp=timestamp,
    )


@dataclass(frozen=True)
class BoundaryReport:
    adjacent_jump_histogram: dict[int, int]
    marginal_fraction: float


def boundary_report(grid: PhaseGrid) -> BoundaryReport:
    """Histogram of |code| jumps over 4-neighbor pairs with distinct non-sentinel codes."""
    c = grid.cells.astype(np.int16)
    valid = np.abs(c) <= MAX_INDEX_CODE
    hist: dict[int, int] = {}
    pairs = (
        (c[:, :-1], c[:, 1:], valid[:, :-1] & valid[:, 1:]),
        (c[:-1, :], c[1:, :], valid[:-1, :] & valid[1:, :]),
    )
    for a, b, ok in pairs:
        mask = ok & (a != b)
        jumps = np.abs(a - b)[mask]
        for size, count in zip(*np.unique(jumps, return_counts=True)):
            hist[int(size)] = hist.get(int(size), 0) + int(count)
    marginal = float((grid.cells == MARGINAL_CODE).mean())
    return BoundaryReport(hist, marginal)


def _gray(code: int) -> int:
    if code == MARGINAL_CODE:
        return 0
    if code == ERROR_CODE:
        return 255
    return min(255, max(0, 128 + 16 * code))


def write_grid(grid: PhaseGrid, fmt: str, path) -> None:
    """Emit the raster as csv, json, or plain (P2) pgm.

    csv: one header line ``# x_min,x_max,nx,y_min,y_max,ny`` then ny rows of
    nx integer codes, ascending y.  json: the full structure including
    provenance; round-trips through :func:`load_grid`.  pgm: row 0 is the
    top of the picture (y_max), gray = clamp(128 + 16*index, 0, 255) with
    marginal cells black and error cells white.
    """
    if fmt not in GRID_FORMATS:
        raise ValueError(f"format must be one of {GRID_FORMATS}")
    spec = grid.spec
    with open(path, "w", encoding="ascii", newline="") as fh:
        if fmt == "csv":
            fh.write(
                f"# {spec.x_min!r},{spec.x_max!r},{spec.nx},"
                f"{spec.y_min!r},{spec.y_max!r},{spec.ny}\n"
            )
            for row in grid.cells:
                fh.write(",".join(str(int(v)) for v in row))
                fh.write("\n")
        elif fmt == "pgm":
            fh.write(f"P2\n{spec.nx} {spec.ny}\n255\n")
            for row in grid.cells[::-1]:
                fh.write(" ".join(str(_gray(int(v))) for v in row))
                fh.write("\n")
        else:
            payload = {
                "spec": spec.to_dict(),
                "family": None if grid.family is None else grid.family.to_dict(),
                "provenance": grid.provenance.to_dict(),
                "cells": grid.cells.tolist(),
            }
            json.dump(payload, fh, sort_keys=True, indent=1)
            fh.write("\n")


def load_grid(path) -> PhaseGrid:
    """Read back a grid written with ``write_grid(..., "json", ...)``."""
    with open(path, "r", encoding="ascii") as fh:
        data = json.load(fh)
    family = None
    if data.get("family") is not None:
        family = ParamFamily.from_dict(data["family"])
    return PhaseGrid(
        GridSpec.from_dict(data["spec"]),
        family,
        np.asarray(data["cells"], dtype=np.int8),
        Provenance.from_dict(data["provenance"]),
    )
