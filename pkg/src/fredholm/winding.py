"""Winding numbers of circle symbols and the Toeplitz index rule.

A continuous symbol ``f`` that never vanishes on the unit circle generates
a Fredholm Toeplitz operator whose index is minus the winding number of
``f`` around the origin.  The winding number is accumulated from
principal-value phase steps on a uniform sample grid whose size doubles
until three conditions hold at once: every sampled modulus stays above a
vanishing tolerance, every phase step is below pi/2, and the resulting
integer is stable under one further doubling.  Anything else is reported
as undecidable, never as a guessed index.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .laurent import IndexCertificate, IndexResult, LaurentPolynomial, Verdict

LAURENT = "laurent"
FOURIER = "fourier"
SAMPLED = "sampled"

DEFAULT_VANISH_TOL = 1e-6
DEFAULT_START_SAMPLES = 64
SAMPLE_CAP = 2 ** 20
_MAX_PHASE_STEP = 0.5 * np.pi  # conservative: looser bounds can alias

_TWO_PI = 2.0 * np.pi


class VanishingSymbolError(ArithmeticError):
    """The symbol modulus stayed at or below the vanishing tolerance."""

    def __init__(self, message: str, min_modulus: float = 0.0):
        super().__init__(message)
        self.min_modulus = min_modulus


class UnresolvedWindingError(RuntimeError):
    """Phase steps or the winding integer never settled within the sample cap."""


def _is_pow2(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class CircleSymbol:
    """A function on the unit circle.

    One of three representations: ``laurent`` and ``fourier`` hold a finite
    coefficient window (``coeffs[j]`` multiplies ``exp(i*(min_exp+j)*theta)``),
    ``sampled`` holds values at ``N`` uniform angles ``2*pi*k/N`` with ``N`` a
    power of two, at least 8.  Sampled symbols evaluate at the nearest grid
    angle and are never interpolated.
    """

    kind: str
    min_exp: int = 0
    coeffs: tuple[complex, ...] = ()
    samples: tuple[complex, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in (LAURENT, FOURIER, SAMPLED):
            raise ValueError(f"unknown symbol kind {self.kind!r}")
        if self.kind == SAMPLED:
            n = len(self.samples)
            if n < 8 or not _is_pow2(n):
                raise ValueError("sampled symbols need a power-of-two grid of at least 8 angles")
            object.__setattr__(self, "samples", tuple(complex(v) for v in self.samples))
        else:
            object.__setattr__(self, "coeffs", tuple(complex(c) for c in self.coeffs))

    @classmethod
    def from_laurent(cls, p: LaurentPolynomial) -> "CircleSymbol":
        """The polynomial itself as a circle function, f(theta) = p(e^{i theta})."""
        return cls(LAURENT, min_exp=p.min_exp, coeffs=p.coeffs)

    @classmethod
    def from_fourier(cls, coeffs: Sequence[complex], min_exp: int | None = None) -> "CircleSymbol":
        """Finite Fourier window; by default centered, ``f_hat_{-M} .. f_hat_{M}``."""
        coeffs = tuple(complex(c) for c in coeffs)
        if min_exp is None:
            if len(coeffs) % 2 != 1:
                raise ValueError("a centered Fourier window needs an odd number of coefficients")
            min_exp = -(len(coeffs) // 2)
        return cls(FOURIER, min_exp=int(min_exp), coeffs=coeffs)

    @classmethod
    def from_samples(cls, values: Sequence[complex]) -> "CircleSymbol":
        return cls(SAMPLED, samples=tuple(complex(v) for v in values))

    @classmethod
    def monomial(cls, n: int) -> "CircleSymbol":
        """f(theta) = exp(i*n*theta)."""
        return cls(FOURIER, min_exp=int(n), coeffs=(1.0 + 0j,))

    @classmethod
    def constant(cls, c: complex) -> "CircleSymbol":
        return cls(FOURIER, min_exp=0, coeffs=(complex(c),))

    def values_at(self, theta: np.ndarray) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        if self.kind == SAMPLED:
            n = len(self.samples)
            idx = np.rint(theta * (n / _TWO_PI)).astype(np.int64) % n
            return np.asarray(self.samples)[idx]
        if not self.coeffs:
            return np.zeros(theta.shape, dtype=complex)
        z = np.exp(1j * theta)
        acc = np.full(theta.shape, self.coeffs[-1], dtype=complex)
        for c in reversed(self.coeffs[:-1]):
            acc = acc * z + c
        if self.min_exp:
            acc = acc * z ** self.min_exp
        return acc


def eval_symbol(f: CircleSymbol, theta: float) -> complex:
    """Evaluate at a single angle (wrapped into [0, 2*pi))."""
    wrapped = float(theta) % _TWO_PI
    return complex(f.values_at(np.array([wrapped]))[0])


@dataclass(frozen=True)
class WindingResult:
    winding: int
    min_modulus: float
    samples_used: int
    converged: bool

    def to_dict(self) -> dict:
        return {
            "winding": self.winding,
            "min_modulus": self.min_modulus,
            "samples_used": self.samples_used,
            "converged": self.converged,
        }


def _sample_circle(f: CircleSymbol, n: int) -> np.ndarray:
    return f.values_at(_TWO_PI * np.arange(n) / n)


def winding_number(
    f: CircleSymbol,
    n0: int = DEFAULT_START_SAMPLES,
    vanish_tol: float = DEFAULT_VANISH_TOL,
    sample_cap: int = SAMPLE_CAP,
) -> WindingResult:
    """Winding of ``f`` around the origin by unwrapped phase accumulation.

    Starting from ``n0`` uniform samples the grid doubles until (a) every
    sampled modulus exceeds ``vanish_tol``, (b) every principal-value phase
    step is below pi/2, and (c) the integer total repeats across one
    doubling.  Raises ``VanishingSymbolError`` when the modulus stays at or
    below ``vanish_tol`` at the cap and ``UnresolvedWindingError`` when the
    phase steps or the integer never settle.  For sampled symbols the
    refinement reuses nearest native samples, so convergence is effectively
    judged at the native resolution.
    """
    if not _is_pow2(n0) or n0 < 8:
        raise ValueError("n0 must be a power of two, at least 8")
    if vanish_tol <= 0:
        raise ValueError("vanish_tol must be positive")
    prev: int | None = None
    n = n0
    min_mod = 0.0
    last_vanished = True
    while n <= sample_cap:
        vals = _sample_circle(f, n)
        min_mod = float(np.abs(vals).min())
        if min_mod <= vanish_tol:
            last_vanished = True
            prev = None
            n *= 2
            continue
        last_vanished = False
        steps = np.angle(np.roll(vals, -1) / vals)
        if float(np.abs(steps).max()) >= _MAX_PHASE_STEP:
            prev = None
            n *= 2
            continue
        w = int(round(float(steps.sum()) / _TWO_PI))
        if prev is not None and prev == w:
            return WindingResult(w, min_mod, n, True)
        prev = w
        n *= 2
    if last_vanished:
        raise VanishingSymbolError(
            f"symbol modulus stayed at or below {vanish_tol} up to {sample_cap} samples",
            min_modulus=min_mod,
        )
    raise UnresolvedWindingError(
        f"winding did not stabilize within {sample_cap} samples"
    )


def toeplitz_index(
    f: CircleSymbol,
    vanish_tol: float = DEFAULT_VANISH_TOL,
    n0: int = DEFAULT_START_SAMPLES,
    sample_cap: int = SAMPLE_CAP,
) -> IndexResult:
    """Index of the Toeplitz operator with symbol ``f``: minus the winding.

    A symbol that cannot be bounded away from zero gets the non-Fredholm
    verdict, reported as ``NumericallyMarginal``.  An unresolved winding
    propagates as ``UnresolvedWindingError``.
    """
    try:
        wr = winding_number(f, n0=n0, vanish_tol=vanish_tol, sample_cap=sample_cap)
    except VanishingSymbolError as err:
        cert = IndexCertificate(min_modulus_on_circle=err.min_modulus)
        return IndexResult(Verdict.NUMERICALLY_MARGINAL, None, cert)
    cert = IndexCertificate(
        min_modulus_on_circle=wr.min_modulus,
        winding=wr.winding,
    )
    return IndexResult(Verdict.FREDHOLM, -wr.winding, cert)


def _flat_step(x: np.ndarray) -> np.ndarray:
    # Smooth 0 -> 1 step on [0, 1], flat to all orders at both ends.
    xc = np.clip(x, 1e-12, 1.0 - 1e-12)
    lo = np.exp(-1.0 / xc)
    hi = np.exp(-1.0 / (1.0 - xc))
    return lo / (lo + hi)


def pump_winding_demo(
    delta: float,
    epsilon: float,
    n: int,
    samples: int = 2 ** 14,
    n0: int = DEFAULT_START_SAMPLES,
    vanish_tol: float = DEFAULT_VANISH_TOL,
) -> WindingResult:
    """Winding pumped through a flat spot of a smooth symbol.

    The base symbol is exactly 0 on an arc of length ``delta`` centered at
    angle 0, rises through an infinitely flat collar of width ``delta/2``
    on each side, and equals 1 elsewhere.  Adding the perturbation
    ``epsilon * exp(i*n*theta)`` makes the sum wind approximately
    ``n*delta/(2*pi)`` times: on the arc only the perturbation is left.
    """
    if not 0.0 < delta < np.pi:
        raise ValueError("delta must lie in (0, pi)")
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    if epsilon == 0:
        raise VanishingSymbolError("the unperturbed symbol vanishes on the flat arc")
    theta = _TWO_PI * np.arange(samples) / samples
    dist = np.abs(np.angle(np.exp(1j * theta)))  # arc distance to angle 0
    half = delta / 2.0
    collar = delta / 2.0
    base = np.where(
        dist <= half,
        0.0,
        np.where(dist >= half + collar, 1.0, _flat_step((dist - half) / collar)),
    )
    vals = base + epsilon * np.exp(1j * n * theta)
    return winding_number(CircleSymbol.from_samples(vals), n0=n0, vanish_tol=vanish_tol)


def symbol_from_csv(path) -> CircleSymbol:
    """Ingest a sampled symbol from rows ``theta,re,im``.

    Angles must be the uniform grid ``2*pi*k/N`` in increasing order, with
    ``N`` a power of two, at least 8.  Blank lines and lines starting with
    ``#`` are skipped; a single non-numeric header row is tolerated.
    """
    thetas: list[float] = []
    values: list[complex] = []
    with open(path, "r", encoding="ascii") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise ValueError(f"{path}: expected rows 'theta,re,im', got {line!r}")
            try:
                t, re, im = (float(x) for x in parts)
            except ValueError:
                if not thetas:  # header row
                    continue
                raise ValueError(f"{path}: non-numeric row {line!r}") from None
            thetas.append(t)
            values.append(complex(re, im))
    n = len(values)
    if n < 8 or not _is_pow2(n):
        raise ValueError(f"{path}: need a power-of-two sample count of at least 8, got {n}")
    expected = _TWO_PI * np.arange(n) / n
    got = np.asarray(thetas)
    if np.any(np.diff(got) <= 0) or not np.allclose(got, expected, atol=1e-9 * _TWO_PI):
        raise ValueError(f"{path}: angles must be the uniform grid 2*pi*k/N in increasing order")
    return CircleSymbol.from_samples(values)
