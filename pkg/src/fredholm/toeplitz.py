"""Finite sections of Toeplitz operators and a singular-value oracle.

A Toeplitz operator is the semi-infinite matrix with constant diagonals
filled by the Fourier coefficients of its symbol.  Finite truncations
cannot compute the index directly (the truncated determinant of an
index-nonzero symbol is typically never zero), but the number of singular
values that keep shrinking geometrically while their count stabilizes
under doubling the truncation matches the modulus of the winding number.
That count is used here purely as independent numerical evidence.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .winding import CircleSymbol, SAMPLED, winding_number, DEFAULT_VANISH_TOL

SIZE_CAP = 4096
DEFAULT_DECAY_THRESHOLD = 1e-6

_TWO_PI = 2.0 * np.pi


class SizeExceededError(ValueError):
    """Requested truncation is beyond the dense-decomposition cap."""


class InconclusiveError(RuntimeError):
    """Near-zero singular value counts did not stabilize across a doubling."""


class AliasRiskWarning(UserWarning):
    """Requested Fourier order exceeds the native Nyquist limit of a sampled symbol."""


def fourier_coeffs(f: CircleSymbol, m: int) -> np.ndarray:
    """Fourier window ``f_hat_{-m} .. f_hat_{m}`` as an array of length 2m+1.

    Coefficient representations are read off directly (zero-padded); sampled
    symbols are transformed by direct summation over the native grid, with an
    ``AliasRiskWarning`` when ``m`` exceeds the native Nyquist order.
    """
    if m < 0:
        raise ValueError("m must be nonnegative")
    out = np.zeros(2 * m + 1, dtype=complex)
    if f.kind == SAMPLED:
        n = len(f.samples)
        if m > n // 2:
            warnings.warn(
                f"order {m} exceeds the Nyquist limit {n // 2} of the native grid",
                AliasRiskWarning,
                stacklevel=2,
            )
        vals = np.asarray(f.samples)
        theta = _TWO_PI * np.arange(n) / n
        for k in range(-m, m + 1):
            out[k + m] = (vals * np.exp(-1j * k * theta)).mean()
    else:
        for j, c in enumerate(f.coeffs):
            e = f.min_exp + j
            if -m <= e <= m:
                out[e + m] += c
    return out


@dataclass(frozen=True, eq=False)
class ToeplitzTruncation:
    """Dense N x N section with entry ``(j, k) = f_hat_{j-k}``."""

    size: int
    entries: np.ndarray
    symbol: CircleSymbol

    @property
    def bandwidth(self) -> int | None:
        """Band half-width for coefficient symbols, None for sampled ones."""
        if self.symbol.kind == SAMPLED:
            return None
        hi = self.symbol.min_exp + len(self.symbol.coeffs) - 1
        return max(abs(self.symbol.min_exp), abs(hi))


def build_truncation(f: CircleSymbol, n: int) -> ToeplitzTruncation:
    if not 1 <= n <= SIZE_CAP:
        raise SizeExceededError(f"truncation size {n} outside [1, {SIZE_CAP}]")
    with warnings.catch_warnings():
        # The window order n-1 routinely exceeds Nyquist for sampled symbols;
        # the matrix is still the exact finite section of the sampled data.
        warnings.simplefilter("ignore", AliasRiskWarning)
        window = fourier_coeffs(f, n - 1)
    idx = np.subtract.outer(np.arange(n), np.arange(n)) + (n - 1)
    entries = window[idx]
    entries.setflags(write=False)
    return ToeplitzTruncation(n, entries, f)


def smallest_singular_values(t: ToeplitzTruncation, k: int) -> list[float]:
    """The k smallest singular values, ascending, by dense decomposition."""
    if t.size > SIZE_CAP:
        raise SizeExceededError(f"truncation size {t.size} exceeds the cap {SIZE_CAP}")
    if not 1 <= k <= t.size:
        raise ValueError("k must lie in [1, N]")
    sv = np.linalg.svd(t.entries, compute_uv=False)
    return [float(s) for s in sv[::-1][:k]]


@dataclass(frozen=True)
class SpectralEvidence:
    """Near-zero singular value count and its agreement with |winding|."""

    near_zero_count: int
    agrees_with_winding: bool
    winding: int


def spectral_index_evidence(
    f: CircleSymbol,
    n: int,
    decay_threshold: float = DEFAULT_DECAY_THRESHOLD,
    vanish_tol: float = DEFAULT_VANISH_TOL,
) -> SpectralEvidence:
    """Count singular values below ``decay_threshold * sigma_max`` at N and 2N.

    The count that stabilizes across the doubling is reported and compared
    with the modulus of the winding number.  A changing count raises
    ``InconclusiveError``: the evidence is flagged, never mislabeled.
    """
    wr = winding_number(f, vanish_tol=vanish_tol)
    counts = []
    for size in (n, 2 * n):
        sv = np.linalg.svd(build_truncation(f, size).entries, compute_uv=False)
        counts.append(int((sv < decay_threshold * sv[0]).sum()))
    if counts[0] != counts[1]:
        raise InconclusiveError(
            f"near-zero count moved from {counts[0]} at N={n} to {counts[1]} at N={2 * n}"
        )
    return SpectralEvidence(counts[0], counts[0] == abs(wr.winding), wr.winding)


def write_truncation_csv(t: ToeplitzTruncation, path) -> None:
    """Row-major dump, each entry as a ``re,im`` pair."""
    with open(path, "w", encoding="ascii", newline="") as fh:
        for row in t.entries:
            fh.write(",".join(f"{v.real!r},{v.imag!r}" for v in row))
            fh.write("\n")
