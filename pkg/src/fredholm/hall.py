"""Quantum Hall model calculators.

Three closed-form machines sit here: magnetic Bloch bands of the square
lattice tight-binding model at rational flux p/q with Diophantine gap
labels, the Landau-level index diagram over the (field, Fermi energy)
plane, and the lowest-Landau-level matrix elements of the flux-insertion
operator PUP together with its distance from an exact shift.

Units for the Landau plane: hbar = 1 and effective mass 1/2, so the level
energies are E_n = |B| (2n + 1) and the sign of B multiplies the filled
level count.  Any affine reparametrization of (B, E) produces the same
phase-diagram topology, which is all that is asserted about it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .laurent import IndexCertificate, IndexResult, Verdict
from .phase import GridSpec, PhaseGrid, rasterize

DEFAULT_K_GRID = 64
DEFAULT_GAP_TOL = 1e-8    # scaled by the spectral width
DEFAULT_LEVEL_TOL = 1e-9  # margin around Landau levels and the B = 0 axis
PUP_M_CAP = 10 ** 6
BUTTERFLY_Q_CAP = 50

_TWO_PI = 2.0 * math.pi


class CentralGap:
    """Marker for the even-denominator central gap, which admits no label."""

    __slots__ = ()

    def __repr__(self) -> str:
        return "CentralGap()"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, CentralGap)

    def __hash__(self) -> int:
        return hash("CentralGap")


@dataclass(frozen=True)
class FluxRational:
    """Reduced flux p/q per unit cell."""

    p: int
    q: int

    def __post_init__(self) -> None:
        if self.q < 1 or self.p < 1:
            raise ValueError("p and q must be positive")
        if math.gcd(self.p, self.q) != 1:
            raise ValueError("p and q must be coprime")

    @property
    def flux(self) -> float:
        return self.p / self.q


def harper_bloch_matrix(flux: FluxRational, k1: float, k2: float) -> np.ndarray:
    """q x q magnetic Bloch matrix of the isotropic square-lattice model.

    Diagonal entries 2 cos(2 pi (p/q) n + k2); unit hops on the two cyclic
    off-diagonals, the wrap-around entries carrying the phases e^{+-i k1}.
    For q = 1 both hops wrap onto the single entry, giving the free band
    2 cos k2 + 2 cos k1.
    """
    q = flux.q
    n = np.arange(q)
    m = np.zeros((q, q), dtype=complex)
    m[n, n] = 2.0 * np.cos(_TWO_PI * flux.p / q * n + k2)
    if q == 1:
        m[0, 0] += 2.0 * np.cos(k1)
        return m
    r = np.arange(q - 1)
    m[r, r + 1] += 1.0
    m[r + 1, r] += 1.0
    m[q - 1, 0] += np.exp(1j * k1)
    m[0, q - 1] += np.exp(-1j * k1)
    return m


def _bloch_eigvals_grid(flux: FluxRational, n: int) -> np.ndarray:
    """Sorted eigenvalues over the n x n uniform k grid, shape (n*n, q)."""
    q = flux.q
    ks = _TWO_PI * np.arange(n) / n
    rows = np.arange(q)
    diag = 2.0 * np.cos(_TWO_PI * flux.p / q * rows[None, :] + ks[:, None])  # (n, q) in k2
    evals = np.empty((n, n, q))
    for i1 in range(n):  # chunk over k1 to bound memory
        m = np.zeros((n, q, q), dtype=complex)
        m[:, rows, rows] = diag
        if q == 1:
            m[:, 0, 0] += 2.0 * np.cos(ks[i1])
        else:
            r = np.arange(q - 1)
            m[:, r, r + 1] += 1.0
            m[:, r + 1, r] += 1.0
            m[:, q - 1, 0] += np.exp(1j * ks[i1])
            m[:, 0, q - 1] += np.exp(-1j * ks[i1])
        evals[i1] = np.linalg.eigvalsh(m)
    return evals.reshape(n * n, q)


@dataclass(frozen=True)
class HarperSpectrum:
    """Band intervals, gap-open flags, and labels of open gaps for one flux.

    ``gap_labels[j-1]`` is the integer label of gap j (between bands j and
    j+1, 1-based) when that gap is open, else None.  For even q the central
    gap is treated as closed by convention.
    """

    flux: FluxRational
    bands: tuple[tuple[float, float], ...]
    gap_open: tuple[bool, ...]
    gap_labels: tuple[int | None, ...]
    k_grid_n: int


def harper_bands(
    flux: FluxRational,
    k_grid_n: int = DEFAULT_K_GRID,
    gap_tol: float = DEFAULT_GAP_TOL,
) -> HarperSpectrum:
    """Band structure on a uniform k grid with Diophantine labels for open gaps."""
    if k_grid_n < 8:
        raise ValueError("k_grid_n must be at least 8")
    q = flux.q
    evals = _bloch_eigvals_grid(flux, k_grid_n)
    lo = evals.min(axis=0)
    hi = evals.max(axis=0)
    bands = tuple((float(lo[j]), float(hi[j])) for j in range(q))
    width = float(hi[-1] - lo[0])
    tol = gap_tol * max(1.0, width)
    gap_open: list[bool] = []
    labels: list[int | None] = []
    for j in range(1, q):
        is_open = float(lo[j] - hi[j - 1]) > tol
        if q % 2 == 0 and j == q // 2:
            is_open = False  # central gap of even q: closed by convention
        gap_open.append(is_open)
        if is_open:
            label = solve_diophantine(flux.p, q, j)
            assert isinstance(label, int)
            labels.append(label)
        else:
            labels.append(None)
    return HarperSpectrum(flux, bands, tuple(gap_open), tuple(labels), k_grid_n)


def solve_diophantine(p: int, q: int, j: int):
    """The unique integer s with p*s = j (mod q) and |s| < q/2.

    For even q and j = q/2 no such integer exists and a :class:`CentralGap`
    marker is returned.  By convention j = 0 and j = q both map to 0.
    """
    if q < 1 or math.gcd(p, q) != 1:
        raise ValueError("need coprime p, q with q >= 1")
    if not 0 <= j <= q:
        raise ValueError("gap number j must lie in [0, q]")
    s = (pow(p, -1, q) * j) % q if q > 1 else 0
    if 2 * s > q:
        s -= q
    if q % 2 == 0 and 2 * s == q:
        return CentralGap()
    return int(s)


@dataclass(frozen=True)
class BandConductances:
    """Per-band differences of consecutive gap labels; they sum to zero.

    For even q the two central bands are merged into one (flagged by
    ``central_merged``) since the central gap carries no label.
    """

    values: tuple[int, ...]
    central_merged: bool


def band_conductances(p: int, q: int) -> BandConductances:
    labels: list = [0]
    for j in range(1, q):
        labels.append(solve_diophantine(p, q, j))
    labels.append(0)
    merged = False
    if q % 2 == 0:
        mid = q // 2
        assert isinstance(labels[mid], CentralGap)
        del labels[mid]
        merged = True
    values = tuple(int(labels[i + 1] - labels[i]) for i in range(len(labels) - 1))
    return BandConductances(values, merged)


@dataclass(frozen=True)
class ButterflyRow:
    """One band of one flux: interval plus the labels of the adjacent open gaps."""

    p: int
    q: int
    band: int  # 1-based
    lo: float
    hi: float
    label_below: int | None
    label_above: int | None


@dataclass(frozen=True)
class ButterflyDataset:
    rows: tuple[ButterflyRow, ...]
    q_max: int
    k_grid_n: int


def butterfly(q_max: int, k_grid_n: int = DEFAULT_K_GRID) -> ButterflyDataset:
    """Band data for every reduced flux p/q with 1 <= p <= q <= q_max."""
    if not 1 <= q_max <= BUTTERFLY_Q_CAP:
        raise ValueError(f"q_max must lie in [1, {BUTTERFLY_Q_CAP}]")
    rows: list[ButterflyRow] = []
    for q in range(1, q_max + 1):
        for p in range(1, q + 1):
            if math.gcd(p, q) != 1:
                continue
            spectrum = harper_bands(FluxRational(p, q), k_grid_n)
            for j in range(1, q + 1):
                below = spectrum.gap_labels[j - 2] if j >= 2 else None
                above = spectrum.gap_labels[j - 1] if j <= q - 1 else None
                lo, hi = spectrum.bands[j - 1]
                rows.append(ButterflyRow(p, q, j, lo, hi, below, above))
    return ButterflyDataset(tuple(rows), q_max, k_grid_n)


def write_butterfly_csv(dataset: ButterflyDataset, path) -> None:
    """Columns p,q,band,lo,hi,label_below,label_above; labels empty when absent."""
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write("p,q,band,lo,hi,label_below,label_above\n")
        for r in dataset.rows:
            below = "" if r.label_below is None else str(r.label_below)
            above = "" if r.label_above is None else str(r.label_above)
            fh.write(f"{r.p},{r.q},{r.band},{r.lo!r},{r.hi!r},{below},{above}\n")


def landau_index(b: float, e: float, tol: float = DEFAULT_LEVEL_TOL) -> IndexResult:
    """Index at field ``b`` and Fermi energy ``e`` in the Landau plane.

    Below the spectrum (e <= 0) the index is 0.  For b != 0 the index is
    sign(b) times the number of levels |b|(2n+1) below e, provided e keeps
    a distance above ``tol`` from every level; closer than that the verdict
    is NumericallyMarginal.  On the half-axis {b = 0, e > 0} the operator
    is exactly on the accumulation set and the verdict is NotFredholm.
    The certificate's modulus field carries the distance to the nearest
    non-Fredholm set (0 at the origin corner).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    b = float(b)
    e = float(e)
    if e <= 0.0:
        margin = abs(b) - e  # distance to the spectrum bottom
        return IndexResult(Verdict.FREDHOLM, 0, IndexCertificate(margin))
    if b == 0.0:
        return IndexResult(Verdict.NOT_FREDHOLM, None, IndexCertificate(0.0))
    ratio = e / abs(b)
    nearest = max(0, round((ratio - 1.0) / 2.0))
    dist = abs(ratio - (2 * nearest + 1)) * abs(b)
    if dist <= tol:
        return IndexResult(Verdict.NUMERICALLY_MARGINAL, None, IndexCertificate(dist))
    count = int(math.floor((ratio + 1.0) / 2.0)) if ratio > 1.0 else 0
    index = count if b > 0 else -count
    return IndexResult(Verdict.FREDHOLM, index, IndexCertificate(dist))


@dataclass(frozen=True)
class LandauPhasePoint:
    b: float
    e: float
    result: IndexResult


def landau_point(b: float, e: float, tol: float = DEFAULT_LEVEL_TOL) -> LandauPhasePoint:
    return LandauPhasePoint(float(b), float(e), landau_index(b, e, tol))


def landau_phase_grid(
    b_min: float,
    b_max: float,
    nx: int,
    e_min: float,
    e_max: float,
    ny: int,
    tol: float = DEFAULT_LEVEL_TOL,
    threads: int = 1,
    timestamp: str | None = None,
) -> PhaseGrid:
    """Raster of the Landau plane (b on x, e on y) reusing the grid writers."""
    spec = GridSpec(b_min, b_max, nx, e_min, e_max, ny)
    return rasterize(
        lambda x, y: landau_index(x, y, tol),
        spec,
        engine_name="landau",
        tolerances=(("level_tol", tol),),
        threads=threads,
        timestamp=timestamp,
    )


@dataclass(frozen=True)
class PupElement:
    """Off-diagonal matrix element of the projected flux insertion at offset m.

    Values increase strictly with m, stay in (0, 1), and approach 1 like
    1 - 1/(8(m+1)); the operator therefore differs from the exact shift by
    a compact (diagonal, vanishing) correction.
    """

    m: int
    value: float


def pup_matrix_element(m: int) -> PupElement:
    """Gamma(m + 3/2) / (Gamma(m + 1) * sqrt(m + 1)) via log-gamma differences."""
    if not 0 <= m <= PUP_M_CAP:
        raise ValueError(f"m must lie in [0, {PUP_M_CAP}]")
    lg = math.lgamma(m + 1.5) - math.lgamma(m + 1.0) - 0.5 * math.log(m + 1.0)
    return PupElement(int(m), math.exp(lg))


def pup_compact_deviation(m_floor: int) -> float:
    """sup over m >= m_floor of |1 - value(m)|, attained at m_floor by monotonicity."""
    if m_floor < 1:
        raise ValueError("m_floor must be at least 1")
    return 1.0 - pup_matrix_element(m_floor).value
