"""Fredholm index engines for shift polynomials and Toeplitz symbols.

Two independent engines (root classification and winding number) certify
integer indices and cross-validate each other; on top of them sit phase
diagram rasters over parameter rectangles, a truncated-Toeplitz singular
value oracle, and quantum Hall calculators (magnetic Bloch bands with gap
labels, the Landau-plane index map, lowest-Landau-level matrix elements).
"""

from .laurent import (
    DEFAULT_BAND,
    DEFAULT_ROOT_TOL,
    IndexCertificate,
    IndexResult,
    LaurentPolynomial,
    NonConvergenceError,
    RootClassification,
    Verdict,
    ZeroSymbolError,
    adjoint_symbol,
    classify_roots,
    find_roots,
    index_shift_poly,
    invert_argument,
    multiply,
    normalize,
)
from .winding import (
    DEFAULT_VANISH_TOL,
    CircleSymbol,
    UnresolvedWindingError,
    VanishingSymbolError,
    WindingResult,
    eval_symbol,
    pump_winding_demo,
    symbol_from_csv,
    toeplitz_index,
    winding_number,
)
from .toeplitz import (
    AliasRiskWarning,
    InconclusiveError,
    SizeExceededError,
    SpectralEvidence,
    ToeplitzTruncation,
    build_truncation,
    fourier_coeffs,
    smallest_singular_values,
    spectral_index_evidence,
    write_truncation_csv,
)
from .phase import (
    BoundaryReport,
    GridSpec,
    ParamFamily,
    PhaseGrid,
    Provenance,
    boundary_report,
    load_grid,
    rasterize,
    sweep,
    write_grid,
)
from .hall import (
    BandConductances,
    ButterflyDataset,
    ButterflyRow,
    CentralGap,
    FluxRational,
    HarperSpectrum,
    LandauPhasePoint,
    PupElement,
    band_conductances,
    butterfly,
    harper_bands,
    harper_bloch_matrix,
    landau_index,
    landau_phase_grid,
    landau_point,
    pup_compact_deviation,
    pup_matrix_element,
    solve_diophantine,
    write_butterfly_csv,
)

__version__ = "0.1.0"
