"""Exact construction and certification of entanglement witnesses from positive maps."""

from .errors import (
    ConstructionError,
    ConvergenceError,
    DimensionMismatch,
    NonHermitianError,
    NotCirculant,
    WitnessForgeError,
)
from .linalg import (
    BipartiteDims,
    exact_rank,
    hermitian_eigenvalues,
    kron,
    partial_transpose,
    psd_certify_exact,
    schmidt_rank,
)
from .maps import BreuerHall, Conjugated, Psi, Reduction, Transpose, Witness, apply, apply_via_choi, choi
from .matrix import Matrix, Scalar
from .spa import (
    eb_support_check,
    isotropic_detection_threshold,
    isotropic_entanglement_boundary,
    spa_mix,
    spa_threshold,
)
from .states import (
    BipartiteState,
    atomic_state,
    breuer_family,
    isotropic,
    max_entangled,
    ppt_witness_state,
    spanning_family,
)
from .verify import (
    VerificationReport,
    block_positivity_min,
    certify_atomic,
    certify_indecomposable,
    certify_optimal,
    circulant_decompose,
    expectation,
    mutual_detection_matrix,
    negative_spectrum_profile,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
