"""Bipartite state families used to probe the witnesses.

All constructors are exact.  The two PPT entangled families certify their
own positivity (state and partial transpose) before returning, so a
construction bug surfaces as :class:`ConstructionError` rather than as a
silently wrong state.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from gmpy2 import mpq

from .errors import ConstructionError
from .linalg import (
    BipartiteDims,
    kron,
    max_entangled_vector,
    partial_transpose,
    psd_certify_exact,
    schmidt_rank,
    swap_operator,
)
from .maps import Psi, canonical_antisymmetric_unitary, choi
from .matrix import Matrix, Scalar, projector, to_mpq

UNIT_TRACE = "unit-trace"
PSD = "psd"
PPT = "ppt"


@dataclass(frozen=True)
class BipartiteState:
    """Density matrix on C^dA ⊗ C^dB with optional re-verifiable certificates.

    ``decomposition`` and ``pt_decomposition`` are sequences of
    (weight, vector) pairs with Σ w·|v⟩⟨v| equal to the state and to its
    partial transpose respectively.
    """

    matrix: Matrix
    dims: BipartiteDims
    certificates: frozenset = field(default_factory=frozenset)
    schmidt_number_bound: int | None = None
    decomposition: tuple | None = None
    pt_decomposition: tuple | None = None
    label: str = ""

    def __post_init__(self):
        self.dims.check(self.matrix)

    @property
    def d(self) -> int:
        return self.dims.dA

    def certificate_list(self) -> list:
        out = sorted(self.certificates)
        if self.schmidt_number_bound is not None:
            out.append(f"schmidt-number-bound:{self.schmidt_number_bound}")
        return out


@dataclass(frozen=True)
class ProductVectorFamily:
    """Pairs (left, right) whose products ψ⊗φ are the family members."""

    pairs: tuple

    def __len__(self):
        return len(self.pairs)

    def flattened(self) -> list:
        return [kron(a, b) for a, b in self.pairs]


def _certify(M: Matrix, dims: BipartiteDims, label: str) -> frozenset:
    if M.trace() != 1:
        raise ConstructionError(f"{label}: trace is {M.trace()}, not 1")
    if not M.is_hermitian():
        raise ConstructionError(f"{label}: not Hermitian")
    if not psd_certify_exact(M):
        raise ConstructionError(f"{label}: not positive semidefinite")
    if not psd_certify_exact(partial_transpose(M, dims)):
        raise ConstructionError(f"{label}: partial transpose not positive semidefinite")
    return frozenset({UNIT_TRACE, PSD, PPT})


def _rational(x, name: str):
    if isinstance(x, float):
        raise TypeError(f"{name} must be exact (int, Fraction or 'p/q' string), got float")
    return to_mpq(x)


def max_entangled(d: int) -> BipartiteState:
    """P⁺_d = (1/d) Σ_ij |ii⟩⟨jj|."""
    if d < 2:
        raise ValueError("d must be at least 2")
    P = projector(max_entangled_vector(d)) / d
    return BipartiteState(P, BipartiteDims(d, d), frozenset({UNIT_TRACE, PSD}), label=f"P+_{d}")


def isotropic(d: int, p) -> BipartiteState:
    """ρ_p = (p/d²)·I + (1−p)·P⁺_d."""
    p = _rational(p, "p")
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    noise = Matrix.identity(d * d).scale(p / (d * d))
    M = noise + max_entangled(d).matrix.scale(1 - p)
    return BipartiteState(M, BipartiteDims(d, d), frozenset({UNIT_TRACE, PSD}), label=f"iso(d={d},p={p})")


def ppt_witness_state(k: int) -> BipartiteState:
    """The PPT state ρ_2k on which W_2k takes the value −(k−1)/(k²(k+1)).

    The (i, i+k) blocks are −N_k times the corresponding blocks of the Choi
    matrix of k·Ψ (the map without its 1/k prefactor); this is the reading
    that makes ρ₄ equal the 16×16 reference matrix with prefactor 1/24.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    d = 2 * k
    N = mpq(1, 2 * k * k * (k + 1))
    W = choi(Psi(k)).matrix.scale(k)
    zero = Matrix.zeros(d)
    blocks = [[zero for _ in range(d)] for _ in range(d)]
    for i in range(d):
        diag = [k] * k + [1] * k if i < k else [1] * k + [k] * k
        blocks[i][i] = Matrix.diag(diag).scale(N)
    for i in range(k):
        for j in range(k, d):
            if j == i + k:
                b = W.block(i, j, d).scale(-N)
            else:
                b = Matrix.unit(d, i, j).scale(N)
            blocks[i][j] = b
            blocks[j][i] = b.H
    M = Matrix(np.block([[b.re for b in row] for row in blocks]), np.block([[b.im for b in row] for row in blocks]))
    dims = BipartiteDims(d, d)
    return BipartiteState(M, dims, _certify(M, dims, f"rho_{d}"), label=f"rho_{d}")


def product_basis_vectors(k: int) -> dict:
    """φ₁…φ₇ (keys 1..7) on C^2k ⊗ C^2k, 1-based labels, 0-based storage."""
    d = 2 * k
    e = lambda i: Matrix.basis(d, i - 1)  # noqa: E731 - 1-based boundary
    return {
        1: kron(e(1), e(1)),
        2: kron(e(1), e(k + 1)),
        3: kron(e(k), e(1)),
        4: kron(e(k), e(2 * k)),
        5: kron(e(k + 1), e(1)),
        6: kron(e(k + 1), e(k + 1)),
        7: kron(e(k + 1), e(2 * k)),
    }


def atomic_decompositions(k: int):
    phi = product_basis_vectors(k)
    w = mpq(1, 7)
    dec = (
        (w, phi[1] + phi[6]),
        (w, phi[5] - phi[4]),
        (w, phi[2]),
        (w, phi[3]),
        (w, phi[7]),
    )
    pt_dec = (
        (w, phi[2] + phi[5]),
        (w, phi[3] - phi[7]),
        (w, phi[1]),
        (w, phi[4]),
        (w, phi[6]),
    )
    return dec, pt_dec


def mix(decomposition, n: int) -> Matrix:
    total = Matrix.zeros(n)
    for weight, v in decomposition:
        total = total + projector(v).scale(weight)
    return total


def atomic_state(k: int) -> BipartiteState:
    """D_2k: PPT, with D and D^Γ both mixtures of Schmidt-rank ≤ 2 vectors."""
    if k < 2:
        raise ValueError("k must be at least 2")
    d = 2 * k
    dims = BipartiteDims(d, d)
    dec, pt_dec = atomic_decompositions(k)
    D = mix(dec, d * d)
    if partial_transpose(D, dims) != mix(pt_dec, d * d):
        raise ConstructionError("D^Γ differs from its stated decomposition")
    certs = _certify(D, dims, f"D_{d}")
    ranks = [schmidt_rank(v, dims) for _, v in dec + pt_dec]
    if max(ranks) > 2:
        raise ConstructionError("decomposition vector with Schmidt rank above 2")
    return BipartiteState(D, dims, certs, schmidt_number_bound=2, decomposition=dec, pt_decomposition=pt_dec, label=f"D_{d}")


def symmetric_projector(d: int) -> Matrix:
    """Projector onto the swap-symmetric subspace, (I + SWAP)/2."""
    return (Matrix.identity(d * d) + swap_operator(d)) / 2


def breuer_family(k: int, lam) -> BipartiteState:
    """ρ(λ) = λ·P⁺_d + (1−λ)·ρ₀ with ρ₀ ∝ (I⊗U₀) P_S (I⊗U₀)†, d = 2k."""
    lam = _rational(lam, "lambda")
    if not 0 <= lam <= 1:
        raise ValueError("lambda must lie in [0, 1]")
    d = 2 * k
    V = kron(Matrix.identity(d), canonical_antisymmetric_unitary(k))
    rho0 = (V @ symmetric_projector(d) @ V.H).scale(mpq(2, d * (d + 1)))
    M = max_entangled(d).matrix.scale(lam) + rho0.scale(1 - lam)
    return BipartiteState(M, BipartiteDims(d, d), frozenset({UNIT_TRACE}), label=f"breuer(k={k},lambda={lam})")


def breuer_ppt_bound(k: int) -> Fraction:
    return Fraction(1, 2 * k + 2)


def spanning_family(k: int) -> ProductVectorFamily:
    """{e_l} ∪ {e_m + e_n} ∪ {e_m + i·e_n}, m < n, each paired with its conjugate."""
    if k < 2:
        raise ValueError("k must be at least 2")
    d = 2 * k
    vecs = [Matrix.basis(d, l) for l in range(d)]
    for m in range(d):
        for n in range(m + 1, d):
            vecs.append(Matrix.basis(d, m) + Matrix.basis(d, n))
    for m in range(d):
        for n in range(m + 1, d):
            vecs.append(Matrix.basis(d, m) + Matrix.basis(d, n).scale(Scalar(0, 1)))
    return ProductVectorFamily(tuple((v, v.conj()) for v in vecs))


def state_from_matrix(M: Matrix, d: int, label: str = "") -> BipartiteState:
    return BipartiteState(M, BipartiteDims(d, M.rows // d), label=label)


__all__ = [
    "BipartiteState",
    "ProductVectorFamily",
    "max_entangled",
    "isotropic",
    "ppt_witness_state",
    "atomic_state",
    "atomic_decompositions",
    "product_basis_vectors",
    "breuer_family",
    "breuer_ppt_bound",
    "spanning_family",
    "symmetric_projector",
    "state_from_matrix",
    "mix",
]
