"""Positive maps on M_n built from the reduction map, and their Choi matrices.

Maps are evaluated from their block formulas.  The Choi matrix is derived
from those evaluations, so contracting it against an input
(``apply_via_choi``) is an independent route back to the map.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np
from gmpy2 import mpq

from .errors import DimensionMismatch
from .linalg import BipartiteDims, hermitian_eigenvalues, kron, psd_certify_exact
from .matrix import ZERO, Matrix, Scalar, projector, trace_product
from .sampling import random_vector, sub_rng

J = Matrix.from_rows([[0, 1], [-1, 0]])


def reduction(X: Matrix) -> Matrix:
    """R_n(X) = I·Tr X − X."""
    if not X.is_square:
        raise DimensionMismatch("reduction map needs a square input")
    return Matrix.identity(X.rows).scale(X.trace()) - X


def canonical_antisymmetric_unitary(k: int) -> Matrix:
    """U₀ = I_k ⊗ J."""
    if k < 1:
        raise ValueError("k must be at least 1")
    return kron(Matrix.identity(k), J)


def signed_permutation(perm, signs=None) -> Matrix:
    """Matrix V with V e_j = sign_j e_perm[j]."""
    n = len(perm)
    signs = signs or [1] * n
    re = np.full((n, n), ZERO, dtype=object)
    for j, (i, s) in enumerate(zip(perm, signs)):
        re[i, j] = mpq(s)
    return Matrix(re)


def conjugated_antisymmetric_unitary(k: int, perm, signs=None) -> Matrix:
    """V U₀ V† for a signed permutation V; still unitary and antisymmetric."""
    V = signed_permutation(perm, signs)
    return V @ canonical_antisymmetric_unitary(k) @ V.H


def is_unitary(U: Matrix) -> bool:
    return U.is_square and (U.H @ U) == Matrix.identity(U.rows)


# ---------------------------------------------------------------------------
# map specifications


@dataclass(frozen=True)
class Reduction:
    n: int

    @property
    def dim(self) -> int:
        return self.n

    def apply(self, X: Matrix) -> Matrix:
        return reduction(X)


@dataclass(frozen=True)
class Transpose:
    n: int

    @property
    def dim(self) -> int:
        return self.n

    def apply(self, X: Matrix) -> Matrix:
        return X.T


@dataclass(frozen=True)
class Psi:
    """The map that treats X as a 2×2 array of k×k blocks and uses R_k off-diagonal."""

    k: int

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("Psi needs k >= 2")

    @property
    def dim(self) -> int:
        return 2 * self.k

    def apply(self, X: Matrix) -> Matrix:
        k = self.k
        x11, x12 = X.block(0, 0, k), X.block(0, 1, k)
        x21, x22 = X.block(1, 0, k), X.block(1, 1, k)
        eye = Matrix.identity(k)
        top = (eye.scale(x22.trace()), -(x12 + reduction(x21)))
        bottom = (-(x21 + reduction(x12)), eye.scale(x11.trace()))
        return _assemble([top, bottom]) / k


@dataclass(frozen=True)
class BreuerHall:
    """Φ^U(X) = (R_{2k}(X) − U Xᵀ U†) / (2(k−1)), U antisymmetric unitary."""

    k: int
    U: Matrix = None

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("Breuer-Hall needs k >= 2")
        if self.U is None:
            object.__setattr__(self, "U", canonical_antisymmetric_unitary(self.k))
        U = self.U
        if U.shape != (2 * self.k, 2 * self.k):
            raise DimensionMismatch("U must be 2k×2k")
        if U.T != -U:
            raise ValueError("U must be antisymmetric")
        if not is_unitary(U):
            raise ValueError("U must be unitary")

    @property
    def dim(self) -> int:
        return 2 * self.k

    def apply(self, X: Matrix) -> Matrix:
        return (reduction(X) - self.U @ X.T @ self.U.H) / (2 * (self.k - 1))


@dataclass(frozen=True)
class Conjugated:
    """Λ^{U₁U₂}(A) = U₁ Λ(U₂† A U₂) U₁†."""

    inner: "MapSpec"
    U1: Matrix
    U2: Matrix

    def __post_init__(self):
        n = self.inner.dim
        for U in (self.U1, self.U2):
            if U.shape != (n, n):
                raise DimensionMismatch("conjugating unitaries must match the inner map")
            if not is_unitary(U):
                raise ValueError("conjugating matrices must be exactly unitary")

    @property
    def dim(self) -> int:
        return self.inner.dim

    def apply(self, X: Matrix) -> Matrix:
        return self.U1 @ self.inner.apply(self.U2.H @ X @ self.U2) @ self.U1.H


MapSpec = Union[Reduction, Transpose, Psi, BreuerHall, Conjugated]


def _assemble(blocks) -> Matrix:
    re = np.block([[b.re for b in row] for row in blocks])
    im = np.block([[b.im for b in row] for row in blocks])
    return Matrix(re, im)


def apply(spec: MapSpec, X: Matrix) -> Matrix:
    if X.shape != (spec.dim, spec.dim):
        raise DimensionMismatch(f"{type(spec).__name__} acts on {spec.dim}×{spec.dim}, got {X.shape}")
    return spec.apply(X)


# ---------------------------------------------------------------------------
# Choi matrices


@dataclass(frozen=True)
class Witness:
    matrix: Matrix
    dims: BipartiteDims
    source: MapSpec | None = None

    def __post_init__(self):
        self.dims.check(self.matrix)
        if not self.matrix.is_hermitian():
            raise ValueError("a witness must be exactly Hermitian")

    @classmethod
    def from_matrix(cls, M: Matrix, d: int | None = None) -> "Witness":
        if d is None:
            d = int(round(M.rows ** 0.5))
        return cls(M, BipartiteDims(d, M.rows // d))

    @property
    def d(self) -> int:
        return self.dims.dA


def choi(spec: MapSpec) -> Witness:
    """W = Σ_ij e_ij ⊗ Λ(e_ij): the map acts on the second tensor factor."""
    d = spec.dim
    blocks = [[apply(spec, Matrix.unit(d, i, j)) for j in range(d)] for i in range(d)]
    W = _assemble(blocks)
    return Witness(W, BipartiteDims(d, d), spec)


def apply_via_choi(W: Witness | Matrix, X: Matrix) -> Matrix:
    """Λ(X) = Tr_A[(Xᵀ ⊗ I) W], computed as a tensor contraction."""
    M = W.matrix if isinstance(W, Witness) else W
    d = X.rows
    if M.shape != (d * d, d * d):
        raise DimensionMismatch("Choi matrix and input disagree in dimension")
    W4r = M.re.reshape(d, d, d, d)
    W4i = M.im.reshape(d, d, d, d)
    # out[b, b'] = Σ_{a,a'} X[a, a'] W[a, b, a', b']
    re = np.tensordot(X.re, W4r, axes=([0, 1], [0, 2]))
    im = np.tensordot(X.re, W4i, axes=([0, 1], [0, 2]))
    if not X.is_real:
        re = re - np.tensordot(X.im, W4i, axes=([0, 1], [0, 2]))
        im = im + np.tensordot(X.im, W4r, axes=([0, 1], [0, 2]))
    return Matrix(re, im)


# ---------------------------------------------------------------------------
# property checks


def check_self_dual(spec: MapSpec) -> bool:
    """Tr(e_kl·Λ(e_mn)) == Tr(Λ(e_kl)·e_mn) for all d⁴ index choices."""
    d = spec.dim
    images = {(i, j): apply(spec, Matrix.unit(d, i, j)) for i in range(d) for j in range(d)}
    for (k, l), img_kl in images.items():
        for (m, n), img_mn in images.items():
            # Tr(e_kl X) = X[l, k]
            if img_mn[l, k] != img_kl[n, m]:
                return False
    return True


def check_unital(spec: MapSpec) -> bool:
    eye = Matrix.identity(spec.dim)
    return apply(spec, eye) == eye


def check_trace_of_choi(spec: MapSpec) -> Scalar:
    return choi(spec).matrix.trace()


# ---------------------------------------------------------------------------
# positivity probe


@dataclass(frozen=True)
class ProbeReport:
    trials: int
    violations: tuple
    aa_dagger_max_error: float | None = None

    @property
    def ok(self) -> bool:
        return not self.violations


def psi_intertwiner_spectrum(k: int, psi1: np.ndarray, psi2: np.ndarray):
    """Eigenvalues of ÃÃ† for normalised halves, and the expected {1,1,s²,…,s²}."""
    t1 = psi1 / np.linalg.norm(psi1)
    t2 = psi2 / np.linalg.norm(psi2)
    ov = np.vdot(t1, t2)
    A = np.outer(t1, t2.conj()) - np.outer(t2, t1.conj()) + ov * np.eye(k)
    got = hermitian_eigenvalues(A @ A.conj().T).eigenvalues
    s2 = abs(ov) ** 2
    expected = sorted([1.0, 1.0] + [s2] * (k - 2))
    return np.array(got), np.array(expected)


def rank1_positivity_probe(spec: MapSpec, trials: int, seed: int = 0, bound: int = 1000, tol: float = 1e-9) -> ProbeReport:
    """Map random rank-1 projectors and certify each image PSD exactly.

    For Psi, also rebuild Ã from ψ = ψ₁ ⊕ ψ₂ and compare the spectrum of
    ÃÃ† against {1, 1, s², …, s²}.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    d = spec.dim
    violations = []
    worst = 0.0 if isinstance(spec, Psi) else None
    for t in range(trials):
        rng = sub_rng(seed, t)
        v = random_vector(rng, d, bound)
        if not psd_certify_exact(apply(spec, projector(v))):
            violations.append(v)
        if isinstance(spec, Psi):
            f = v.to_complex().ravel()
            p1, p2 = f[: spec.k], f[spec.k:]
            if np.linalg.norm(p1) > 0 and np.linalg.norm(p2) > 0:
                got, expected = psi_intertwiner_spectrum(spec.k, p1, p2)
                worst = max(worst, float(np.abs(got - expected).max()))
    if worst is not None and worst > tol:
        violations.append(f"ÃÃ† spectrum off by {worst:.3e}")
    return ProbeReport(trials, tuple(violations), worst)


def hilbert_schmidt_pairing(A: Matrix, B: Matrix) -> Scalar:
    return trace_product(A, B)
