"""Exact bipartite linear algebra plus the floating-point spectral facade."""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Iterable, Sequence

import numpy as np
from gmpy2 import mpq

from . import _kernels
from .errors import ConvergenceError, DimensionMismatch, NonHermitianError
from .matrix import ONE, ZERO, Matrix, Scalar, quadratic_form

DEFAULT_EIG_TOL = 1e-12
DEFAULT_MAX_SWEEPS = 100


@dataclass(frozen=True)
class BipartiteDims:
    dA: int
    dB: int

    def __post_init__(self):
        if self.dA < 1 or self.dB < 1:
            raise ValueError("subsystem dimensions must be positive")

    @property
    def total(self) -> int:
        return self.dA * self.dB

    @classmethod
    def square(cls, d: int) -> "BipartiteDims":
        return cls(d, d)

    def check(self, M: Matrix) -> None:
        if M.shape != (self.total, self.total):
            raise DimensionMismatch(f"matrix {M.shape} does not act on C^{self.dA} ⊗ C^{self.dB}")


@dataclass(frozen=True)
class FloatSpectrum:
    eigenvalues: tuple
    residual: float
    sweeps: int = 0

    def __iter__(self):
        return iter(self.eigenvalues)

    def __len__(self):
        return len(self.eigenvalues)

    @property
    def min(self) -> float:
        return self.eigenvalues[0]

    def contains(self, value: float, tol: float) -> bool:
        return any(abs(x - value) <= tol for x in self.eigenvalues)


@dataclass(frozen=True)
class PsdResult:
    """Outcome of the exact PSD test; ``witness`` satisfies v†Mv < 0 when not PSD."""

    psd: bool
    witness: Matrix | None = None
    value: Scalar | None = None

    def __bool__(self):
        return self.psd


# ---------------------------------------------------------------------------
# tensor structure


def kron(A: Matrix, B: Matrix) -> Matrix:
    re = np.kron(A.re, B.re)
    if A.is_real and B.is_real:
        return Matrix(re)
    im = np.kron(A.re, B.im) + np.kron(A.im, B.re)
    re = re - np.kron(A.im, B.im)
    return Matrix(re, im)


def _as_dims(dims) -> BipartiteDims:
    if isinstance(dims, BipartiteDims):
        return dims
    if isinstance(dims, int):
        return BipartiteDims(dims, dims)
    dA, dB = dims
    return BipartiteDims(dA, dB)


def partial_transpose(X: Matrix, dims, subsystem: str = "B") -> Matrix:
    dims = _as_dims(dims)
    dims.check(X)
    if subsystem not in ("A", "B"):
        raise ValueError("subsystem must be 'A' or 'B'")
    axes = (2, 1, 0, 3) if subsystem == "A" else (0, 3, 2, 1)
    shape = (dims.dA, dims.dB, dims.dA, dims.dB)

    def pt(a):
        return a.reshape(shape).transpose(axes).reshape(dims.total, dims.total).copy()

    return Matrix(pt(X.re), pt(X.im))


def swap_operator(d: int) -> Matrix:
    """SWAP on C^d ⊗ C^d: |ab⟩ ↦ |ba⟩."""
    re = np.full((d * d, d * d), ZERO, dtype=object)
    for a in range(d):
        for b in range(d):
            re[b * d + a, a * d + b] = ONE
    return Matrix(re)


# ---------------------------------------------------------------------------
# exact PSD certificate


def psd_certify_exact(M: Matrix) -> PsdResult:
    """Decide M ⪰ 0 exactly by symmetric Gaussian elimination.

    Pivots on positive diagonal entries.  A negative diagonal entry, or a
    zero diagonal with a nonzero entry in its row, gives an explicit vector
    in the current Schur complement; it is lifted back to the original
    coordinates through the recorded pivot rows.
    """
    if not M.is_square:
        raise DimensionMismatch("PSD test needs a square matrix")
    if not M.is_hermitian():
        raise NonHermitianError("psd_certify_exact requires an exactly Hermitian matrix")
    n = M.rows
    re = M.re.copy()
    im = M.im.copy()
    complex_ = not M.is_real
    active = list(range(n))
    history = []  # (pivot, row_re, row_im, pivot_value)

    witness = None
    while active:
        diag = [(i, re[i, i]) for i in active]
        neg = next((i for i, x in diag if x < 0), None)
        if neg is not None:
            witness = {neg: Scalar(1)}
            break
        pos = next((i for i, x in diag if x > 0), None)
        if pos is None:
            # all remaining diagonal entries vanish; any off-diagonal entry is fatal
            for i in active:
                for j in active:
                    if i != j and (re[i, j] != 0 or im[i, j] != 0):
                        # v = e_i − conj(M_ij)·e_j gives v†Mv = −2|M_ij|²
                        witness = {i: Scalar(1), j: -Scalar(re[i, j], -im[i, j])}
                        break
                if witness is not None:
                    break
            break
        p = pos
        piv = re[p, p]
        rest = [i for i in active if i != p]
        history.append((p, re[p].copy(), im[p].copy() if complex_ else None, piv))
        rows = [i for i in rest if re[i, p] != 0 or im[i, p] != 0]
        if rows:
            r_idx = np.array(rows)
            c_idx = np.array(rest)
            # S[a, b] -= S[a, p]·S[p, b] / S[p, p]
            col_re = re[r_idx, p] / piv
            row_re = re[p, c_idx]
            if complex_:
                col_im = im[r_idx, p] / piv
                row_im = im[p, c_idx]
                re[np.ix_(r_idx, c_idx)] -= np.outer(col_re, row_re) - np.outer(col_im, row_im)
                im[np.ix_(r_idx, c_idx)] -= np.outer(col_re, row_im) + np.outer(col_im, row_re)
            else:
                re[np.ix_(r_idx, c_idx)] -= np.outer(col_re, row_re)
        active = rest

    if witness is None:
        return PsdResult(True)

    v = {i: s for i, s in witness.items()}
    for p, row_re, row_im, piv in reversed(history):
        acc = Scalar(0)
        for j, s in v.items():
            m = Scalar(row_re[j], row_im[j] if row_im is not None else ZERO)
            acc = acc + m * s
        if acc:
            v[p] = -acc / Scalar(piv)
    vec = Matrix.column([v.get(i, Scalar(0)) for i in range(n)])
    value = quadratic_form(M, vec)
    if not value < 0:  # pragma: no cover - would indicate an elimination bug
        raise AssertionError("lifted PSD witness failed to certify negativity")
    return PsdResult(False, vec, value)


# ---------------------------------------------------------------------------
# exact rank


def _as_column_list(vectors) -> list:
    out = []
    for v in vectors:
        if isinstance(v, Matrix):
            if v.cols != 1:
                v = Matrix(v.re.reshape(-1, 1), v.im.reshape(-1, 1))
            out.append(v)
        else:
            out.append(Matrix.column(v))
    return out


def _gaussian_integer_rows(vectors: Sequence[Matrix]):
    """Scale each vector to Gaussian integers; return (re rows, im rows) of Python ints."""
    rows_re, rows_im = [], []
    for v in vectors:
        dens = [int(x.denominator) for x in v.re.flat] + [int(x.denominator) for x in v.im.flat]
        lcm = 1
        for d in dens:
            lcm = lcm * d // gcd(lcm, d)
        rows_re.append([int(x * lcm) for x in v.re.flat])
        rows_im.append([int(x * lcm) for x in v.im.flat])
    return rows_re, rows_im


def exact_rank(vectors: Iterable) -> int:
    """Rank of a family of vectors by fraction-free elimination over Z[i]."""
    vecs = _as_column_list(vectors)
    if not vecs:
        return 0
    n = vecs[0].rows
    if any(v.rows != n for v in vecs):
        raise DimensionMismatch("vectors differ in dimension")
    R, I = _gaussian_integer_rows(vecs)
    m = len(R)
    rank = 0
    live = list(range(m))
    for col in range(n):
        pivot = next((r for r in live if R[r][col] or I[r][col]), None)
        if pivot is None:
            continue
        rank += 1
        live.remove(pivot)
        pr, pi = R[pivot], I[pivot]
        a, b = pr[col], pi[col]
        for r in live:
            c, d = R[r][col], I[r][col]
            if not (c or d):
                continue
            # row_r ← pivot_val·row_r − row_r[col]·row_pivot  (both Gaussian integers)
            rr, ri = R[r], I[r]
            new_re = [a * x - b * y - (c * u - d * w) for x, y, u, w in zip(rr, ri, pr, pi)]
            new_im = [a * y + b * x - (c * w + d * u) for x, y, u, w in zip(rr, ri, pr, pi)]
            g = 0
            for x in new_re:
                g = gcd(g, x)
            for x in new_im:
                g = gcd(g, x)
            if g > 1:
                new_re = [x // g for x in new_re]
                new_im = [x // g for x in new_im]
            R[r], I[r] = new_re, new_im
        if not live:
            break
    return rank


def schmidt_rank(v, dims) -> int:
    """Number of nonzero Schmidt coefficients, via exact rank of the dA×dB reshaping."""
    dims = _as_dims(dims)
    (v,) = _as_column_list([v])
    if v.rows != dims.total:
        raise DimensionMismatch(f"vector of length {v.rows} is not in C^{dims.dA} ⊗ C^{dims.dB}")
    if v.is_zero():
        raise ValueError("Schmidt rank of the zero vector is undefined")
    re = v.re.reshape(dims.dA, dims.dB)
    im = v.im.reshape(dims.dA, dims.dB)
    rows = [Matrix(re[i:i + 1, :].T.copy(), im[i:i + 1, :].T.copy()) for i in range(dims.dA)]
    return exact_rank(rows)


# ---------------------------------------------------------------------------
# floating-point spectra


def _float_hermitian(M, check=True) -> np.ndarray:
    if isinstance(M, Matrix):
        if check and not M.is_hermitian():
            raise NonHermitianError("matrix is not exactly Hermitian")
        return M.to_complex()
    a = np.asarray(M, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch("need a square matrix")
    if check and not np.allclose(a, a.conj().T, rtol=0, atol=1e-12 * max(1.0, np.abs(a).max())):
        raise NonHermitianError("matrix is not Hermitian")
    return a


def hermitian_eigh(M, tol: float = DEFAULT_EIG_TOL, max_sweeps: int = DEFAULT_MAX_SWEEPS, backend=None):
    """Cyclic Jacobi eigendecomposition; returns (FloatSpectrum, eigenvector columns)."""
    a = _float_hermitian(M)
    w, V, off, sweeps = _kernels.jacobi_eigh(a, tol, max_sweeps, backend=backend)
    scale = np.abs(a).sum(axis=1).max() if a.size else 0.0
    if off > tol * scale:
        raise ConvergenceError("Jacobi iteration cap reached", off, sweeps)
    return FloatSpectrum(tuple(float(x) for x in w), float(off), int(sweeps)), V


def hermitian_eigenvalues(M, tol: float = DEFAULT_EIG_TOL, max_sweeps: int = DEFAULT_MAX_SWEEPS, backend=None) -> FloatSpectrum:
    spectrum, _ = hermitian_eigh(M, tol, max_sweeps, backend)
    return spectrum


def exact_eigenvalue_check(M: Matrix, value) -> bool:
    """True iff ``value`` is an exact eigenvalue of M (M − value·I is singular)."""
    shifted = M - Matrix.identity(M.rows).scale(value)
    cols = [shifted.submatrix(0, M.rows, j, j + 1) for j in range(M.cols)]
    return exact_rank(cols) < M.rows


def max_entangled_vector(d: int) -> Matrix:
    """Unnormalised Σ_i |ii⟩."""
    re = np.full((d * d, 1), ZERO, dtype=object)
    for i in range(d):
        re[i * d + i, 0] = ONE
    return Matrix(re)


def rationalize(x: complex, max_den: int = 10**6) -> Scalar:
    from fractions import Fraction

    return Scalar(
        mpq(Fraction(float(np.real(x))).limit_denominator(max_den)),
        mpq(Fraction(float(np.imag(x))).limit_denominator(max_den)),
    )


def rationalize_vector(v, max_den: int = 10**6) -> Matrix:
    return Matrix.column([rationalize(x, max_den) for x in np.asarray(v).ravel()])
