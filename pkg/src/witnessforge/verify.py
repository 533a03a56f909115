"""Certificates for witness properties: detection, atomicity, optimality, spectra, circulant form."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import DimensionMismatch, NotCirculant
from .linalg import (
    exact_rank,
    hermitian_eigenvalues,
    kron,
    partial_transpose,
    psd_certify_exact,
    rationalize_vector,
    schmidt_rank,
)
from .maps import Witness
from .matrix import ZERO, Matrix, Scalar, projector, quadratic_form, trace_product
from .sampling import random_vector, sub_rng
from .states import BipartiteState, ProductVectorFamily

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"

NEGATIVITY_TOL = 1e-9
ALTMIN_RTOL = 1e-12
DEFAULT_RESTARTS = 64
DEFAULT_ITERS = 500


@dataclass
class Check:
    name: str
    status: str
    exact: Scalar | None = None
    float_value: float | None = None
    tol: float = 0.0
    expected: object = None
    note: str = ""

    def to_json(self) -> dict:
        out = {"name": self.name, "status": self.status}
        if self.exact is not None:
            out["exact"] = str(self.exact)
        if self.float_value is not None:
            out["float"] = self.float_value
        out["tol"] = self.tol
        if self.expected is not None:
            out["expected"] = str(self.expected)
        if self.note:
            out["note"] = self.note
        return out


@dataclass
class VerificationReport:
    checks: list = field(default_factory=list)

    def add(self, name, passed, **kw) -> Check:
        status = passed if isinstance(passed, str) else (PASS if passed else FAIL)
        c = Check(name, status, **kw)
        self.checks.append(c)
        return c

    def extend(self, other: "VerificationReport", prefix: str = "") -> None:
        for c in other.checks:
            if prefix:
                c.name = f"{prefix}{c.name}"
            self.checks.append(c)

    @property
    def status(self) -> str:
        statuses = {c.status for c in self.checks}
        if FAIL in statuses:
            return FAIL
        if INCONCLUSIVE in statuses and PASS not in statuses:
            return INCONCLUSIVE
        return PASS if self.checks else INCONCLUSIVE

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def __getitem__(self, name) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_json(self) -> dict:
        return {"checks": [c.to_json() for c in self.checks]}


def _matrix_of(x) -> Matrix:
    return x.matrix if hasattr(x, "matrix") else x


# ---------------------------------------------------------------------------
# expectation values


def expectation(W, rho) -> Scalar:
    """Exact Tr(W·ρ)."""
    Wm, Rm = _matrix_of(W), _matrix_of(rho)
    if Wm.shape != Rm.shape:
        raise DimensionMismatch(f"witness {Wm.shape} vs state {Rm.shape}")
    return trace_product(Wm, Rm)


def product_expectation(W, psi: Matrix, phi: Matrix) -> Scalar:
    """⟨ψ⊗φ|W|ψ⊗φ⟩."""
    return quadratic_form(_matrix_of(W), kron(psi, phi))


def mutual_detection_matrix(witnesses: Sequence, states: Sequence) -> list:
    """Table of exact Tr(W_i ρ_j); cells with mismatched dimensions hold None."""
    table = []
    for W in witnesses:
        row = []
        for rho in states:
            try:
                row.append(expectation(W, rho))
            except DimensionMismatch:
                row.append(None)
        table.append(row)
    return table


# ---------------------------------------------------------------------------
# block positivity


@dataclass(frozen=True)
class ProductMinResult:
    min_value: float
    psi: np.ndarray
    phi: np.ndarray
    restarts_used: int
    converged: bool
    exact_value: Scalar | None = None

    @property
    def refutes(self) -> bool:
        """True only when a rationalised product vector gives an exactly negative value."""
        return self.exact_value is not None and self.exact_value < 0


def _witness_tensor(W) -> tuple:
    M = _matrix_of(W)
    if isinstance(W, Witness):
        dA, dB = W.dims.dA, W.dims.dB
    else:
        dA = dB = int(round(M.rows ** 0.5))
    return M.to_complex().reshape(dA, dB, dA, dB), dA, dB


def _random_unit(rng: np.random.Generator, n: int) -> np.ndarray:
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return v / np.linalg.norm(v)


def block_positivity_min(
    W,
    restarts: int = DEFAULT_RESTARTS,
    iters: int = DEFAULT_ITERS,
    seed: int = 0,
    tol: float = NEGATIVITY_TOL,
    backend=None,
) -> ProductMinResult:
    """Search min ⟨ψ⊗φ|W|ψ⊗φ⟩ over unit product vectors by alternating minimisation.

    Each restart fixes a random φ, replaces ψ by the lowest eigenvector of
    the contracted dA×dA matrix, then does the same for φ, until the value
    stops moving (relative change 1e-12) or ``iters`` is hit.  A result
    below ``-tol`` is rationalised and re-evaluated exactly; only an exact
    negative value counts as a refutation.
    """
    W4, dA, dB = _witness_tensor(W)
    best = None
    all_converged = True
    for r in range(restarts):
        rng = np.random.default_rng([seed, r])
        phi0 = _random_unit(rng, dB)
        val, psi, phi, _, conv = _kernels.altmin(W4, phi0, iters, ALTMIN_RTOL, backend=backend)
        all_converged &= conv
        if best is None or val < best[0]:
            best = (val, psi, phi)
    _, psi, phi = best
    # the reported value is the form at the reported argmin
    v = np.kron(psi, phi)
    value = float(np.real(np.vdot(v, W4.reshape(dA * dB, dA * dB) @ v)))
    exact = None
    if value < -tol:
        exact = product_expectation(W, rationalize_vector(psi), rationalize_vector(phi))
    return ProductMinResult(value, psi, phi, restarts, all_converged, exact)


def product_state_probe(W, samples: int = 500, seed: int = 0, bound: int = 1000) -> tuple:
    """Exact ⟨ψ⊗φ|W|ψ⊗φ⟩ on random rational product vectors; returns (min value, negatives)."""
    M = _matrix_of(W)
    d = int(round(M.rows ** 0.5))
    dA = W.dims.dA if isinstance(W, Witness) else d
    dB = M.rows // dA
    lowest = None
    negatives = []
    for s in range(samples):
        rng = sub_rng(seed, s)
        psi = random_vector(rng, dA, bound)
        phi = random_vector(rng, dB, bound)
        val = product_expectation(M, psi, phi)
        # normalise so values from different draws are comparable
        val = val / (psi.H @ psi)[0, 0] / (phi.H @ phi)[0, 0]
        if lowest is None or val < lowest:
            lowest = val
        if val < 0:
            negatives.append((psi, phi, val))
    return lowest, negatives


def certify_block_positive(W, restarts=DEFAULT_RESTARTS, iters=DEFAULT_ITERS, seed=0, samples=500, tol=NEGATIVITY_TOL, backend=None) -> VerificationReport:
    """Heuristic EW check: a clean search is reported as pass of inconclusive strength."""
    report = VerificationReport()
    res = block_positivity_min(W, restarts, iters, seed, tol, backend)
    if res.refutes:
        report.add("block-positivity-search", FAIL, exact=res.exact_value, float_value=res.min_value, tol=tol,
                   note="exact negative value at a rationalised product vector")
    else:
        report.add("block-positivity-search", res.min_value >= -tol, float_value=res.min_value, tol=tol,
                   note=f"heuristic: no violation in {res.restarts_used} restarts (evidence, not proof)"
                   + ("" if res.converged else "; some restarts hit the iteration cap"))
    if samples:
        lowest, negatives = product_state_probe(W, samples, seed)
        report.add("random-product-states", not negatives, exact=lowest, float_value=float(lowest), tol=0.0,
                   note=f"{samples} exact rational product states")
    return report


# ---------------------------------------------------------------------------
# indecomposability, atomicity, optimality


def certify_indecomposable(W, rho: BipartiteState) -> VerificationReport:
    report = VerificationReport()
    R = rho.matrix
    tr = R.trace()
    report.add("unit-trace", tr == 1, exact=tr, expected=1)
    report.add("state-psd", bool(psd_certify_exact(R)))
    report.add("state-ppt", bool(psd_certify_exact(partial_transpose(R, rho.dims))))
    val = expectation(W, rho)
    report.add("negative-expectation", val < 0, exact=val, float_value=float(val))
    return report


def certify_atomic(W, D: BipartiteState) -> VerificationReport:
    """Pass iff D and D^Γ come with Schmidt-rank ≤ 2 decompositions, both PSD, and Tr(W D) < 0.

    A state without decomposition metadata cannot be judged; the report
    then carries a single inconclusive check.
    """
    report = VerificationReport()
    if D.decomposition is None or D.pt_decomposition is None:
        report.add("schmidt-number-certificate", INCONCLUSIVE,
                   note="state carries no Schmidt-rank <= 2 decomposition")
        return report
    n = D.matrix.rows
    dims = D.dims

    def mixture(dec):
        total = Matrix.zeros(n)
        for w, v in dec:
            total = total + projector(v).scale(w)
        return total

    report.add("decomposition-matches-state", mixture(D.decomposition) == D.matrix)
    DG = partial_transpose(D.matrix, dims)
    report.add("pt-decomposition-matches", mixture(D.pt_decomposition) == DG)
    ranks = [schmidt_rank(v, dims) for _, v in D.decomposition]
    pt_ranks = [schmidt_rank(v, dims) for _, v in D.pt_decomposition]
    report.add("schmidt-rank<=2", max(ranks) <= 2, exact=Scalar(max(ranks)))
    report.add("pt-schmidt-rank<=2", max(pt_ranks) <= 2, exact=Scalar(max(pt_ranks)))
    report.add("weights-nonnegative", all(w >= 0 for w, _ in D.decomposition + D.pt_decomposition))
    report.add("state-psd", bool(psd_certify_exact(D.matrix)))
    report.add("state-ppt", bool(psd_certify_exact(DG)))
    val = expectation(W, D)
    report.add("negative-expectation", val < 0, exact=val, float_value=float(val))
    return report


def certify_optimal(W, family: ProductVectorFamily) -> VerificationReport:
    """Sufficient optimality test: exact zeros of the witness spanning the whole space."""
    report = VerificationReport()
    M = _matrix_of(W)
    vectors = family.flattened()
    nonzero = [i for i, v in enumerate(vectors) if quadratic_form(M, v) != 0]
    report.add("exact-zeros", not nonzero, exact=Scalar(len(vectors) - len(nonzero)),
               note=f"{len(nonzero)} members with nonzero value" if nonzero else "")
    rank = exact_rank(vectors)
    report.add("spans-space", rank == M.rows, exact=Scalar(rank), expected=M.rows)
    return report


# ---------------------------------------------------------------------------
# spectra


@dataclass(frozen=True)
class NegativeProfile:
    count: int
    values: tuple
    clusters: tuple  # (mean value, multiplicity)


def negative_spectrum_profile(W, tol: float = NEGATIVITY_TOL, cluster_tol: float = 1e-6) -> NegativeProfile:
    spec = hermitian_eigenvalues(_matrix_of(W))
    neg = [x for x in spec.eigenvalues if x < -tol]
    groups = []
    for x in neg:
        if groups and abs(x - groups[-1][-1]) <= cluster_tol:
            groups[-1].append(x)
        else:
            groups.append([x])
    clusters = tuple((float(np.mean(g)), len(g)) for g in groups)
    return NegativeProfile(len(neg), tuple(neg), clusters)


# ---------------------------------------------------------------------------
# circulant structure


def circulant_cell(i: int, a: int, d: int) -> int:
    """Index α of the Σ_α cell containing e_i ⊗ e_a."""
    return (a - i) % d


def circulant_decompose(X: Matrix, d: int) -> list:
    """Split X into d coefficient matrices x^(α) with X_α = Σ x^(α)_ij e_ij ⊗ S^α e_ij S^α†.

    Raises NotCirculant with ((i, a), (j, b)) for the first nonzero entry
    whose row and column lie in different cells.
    """
    if X.shape != (d * d, d * d):
        raise DimensionMismatch(f"expected a {d * d}×{d * d} matrix")
    nz = (X.re != 0) | (X.im != 0)
    for r, c in zip(*np.nonzero(nz)):
        i, a = divmod(int(r), d)
        j, b = divmod(int(c), d)
        if circulant_cell(i, a, d) != circulant_cell(j, b, d):
            raise NotCirculant((i, a), (j, b))
    blocks = []
    for alpha in range(d):
        idx = [i * d + (i + alpha) % d for i in range(d)]
        blocks.append(Matrix(X.re[np.ix_(idx, idx)].copy(), X.im[np.ix_(idx, idx)].copy()))
    return blocks


def circulant_reassemble(blocks: Sequence[Matrix], d: int) -> Matrix:
    re = np.full((d * d, d * d), ZERO, dtype=object)
    im = np.full((d * d, d * d), ZERO, dtype=object)
    for alpha, x in enumerate(blocks):
        idx = [i * d + (i + alpha) % d for i in range(d)]
        re[np.ix_(idx, idx)] = x.re
        im[np.ix_(idx, idx)] = x.im
    return Matrix(re, im)
