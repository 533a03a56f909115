"""Structural physical approximation: white-noise admixture and the isotropic-state argument.

Two conventions for the witness entering the mixture
``W̃ = p/(dA·dB)·I + (1−p)·W_used`` are supported:

* ``trace-normalized`` (default): W_used = W / Tr W
* ``choi-raw``: W_used = W as built by :func:`witnessforge.maps.choi`

Only the trace-normalised reading puts the positivity threshold of the
Psi witnesses at d/(d+1).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from gmpy2 import mpq

from .linalg import exact_eigenvalue_check, hermitian_eigenvalues, partial_transpose, psd_certify_exact
from .maps import Psi, Witness, check_self_dual, check_unital, choi
from .matrix import Matrix, Scalar, to_mpq, trace_product
from .states import isotropic, max_entangled
from .verify import VerificationReport

TRACE_NORMALIZED = "trace-normalized"
CHOI_RAW = "choi-raw"
NORMALIZATIONS = (TRACE_NORMALIZED, CHOI_RAW)
RATIONALIZE_TOL = 1e-9

# The boundary 1/(d+1) belongs to the swapped parametrisation p <-> 1-p; for
# ρ_p = p/d²·I + (1−p)P⁺ the fidelity criterion gives d/(d+1).  Reports carry both.
ISOTROPIC_BOUNDARY_NOTE = (
    "boundary p < 1/(d+1) holds only with p and 1-p exchanged; the fidelity criterion "
    "<P+|rho_p|P+> > 1/d gives p < d/(d+1) for rho_p = p/d^2 I + (1-p) P+"
)
TRACE_FORMULA_NOTE = (
    "brute-force Tr(W rho_p) supports (p(d+1) - d)/d; the alternative (p(d+1) - 1)/d "
    "is inconsistent with Tr W = d and Tr(W P+) = -1"
)


def _dims(W):
    if isinstance(W, Witness):
        return W.dims.dA, W.dims.dB
    d = int(round(W.rows ** 0.5))
    return d, W.rows // d


def _m(W) -> Matrix:
    return W.matrix if isinstance(W, Witness) else W


def _check_normalization(normalization):
    if normalization not in NORMALIZATIONS:
        raise ValueError(f"normalization must be one of {NORMALIZATIONS}")


def witness_used(W, normalization: str = TRACE_NORMALIZED) -> Matrix:
    _check_normalization(normalization)
    M = _m(W)
    if normalization == CHOI_RAW:
        return M
    tr = M.trace()
    if tr == 0:
        raise ValueError("trace-normalised mixing needs Tr W != 0")
    return M / tr


def spa_mix(W, p, normalization: str = TRACE_NORMALIZED) -> Matrix:
    """p/(dA·dB)·I + (1−p)·W_used, exact."""
    p = to_mpq(p) if not isinstance(p, Scalar) else p.re
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    dA, dB = _dims(W)
    n = dA * dB
    return Matrix.identity(n).scale(p / n) + witness_used(W, normalization).scale(1 - p)


def _exact_candidates(n: int, d: int) -> list:
    cands = [mpq(-1), mpq(-1, d), mpq(-1, n)]
    if d % 2 == 0 and d >= 4:
        k = d // 2
        cands.append(mpq(2 - k, k))
    return cands


def rationalize_min_eigenvalue(M: Matrix, d: int):
    """λ_min of M as an exact rational when it matches a known candidate, else a float.

    A candidate is accepted only if it is within 1e-9 of the float minimum
    and M − λ·I is exactly singular.
    """
    lam = hermitian_eigenvalues(M).min
    for c in _exact_candidates(M.rows, d):
        if abs(float(c) - lam) <= RATIONALIZE_TOL and exact_eigenvalue_check(M, c):
            return c
    return lam


def spa_threshold(W, normalization: str = TRACE_NORMALIZED):
    """Smallest p with p/n + (1−p)·λ_min(W_used) ≥ 0, n = dA·dB.

    Returns an exact ``Fraction`` when λ_min rationalises, otherwise a float;
    0 when W_used is already positive semidefinite.
    """
    dA, dB = _dims(W)
    n = dA * dB
    lam = rationalize_min_eigenvalue(witness_used(W, normalization), dA)
    if lam >= 0:
        return Fraction(0)
    # p/n − pλ = −λ
    p = (-lam) / (mpq(1, n) - lam) if not isinstance(lam, float) else -lam / (1.0 / n - lam)
    return Fraction(int(p.numerator), int(p.denominator)) if not isinstance(p, float) else p


@dataclass(frozen=True)
class SpaResult:
    threshold: object
    normalization: str
    mixed_operator: Matrix
    psd_at_threshold: bool
    ppt_at_threshold: bool
    min_eigenvalue_at_threshold: float

    def to_json(self) -> dict:
        return {
            "p_threshold": str(self.threshold),
            "normalization": self.normalization,
            "psd_at_threshold": self.psd_at_threshold,
            "ppt_at_threshold": self.ppt_at_threshold,
            "min_eigenvalue_at_threshold": self.min_eigenvalue_at_threshold,
        }


def spa_result(W, normalization: str = TRACE_NORMALIZED, tol: float = 1e-9) -> SpaResult:
    p = spa_threshold(W, normalization)
    if isinstance(p, float):
        p = Fraction(p).limit_denominator(10**9)
    mixed = spa_mix(W, p, normalization)
    lo = hermitian_eigenvalues(mixed).min
    dA, dB = _dims(W)
    ppt = bool(psd_certify_exact(partial_transpose(mixed, (dA, dB))))
    return SpaResult(p, normalization, mixed, lo >= -tol, ppt, lo)


# ---------------------------------------------------------------------------
# isotropic states


def isotropic_trace_line(W) -> tuple:
    """(a, b) with Tr(W ρ_p) = a + b·p exactly, from the two endpoint states."""
    dA, dB = _dims(W)
    if dA != dB:
        raise ValueError("isotropic states need dA == dB")
    d = dA
    M = _m(W)
    at0 = trace_product(M, max_entangled(d).matrix)  # p = 0
    at1 = M.trace() / (d * d)  # p = 1
    return at0, at1 - at0


def isotropic_detection_threshold(W):
    """Exact root p₀ of p ↦ Tr(W ρ_p), or None when the trace is constant in p."""
    a, b = isotropic_trace_line(W)
    if b == 0:
        return None
    root = -a / b
    return Fraction(int(root.re.numerator), int(root.re.denominator))


def isotropic_entanglement_boundary(d: int) -> Fraction:
    """ρ_p is entangled iff ⟨P⁺|ρ_p|P⁺⟩ > 1/d, i.e. p < d/(d+1)."""
    if d < 2:
        raise ValueError("d must be at least 2")
    return Fraction(d, d + 1)


def swapped_isotropic_boundary(d: int) -> Fraction:
    """1/(d+1): the same criterion with the roles of p and 1−p exchanged."""
    return Fraction(1, d + 1)


def alternative_isotropic_trace(p, d: int) -> Fraction:
    """The competing closed form (p(d+1) − 1)/d, kept so reports can rule it out."""
    return (Fraction(p) * (d + 1) - 1) / d


def supported_isotropic_trace(p, d: int) -> Fraction:
    return (Fraction(p) * (d + 1) - d) / d


def eb_support_check(k: int, W: Witness | None = None) -> VerificationReport:
    """Mechanical premises of the entanglement-breaking argument for the Psi map.

    (a) unital, (b) self-dual, (c) isotropic detection root equals the
    isotropic separability boundary, (d) the SPA mixture at threshold is PPT.
    For a unital self-dual map, (a)–(c) are the premises from which
    entanglement breaking follows; (d) is a necessary corroboration only.  ``W`` overrides the witness used
    in (c) and (d).
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    d = 2 * k
    spec = Psi(k)
    W = choi(spec) if W is None else W
    report = VerificationReport()
    report.add("unital", check_unital(spec))
    report.add("self-dual", check_self_dual(spec))
    root = isotropic_detection_threshold(W)
    boundary = isotropic_entanglement_boundary(d)
    report.add("isotropic-root==boundary", root == boundary,
               exact=Scalar(root) if root is not None else None, expected=boundary,
               note=ISOTROPIC_BOUNDARY_NOTE)
    # brute force on actual states, independent of the two-point line
    brute_ok = all(
        trace_product(_m(W), isotropic(d, p).matrix) == Scalar(supported_isotropic_trace(p, d))
        for p in (Fraction(0), Fraction(1, 3), Fraction(1))
    )
    report.add("isotropic-trace-closed-form", brute_ok, expected="(p(d+1) - d)/d", note=TRACE_FORMULA_NOTE)
    res = spa_result(W, TRACE_NORMALIZED)
    report.add("spa-threshold", res.threshold == Fraction(d, d + 1), exact=Scalar(res.threshold), expected=Fraction(d, d + 1))
    report.add("spa-psd-at-threshold", res.psd_at_threshold, float_value=res.min_eigenvalue_at_threshold, tol=1e-9)
    report.add("spa-ppt-at-threshold", res.ppt_at_threshold)
    return report
