from fractions import Fraction

import numpy as np
import pytest

from witnessforge import _kernels
from witnessforge.errors import DimensionMismatch, NotCirculant
from witnessforge.linalg import BipartiteDims, kron, partial_transpose
from witnessforge.maps import BreuerHall, Reduction, Transpose, Witness, choi
from witnessforge.matrix import Matrix, Scalar
from witnessforge.states import (
    ProductVectorFamily,
    isotropic,
    max_entangled,
    spanning_family,
)
from witnessforge.verify import (
    FAIL,
    INCONCLUSIVE,
    PASS,
    VerificationReport,
    block_positivity_min,
    certify_atomic,
    certify_block_positive,
    certify_indecomposable,
    certify_optimal,
    circulant_decompose,
    circulant_reassemble,
    expectation,
    mutual_detection_matrix,
    negative_spectrum_profile,
    product_state_probe,
)

BACKENDS = ["numpy"] + (["numba"] if _kernels.HAVE_NUMBA else [])


def test_expectation_on_white_noise(witnesses):
    for k, W in witnesses.items():
        d = 2 * k
        assert expectation(W, isotropic(d, 1)) == W.matrix.trace() / (d * d)


def test_expectation_dimension_mismatch(witnesses):
    with pytest.raises(DimensionMismatch):
        expectation(witnesses[2], max_entangled(3))


def test_expectation_is_bilinear(witnesses, rho_states, d_states):
    W = witnesses[2]
    a = Fraction(2, 7)
    mixed = rho_states[2].matrix.scale(a) + d_states[2].matrix.scale(1 - a)
    assert expectation(W, mixed) == expectation(W, rho_states[2]) * a + expectation(W, d_states[2]) * (1 - a)


@pytest.mark.parametrize("backend", BACKENDS)
@pytest.mark.parametrize("k", [2, 3])
def test_block_positivity_search_on_psi(witnesses, k, backend):
    res = block_positivity_min(witnesses[k], backend=backend)
    assert res.min_value >= -1e-9 and abs(res.min_value) < 1e-9
    assert res.converged and res.restarts_used == 64
    v = np.kron(res.psi, res.phi)
    assert abs(np.vdot(v, witnesses[k].matrix.to_complex() @ v).real - res.min_value) < 1e-12
    assert not res.refutes


def test_block_positivity_refutes_diagonal_operator():
    e11 = Matrix.unit(2, 0, 0)
    W = Witness.from_matrix(kron(e11, e11) - Matrix.identity(4) / 2)
    res = block_positivity_min(W, restarts=8)
    assert abs(res.min_value + 0.5) < 1e-12
    assert res.refutes and res.exact_value == Scalar("-1/2")
    assert certify_block_positive(W, restarts=8, samples=0)["block-positivity-search"].status == FAIL


def test_block_positivity_swap_is_zero():
    res = block_positivity_min(choi(Transpose(2)), restarts=16)
    assert abs(res.min_value) < 1e-9


def test_block_positivity_single_restart(witnesses):
    rep = certify_block_positive(witnesses[2], restarts=1, seed=7, samples=20)
    c = rep["block-positivity-search"]
    assert c.status == PASS and "evidence, not proof" in c.note


def test_block_positivity_is_deterministic(witnesses):
    a = block_positivity_min(witnesses[3], restarts=4, seed=5)
    b = block_positivity_min(witnesses[3], restarts=4, seed=5)
    assert a.min_value == b.min_value


@pytest.mark.parametrize("k", [2, 3])
def test_random_product_states_nonnegative(witnesses, k):
    lowest, negatives = product_state_probe(witnesses[k], samples=500)
    assert not negatives and lowest >= 0


def test_random_product_states_per_map_witness():
    for spec in (BreuerHall(3), Reduction(3)):
        _, negatives = product_state_probe(choi(spec), samples=100, seed=1)
        assert not negatives


@pytest.mark.parametrize("k", [2, 3])
def test_indecomposable(witnesses, rho_states, k):
    rep = certify_indecomposable(witnesses[k], rho_states[k])
    assert rep.status == PASS
    assert rep["negative-expectation"].exact == Fraction(-(k - 1), k * k * (k + 1))


def test_indecomposable_rejects_npt_state(witnesses):
    rep = certify_indecomposable(witnesses[2], max_entangled(4))
    assert rep["state-ppt"].status == FAIL and rep.status == FAIL


def test_reduction_witness_is_not_indecomposable(rho_states, d_states):
    W = choi(Reduction(6))
    for S in (rho_states[3], d_states[3]):
        rep = certify_indecomposable(W, S)
        assert rep["negative-expectation"].status == FAIL
        assert expectation(W, S) >= 0


@pytest.mark.parametrize("k", [2, 3])
def test_atomic(witnesses, d_states, k):
    rep = certify_atomic(witnesses[k], d_states[k])
    assert rep.status == PASS
    assert rep["negative-expectation"].exact == Fraction(-1, 7 * k)


def test_atomic_without_metadata_is_inconclusive(witnesses, rho_states):
    rep = certify_atomic(witnesses[2], rho_states[2])
    assert rep.status == INCONCLUSIVE


@pytest.mark.parametrize("k", [2, 3])
def test_optimal(witnesses, k):
    rep = certify_optimal(witnesses[k], spanning_family(k))
    assert rep.status == PASS
    assert rep["spans-space"].exact == (2 * k) ** 2


def test_optimal_fails_without_g_vectors(witnesses):
    k, d = 2, 4
    F = spanning_family(k)
    truncated = ProductVectorFamily(F.pairs[: d + d * (d - 1) // 2])
    rep = certify_optimal(witnesses[k], truncated)
    assert rep["exact-zeros"].status == PASS
    assert rep["spans-space"].status == FAIL
    assert rep["spans-space"].exact < d * d


def test_reduction_is_optimal_on_small_family():
    e1, e2 = Matrix.basis(2, 0), Matrix.basis(2, 1)
    vecs = [e1, e2, e1 + e2, e1 + e2.scale(Scalar(0, 1))]
    F = ProductVectorFamily(tuple((v, v.conj()) for v in vecs))
    assert certify_optimal(choi(Reduction(2)), F).status == PASS


def test_negative_spectrum_profiles(witnesses):
    p3 = negative_spectrum_profile(witnesses[3])
    assert p3.count == 2
    assert any(abs(v + 1) < 1e-9 for v in p3.values) and any(abs(v + 1 / 3) < 1e-9 for v in p3.values)
    assert negative_spectrum_profile(witnesses[2]).count == 1
    W = witnesses[2]
    pt = negative_spectrum_profile(partial_transpose(W.matrix, W.dims))
    assert pt.count == 1 and abs(pt.values[0] + 1) < 1e-9


@pytest.mark.parametrize("k", [3, 4])
def test_partial_transpose_negative_count(witnesses, k):
    W = witnesses[k]
    pt = negative_spectrum_profile(partial_transpose(W.matrix, W.dims))
    assert pt.count == k * (k - 1) // 2
    # the common value is -2/k
    assert len(pt.clusters) == 1 and abs(pt.clusters[0][0] + 2 / k) < 1e-9


def test_mutual_detection_matrix(witnesses, rho_states):
    BH3 = choi(BreuerHall(3))
    table = mutual_detection_matrix([witnesses[3], BH3, choi(BreuerHall(2))], [rho_states[3], rho_states[2]])
    assert table[0][0] == Fraction(-1, 18)
    assert table[1][0] >= 0
    assert table[2][1] == Fraction(-1, 12)
    assert table[0][1] is None


def test_circulant_on_max_entangled():
    d = 3
    blocks = circulant_decompose(max_entangled(d).matrix.scale(d), d)
    assert blocks[0] == Matrix.from_rows([[1] * d] * d)
    assert all(b.is_zero() for b in blocks[1:])


@pytest.mark.parametrize("k", [2, 3, 4])
def test_circulant_psi(witnesses, k):
    W = witnesses[k].matrix
    assert circulant_reassemble(circulant_decompose(W, 2 * k), 2 * k) == W


def test_circulant_rejects_off_cell_entry():
    X = kron(Matrix.unit(2, 0, 1), Matrix.unit(2, 0, 0))
    with pytest.raises(NotCirculant) as info:
        circulant_decompose(X, 2)
    assert (info.value.row, info.value.col) == ((0, 0), (1, 0))


def test_report_json_shape():
    rep = VerificationReport()
    rep.add("x", True, exact=Scalar("-1/12"), float_value=-1 / 12, tol=1e-9)
    assert rep.to_json() == {"checks": [{"name": "x", "status": "pass", "exact": "-1/12", "float": -1 / 12, "tol": 1e-9}]}


def test_report_status_rules():
    rep = VerificationReport()
    assert rep.status == INCONCLUSIVE
    rep.add("a", INCONCLUSIVE)
    rep.add("b", True)
    assert rep.status == PASS
    rep.add("c", False)
    assert rep.status == FAIL


def test_dims_type():
    assert BipartiteDims(2, 3).total == 6
