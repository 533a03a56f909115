import numpy as np
import pytest
from hypothesis import given

from conftest import matrices
from witnessforge.errors import DimensionMismatch
from witnessforge.linalg import hermitian_eigenvalues, kron, max_entangled_vector
from witnessforge.maps import (
    J,
    BreuerHall,
    Conjugated,
    Psi,
    Reduction,
    Transpose,
    Witness,
    apply,
    apply_via_choi,
    canonical_antisymmetric_unitary,
    check_self_dual,
    check_trace_of_choi,
    check_unital,
    choi,
    conjugated_antisymmetric_unitary,
    is_unitary,
    rank1_positivity_probe,
    signed_permutation,
)
from witnessforge.matrix import Matrix, projector, quadratic_form
from witnessforge.sampling import random_matrix, sub_rng

SPECS = [Reduction(2), Reduction(3), Transpose(3), Psi(2), Psi(3), BreuerHall(2), BreuerHall(3)]


def test_reduction_example():
    X = Matrix.from_rows([[1, 2], [3, 4]])
    assert apply(Reduction(2), X) == Matrix.from_rows([[4, -2], [-3, 1]])


def test_reduction_is_symplectic_conjugated_transpose():
    for t in range(20):
        X = random_matrix(sub_rng(0, t), 2)
        assert apply(Reduction(2), X) == J @ X.T @ J.H


@pytest.mark.parametrize("k", [2, 3, 4])
def test_psi_is_unital(k):
    assert apply(Psi(k), Matrix.identity(2 * k)) == Matrix.identity(2 * k)


def test_psi_equals_breuer_hall_at_k2():
    for t in range(50):
        X = random_matrix(sub_rng(1, t), 4)
        assert apply(Psi(2), X) == apply(BreuerHall(2), X)
    assert choi(Psi(2)).matrix == choi(BreuerHall(2)).matrix


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        apply(Psi(2), Matrix.identity(3))


@pytest.mark.parametrize("spec", SPECS, ids=repr)
def test_linearity_and_hermiticity_preservation(spec):
    for t in range(5):
        rng = sub_rng(2, t)
        X, Y = random_matrix(rng, spec.dim), random_matrix(rng, spec.dim)
        a, b = random_matrix(rng, 1)[0, 0], random_matrix(rng, 1)[0, 0]
        assert apply(spec, X * a + Y * b) == apply(spec, X) * a + apply(spec, Y) * b
        assert apply(spec, X).H == apply(spec, X.H)


@given(matrices(4))
def test_choi_round_trip_psi(X):
    assert apply_via_choi(choi(Psi(2)), X) == apply(Psi(2), X)


def test_choi_round_trip_random_per_variant():
    for spec in SPECS:
        W = choi(spec)
        for t in range(10):
            X = random_matrix(sub_rng(4, t), spec.dim)
            assert apply_via_choi(W, X) == apply(spec, X)


def test_choi_of_reduction():
    W = choi(Reduction(2))
    P = projector(max_entangled_vector(2))
    assert W.matrix == Matrix.identity(4) - P
    np.testing.assert_allclose(hermitian_eigenvalues(W.matrix).eigenvalues, [-1, 1, 1, 1], atol=1e-12)


def test_choi_spectra_of_psi():
    ev2 = np.array(hermitian_eigenvalues(choi(Psi(2)).matrix).eigenvalues)
    assert (ev2 < -1e-9).sum() == 1 and abs(ev2.min() + 1) < 1e-9
    ev3 = hermitian_eigenvalues(choi(Psi(3)).matrix)
    assert ev3.contains(-1, 1e-9) and ev3.contains(-1 / 3, 1e-9)


@pytest.mark.parametrize("k", [2, 3, 4])
def test_psi_choi_constants(k):
    W = choi(Psi(k))
    assert check_trace_of_choi(Psi(k)) == 2 * k
    assert quadratic_form(W.matrix, max_entangled_vector(2 * k)) == -2 * k


def test_canonical_antisymmetric_unitary():
    assert canonical_antisymmetric_unitary(1) == J
    U = canonical_antisymmetric_unitary(2)
    assert U.T == -U
    for k in range(1, 6):
        U = canonical_antisymmetric_unitary(k)
        assert U @ U.H == Matrix.identity(2 * k)


def test_breuer_hall_validates_u():
    with pytest.raises(ValueError):
        BreuerHall(2, Matrix.identity(4))
    with pytest.raises(ValueError):
        BreuerHall(2, canonical_antisymmetric_unitary(2).scale(2))
    U = conjugated_antisymmetric_unitary(2, [1, 3, 0, 2], [1, -1, 1, 1])
    assert is_unitary(U) and U.T == -U
    assert check_unital(BreuerHall(2, U))


@pytest.mark.parametrize("spec", [Psi(2), Psi(3), Reduction(2), Reduction(4)], ids=repr)
def test_self_dual(spec):
    assert check_self_dual(spec)


def test_conjugated_pair_breaks_self_duality():
    # U1 = identity, U2 a transposition: Λ(A) = Ψ(V† A V) is not self-dual
    V = signed_permutation([1, 0, 2, 3])
    spec = Conjugated(Psi(2), Matrix.identity(4), V)
    assert not check_self_dual(spec)
    # the symmetric sandwich with U1 = U2 keeps it
    assert check_self_dual(Conjugated(Psi(2), V, V))


def test_conjugated_requires_unitaries():
    with pytest.raises(ValueError):
        Conjugated(Psi(2), Matrix.identity(4).scale(2), Matrix.identity(4))


@pytest.mark.parametrize("spec", [Psi(3), BreuerHall(3), Transpose(3)], ids=repr)
def test_unital(spec):
    assert check_unital(spec)


def test_witness_requires_hermitian():
    with pytest.raises(ValueError):
        Witness.from_matrix(Matrix.from_rows([[0, 1, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]]))


def test_rank1_probe_psi3():
    report = rank1_positivity_probe(Psi(3), 100, seed=0)
    assert report.ok and report.trials == 100
    assert report.aa_dagger_max_error < 1e-9


def test_psi_on_half_supported_vector_is_block_diagonal():
    k = 3
    v = Matrix.column([1, 2, "1/3", 0, 0, 0])
    out = apply(Psi(k), projector(v))
    assert out.block(0, 1, k).is_zero() and out.block(1, 0, k).is_zero()
    from witnessforge.linalg import psd_certify_exact

    assert psd_certify_exact(out)


def test_intertwiner_spectrum_orthogonal_halves():
    from witnessforge.maps import psi_intertwiner_spectrum

    got, expected = psi_intertwiner_spectrum(3, np.array([1, 0, 0], complex), np.array([0, 1, 0], complex))
    np.testing.assert_allclose(got, [0, 1, 1], atol=1e-12)
    np.testing.assert_allclose(expected, [0, 1, 1])


def test_psi_zero_on_conjugate_products():
    # ⟨ψ⊗ψ*|W|ψ⊗ψ*⟩ vanishes for every ψ
    W = choi(Psi(2)).matrix
    for t in range(10):
        psi = random_matrix(sub_rng(8, t), 4, 1)
        assert quadratic_form(W, kron(psi, psi.conj())) == 0
