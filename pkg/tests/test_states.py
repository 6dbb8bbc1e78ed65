import numpy as np
import pytest

from relent import linalg, states
from relent.errors import (
    DimensionTooSmall,
    InvalidEnsemble,
    InvalidState,
    NonOrthonormalBasis,
    NotHermitian,
    NotPSD,
    TraceNotOne,
)
from tests.conftest import BELL


def test_single_term_is_product_projector():
    s = states.build_sigma([[1.0]], 2, 2)
    expected = np.zeros((4, 4))
    expected[0, 0] = 1
    np.testing.assert_array_equal(s.matrix, expected)


def test_bell_projector():
    s = states.build_sigma(BELL, 2, 2)
    v = np.array([1, 0, 0, 1]) / np.sqrt(2)
    np.testing.assert_allclose(s.matrix, np.outer(v, v), atol=1e-15)


def test_two_qubit_family():
    x, alpha = 0.3, 0.2 - 0.1j
    s = states.build_sigma([[x, alpha], [np.conj(alpha), 1 - x]])
    expected = np.zeros((4, 4), dtype=complex)
    expected[0, 0], expected[3, 3] = x, 1 - x
    expected[0, 3], expected[3, 0] = alpha, np.conj(alpha)
    np.testing.assert_allclose(s.matrix, expected, atol=1e-15)


def test_sigma_block_equals_coefficients(rng):
    A = states.random_coefficient_matrix(3, 5)
    ua = states.random_unitary(4, 1)
    ub = states.random_unitary(5, 2)
    s = states.build_sigma(A, 4, 5, ua[:, :3], ub[:, :3])
    x = states.correlated_product_vectors(A, 4, 5, ua[:, :3], ub[:, :3])
    assert np.abs(x.conj().T @ s.matrix @ x - A.a).max() <= 1e-12


def test_spectrum_matches_coefficients():
    for seed in range(20):
        n = 2 + seed % 4
        A = states.random_coefficient_matrix(n, seed)
        s = states.build_sigma(A)
        w = np.linalg.eigvalsh(s.matrix)
        expected = np.concatenate([np.zeros(n * n - n), np.linalg.eigvalsh(A.a)])
        np.testing.assert_allclose(np.sort(w), np.sort(expected), atol=1e-12)
        assert linalg.von_neumann_entropy(s) == pytest.approx(linalg.entropy_of_spectrum(np.linalg.eigvalsh(A.a)), abs=1e-12)


def test_dimension_too_small():
    with pytest.raises(DimensionTooSmall):
        states.build_sigma(states.random_coefficient_matrix(3, 0), 2, 3)


def test_non_orthonormal_basis():
    basis = np.array([[1.0, 1.0], [0.0, 1.0]])
    with pytest.raises(NonOrthonormalBasis):
        states.build_sigma(BELL, 2, 2, basis_a=basis)


class TestClosestSeparable:
    def test_bell(self):
        r = states.closest_separable(BELL, 2, 2)
        np.testing.assert_allclose(r.matrix, np.diag([0.5, 0, 0, 0.5]), atol=1e-15)

    def test_diagonal_coefficients_are_fixed_point(self):
        A = np.diag([0.2, 0.5, 0.3])
        np.testing.assert_array_equal(states.closest_separable(A).matrix, states.build_sigma(A).matrix)

    def test_two_qubit_family(self):
        r = states.closest_separable([[0.3, 0.2j], [-0.2j, 0.7]])
        np.testing.assert_allclose(r.matrix, np.diag([0.3, 0, 0, 0.7]), atol=1e-15)

    def test_equals_its_ensemble(self):
        for seed in range(10):
            A = states.random_coefficient_matrix(3, seed)
            e = states.closest_separable_ensemble(A, 3, 4)
            np.testing.assert_allclose(
                states.ensemble_to_density(e).matrix, states.closest_separable(A, 3, 4).matrix, atol=1e-14
            )


class TestEnsemble:
    def test_single_state_projector(self):
        p = states.random_product_state(2, 3, 4)
        e = states.SeparableEnsemble([1.0], [p.alpha], [p.beta])
        m = states.ensemble_to_density(e).matrix
        np.testing.assert_allclose(m @ m, m, atol=1e-14)
        np.testing.assert_allclose(m, np.outer(p.vector, p.vector.conj()), atol=1e-15)

    def test_bell_rho_star(self):
        e = states.SeparableEnsemble([0.5, 0.5], [[1, 0], [0, 1]], [[1, 0], [0, 1]])
        np.testing.assert_allclose(states.ensemble_to_density(e).matrix, np.diag([0.5, 0, 0, 0.5]))

    def test_random_is_ppt(self):
        for seed in range(10):
            e = states.random_ensemble(2, 2, 4, seed)
            m = states.ensemble_to_density(e).matrix
            pt = m.reshape(2, 2, 2, 2).swapaxes(1, 3).reshape(4, 4)
            assert np.linalg.eigvalsh(pt).min() >= -1e-10
            assert linalg.is_ppt(m, 2, 2)

    def test_from_states(self):
        ps = [states.random_product_state(2, 2, s) for s in range(3)]
        e = states.SeparableEnsemble.from_states([0.2, 0.3, 0.5], ps)
        assert len(e.states) == 3

    @pytest.mark.parametrize(
        "weights",
        [[0.5, 0.6], [1.2, -0.2], [1.0]],
    )
    def test_invalid(self, weights):
        with pytest.raises(InvalidEnsemble):
            states.SeparableEnsemble(weights, [[1, 0], [0, 1]], [[1, 0], [0, 1]])

    def test_mixed_dimensions(self):
        with pytest.raises(InvalidEnsemble):
            states.SeparableEnsemble.from_states(
                [0.5, 0.5], [states.random_product_state(2, 2, 0), states.random_product_state(3, 2, 0)]
            )


class TestValidation:
    def test_bell_accepted(self):
        A = states.validate_coefficients(BELL)
        assert A.n == 2 and A.support == (0, 1)

    def test_not_psd(self):
        raw = [[0.5, 0.6], [0.6, 0.5]]
        checks = states.coefficient_checks(raw)
        assert checks["min_eigenvalue"] == pytest.approx(-0.1)
        assert checks["max_pairwise_excess"] == pytest.approx(0.36 - 0.25)
        with pytest.raises(NotPSD, match="min eigenvalue"):
            states.validate_coefficients(raw)

    def test_trace(self):
        with pytest.raises(TraceNotOne):
            states.validate_coefficients([[0.5, 0], [0, 0.5000002]])

    def test_not_hermitian(self):
        with pytest.raises(NotHermitian):
            states.validate_coefficients([[0.5, 0.1], [0.2, 0.5]])

    def test_pairwise_minors_of_random(self):
        for seed in range(50):
            A = states.random_coefficient_matrix(4, seed)
            d = A.diagonal
            assert np.all(np.abs(A.a) ** 2 <= np.outer(d, d) + 1e-10)

    def test_pruning(self):
        raw = np.array([[0.4, 0, 0.2], [0, 0, 0], [0.2, 0, 0.6]])
        A = states.validate_coefficients(raw)
        assert A.support == (0, 2) and A.size == 3
        reduced = states.validate_coefficients(raw[np.ix_([0, 2], [0, 2])])
        assert reduced.n == 2
        # as operators: pruned A on a 3-term basis equals the explicit sum with index 1 dropped
        full = np.zeros((9, 9), dtype=complex)
        for i, n in enumerate((0, 2)):
            for j, m in enumerate((0, 2)):
                full[4 * n, 4 * m] = raw[n, m]
        np.testing.assert_array_equal(states.build_sigma(A).matrix, full)


class TestRandom:
    def test_one_term(self):
        np.testing.assert_array_equal(states.random_coefficient_matrix(1, 9).a, [[1.0]])

    def test_validates(self):
        A = states.random_coefficient_matrix(3, 42)
        states.validate_coefficients(A.a)

    def test_deterministic(self):
        a = states.random_coefficient_matrix(4, 7).a
        b = states.random_coefficient_matrix(4, 7).a
        assert a.tobytes() == b.tobytes()

    def test_trivial_product_state(self):
        p = states.random_product_state(1, 1, 3)
        np.testing.assert_array_equal(p.alpha, [1.0])
        np.testing.assert_array_equal(p.beta, [1.0])

    def test_unit_norms(self):
        p = states.random_product_state(2, 2, 7)
        assert abs(np.linalg.norm(p.alpha) - 1) <= 1e-12
        assert abs(np.linalg.norm(p.beta) - 1) <= 1e-12

    def test_product_state_average_is_maximally_mixed(self):
        d_a, d_b, count = 2, 2, 100_000
        acc = np.zeros((4, 4), dtype=complex)
        for i in range(count):
            v = states.random_product_state(d_a, d_b, (1, i)).vector
            acc += np.outer(v, v.conj())
        assert np.abs(acc / count - np.eye(4) / 4).max() <= 5e-3

    def test_unit_vector_norm_enforced(self):
        with pytest.raises(InvalidState):
            states.ProductPureState([1.0, 1.0], [1.0])

    def test_random_unitary(self):
        u = states.random_unitary(5, 3)
        np.testing.assert_allclose(u.conj().T @ u, np.eye(5), atol=1e-13)
