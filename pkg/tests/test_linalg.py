import math

import numpy as np
import pytest
import scipy.integrate
import scipy.linalg
from hypothesis import given
from hypothesis import strategies as st

from relent import linalg
from relent.errors import (
    DimensionMismatch,
    InvalidState,
    NonHermitian,
    NonPositiveEigenvalue,
    SupportViolation,
)
from tests.conftest import random_density, random_hermitian

positive = st.floats(min_value=1e-9, max_value=1e3, allow_nan=False)


class TestEigh:
    def test_identity(self):
        w, _ = linalg.eigh(np.eye(3))
        np.testing.assert_array_equal(w, [1, 1, 1])

    def test_pauli_x(self):
        w, _ = linalg.eigh([[0, 1], [1, 0]])
        np.testing.assert_allclose(w, [-1, 1], atol=1e-15)

    def test_reconstruction(self, rng):
        m = random_hermitian(6, rng)
        w, v = linalg.eigh(m)
        assert np.all(np.diff(w) >= 0)
        assert np.abs(v @ np.diag(w) @ v.conj().T - m).max() <= 1e-10
        assert np.abs(v.conj().T @ v - np.eye(6)).max() <= 1e-10

    def test_rejects_non_hermitian(self):
        with pytest.raises(NonHermitian) as err:
            linalg.eigh([[0, 1], [0.5, 0]])
        assert err.value.deviation == pytest.approx(0.5)

    def test_symmetrizes_small_asymmetry(self):
        m = np.array([[1.0, 0.3 + 1e-12], [0.3, 2.0]])
        w, _ = linalg.eigh(m)
        np.testing.assert_allclose(w, np.linalg.eigvalsh([[1.0, 0.3], [0.3, 2.0]]), atol=1e-11)


class TestEntropy:
    def test_maximally_mixed_qubit(self):
        assert linalg.von_neumann_entropy(np.eye(2) / 2) == pytest.approx(math.log(2), abs=1e-15)

    def test_pure(self):
        assert linalg.von_neumann_entropy(np.diag([1.0, 0.0])) == 0.0

    def test_diag(self):
        # -0.75 ln 0.75 - 0.25 ln 0.25
        assert linalg.von_neumann_entropy(np.diag([0.75, 0.25])) == pytest.approx(0.5623351446188083, abs=1e-15)

    def test_bounds(self, rng):
        for dim in range(1, 8):
            s = linalg.von_neumann_entropy(random_density(dim, rng))
            assert 0.0 <= s <= math.log(dim) + 1e-12

    def test_invalid(self):
        with pytest.raises(InvalidState):
            linalg.von_neumann_entropy(np.diag([0.6, 0.6]))
        with pytest.raises(InvalidState):
            linalg.von_neumann_entropy(np.diag([1.2, -0.2]))


class TestRelativeEntropy:
    def test_identical(self, rng):
        s = random_density(4, rng)
        assert linalg.relative_entropy(s, s) == pytest.approx(0.0, abs=1e-13)

    def test_commuting(self):
        assert linalg.relative_entropy(np.diag([1.0, 0.0]), np.eye(2) / 2) == pytest.approx(math.log(2), abs=1e-15)

    def test_disjoint_supports(self):
        assert linalg.relative_entropy(np.diag([1.0, 0.0]), np.diag([0.0, 1.0])) == math.inf

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            linalg.relative_entropy(np.eye(2) / 2, np.eye(3) / 3)

    def test_klein(self, rng):
        for _ in range(50):
            dim = rng.integers(2, 6)
            s, r = random_density(dim, rng), random_density(dim, rng)
            assert linalg.relative_entropy(s, r) > 0
            assert np.abs(s - r).max() > 1e-8

    def test_matches_logm(self, rng):
        s, r = random_density(4, rng), random_density(4, rng)
        ref = np.trace(s @ (scipy.linalg.logm(s) - scipy.linalg.logm(r))).real
        assert linalg.relative_entropy(s, r) == pytest.approx(ref, abs=1e-10)

    def test_batch_agrees(self, rng):
        s = random_density(3, rng)
        rhos = np.array([random_density(3, rng) for _ in range(5)])
        batch = linalg.relative_entropy_batch(linalg.check_density(s), rhos)
        single = [linalg.relative_entropy(s, r) for r in rhos]
        np.testing.assert_allclose(batch, single, rtol=0, atol=1e-14)


class TestDividedDifference:
    @pytest.mark.parametrize("c", [1e-6, 0.3, 1.0, 7.5])
    def test_equal_arguments(self, c):
        assert linalg.log_divided_difference(c, c) == pytest.approx(1 / c, rel=1e-15)

    def test_one_e(self):
        assert linalg.log_divided_difference(1.0, math.e) == pytest.approx(0.5819767068693265, rel=1e-14)

    def test_near_coincident_is_smooth(self):
        # direct log subtraction would lose ~8 digits here
        a = 0.37
        for eps in (1e-3, 1e-5, 1e-7, 1e-9, 1e-12):
            b = a * (1 + eps)
            exact = scipy.integrate.quad(lambda t: 1 / ((a + t) * (b + t)), 0, np.inf, epsabs=0, epsrel=1e-13)[0]
            assert linalg.log_divided_difference(a, b) == pytest.approx(exact, rel=1e-12)

    def test_rejects_nonpositive(self):
        with pytest.raises(NonPositiveEigenvalue):
            linalg.log_divided_difference(0.0, 1.0)

    @given(positive, positive)
    def test_symmetric(self, a, b):
        assert linalg.log_divided_difference(a, b) == linalg.log_divided_difference(b, a)

    @given(positive, positive)
    def test_geometric_mean_bound(self, a, b):
        v = math.sqrt(a * b) * linalg.log_divided_difference(a, b)
        assert 0.0 <= v <= 1.0 + 1e-12


def _quadrature_oracle(base, weight, direction):
    dim = base.shape[0]

    def integrand(t):
        inv = np.linalg.inv(base + t * np.eye(dim))
        return np.trace(inv @ weight @ inv @ direction).real

    return scipy.integrate.quad(integrand, 0, np.inf, epsabs=1e-13, epsrel=1e-12, limit=500)[0]


class TestFrechet:
    def test_direction_equals_base(self, rng):
        b, w = random_density(4, rng), random_density(4, rng)
        assert linalg.frechet_log_trace(b, w, b) == pytest.approx(1.0, abs=1e-12)

    def test_maximally_mixed_base(self, rng):
        d = 3
        w, dd = random_hermitian(d, rng), random_hermitian(d, rng)
        expected = np.trace(w @ dd).real * d
        assert linalg.frechet_log_trace(np.eye(d) / d, w, dd) == pytest.approx(expected, rel=1e-12)

    @pytest.mark.parametrize("seed", range(5))
    def test_quadrature(self, seed):
        rng = np.random.default_rng(seed)
        b, w, d = random_density(4, rng), random_density(4, rng), random_density(4, rng)
        assert linalg.frechet_log_trace(b, w, d) == pytest.approx(_quadrature_oracle(b, w, d), abs=1e-8)

    @pytest.mark.parametrize("seed", range(5))
    def test_finite_difference(self, seed):
        rng = np.random.default_rng(100 + seed)
        b, w, d = random_density(3, rng), random_density(3, rng), random_density(3, rng)
        h = 1e-6

        def f(x):
            return np.trace(w @ scipy.linalg.logm(b + x * (d - b))).real

        fd = (f(h) - f(-h)) / (2 * h)
        # d/dx tr[w ln(b + x(d - b))] = frechet(b, w, d) - tr(w)
        assert linalg.frechet_log_trace(b, w, d) - np.trace(w).real == pytest.approx(fd, abs=1e-4)

    def test_rank_deficient_base(self, rng):
        base = random_density(4, rng, rank=2)
        lam, v = np.linalg.eigh(base)
        vs = v[:, lam > 1e-12]
        c = random_density(2, rng)
        weight = vs @ c @ vs.conj().T
        d = random_density(4, rng)
        # quadrature restricted to the support sees the same integrand
        pb = vs.conj().T @ base @ vs
        expected = _quadrature_oracle(pb, c, vs.conj().T @ d @ vs)
        assert linalg.frechet_log_trace(base, weight, d) == pytest.approx(expected, abs=1e-8)

    def test_support_violation(self, rng):
        base = np.diag([1.0, 0.0])
        with pytest.raises(SupportViolation):
            linalg.frechet_log_trace(base, np.eye(2) / 2, np.eye(2) / 2)


def test_partial_transpose_matches_index_loop(rng):
    da, db = 2, 3
    m = random_density(da * db, rng)
    ref = np.empty_like(m)
    for i in range(da):
        for j in range(db):
            for k in range(da):
                for l in range(db):
                    ref[i * db + j, k * db + l] = m[i * db + l, k * db + j]
    np.testing.assert_array_equal(linalg.partial_transpose(m, da, db), ref)


def test_bell_state_not_ppt():
    v = np.array([1, 0, 0, 1]) / np.sqrt(2)
    assert not linalg.is_ppt(np.outer(v, v), 2, 2)
