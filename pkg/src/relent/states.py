"""Bipartite states: maximally correlated states, product states and ensembles.

Composite indices follow ``i_A * d_B + i_B`` (``np.kron`` order).

A maximally correlated state is

    sigma = sum_{n m} a[n, m] |phi_n psi_n><phi_m psi_m|

with orthonormal sets ``{phi_n}`` on A and ``{psi_n}`` on B. The
coefficient matrix ``a`` is Hermitian, positive semidefinite and has unit
trace.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import (
    DimensionMismatch,
    DimensionTooSmall,
    InvalidCoefficients,
    InvalidEnsemble,
    InvalidState,
    NonHermitian,
    NonOrthonormalBasis,
    NotHermitian,
    NotPSD,
    TraceNotOne,
)

NORM_TOL = 1e-12
BASIS_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A validated density matrix on a ``d_a * d_b`` dimensional space."""

    matrix: np.ndarray
    d_a: int
    d_b: int

    def __post_init__(self):
        if self.d_a < 1 or self.d_b < 1:
            raise InvalidState("local dimensions must be positive")
        m = linalg.check_density(self.matrix, self.d_a * self.d_b)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.d_a * self.d_b


@dataclass(frozen=True, eq=False)
class CoefficientMatrix:
    """Validated coefficient matrix of a maximally correlated state.

    ``a`` holds only the retained terms; ``support`` lists their positions
    in the original ``size``-term matrix (terms with zero diagonal weight
    are pruned).
    """

    a: np.ndarray
    support: tuple[int, ...]
    size: int

    @property
    def n(self) -> int:
        return self.a.shape[0]

    @property
    def diagonal(self) -> np.ndarray:
        return self.a.diagonal().real.copy()


@dataclass(frozen=True, eq=False)
class ProductPureState:
    alpha: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        for name in ("alpha", "beta"):
            v = np.asarray(getattr(self, name), dtype=complex).ravel()
            norm = np.linalg.norm(v)
            if abs(norm - 1.0) > NORM_TOL:
                raise InvalidState(f"{name} has norm {norm:.15g}, expected 1")
            v.setflags(write=False)
            object.__setattr__(self, name, v)

    @property
    def d_a(self) -> int:
        return self.alpha.size

    @property
    def d_b(self) -> int:
        return self.beta.size

    @property
    def vector(self) -> np.ndarray:
        return np.kron(self.alpha, self.beta)

    def density(self) -> DensityMatrix:
        v = self.vector
        return DensityMatrix(np.outer(v, v.conj()), self.d_a, self.d_b)


@dataclass(frozen=True, eq=False)
class SeparableEnsemble:
    """Convex mixture ``sum_i r_i |alpha_i beta_i><alpha_i beta_i|``.

    Stored column-wise: ``alphas`` is ``(K, d_a)`` and ``betas`` is
    ``(K, d_b)``, one row per product state.
    """

    weights: np.ndarray
    alphas: np.ndarray
    betas: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).ravel()
        al = np.atleast_2d(np.asarray(self.alphas, dtype=complex))
        be = np.atleast_2d(np.asarray(self.betas, dtype=complex))
        if not (w.size == al.shape[0] == be.shape[0]) or w.size == 0:
            raise InvalidEnsemble("weights and states must have the same nonzero length")
        if np.any(w < 0):
            raise InvalidEnsemble(f"negative weight {w.min():.3e}")
        if abs(w.sum() - 1.0) > NORM_TOL:
            raise InvalidEnsemble(f"weights sum to {w.sum():.15g}, expected 1")
        for name, v in (("alpha", al), ("beta", be)):
            dev = np.abs(np.linalg.norm(v, axis=1) - 1.0).max()
            if dev > NORM_TOL:
                raise InvalidEnsemble(f"{name} vectors deviate from unit norm by {dev:.3e}")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "alphas", al)
        object.__setattr__(self, "betas", be)

    @classmethod
    def from_states(cls, weights, states) -> SeparableEnsemble:
        states = list(states)
        shapes = {(s.d_a, s.d_b) for s in states}
        if len(shapes) != 1:
            raise InvalidEnsemble(f"states have mixed local dimensions {sorted(shapes)}")
        return cls(weights, np.array([s.alpha for s in states]), np.array([s.beta for s in states]))

    @property
    def d_a(self) -> int:
        return self.alphas.shape[1]

    @property
    def d_b(self) -> int:
        return self.betas.shape[1]

    @property
    def states(self) -> list[ProductPureState]:
        return [ProductPureState(a, b) for a, b in zip(self.alphas, self.betas)]


def coefficient_checks(raw) -> dict:
    """Run the coefficient-matrix tests without raising.

    The PSD test (smallest eigenvalue) and the pairwise 2x2 minor test
    ``|a_nm|^2 <= a_nn a_mm`` are reported separately.
    """
    m = linalg.as_matrix(raw)
    herm = 0.5 * (m + m.conj().T)
    diag = herm.diagonal().real
    excess = np.abs(herm) ** 2 - np.outer(diag, diag)
    return {
        "hermitian_deviation": linalg.hermitian_deviation(m),
        "trace": float(np.trace(herm).real),
        "min_eigenvalue": float(np.linalg.eigvalsh(herm)[0]),
        "max_pairwise_excess": float(excess.max()),
    }


def validate_coefficients(raw) -> CoefficientMatrix:
    """Check and normalize a raw coefficient matrix.

    The matrix is symmetrized, checked for unit trace and positivity, and
    indices whose diagonal entry is below ``EIG_FLOOR`` are pruned.

    Raises
    ------
    NotHermitian, TraceNotOne, NotPSD
        Each message states the violated property and its magnitude.
    """
    try:
        m = linalg.as_matrix(raw)
    except DimensionMismatch as exc:
        raise InvalidCoefficients(str(exc)) from exc
    if m.shape[0] == 0:
        raise InvalidCoefficients("coefficient matrix is empty")
    try:
        h = linalg.hermitian_part(m)
    except NonHermitian as exc:
        raise NotHermitian(str(exc)) from exc
    checks = coefficient_checks(h)
    if abs(checks["trace"] - 1.0) > linalg.TRACE_TOL:
        raise TraceNotOne(
            f"trace is {checks['trace']:.15g}, deviation {abs(checks['trace'] - 1):.3e}"
        )
    diag = h.diagonal().real
    if checks["min_eigenvalue"] < -linalg.PSD_TOL or checks["max_pairwise_excess"] > linalg.PSD_TOL or diag.min() < -linalg.PSD_TOL:
        raise NotPSD(
            f"not positive semidefinite: min eigenvalue {checks['min_eigenvalue']:.3e}, "
            f"max |a_nm|^2 - a_nn a_mm = {checks['max_pairwise_excess']:.3e}"
        )
    keep = np.flatnonzero(diag >= linalg.EIG_FLOOR)
    a = h[np.ix_(keep, keep)]
    a.setflags(write=False)
    return CoefficientMatrix(a, tuple(int(i) for i in keep), m.shape[0])


def _as_coefficients(A) -> CoefficientMatrix:
    return A if isinstance(A, CoefficientMatrix) else validate_coefficients(A)


def _check_basis(basis, dim: int, count: int, side: str) -> np.ndarray:
    if basis is None:
        if count > dim:
            raise DimensionTooSmall(f"{count} terms do not fit in local dimension {dim} on {side}")
        return np.eye(dim, count, dtype=complex)
    b = np.asarray(basis, dtype=complex)
    if b.ndim != 2 or b.shape[0] != dim:
        raise DimensionMismatch(f"basis on {side} must have {dim} rows, got shape {b.shape}")
    if b.shape[1] < count:
        raise DimensionTooSmall(f"basis on {side} has {b.shape[1]} vectors, need {count}")
    b = b[:, :count]
    err = np.abs(b.conj().T @ b - np.eye(count)).max()
    if err > BASIS_TOL:
        raise NonOrthonormalBasis(f"basis on {side} deviates from orthonormal by {err:.3e}")
    return b


def correlated_bases(A, d_a: int, d_b: int, basis_a=None, basis_b=None):
    """Local vectors ``phi_n`` and ``psi_n`` for the retained terms of ``A``.

    ``basis_a``/``basis_b`` are matrices whose columns are the orthonormal
    vectors for all ``A.size`` terms; the default is the computational
    basis. Returns ``(phi, psi)`` with one column per retained term.
    """
    A = _as_coefficients(A)
    phi = _check_basis(basis_a, d_a, A.size, "A")
    psi = _check_basis(basis_b, d_b, A.size, "B")
    idx = list(A.support)
    return phi[:, idx], psi[:, idx]


def correlated_product_vectors(A, d_a: int, d_b: int, basis_a=None, basis_b=None) -> np.ndarray:
    """Columns ``|phi_n> (x) |psi_n>``, shape ``(d_a * d_b, n)``."""
    phi, psi = correlated_bases(A, d_a, d_b, basis_a, basis_b)
    return np.einsum("in,jn->ijn", phi, psi).reshape(d_a * d_b, -1)


def build_sigma(A, d_a: int | None = None, d_b: int | None = None, basis_a=None, basis_b=None) -> DensityMatrix:
    """Maximally correlated state ``sum a[n, m] |phi_n psi_n><phi_m psi_m|``.

    Local dimensions default to the number of terms in ``A``.
    """
    A = _as_coefficients(A)
    d_a = A.size if d_a is None else d_a
    d_b = A.size if d_b is None else d_b
    x = correlated_product_vectors(A, d_a, d_b, basis_a, basis_b)
    return DensityMatrix(x @ A.a @ x.conj().T, d_a, d_b)


def closest_separable(A, d_a: int | None = None, d_b: int | None = None, basis_a=None, basis_b=None) -> DensityMatrix:
    """The separable state ``sum a[n, n] |phi_n psi_n><phi_n psi_n|``."""
    A = _as_coefficients(A)
    d_a = A.size if d_a is None else d_a
    d_b = A.size if d_b is None else d_b
    x = correlated_product_vectors(A, d_a, d_b, basis_a, basis_b)
    return DensityMatrix((x * A.diagonal) @ x.conj().T, d_a, d_b)


def closest_separable_ensemble(A, d_a: int | None = None, d_b: int | None = None, basis_a=None, basis_b=None) -> SeparableEnsemble:
    A = _as_coefficients(A)
    d_a = A.size if d_a is None else d_a
    d_b = A.size if d_b is None else d_b
    phi, psi = correlated_bases(A, d_a, d_b, basis_a, basis_b)
    w = A.diagonal
    return SeparableEnsemble(w / w.sum(), phi.T, psi.T)


def ensemble_to_density(e: SeparableEnsemble) -> DensityMatrix:
    vecs = np.einsum("ki,kj->kij", e.alphas, e.betas).reshape(len(e.weights), -1)
    m = np.einsum("k,ki,kj->ij", e.weights, vecs, vecs.conj())
    return DensityMatrix(m, e.d_a, e.d_b)


def random_coefficient_matrix(n: int, seed: int) -> CoefficientMatrix:
    """``G G^H / tr(G G^H)`` for a complex Gaussian ``n x n`` matrix ``G``."""
    if n < 1:
        raise InvalidCoefficients("n must be at least 1")
    rng = np.random.default_rng(seed)
    g = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    gg = g @ g.conj().T
    tr = np.trace(gg).real
    # real and imaginary parts divided separately: complex division is not exact for n = 1
    return validate_coefficients(gg.real / tr + 1j * (gg.imag / tr))


def _fix_phase(v: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(np.abs(v) > 0)
    if nz.size:
        z = v[nz[0]]
        v = v * (abs(z) / z)
        v[nz[0]] = abs(z)
    return v


def _random_unit_vector(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return _fix_phase(v / np.linalg.norm(v))


def random_product_state(d_a: int, d_b: int, seed) -> ProductPureState:
    """Haar-random local vectors; the first nonzero amplitude of each is real positive."""
    rng = np.random.default_rng(seed)
    return ProductPureState(_random_unit_vector(rng, d_a), _random_unit_vector(rng, d_b))


def random_ensemble(d_a: int, d_b: int, k: int, seed) -> SeparableEnsemble:
    rng = np.random.default_rng(seed)
    w = rng.random(k) + 1e-3
    al = np.array([_random_unit_vector(rng, d_a) for _ in range(k)])
    be = np.array([_random_unit_vector(rng, d_b) for _ in range(k)])
    return SeparableEnsemble(w / w.sum(), al, be)


def random_unitary(dim: int, seed) -> np.ndarray:
    """Haar unitary via QR of a complex Gaussian matrix."""
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = r.diagonal()
    return q * (d / np.abs(d))
