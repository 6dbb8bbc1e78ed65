"""Optimality certificate for the closest separable state.

Let ``f(x) = S(sigma || (1-x) rho_star + x rho)``. The one-sided derivative
at ``x = 0`` is

    f'(0) = 1 - int_0^inf tr[(rho_star + t)^-1 sigma (rho_star + t)^-1 rho] dt

and ``rho_star`` is optimal when ``f'(0) >= 0`` for every separable
``rho``. Because ``f'(0)`` is linear in ``rho`` it suffices to check
product pure states. The derivative is evaluated two ways that share no
code: the kernel form works on the coefficient matrix and the local
amplitudes, the spectral form diagonalizes ``rho_star`` numerically and
contracts with ``sigma`` in that eigenbasis.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from . import linalg
from .closed_form import g_matrix
from .errors import DimensionMismatch, InvalidParameters, SupportViolation
from .states import (
    CoefficientMatrix,
    ProductPureState,
    SeparableEnsemble,
    build_sigma,
    closest_separable,
    correlated_bases,
    random_product_state,
    validate_coefficients,
)

VIOLATION_TOL = 1e-9
AGREEMENT_TOL = 1e-8
IMAG_TOL = 1e-12


@dataclass
class CertificateReport:
    samples: int
    min_derivative: float
    mean_derivative: float
    violations: int
    method_agreement: float
    tolerance: float
    max_bound_excess: float
    fd_discrepancy: float | None = None

    @property
    def ok(self) -> bool:
        return self.violations == 0 and self.method_agreement <= AGREEMENT_TOL

    def to_dict(self) -> dict:
        return asdict(self)


def _kernel_derivatives(g, phi, psi, alphas, betas) -> np.ndarray:
    # amplitudes u_n = <phi_n|alpha>, v_n = <psi_n|beta>
    c = (alphas @ phi.conj()) * (betas @ psi.conj())
    q = np.einsum("si,ij,sj->s", c.conj(), g, c)
    resid = np.abs(q.imag).max(initial=0.0)
    if resid > IMAG_TOL:
        raise ArithmeticError(f"kernel quadratic form has imaginary part {resid:.3e}")
    return 1.0 - q.real


class _SpectralForm:
    """Derivative along product directions from the eigenbasis of ``rho_star``."""

    def __init__(self, sigma: np.ndarray, rho_star: np.ndarray):
        lam, vecs = np.linalg.eigh(rho_star)
        keep = lam > linalg.EIG_FLOOR
        s_rot = vecs.conj().T @ sigma @ vecs
        leak = np.abs(s_rot[~keep]).max(initial=0.0)
        if leak > linalg.SUPPORT_TOL:
            raise SupportViolation(f"sigma has weight {leak:.3e} outside the support of rho_star")
        self.basis = vecs[:, keep]
        self.kernel = s_rot[np.ix_(keep, keep)] * linalg.divided_difference_matrix(lam[keep])

    def __call__(self, vectors: np.ndarray) -> np.ndarray:
        w = vectors @ self.basis.conj()
        return 1.0 - np.einsum("si,ij,sj->s", w.conj(), self.kernel, w).real


def derivative_kernel_form(A, p: ProductPureState, basis_a=None, basis_b=None) -> float:
    """``1 - sum_{nm} g(n, m) conj(u_n v_n) u_m v_m`` for the product state ``p``.

    Components of ``p`` outside the correlated subspaces drop out of the
    sum, so a state orthogonal to every ``phi_n`` (or ``psi_n``) has
    derivative 1.
    """
    A = A if isinstance(A, CoefficientMatrix) else validate_coefficients(A)
    phi, psi = correlated_bases(A, p.d_a, p.d_b, basis_a, basis_b)
    return float(_kernel_derivatives(g_matrix(A), phi, psi, p.alpha[None], p.beta[None])[0])


def derivative_spectral_form(sigma, rho_star, rho) -> float:
    """``1 - frechet_log_trace(rho_star, sigma, rho)``."""
    return 1.0 - linalg.frechet_log_trace(rho_star, sigma, rho)


def derivative_ensemble(A, e: SeparableEnsemble, basis_a=None, basis_b=None) -> float:
    A = A if isinstance(A, CoefficientMatrix) else validate_coefficients(A)
    phi, psi = correlated_bases(A, e.d_a, e.d_b, basis_a, basis_b)
    d = _kernel_derivatives(g_matrix(A), phi, psi, e.alphas, e.betas)
    return float(e.weights @ d)


def certify(
    A,
    samples: int = 10_000,
    seed: int = 0,
    tolerance: float = VIOLATION_TOL,
    *,
    d_a: int | None = None,
    d_b: int | None = None,
    basis_a=None,
    basis_b=None,
    include_support: bool = False,
    fd_step: float | None = None,
    chunk: int = 2000,
) -> CertificateReport:
    """Sample product directions and check the derivative is non-negative.

    Sample ``i`` is drawn from the generator seeded with ``(seed, i)`` so the
    report does not depend on chunking or evaluation order. With
    ``include_support`` the product vectors ``phi_n (x) psi_n`` are added;
    these are the directions along which the derivative is zero. With
    ``fd_step`` set, each derivative is also compared against the forward
    difference ``(f(h) - f(0)) / h`` and the worst discrepancy is reported.
    """
    if samples < 1:
        raise InvalidParameters("samples must be at least 1")
    A = A if isinstance(A, CoefficientMatrix) else validate_coefficients(A)
    d_a = A.size if d_a is None else d_a
    d_b = A.size if d_b is None else d_b
    phi, psi = correlated_bases(A, d_a, d_b, basis_a, basis_b)
    g = g_matrix(A)
    sigma = build_sigma(A, d_a, d_b, basis_a, basis_b).matrix
    rho_star = closest_separable(A, d_a, d_b, basis_a, basis_b).matrix
    spectral = _SpectralForm(sigma, rho_star)
    f0 = linalg.relative_entropy_batch(sigma, rho_star[None])[0] if fd_step else None

    total = samples + (A.n if include_support else 0)
    kernel_vals = np.empty(total)
    spectral_vals = np.empty(total)
    fd_err = 0.0
    for start in range(0, total, chunk):
        idx = range(start, min(start + chunk, total))
        alphas = np.empty((len(idx), d_a), dtype=complex)
        betas = np.empty((len(idx), d_b), dtype=complex)
        for row, i in enumerate(idx):
            if i < samples:
                p = random_product_state(d_a, d_b, (seed, i))
                alphas[row], betas[row] = p.alpha, p.beta
            else:
                alphas[row], betas[row] = phi[:, i - samples], psi[:, i - samples]
        vecs = np.einsum("si,sj->sij", alphas, betas).reshape(len(idx), -1)
        k = _kernel_derivatives(g, phi, psi, alphas, betas)
        s = spectral(vecs)
        kernel_vals[start : start + len(idx)] = k
        spectral_vals[start : start + len(idx)] = s
        if fd_step:
            mixes = (1.0 - fd_step) * rho_star + fd_step * np.einsum("si,sj->sij", vecs, vecs.conj())
            fd = (linalg.relative_entropy_batch(sigma, mixes) - f0) / fd_step
            fd_err = max(fd_err, float(np.abs(fd - k).max()), float(np.abs(fd - s).max()))

    worst = np.minimum(kernel_vals, spectral_vals)
    return CertificateReport(
        samples=total,
        min_derivative=float(worst.min()),
        mean_derivative=float(kernel_vals.mean()),
        violations=int(np.count_nonzero(worst < -tolerance)),
        method_agreement=float(np.abs(kernel_vals - spectral_vals).max()),
        tolerance=tolerance,
        max_bound_excess=float(np.abs(kernel_vals - 1.0).max() - 1.0),
        fd_discrepancy=fd_err if fd_step else None,
    )


def convexity_probe(sigma, rho_star, rho, grid) -> np.ndarray:
    """Evaluate ``f(x) = S(sigma || (1-x) rho_star + x rho)`` on ``grid``.

    Returns an array of ``(x, f(x))`` rows.

    Raises
    ------
    SupportViolation
        If some mixture does not contain the support of ``sigma``.
    """
    s = linalg.check_density(sigma)
    r0 = linalg.check_density(rho_star)
    r1 = linalg.check_density(rho)
    if not (s.shape == r0.shape == r1.shape):
        raise DimensionMismatch("sigma, rho_star and rho must share a dimension")
    xs = np.asarray(grid, dtype=float).ravel()
    if np.any((xs < 0) | (xs > 1)):
        raise InvalidParameters("grid points must lie in [0, 1]")
    mixes = (1.0 - xs)[:, None, None] * r0 + xs[:, None, None] * r1
    f = linalg.relative_entropy_batch(s, mixes)
    if not np.all(np.isfinite(f)):
        bad = xs[~np.isfinite(f)]
        raise SupportViolation(f"mixture loses the support of sigma at x = {bad.tolist()}")
    return np.column_stack([xs, f])

