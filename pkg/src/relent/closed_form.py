"""Closed-form relative entropy of entanglement for maximally correlated states.

For ``sigma = sum a[n, m] |phi_n psi_n><phi_m psi_m|`` the closest
separable state keeps only the diagonal of ``a``, and

    E_R(sigma) = -sum_n a[n, n] ln a[n, n] - S(sigma).

``S(sigma)`` equals the entropy of the spectrum of ``a`` because the
correlated product vectors are orthonormal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import IndexOutOfRange, InvalidCoefficients, InvalidParameters
from .states import CoefficientMatrix, validate_coefficients

PSD_SLACK = 1e-12


@dataclass(frozen=True)
class ErResult:
    """Both terms of the closed form are kept so a failure can be localized."""

    er: float
    diagonal_entropy: float
    sigma_entropy: float
    lam: float | None = None

    def to_dict(self) -> dict:
        out = {
            "er": self.er,
            "diagonal_entropy": self.diagonal_entropy,
            "sigma_entropy": self.sigma_entropy,
        }
        if self.lam is not None:
            out["lambda"] = self.lam
        return out


def _coefficients(A) -> CoefficientMatrix:
    if isinstance(A, CoefficientMatrix):
        return A
    try:
        return validate_coefficients(A)
    except InvalidCoefficients:
        raise
    except ValueError as exc:
        raise InvalidCoefficients(str(exc)) from exc


def er_closed_form(A) -> ErResult:
    """Relative entropy of entanglement of the state defined by ``A`` (nats)."""
    A = _coefficients(A)
    diag_s = linalg.entropy_of_spectrum(A.diagonal)
    spec_s = linalg.entropy_of_spectrum(linalg.eigh(A.a).eigenvalues)
    return ErResult(diag_s - spec_s, diag_s, spec_s)


def g_matrix(A) -> np.ndarray:
    """All kernel values ``g[n, m] = a[n, m] * (ln a_nn - ln a_mm) / (a_nn - a_mm)``.

    Indices run over the retained (nonzero-diagonal) terms of ``A``. The
    diagonal is set to exactly 1.
    """
    A = _coefficients(A)
    d = A.diagonal
    g = A.a * linalg.divided_difference_matrix(d)
    np.fill_diagonal(g, 1.0)
    return g


def g_kernel(A, n: int, m: int) -> complex:
    A = _coefficients(A)
    for i in (n, m):
        if not 0 <= i < A.n:
            raise IndexOutOfRange(f"index {i} outside 0..{A.n - 1}")
    if n == m:
        return 1.0 + 0.0j
    d = A.diagonal
    return complex(A.a[n, m] * linalg.log_divided_difference(d[n], d[m]))


def _binary_entropy(p: float, q: float) -> float:
    return 0.0 - sum(t * math.log(t) for t in sorted((p, q)) if t > 0)


def two_qubit_er(x: float, alpha: complex) -> ErResult:
    """Closed form for ``x|00><00| + (1-x)|11><11| + alpha|00><11| + h.c.``.

    ``lambda = (1 + sqrt((2x-1)^2 + 4|alpha|^2)) / 2`` is the larger
    eigenvalue of the coefficient matrix and the smaller one is taken as
    ``det / lambda`` to avoid cancellation.
    """
    x = float(x)
    alpha = complex(alpha)
    if not 0.0 <= x <= 1.0:
        raise InvalidParameters(f"x = {x} outside [0, 1]")
    y = 1.0 - x
    mod2 = abs(alpha) ** 2
    if mod2 > x * y + PSD_SLACK:
        raise InvalidParameters(
            f"|alpha|^2 = {mod2:.6g} exceeds x(1-x) = {x * y:.6g}; state is not positive"
        )
    if alpha == 0:
        lam, mu = max(x, y), min(x, y)
    else:
        lam = 0.5 * (1.0 + math.hypot(2.0 * x - 1.0, 2.0 * abs(alpha)))
        mu = max(x * y - mod2, 0.0) / lam
    diag_s = _binary_entropy(x, y)
    spec_s = _binary_entropy(lam, mu)
    return ErResult(diag_s - spec_s, diag_s, spec_s, lam)


def two_qubit_coefficients(x: float, alpha: complex) -> np.ndarray:
    alpha = complex(alpha)
    return np.array([[x, alpha], [alpha.conjugate(), 1.0 - x]], dtype=complex)
