"""Dense Hermitian linear algebra used throughout the package.

All logarithms are natural, so entropies come out in nats. Eigenvalues
below ``EIG_FLOOR`` are treated as exact zeros.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import (
    DimensionMismatch,
    InvalidState,
    NonHermitian,
    NonPositiveEigenvalue,
    SupportViolation,
)

HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-10
TRACE_TOL = 1e-10
EIG_FLOOR = 1e-14
SUPPORT_TOL = 1e-10
# below this |r| the divided difference switches to its Taylor series
_SERIES_CUTOFF = 1e-4


class HermitianEigensystem(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_matrix(m) -> np.ndarray:
    """Return ``m`` (or ``m.matrix`` for state objects) as a complex square array."""
    arr = np.asarray(getattr(m, "matrix", m), dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {arr.shape}")
    return arr


def hermitian_deviation(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def hermitian_part(m, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Symmetrize ``m`` to ``(m + m^H)/2`` after checking it is Hermitian within ``tol``."""
    m = as_matrix(m)
    dev = hermitian_deviation(m)
    if dev > tol:
        raise NonHermitian(dev, tol)
    return 0.5 * (m + m.conj().T)


def eigh(m) -> HermitianEigensystem:
    """Eigendecomposition of a Hermitian matrix.

    Eigenvalues are returned in ascending order with the matching unit
    eigenvectors as columns.

    Raises
    ------
    NonHermitian
        If ``max|M - M^H|`` exceeds ``HERMITIAN_TOL``.
    """
    h = hermitian_part(m)
    w, v = np.linalg.eigh(h)
    return HermitianEigensystem(w, v)


def check_density(m, dim: int | None = None) -> np.ndarray:
    """Validate a density matrix and return its symmetrized form.

    Raises :class:`InvalidState` for any failure (shape, Hermiticity,
    positivity or trace).
    """
    try:
        h = hermitian_part(m)
    except (NonHermitian, DimensionMismatch) as exc:
        raise InvalidState(str(exc)) from exc
    if dim is not None and h.shape[0] != dim:
        raise InvalidState(f"expected dimension {dim}, got {h.shape[0]}")
    tr = np.trace(h).real
    if abs(tr - 1.0) > TRACE_TOL:
        raise InvalidState(f"trace is {tr:.15g}, not 1 (deviation {abs(tr - 1):.3e})")
    lmin = np.linalg.eigvalsh(h)[0]
    if lmin < -PSD_TOL:
        raise InvalidState(f"not positive semidefinite: min eigenvalue {lmin:.3e}")
    return h


def entropy_of_spectrum(p) -> float:
    """Shannon entropy ``-sum p ln p`` of a spectrum, with ``0 ln 0 = 0``."""
    p = np.asarray(p, dtype=float)
    p = p[p > EIG_FLOOR]
    return float(-np.sum(p * np.log(p))) + 0.0


def von_neumann_entropy(rho) -> float:
    """``S(rho) = -tr rho ln rho`` in nats."""
    h = check_density(rho)
    return entropy_of_spectrum(np.linalg.eigvalsh(h))


def relative_entropy(sigma, rho) -> float:
    """Quantum relative entropy ``S(sigma||rho) = tr sigma (ln sigma - ln rho)``.

    Returns ``inf`` when the support of ``sigma`` is not contained in the
    support of ``rho``.
    """
    s = check_density(sigma)
    r = check_density(rho)
    if s.shape != r.shape:
        raise DimensionMismatch(f"dimensions differ: {s.shape[0]} vs {r.shape[0]}")
    return float(relative_entropy_batch(s, r[None])[0])


def relative_entropy_batch(sigma: np.ndarray, rhos: np.ndarray) -> np.ndarray:
    """Relative entropy of one ``sigma`` against a stack of ``rhos``.

    No validation is done here; ``sigma`` must already be a Hermitian
    density matrix and ``rhos`` an array of shape ``(k, d, d)``.
    """
    neg_entropy = -entropy_of_spectrum(np.linalg.eigvalsh(sigma))
    lam, vecs = np.linalg.eigh(rhos)
    # weight of sigma on each eigenvector of each rho
    overlap = np.einsum("kij,il,klj->kj", vecs.conj(), sigma, vecs).real
    null = lam <= EIG_FLOOR
    bad = np.any(null & (overlap > SUPPORT_TOL), axis=1)
    logs = np.log(np.where(null, 1.0, lam))
    cross = -np.sum(np.where(null, 0.0, overlap * logs), axis=1)
    out = np.maximum(neg_entropy + cross, 0.0)
    out[bad] = np.inf
    return out


def log_divided_difference(l1, l2):
    """Divided difference of the logarithm, ``(ln l1 - ln l2) / (l1 - l2)``.

    This is the value of ``int_0^inf dt / ((l1 + t)(l2 + t))``. With
    ``r = (l1 - l2)/(l1 + l2)`` it is evaluated as ``2 atanh(r) / (r (l1 + l2))``,
    and through the series ``1 + r^2/3 + r^4/5`` when ``|r|`` is small so
    that the coincident limit ``1/l`` is exact.

    Works elementwise on arrays; returns a float for scalar input.
    """
    a = np.asarray(l1, dtype=float)
    b = np.asarray(l2, dtype=float)
    if np.any(a <= 0) or np.any(b <= 0):
        raise NonPositiveEigenvalue("log divided difference needs positive arguments")
    s = a + b
    r = (a - b) / s
    small = np.abs(r) < _SERIES_CUTOFF
    r2 = r * r
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(small, 1.0 + r2 / 3.0 + r2 * r2 / 5.0, np.arctanh(r) / np.where(small, 1.0, r))
    out = 2.0 * ratio / s
    return float(out) if out.ndim == 0 else out


def divided_difference_matrix(lam: np.ndarray) -> np.ndarray:
    """Matrix ``K[i, j] = log_divided_difference(lam[i], lam[j])``."""
    lam = np.asarray(lam, dtype=float)
    return log_divided_difference(lam[:, None], lam[None, :])


def frechet_log_trace(base, weight, direction) -> float:
    """Evaluate ``int_0^inf tr[(B+t)^-1 W (B+t)^-1 D] dt``.

    ``B`` is ``base``, ``W`` is ``weight`` and ``D`` is ``direction``. This
    equals ``d/dx tr[W ln(B + x D)]`` at ``x = 0``. In the eigenbasis of
    ``B`` the integral reduces to ``sum_ij W_ij D_ji k(l_i, l_j)`` with
    ``k`` the log divided difference; only the support of ``B`` enters, so
    ``W`` must vanish on the null space of ``B``.

    Raises
    ------
    SupportViolation
        If ``weight`` has components on eigenvectors of ``base`` whose
        eigenvalue is below ``EIG_FLOOR``.
    """
    b = check_density(base)
    w = hermitian_part(weight)
    d = hermitian_part(direction)
    if not (b.shape == w.shape == d.shape):
        raise DimensionMismatch("base, weight and direction must share a shape")
    lam, vecs = np.linalg.eigh(b)
    keep = lam > EIG_FLOOR
    w_rot = vecs.conj().T @ w @ vecs
    leak = np.abs(w_rot[~keep]).max(initial=0.0)
    if leak > SUPPORT_TOL:
        raise SupportViolation(f"weight has magnitude {leak:.3e} outside the support of base")
    vs = vecs[:, keep]
    w_s = w_rot[np.ix_(keep, keep)]
    d_s = vs.conj().T @ d @ vs
    k = divided_difference_matrix(lam[keep])
    return float(np.sum(w_s * d_s.T * k).real)


def partial_transpose(m, d_a: int, d_b: int) -> np.ndarray:
    """Transpose the B factor; composite index is ``i_A * d_B + i_B``."""
    m = as_matrix(m)
    if m.shape[0] != d_a * d_b:
        raise DimensionMismatch(f"matrix of size {m.shape[0]} is not {d_a}x{d_b}")
    t = m.reshape(d_a, d_b, d_a, d_b).transpose(0, 3, 2, 1)
    return t.reshape(d_a * d_b, d_a * d_b)


def is_ppt(m, d_a: int, d_b: int, tol: float = PSD_TOL) -> bool:
    pt = partial_transpose(m, d_a, d_b)
    return bool(np.linalg.eigvalsh(0.5 * (pt + pt.conj().T))[0] >= -tol)
