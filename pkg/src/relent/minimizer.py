"""Direct numerical minimization of S(sigma||rho) over separable rho.

Nothing here knows about the closed form: the search runs over mixtures
of ``K`` product pure states,

    rho = sum_k r_k |a_k><a_k| (x) |b_k><b_k|,

parameterized without constraints. Each local vector is stored as ``2d``
real numbers and normalized on decode; the weights are a softmax of ``K``
real logits. The gradient of ``-tr sigma ln rho`` is exact (through the
divided differences of ``ln`` in the eigenbasis of ``rho``), so the local
solver is L-BFGS with restarts from independent random points.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize as _scipy_minimize
from scipy.special import softmax

from . import linalg
from .errors import DimensionTooLarge, NonConvergence, SandwichViolation
from .states import DensityMatrix, SeparableEnsemble, ensemble_to_density

log = logging.getLogger(__name__)

SENTINEL = 1e6
MAX_DIM = 16
SANDWICH_TOL = 1e-3


@dataclass(frozen=True)
class MinimizeConfig:
    ensemble_size: int | None = None  # default d_a**2 * d_b**2
    restarts: int = 20
    max_iterations: int = 5000
    tolerance: float = 1e-8
    seed: int = 0

    def __post_init__(self):
        if self.ensemble_size is not None and self.ensemble_size < 1:
            raise ValueError("ensemble_size must be at least 1")
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")


@dataclass
class MinimizeResult:
    value: float
    ensemble: SeparableEnsemble
    restarts_converged: int
    best_restart_index: int
    restart_values: list[float]


def _layout(size: int, d_a: int, d_b: int) -> int:
    per_state = 2 * d_a + 2 * d_b + 1
    if size % per_state:
        raise ValueError(f"parameter vector of length {size} does not fit ({d_a}, {d_b}) product states")
    return size // per_state


def _split(params: np.ndarray, k: int, d_a: int, d_b: int):
    i = 0
    a = params[i : i + 2 * k * d_a].reshape(2, k, d_a)
    i += 2 * k * d_a
    b = params[i : i + 2 * k * d_b].reshape(2, k, d_b)
    i += 2 * k * d_b
    return a[0] + 1j * a[1], b[0] + 1j * b[1], params[i:]


def decode(params, d_a: int, d_b: int) -> SeparableEnsemble:
    """Map a flat real parameter vector to a separable ensemble."""
    params = np.asarray(params, dtype=float)
    k = _layout(params.size, d_a, d_b)
    a, b, logits = _split(params, k, d_a, d_b)
    return SeparableEnsemble(
        softmax(logits),
        a / np.linalg.norm(a, axis=1, keepdims=True),
        b / np.linalg.norm(b, axis=1, keepdims=True),
    )


def objective(sigma: DensityMatrix, params) -> float:
    """``relative_entropy(sigma, decode(params))``, or ``SENTINEL`` if infinite."""
    value = linalg.relative_entropy(sigma, ensemble_to_density(decode(params, sigma.d_a, sigma.d_b)))
    return value if np.isfinite(value) else SENTINEL


class _Objective:
    """Value and gradient of the restricted objective for one ``sigma``."""

    def __init__(self, sigma: DensityMatrix):
        self.sigma = sigma.matrix
        self.d_a, self.d_b = sigma.d_a, sigma.d_b
        self.neg_entropy = -linalg.entropy_of_spectrum(np.linalg.eigvalsh(self.sigma))

    def __call__(self, params: np.ndarray):
        d_a, d_b = self.d_a, self.d_b
        k = _layout(params.size, d_a, d_b)
        pa, pb, logits = _split(params, k, d_a, d_b)
        na = np.linalg.norm(pa, axis=1, keepdims=True)
        nb = np.linalg.norm(pb, axis=1, keepdims=True)
        al, be = pa / na, pb / nb
        r = softmax(logits)
        x = np.einsum("ki,kj->kij", al, be).reshape(k, -1)
        rho = (x.T * r) @ x.conj()

        lam, v = np.linalg.eigh(rho)
        s_rot = v.conj().T @ self.sigma @ v
        occ = s_rot.diagonal().real
        null = lam <= linalg.EIG_FLOOR
        if np.any(null & (occ > linalg.SUPPORT_TOL)):
            return SENTINEL, np.zeros_like(params)
        value = self.neg_entropy - np.sum(occ[~null] * np.log(lam[~null]))

        # d value = tr(G d rho) with G = -d/d rho tr(sigma ln rho)
        kern = linalg.divided_difference_matrix(np.maximum(lam, linalg.EIG_FLOOR))
        grad_rho = -(v @ (s_rot * kern) @ v.conj().T)
        y = (x @ grad_rho.T).reshape(k, d_a, d_b)
        h = np.einsum("ki,ki->k", x.conj(), y.reshape(k, -1)).real

        g_al = 2.0 * r[:, None] * np.einsum("kab,kb->ka", y, be.conj())
        g_be = 2.0 * r[:, None] * np.einsum("kab,ka->kb", y, al.conj())
        g_pa = (g_al - al * np.sum((al.conj() * g_al).real, axis=1, keepdims=True)) / na
        g_pb = (g_be - be * np.sum((be.conj() * g_be).real, axis=1, keepdims=True)) / nb
        g_logits = r * (h - r @ h)
        grad = np.concatenate(
            [g_pa.real.ravel(), g_pa.imag.ravel(), g_pb.real.ravel(), g_pb.imag.ravel(), g_logits]
        )
        return float(value), grad


def minimize(sigma: DensityMatrix, cfg: MinimizeConfig = MinimizeConfig(), *, force: bool = False) -> MinimizeResult:
    """Best value of ``S(sigma||rho)`` over ``K``-term separable ``rho``.

    Restart ``i`` starts from a point drawn with seed ``(cfg.seed, i)``; the
    reported value is the minimum over restarts, ties going to the lowest
    index. A restart that stops without meeting the tolerance is logged and
    counted as unconverged.

    Raises
    ------
    DimensionTooLarge
        If ``d_a * d_b > 16`` and ``force`` is not set.
    NonConvergence
        If no restart converged.
    """
    if not isinstance(sigma, DensityMatrix):
        raise TypeError("sigma must be a DensityMatrix")
    if sigma.dim > MAX_DIM and not force:
        raise DimensionTooLarge(f"d_A*d_B = {sigma.dim} exceeds {MAX_DIM}; pass force=True to override")
    d_a, d_b = sigma.d_a, sigma.d_b
    k = cfg.ensemble_size or (d_a * d_b) ** 2
    size = k * (2 * d_a + 2 * d_b + 1)
    fun = _Objective(sigma)

    best_value, best_x, best_idx = np.inf, None, -1
    values, converged = [], 0
    for i in range(cfg.restarts):
        x0 = np.random.default_rng((cfg.seed, i)).standard_normal(size)
        res = _scipy_minimize(
            fun,
            x0,
            jac=True,
            method="L-BFGS-B",
            options={"maxiter": cfg.max_iterations, "ftol": cfg.tolerance, "gtol": 1e-10},
        )
        values.append(float(res.fun))
        if res.success:
            converged += 1
        else:
            log.info("restart %d stopped without converging: %s", i, res.message)
        if res.fun < best_value:
            best_value, best_x, best_idx = float(res.fun), res.x, i
    if converged == 0:
        raise NonConvergence(f"none of {cfg.restarts} restarts converged (best value {best_value:.6g})")
    ensemble = decode(best_x, d_a, d_b)
    value = linalg.relative_entropy(sigma, ensemble_to_density(ensemble))
    return MinimizeResult(value, ensemble, converged, best_idx, values)


def lower_bound_check(sigma: DensityMatrix, result: MinimizeResult, er_claim: float, tol: float = SANDWICH_TOL) -> dict:
    """Check ``er_claim`` and the numerical minimum agree from both sides.

    The restricted minimum can only overshoot the true one, and the
    optimizer should reach the claimed minimizer, so both
    ``er_claim <= value + tol`` and ``value <= er_claim + tol`` must hold.
    """
    gap = result.value - er_claim
    report = {"er_claim": er_claim, "numerical_min": result.value, "gap": gap, "tolerance": tol}
    if er_claim > result.value + tol or result.value > er_claim + tol:
        raise SandwichViolation(er_claim, result.value, tol)
    return report
