"""Lanczos ground states with full reorthogonalization, plus a dense oracle."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ConvergenceError, SizeError
from .hamiltonian import DENSE_MAX_SITES, LongRangeOperator, dense_matrix
from .state import PureState

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LanczosOpts:
    tolerance: float = 1e-10
    max_krylov_dim: int = 200
    seed: int = 0
    reorthogonalize: bool = True
    degeneracy_tol: float = 1e-8

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.max_krylov_dim < 2:
            raise ValueError("max_krylov_dim must be at least 2")
        if not self.degeneracy_tol >= 0:
            raise ValueError("degeneracy_tol must be non-negative")

    @classmethod
    def from_json(cls, cfg: dict) -> "LanczosOpts":
        keys = ("tolerance", "max_krylov_dim", "seed", "reorthogonalize", "degeneracy_tol")
        return cls(**{k: cfg[k] for k in keys if k in cfg})


@dataclass(frozen=True, eq=False)
class GroundResult:
    energy: float
    state: PureState
    gap_estimate: float
    iterations: int
    converged: bool
    residual: float
    degenerate: bool = False


@dataclass
class _Krylov:
    ritz_value: float
    vector: np.ndarray
    residual: float
    iterations: int
    converged: bool


def _lanczos_lowest(matvec, v0, tol, max_dim, reorthogonalize, deflate=None):
    """Lowest Ritz pair of a Hermitian ``matvec`` started from ``v0``.

    ``deflate`` is an optional orthonormal block (rows) that every Krylov
    vector is kept orthogonal to.
    """
    dim = v0.shape[0]
    max_dim = min(max_dim, dim)

    def project(w):
        if deflate is not None:
            w -= deflate.T @ (deflate.conj() @ w)
        return w

    v = project(v0.copy())
    v /= np.linalg.norm(v)
    basis = np.empty((max_dim, dim), dtype=v.dtype)
    alphas, betas = [], []
    best = None
    beta_prev, v_prev = 0.0, None

    for k in range(max_dim):
        basis[k] = v
        w = matvec(v)
        a = float(np.vdot(v, w).real)
        alphas.append(a)
        w = w - a * v
        if v_prev is not None:
            w -= beta_prev * v_prev
        if reorthogonalize:
            for _ in range(2):
                w -= basis[: k + 1].T @ (basis[: k + 1].conj() @ w)
        w = project(w)
        beta = float(np.linalg.norm(w))

        theta, s = scipy.linalg.eigh_tridiagonal(np.array(alphas), np.array(betas))
        ritz_res = abs(beta * s[-1, 0])
        invariant = beta < 1e-13 * max(1.0, abs(theta).max())
        if ritz_res < 0.5 * tol or invariant or k == max_dim - 1:
            psi = basis[: k + 1].T @ s[:, 0]
            psi /= np.linalg.norm(psi)
            true_res = float(np.linalg.norm(matvec(psi) - theta[0] * psi))
            cand = _Krylov(float(theta[0]), psi, true_res, k + 1, true_res < tol)
            if best is None or cand.residual < best.residual:
                best = cand
            if cand.converged or invariant:
                return cand
        if invariant:
            break
        betas.append(beta)
        v_prev, beta_prev = v, beta
        v = w / beta
    return best


def _start_vector(op: LongRangeOperator, opts: LanczosOpts):
    rng = np.random.default_rng(opts.seed)
    return rng.standard_normal(op.dim)


def ground_state(op: LongRangeOperator, opts: LanczosOpts | None = None) -> GroundResult:
    """Lowest eigenpair by seeded Lanczos.

    The gap is estimated by a second Lanczos run deflated against the ground
    vector, so an exactly degenerate ground level shows up as a (near) zero gap
    and the result is flagged ``degenerate``.

    Raises
    ------
    ConvergenceError
        If the residual does not drop below ``opts.tolerance`` within
        ``opts.max_krylov_dim`` steps.
    """
    opts = opts or LanczosOpts()
    v0 = _start_vector(op, opts)
    first = _lanczos_lowest(op.apply, v0, opts.tolerance, opts.max_krylov_dim, opts.reorthogonalize)
    if not first.converged:
        raise ConvergenceError(
            f"Lanczos did not converge in {first.iterations} steps "
            f"(best residual {first.residual:.3e}, tolerance {opts.tolerance:.1e})",
            best_residual=first.residual,
            iterations=first.iterations,
        )

    gap = np.inf
    if op.dim > 1:
        v1 = np.random.default_rng(opts.seed + 1).standard_normal(op.dim)
        second = _lanczos_lowest(
            op.apply,
            v1,
            opts.tolerance,
            opts.max_krylov_dim,
            opts.reorthogonalize,
            deflate=first.vector[None, :],
        )
        gap = max(second.ritz_value - first.ritz_value, 0.0)
        if not second.converged:
            logger.debug("gap run unconverged (residual %.2e)", second.residual)

    psi = PureState(op.n_sites, _fix_phase(first.vector))
    return GroundResult(
        energy=first.ritz_value,
        state=psi,
        gap_estimate=float(gap),
        iterations=first.iterations,
        converged=True,
        residual=first.residual,
        degenerate=bool(gap < opts.degeneracy_tol),
    )


def _fix_phase(vec: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude amplitude real positive (deterministic output)."""
    k = int(np.argmax(np.abs(vec)))
    phase = vec[k] / abs(vec[k])
    return vec / phase


def dense_ground(op: LongRangeOperator, degeneracy_tol: float = 1e-8) -> GroundResult:
    if op.n_sites > DENSE_MAX_SITES:
        raise SizeError(f"dense diagonalization refused for n={op.n_sites} > {DENSE_MAX_SITES}")
    evals, evecs = np.linalg.eigh(dense_matrix(op))
    gap = float(evals[1] - evals[0]) if len(evals) > 1 else np.inf
    psi = _fix_phase(evecs[:, 0])
    res = float(np.linalg.norm(op.apply(psi) - evals[0] * psi))
    return GroundResult(
        energy=float(evals[0]),
        state=PureState(op.n_sites, psi),
        gap_estimate=gap,
        iterations=0,
        converged=True,
        residual=res,
        degenerate=bool(gap < degeneracy_tol),
    )


def dense_spectrum(op: LongRangeOperator) -> np.ndarray:
    if op.n_sites > DENSE_MAX_SITES:
        raise SizeError(f"dense diagonalization refused for n={op.n_sites} > {DENSE_MAX_SITES}")
    return np.linalg.eigvalsh(dense_matrix(op))
