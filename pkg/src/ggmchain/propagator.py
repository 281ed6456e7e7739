"""
Krylov propagation of exp(-iHt)|psi>.

Each substep builds an orthonormal Lanczos basis V of dimension m from the
current vector and tridiagonal projection T, then uses

    psi(t + tau) ~= V exp(-i tau T) e_1.

The local error is estimated as beta_m |[exp(-i tau T) e_1]_{m-1}|, the weight
that would leak into the next Krylov direction. The basis does not depend on
tau, so the largest admissible tau is found by shrinking it against the same
basis.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .entanglement import ggm
from .errors import PropagationError, SizeError
from .hamiltonian import LongRangeOperator, dense_matrix, expectation
from .state import PureState

DENSE_EVOLVE_MAX_SITES = 10


@dataclass(frozen=True)
class PropagatorOpts:
    krylov_dim: int = 30
    step_tolerance: float = 1e-10
    max_substeps: int = 10**6

    def __post_init__(self):
        if self.krylov_dim < 4:
            raise ValueError("krylov_dim must be at least 4")
        if not self.step_tolerance > 0:
            raise ValueError("step_tolerance must be positive")
        if self.max_substeps < 1:
            raise ValueError("max_substeps must be positive")

    @classmethod
    def from_json(cls, cfg: dict) -> "PropagatorOpts":
        keys = ("krylov_dim", "step_tolerance", "max_substeps")
        return cls(**{k: cfg[k] for k in keys if k in cfg})


@dataclass
class QuenchTrace:
    times: list[float]
    ggm_values: list[float]
    energies: list[float] = field(default_factory=list)
    norm_errors: list[float] = field(default_factory=list)
    states: list[PureState] | None = None

    def rows(self):
        for t, g, e, ne in zip(self.times, self.ggm_values, self.energies, self.norm_errors):
            yield t, g, e, ne


def _vec(psi) -> np.ndarray:
    if isinstance(psi, PureState):
        return psi.amplitudes
    return np.asarray(psi)


def _lanczos_basis(matvec, v, m):
    """Orthonormal Krylov basis (rows), tridiagonal coefficients and trailing beta."""
    dim = v.shape[0]
    m = min(m, dim)
    basis = np.empty((m, dim), dtype=np.complex128)
    alphas, betas = [], []
    basis[0] = v
    beta = 0.0
    for k in range(m):
        w = matvec(basis[k])
        a = float(np.vdot(basis[k], w).real)
        alphas.append(a)
        w = w - a * basis[k]
        if k > 0:
            w -= betas[-1] * basis[k - 1]
        for _ in range(2):
            w -= basis[: k + 1].T @ (basis[: k + 1].conj() @ w)
        beta = float(np.linalg.norm(w))
        if beta < 1e-13 * max(1.0, max(abs(x) for x in alphas)):
            return basis[: k + 1], np.array(alphas), np.array(betas), 0.0
        if k + 1 < m:
            betas.append(beta)
            basis[k + 1] = w / beta
    return basis, np.array(alphas), np.array(betas), beta


class _Substep:
    def __init__(self, basis, alphas, betas, beta_next):
        self.basis = basis
        self.beta_next = beta_next
        if len(alphas) == 1:
            self.theta, self.s = np.array(alphas), np.ones((1, 1))
        else:
            self.theta, self.s = scipy.linalg.eigh_tridiagonal(alphas, betas)

    def coefficients(self, tau: float) -> np.ndarray:
        return self.s @ (np.exp(-1j * tau * self.theta) * self.s[0])

    def error(self, tau: float) -> float:
        if self.beta_next == 0.0:
            return 0.0
        return float(self.beta_next * abs(self.coefficients(tau)[-1]))


def evolve(op: LongRangeOperator, psi0, t: float, opts: PropagatorOpts | None = None) -> PureState:
    """psi(t) = exp(-iHt) psi0 with adaptive Krylov substeps.

    Raises
    ------
    PropagationError
        When more than ``opts.max_substeps`` substeps would be needed; the
        exception carries the time reached.
    """
    vec, _ = _propagate(op, _vec(psi0).astype(np.complex128), float(t), opts or PropagatorOpts())
    return PureState(op.n_sites, vec)


def _propagate(op, vec, t, opts, budget=None):
    if not math.isfinite(t):
        raise ValueError("evolution time must be finite")
    budget = opts.max_substeps if budget is None else budget
    direction = 1.0 if t >= 0 else -1.0
    remaining = abs(t)
    substeps = 0
    reached = 0.0
    tau_hint = remaining
    vec = vec.copy()
    while remaining > 0.0:
        if substeps >= budget:
            raise PropagationError(
                f"substep budget exhausted at t={direction * reached:.6g} of {t:.6g}",
                time_reached=direction * reached,
            )
        norm = np.linalg.norm(vec)
        step = _Substep(*_lanczos_basis(op.apply, vec / norm, opts.krylov_dim))
        tau = min(remaining, 2.0 * tau_hint)
        while True:
            err = step.error(direction * tau)
            if err <= opts.step_tolerance:
                break
            shrink = 0.9 * (opts.step_tolerance / err) ** (1.0 / max(len(step.theta) - 1, 1))
            tau *= min(max(shrink, 0.1), 0.9)
        vec = norm * (step.basis.T @ step.coefficients(direction * tau))
        remaining -= tau
        if remaining < 1e-14 * abs(t):
            remaining = 0.0
        reached += tau
        tau_hint = tau
        substeps += 1
    return vec, substeps


def evolve_series(
    op: LongRangeOperator,
    psi0,
    times,
    opts: PropagatorOpts | None = None,
    keep_states: bool = False,
    measure=None,
) -> QuenchTrace:
    """Evolve through an increasing time grid starting at 0, chaining substeps.

    At every grid time the GGM (or ``measure(vec)`` if given), the energy and
    the norm error are recorded. States are kept only with ``keep_states``.
    """
    opts = opts or PropagatorOpts()
    times = [float(x) for x in times]
    if not times or times[0] != 0.0:
        raise ValueError("time grid must start at 0")
    if any(b <= a for a, b in zip(times, times[1:])):
        raise ValueError("time grid must be strictly increasing")
    measure = measure or (lambda v: ggm(v).value)

    vec = _vec(psi0).astype(np.complex128)
    trace = QuenchTrace([], [], [], [], [] if keep_states else None)
    used = 0
    prev = 0.0
    for t in times:
        if t > prev:
            try:
                vec, n_sub = _propagate(op, vec, t - prev, opts, budget=opts.max_substeps - used)
            except PropagationError as exc:
                raise PropagationError(str(exc), time_reached=prev + exc.time_reached) from None
            used += n_sub
        prev = t
        nrm = float(np.linalg.norm(vec))
        trace.times.append(t)
        trace.ggm_values.append(float(measure(vec)))
        trace.energies.append(expectation(op, vec))
        trace.norm_errors.append(abs(nrm - 1.0))
        if keep_states:
            trace.states.append(PureState(op.n_sites, vec))
    return trace


def dense_evolve(op: LongRangeOperator, psi0, t: float) -> PureState:
    """Exact exp(-iHt) psi0 through the full spectral decomposition (n <= 10)."""
    if op.n_sites > DENSE_EVOLVE_MAX_SITES:
        raise SizeError(f"dense evolution refused for n={op.n_sites} > {DENSE_EVOLVE_MAX_SITES}")
    evals, evecs = np.linalg.eigh(dense_matrix(op))
    coeff = evecs.T @ _vec(psi0)
    return PureState(op.n_sites, evecs @ (np.exp(-1j * evals * t) * coeff))


def write_trace_csv(trace: QuenchTrace, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["time", "ggm", "energy", "norm_error"])
        for row in trace.rows():
            writer.writerow([f"{x:.12g}" for x in row])
