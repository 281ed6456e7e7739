"""
Oracle cross-checks run by ``ggmchain validate``.

Every check compares a production path with an independent one (dense
matrices, dense exponentials, full Schmidt spectra, symmetry operators) at
N <= 8 and reports the worst deviation it saw.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .eigensolver import LanczosOpts, dense_ground, ground_state
from .entanglement import canonical_bipartitions, ggm, max_schmidt_sq, schmidt_spectrum
from .hamiltonian import LongRangeOperator, ModelParams, build_model, dense_matrix, total_sz_diagonal
from .propagator import PropagatorOpts, dense_evolve, evolve
from .state import PureState, alternating_z_conjugate, inner, product_plus_state, site_axis, translate


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    max_deviation: float
    tolerance: float
    detail: str = ""

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        extra = f"  ({self.detail})" if self.detail else ""
        return f"{tag}  {self.name:<28s} max_dev={self.max_deviation:.3e}  tol={self.tolerance:.1e}{extra}"


class CorruptedCouplingOperator(LongRangeOperator):
    """Mutation hook: adds a one-directional hop on the first bond.

    The extra amplitude only flows into configurations with the first bond's
    lower site down, so the operator is no longer Hermitian.
    """

    leak = 0.1

    def apply(self, psi):
        out = super().apply(psi)
        vec = psi.amplitudes if isinstance(psi, PureState) else np.asarray(psi)
        n = self.n_sites
        term = self.terms[0]
        extra = vec.shape[1:]
        tens = vec.reshape((2,) * n + extra)
        ai, aj = site_axis(n, term.site_i), site_axis(n, term.site_j)
        gate = np.zeros([2 if k == ai else 1 for k in range(n + len(extra))])
        gate[(slice(None),) * ai + (1,)] = self.leak
        return out + (gate * np.flip(tens, axis=(ai, aj))).reshape(vec.shape)


def random_state(n: int, rng: np.random.Generator) -> PureState:
    v = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
    return PureState(n, v / np.linalg.norm(v))


def _params_grid(n):
    for j in (1.0, -1.0):
        for alpha in (1.0, 3.0):
            for delta in (0.5, 1.5):
                yield ModelParams(n, alpha, j, j, delta)
    yield ModelParams(n, 2.0, 1.0, 0.4, -0.7)


def _run(name, tol, body):
    try:
        dev, detail = body()
    except Exception as exc:  # a crashing check is a failing check
        return CheckResult(name, False, float("inf"), tol, f"{type(exc).__name__}: {exc}")
    return CheckResult(name, bool(dev < tol), float(dev), tol, detail)


def run_checks(seed: int = 2024, mutate: str | None = None, n_random: int = 8) -> list[CheckResult]:
    """Run the oracle suite. ``mutate="coupling"`` swaps in a corrupted operator."""
    if mutate not in (None, "coupling"):
        raise ValueError(f"unknown mutation {mutate!r}")
    rng = np.random.default_rng(seed)

    def make(params):
        op = build_model(params)
        if mutate == "coupling":
            return CorruptedCouplingOperator(op.params, op.terms)
        return op

    results = []

    def hermiticity():
        dev = 0.0
        for n in (6, 8):
            for params in _params_grid(n):
                op = make(params)
                for _ in range(n_random):
                    phi, psi = random_state(n, rng), random_state(n, rng)
                    lhs = inner(phi, op.apply(psi))
                    rhs = np.conj(inner(psi, op.apply(phi)))
                    dev = max(dev, abs(lhs - rhs))
            m = dense_matrix(make(ModelParams(n, 1.0, 1.0, 1.0, 0.5)))
            dev = max(dev, float(np.abs(m - m.conj().T).max()))
        return dev, ""

    results.append(_run("hermiticity", 1e-10, hermiticity))

    def sz_commutator():
        dev = 0.0
        for n in (6, 8):
            sz = total_sz_diagonal(n)
            for params in _params_grid(n):
                if params.j_x != params.j_y:
                    continue
                op = make(params)
                for _ in range(n_random):
                    psi = random_state(n, rng).amplitudes
                    dev = max(dev, np.linalg.norm(op.apply(sz * psi) - sz * op.apply(psi)))
        return dev, ""

    results.append(_run("sz_commutator", 1e-10, sz_commutator))

    def translation():
        dev = 0.0
        for n in (6, 7, 8):
            for params in _params_grid(n):
                op = make(params)
                for _ in range(n_random):
                    psi = random_state(n, rng).amplitudes
                    lhs = op.apply(translate(psi, n))
                    rhs = translate(op.apply(psi), n)
                    dev = max(dev, np.linalg.norm(lhs - rhs))
        return dev, ""

    results.append(_run("translation_commutator", 1e-10, translation))

    lanczos_devs = {}

    def lanczos_vs_dense():
        if not lanczos_devs:
            e_dev, o_dev = 0.0, 0.0
            for j in (1.0, -1.0):
                for alpha in (1.0, 4.0, 10.0):
                    for delta in (0.0, 0.75, 1.5):
                        op = make(ModelParams(8, alpha, j, j, delta))
                        ref = dense_ground(op)
                        got = ground_state(op, LanczosOpts(seed=seed))
                        e_dev = max(e_dev, abs(got.energy - ref.energy))
                        o_dev = max(o_dev, abs(1.0 - abs(inner(ref.state, got.state))))
            lanczos_devs.update(energy=e_dev, overlap=o_dev)
        return lanczos_devs

    results.append(_run("lanczos_energy_vs_dense", 1e-8, lambda: (lanczos_vs_dense()["energy"], "")))
    results.append(_run("lanczos_overlap_vs_dense", 1e-6, lambda: (lanczos_vs_dense()["overlap"], "")))

    def krylov_vs_dense():
        dev = 0.0
        for params in (ModelParams(6, 1.0, 1.0, 1.0, 0.5), ModelParams(8, 2.0, -1.0, -1.0, 1.75)):
            op = make(params)
            psi0 = product_plus_state(params.n_sites)
            for t in (0.5, 1.0, 2.0):
                a = evolve(op, psi0, t, PropagatorOpts())
                b = dense_evolve(op, psi0, t)
                dev = max(dev, np.linalg.norm(a.amplitudes - b.amplitudes))
        return dev, ""

    results.append(_run("krylov_vs_dense", 1e-8, krylov_vs_dense))

    def power_vs_spectrum():
        dev, mismatched = 0.0, 0
        states = [random_state(n, rng) for n in (5, 6, 8) for _ in range(3)]
        states.append(ground_state(make(ModelParams(8, 1.0, 1.0, 1.0, 0.5))).state)
        for psi in states:
            fast = ggm(psi, method="power")
            parts = canonical_bipartitions(psi.n_sites)
            lam = [schmidt_spectrum(psi, p)[0] for p in parts]
            best = max(lam)
            pick = next(i for i, v in enumerate(lam) if v >= best - 1e-12)
            dev = max(dev, abs(fast.value - (1.0 - best)))
            mismatched += fast.argmax_partition != parts[pick]
        if mismatched:
            return float("inf"), f"{mismatched} argmax mismatches, value deviation {dev:.2e}"
        return dev, ""

    results.append(_run("power_vs_spectrum_ggm", 1e-10, power_vs_spectrum))

    def complement():
        dev = 0.0
        for n in (5, 6, 8):
            full = (1 << n) - 1
            for _ in range(n_random):
                psi = random_state(n, rng)
                for mask in rng.integers(1, full, size=6):
                    mask = int(mask)
                    dev = max(dev, abs(max_schmidt_sq(psi, mask) - max_schmidt_sq(psi, full ^ mask)))
        return dev, ""

    results.append(_run("complement_schmidt_symmetry", 1e-10, complement))

    def ggm_invariance():
        dev = 0.0
        for n in (5, 6, 8):
            for _ in range(n_random):
                psi = random_state(n, rng)
                g = ggm(psi).value
                dev = max(dev, abs(ggm(translate(psi)).value - g))
                dev = max(dev, abs(ggm(alternating_z_conjugate(psi)).value - g))
        return dev, ""

    results.append(_run("ggm_invariance", 1e-10, ggm_invariance))

    def analytic():
        dev = 0.0
        for n in range(2, 9):
            ghz = np.zeros(1 << n, dtype=complex)
            ghz[0] = ghz[-1] = 2 ** -0.5
            dev = max(dev, abs(ggm(PureState(n, ghz)).value - 0.5))
        w = np.zeros(8, dtype=complex)
        w[[1, 2, 4]] = 3 ** -0.5
        dev = max(dev, abs(ggm(PureState(3, w)).value - 1.0 / 3.0))
        dev = max(dev, abs(ggm(product_plus_state(6)).value))
        e0 = ground_state(make(ModelParams(2, 1.0, 1.0, 1.0, 1.0))).energy
        dev = max(dev, abs(e0 + 3.0))
        return dev, ""

    results.append(_run("analytic_values", 1e-10, analytic))
    return results
