"""
Variable-range XYZ Heisenberg chain on a ring.

    H = sum_{i<j} w_ij (Jx X_i X_j + Jy Y_i Y_j + Delta Z_i Z_j),
    w_ij = 1 / d(i, j)**alpha,   d(i, j) = min(|i - j|, N - |i - j|)

Every unordered pair enters once, the antipodal pair of an even ring included.
``alpha = NN_ONLY`` (``math.inf``) keeps only the d = 1 bonds.

The operator never forms a matrix on the primary path. In the computational
basis X_i X_j and Y_i Y_j both flip bits i and j; the Y Y factor is +1 on an
anti-aligned pair and -1 on an aligned one, so the flip amplitude is
``w (Jx + Jy)`` for anti-aligned and ``w (Jx - Jy)`` for aligned pairs.
Z_i Z_j is diagonal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import HermiticityError, SizeError
from .state import PureState, check_n_sites, site_axis

NN_ONLY = math.inf
DENSE_MAX_SITES = 12


def parse_alpha(value) -> float:
    """Accept a positive number or one of ``"nn"``/``"inf"`` for the nearest-neighbour limit."""
    if isinstance(value, str):
        if value.strip().lower() in ("nn", "nn_only", "inf", "infinity"):
            return NN_ONLY
        value = float(value)
    alpha = float(value)
    if not alpha > 0:
        raise ValueError(f"alpha must be positive (or 'nn'), got {value!r}")
    return alpha


def format_alpha(alpha: float) -> str:
    if math.isinf(alpha):
        return "nn"
    return f"{alpha:.12g}"


@dataclass(frozen=True)
class ModelParams:
    n_sites: int
    alpha: float
    j_x: float = 1.0
    j_y: float = 1.0
    delta: float = 1.0
    boundary: str = "periodic"

    def __post_init__(self):
        if not isinstance(self.n_sites, (int, np.integer)) or self.n_sites < 2:
            raise SizeError(f"n_sites must be an integer >= 2, got {self.n_sites!r}")
        check_n_sites(self.n_sites)
        object.__setattr__(self, "alpha", parse_alpha(self.alpha))
        if self.boundary != "periodic":
            raise ValueError(f"only periodic boundary is supported, got {self.boundary!r}")
        for name in ("j_x", "j_y", "delta"):
            val = float(getattr(self, name))
            if not math.isfinite(val):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, val)

    @classmethod
    def from_json(cls, cfg: dict) -> "ModelParams":
        """Build from ``{"n", "alpha", "jx", "jy", "delta"}``."""
        try:
            return cls(
                n_sites=int(cfg["n"]),
                alpha=cfg["alpha"],
                j_x=cfg.get("jx", 1.0),
                j_y=cfg.get("jy", 1.0),
                delta=cfg.get("delta", 1.0),
            )
        except KeyError as exc:
            raise ValueError(f"model config is missing key {exc.args[0]!r}") from None

    def to_json(self) -> dict:
        return {
            "n": self.n_sites,
            "alpha": format_alpha(self.alpha) if math.isinf(self.alpha) else self.alpha,
            "jx": self.j_x,
            "jy": self.j_y,
            "delta": self.delta,
        }


@dataclass(frozen=True)
class TwoSiteTerm:
    site_i: int
    site_j: int
    distance: int
    weight: float


def chord_distance(i: int, j: int, n: int) -> int:
    d = abs(i - j)
    return min(d, n - d)


def coupling_terms(params: ModelParams) -> tuple[TwoSiteTerm, ...]:
    n = params.n_sites
    terms = []
    for i in range(n):
        for j in range(i + 1, n):
            d = chord_distance(i, j, n)
            if math.isinf(params.alpha):
                if d != 1:
                    continue
                w = 1.0
            else:
                w = float(d) ** (-params.alpha)
            terms.append(TwoSiteTerm(i, j, d, w))
    return tuple(terms)


@dataclass(frozen=True, eq=False)
class LongRangeOperator:
    """Matrix-free Hamiltonian: weighted two-site terms plus :meth:`apply`."""

    params: ModelParams
    terms: tuple[TwoSiteTerm, ...]
    _diag: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        n = self.params.n_sites
        idx = np.arange(1 << n, dtype=np.int64)
        z = [1.0 - 2.0 * ((idx >> s) & 1) for s in range(n)]
        diag = np.zeros(1 << n)
        if self.params.delta != 0.0:
            for t in self.terms:
                diag += (self.params.delta * t.weight) * (z[t.site_i] * z[t.site_j])
        diag.setflags(write=False)
        object.__setattr__(self, "_diag", diag)

    @property
    def n_sites(self) -> int:
        return self.params.n_sites

    @property
    def dim(self) -> int:
        return 1 << self.params.n_sites

    def diagonal(self) -> np.ndarray:
        return self._diag

    def _flip_pattern(self, term: TwoSiteTerm, ndim: int) -> np.ndarray:
        p = self.params
        aligned = term.weight * (p.j_x - p.j_y)
        anti = term.weight * (p.j_x + p.j_y)
        n = p.n_sites
        ai, aj = site_axis(n, term.site_i), site_axis(n, term.site_j)
        shape = [1] * ndim
        shape[ai] = shape[aj] = 2
        pattern = np.array([[aligned, anti], [anti, aligned]])
        return pattern.reshape(shape)

    def apply(self, psi) -> np.ndarray:
        """Return ``H @ psi`` for a vector of shape ``(dim,)`` or a block ``(dim, k)``."""
        vec = psi.amplitudes if isinstance(psi, PureState) else np.asarray(psi)
        if vec.shape[0] != self.dim or vec.ndim > 2:
            raise SizeError(f"operator acts on dimension {self.dim}, got array of shape {vec.shape}")
        n = self.n_sites
        extra = vec.shape[1:]
        tens = vec.reshape((2,) * n + extra)
        diag = self._diag.reshape((2,) * n + (1,) * len(extra))
        out = diag * tens
        for term in self.terms:
            ai, aj = site_axis(n, term.site_i), site_axis(n, term.site_j)
            pattern = self._flip_pattern(term, n + len(extra))
            out += pattern * np.flip(tens, axis=(ai, aj))
        return out.reshape(vec.shape)

    def __matmul__(self, psi):
        return self.apply(psi)


def build_model(params: ModelParams) -> LongRangeOperator:
    return LongRangeOperator(params, coupling_terms(params))


def apply(op: LongRangeOperator, psi) -> np.ndarray:
    return op.apply(psi)


def dense_matrix(op: LongRangeOperator) -> np.ndarray:
    """Explicit matrix, column j = ``apply(op, e_j)``; refuses beyond 12 sites."""
    if op.n_sites > DENSE_MAX_SITES:
        raise SizeError(f"dense matrix refused for n={op.n_sites} > {DENSE_MAX_SITES}")
    return op.apply(np.eye(op.dim))


def expectation(op: LongRangeOperator, psi) -> float:
    vec = psi.amplitudes if isinstance(psi, PureState) else np.asarray(psi)
    value = np.vdot(vec, op.apply(vec))
    if abs(value.imag) > 1e-8:
        raise HermiticityError(f"<psi|H|psi> has imaginary part {value.imag:.3e}")
    return float(value.real)


def total_sz_diagonal(n: int) -> np.ndarray:
    """Diagonal of sum_i sigma^z_i in the computational basis."""
    idx = np.arange(1 << n, dtype=np.int64)
    ones = np.zeros(1 << n, dtype=np.int64)
    for s in range(n):
        ones += (idx >> s) & 1
    return (n - 2 * ones).astype(float)
