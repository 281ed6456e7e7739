"""
Generalized geometric measure (GGM) of genuine multipartite entanglement.

    G(psi) = 1 - max_{A:B} lambda^2_{A:B}

where lambda^2_{A:B} is the largest eigenvalue of the reduced density matrix of
either side of the cut. Complementary cuts share a Schmidt spectrum, so only
the canonical cuts are visited: part sizes 1..N//2, and for an even chain the
size-N/2 subsets that contain site 0.

For each cut the amplitudes are gathered into a ``2**|A| x 2**|B|`` matrix M
(rows indexed by the A bits, columns by the B bits) and the top eigenvalue of
``M M^dagger`` is taken. Up to ``2**|A| = 256`` a dense Hermitian eigensolve is
used; beyond that, power iteration on the Gram form.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation, SizeError
from .state import PureState, site_axis

DENSE_GRAM_MAX = 256
SPECTRUM_MAX = 4096
TIE_TOL = 1e-12
NORM_TOL = 1e-8

POWER_RTOL = 1e-12
POWER_MAX_ITER = 10_000
POWER_SEED = 12345

_BATCH_BYTES = 64 * 2**20


@dataclass(frozen=True)
class Bipartition:
    """Canonical cut A:B, stored as the bitmask of part A."""

    n_sites: int
    subset_mask: int

    def __post_init__(self):
        n, mask = self.n_sites, self.subset_mask
        if not 0 < mask < (1 << n):
            raise SizeError(f"mask {mask:#x} is not a proper nonempty subset of {n} sites")
        size = bin(mask).count("1")
        if size > n // 2:
            raise ValueError(f"part A has {size} sites; canonical cuts have at most {n // 2}")
        if 2 * size == n and not mask & 1:
            raise ValueError("a half-chain cut is canonical only if it contains site 0")

    @property
    def size(self) -> int:
        return bin(self.subset_mask).count("1")

    @property
    def sites(self) -> tuple[int, ...]:
        return _mask_sites(self.subset_mask, self.n_sites)

    @property
    def complement_mask(self) -> int:
        return ((1 << self.n_sites) - 1) ^ self.subset_mask


@dataclass(frozen=True)
class GgmResult:
    value: float
    argmax_partition: Bipartition
    lambda_sq_max: float
    partitions_evaluated: int

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "lambda_sq_max": self.lambda_sq_max,
            "argmax_mask": self.argmax_partition.subset_mask,
            "partitions_evaluated": self.partitions_evaluated,
        }


def _mask_sites(mask: int, n: int) -> tuple[int, ...]:
    return tuple(s for s in range(n) if (mask >> s) & 1)


def canonical_bipartitions(n: int) -> list[Bipartition]:
    """All canonical cuts, ordered by part size then mask."""
    if n < 2:
        raise SizeError("need at least two sites")
    out = []
    for k in range(1, n // 2 + 1):
        masks = []
        for sites in itertools.combinations(range(n), k):
            if 2 * k == n and sites[0] != 0:
                continue
            masks.append(sum(1 << s for s in sites))
        out.extend(Bipartition(n, m) for m in sorted(masks))
    return out


def _as_vector(psi, check_norm: bool = False) -> tuple[np.ndarray, int]:
    if isinstance(psi, PureState):
        vec, n = psi.amplitudes, psi.n_sites
    else:
        vec = np.asarray(psi)
        n = int(vec.shape[0]).bit_length() - 1
        if vec.ndim != 1 or vec.shape[0] != 1 << n or n < 2:
            raise SizeError(f"state vector length {vec.shape} is not 2**n with n >= 2")
    if check_norm:
        norm = float(np.linalg.norm(vec))
        if abs(norm - 1.0) > NORM_TOL:
            raise ContractViolation(f"GGM needs a normalized state, norm is {norm:.12g}")
    return vec, n


def _mask_of(p, n: int) -> int:
    if isinstance(p, Bipartition):
        if p.n_sites != n:
            raise SizeError(f"bipartition is for {p.n_sites} sites, state has {n}")
        return p.subset_mask
    mask = int(p)
    if not 0 < mask < (1 << n):
        raise SizeError(f"mask {mask:#x} is not a proper nonempty subset of {n} sites")
    return mask


def cut_matrix(vec: np.ndarray, n: int, mask: int) -> np.ndarray:
    """Amplitudes as a matrix with rows over the smaller side of the cut."""
    part = _mask_sites(mask, n)
    if 2 * len(part) > n:
        part = _mask_sites(((1 << n) - 1) ^ mask, n)
    rest = [s for s in range(n) if s not in part]
    axes = [site_axis(n, s) for s in part] + [site_axis(n, s) for s in rest]
    return vec.reshape((2,) * n).transpose(axes).reshape(1 << len(part), -1)


def _power_top(m: np.ndarray, rtol: float = POWER_RTOL, max_iter: int = POWER_MAX_ITER) -> float:
    """Largest eigenvalue of ``m @ m^H`` by power iteration.

    The Rayleigh quotient of the power sequence is nondecreasing, so the
    remaining error is extrapolated from the ratio of successive increments
    before accepting convergence.
    """
    rng = np.random.default_rng(POWER_SEED)
    v = rng.standard_normal(m.shape[0]) + 1j * rng.standard_normal(m.shape[0])
    v /= np.linalg.norm(v)
    rho_prev, step_prev = None, None
    rho = 0.0
    for _ in range(max_iter):
        w = m @ (m.conj().T @ v)
        rho = float(np.vdot(v, w).real)
        nrm = np.linalg.norm(w)
        if nrm == 0.0:
            return 0.0
        v = w / nrm
        if rho_prev is not None:
            step = abs(rho - rho_prev)
            if step <= 4.0 * np.finfo(float).eps * rho:
                return rho
            if step <= rtol * rho:
                ratio = step / step_prev if step_prev else 0.0
                if ratio < 1.0 and step * ratio / (1.0 - ratio) <= rtol * rho:
                    return rho
            step_prev = step
        rho_prev = rho
    return rho


def max_schmidt_sq(psi, p, method: str = "auto") -> float:
    """Largest squared Schmidt coefficient of ``psi`` across cut ``p``.

    ``p`` may be a :class:`Bipartition` or any proper subset mask; the Gram
    matrix is always built on the smaller side. ``method`` is ``"auto"``,
    ``"eigh"`` or ``"power"``.
    """
    vec, n = _as_vector(psi)
    mask = _mask_of(p, n)
    m = cut_matrix(vec, n, mask)
    if method == "power" or (method == "auto" and m.shape[0] > DENSE_GRAM_MAX):
        return _power_top(m)
    if method not in ("auto", "eigh"):
        raise ValueError(f"unknown method {method!r}")
    return float(np.linalg.eigvalsh(m @ m.conj().T)[-1])


def schmidt_spectrum(psi, p) -> np.ndarray:
    """All reduced-density eigenvalues of the cut, in decreasing order."""
    vec, n = _as_vector(psi)
    mask = _mask_of(p, n)
    m = cut_matrix(vec, n, mask)
    if m.shape[0] > SPECTRUM_MAX:
        raise SizeError(f"reduced density matrix of dimension {m.shape[0]} exceeds {SPECTRUM_MAX}")
    vals = np.linalg.eigvalsh(m @ m.conj().T)[::-1]
    return np.clip(vals, 0.0, None)


def _size_class_tops(vec, n, masks, method):
    """Top Gram eigenvalue for every mask of one part size."""
    k = bin(masks[0]).count("1")
    rows, cols = 1 << k, 1 << (n - k)
    if method == "power" or (method == "auto" and rows > DENSE_GRAM_MAX):
        return [_power_top(cut_matrix(vec, n, mk)) for mk in masks]
    if method not in ("auto", "eigh"):
        raise ValueError(f"unknown method {method!r}")
    per_cut = rows * cols * vec.itemsize
    chunk = max(1, _BATCH_BYTES // per_cut)
    tops = []
    for start in range(0, len(masks), chunk):
        block = np.stack([cut_matrix(vec, n, mk) for mk in masks[start:start + chunk]])
        gram = block @ block.conj().transpose(0, 2, 1)
        tops.extend(np.linalg.eigvalsh(gram)[:, -1].tolist())
    return tops


def lambda_sq_profile(psi, method: str = "auto") -> tuple[list[Bipartition], np.ndarray]:
    """Canonical cuts and their largest squared Schmidt coefficients."""
    vec, n = _as_vector(psi)
    parts = canonical_bipartitions(n)
    values = []
    for _, group in itertools.groupby(parts, key=lambda b: b.size):
        masks = [b.subset_mask for b in group]
        values.extend(_size_class_tops(vec, n, masks, method))
    return parts, np.asarray(values)


def ggm(psi, method: str = "auto") -> GgmResult:
    """GGM of a normalized pure state.

    Raises :class:`ContractViolation` when the norm is off by more than 1e-8.
    The reported cut is the first in enumeration order within 1e-12 of the
    maximum.
    """
    _as_vector(psi, check_norm=True)
    parts, values = lambda_sq_profile(psi, method)
    best = float(values.max())
    pick = int(np.argmax(values >= best - TIE_TOL))
    lam = min(best, 1.0)
    return GgmResult(
        value=1.0 - lam,
        argmax_partition=parts[pick],
        lambda_sq_max=lam,
        partitions_evaluated=len(parts),
    )
