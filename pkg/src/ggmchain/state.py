"""
Pure states of an N-qubit chain.

Basis convention (used everywhere in the package): bit ``i`` of the basis
integer is the state of site ``i``, and ``|0>`` is spin up (sigma^z = +1).
Site 0 is the least significant bit, so index ``0b1010`` on four sites is
up-down-up-down read from site 0.

When a state vector is reshaped to a ``(2,) * N`` tensor in C order, tensor
axis ``k`` carries site ``N - 1 - k``; :func:`site_axis` does the conversion.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ParityError, SizeError

MIN_SITES = 2
MAX_SITES = 24
NORM_TOL = 1e-10

_MAGIC = b"GGM1"


def site_axis(n_sites: int, site: int) -> int:
    """Tensor axis of ``site`` after ``vec.reshape((2,) * n_sites)``."""
    return n_sites - 1 - site


def check_n_sites(n: int) -> int:
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise SizeError(f"n_sites must be an integer, got {n!r}")
    if not MIN_SITES <= n <= MAX_SITES:
        raise SizeError(f"n_sites={n} outside [{MIN_SITES}, {MAX_SITES}]")
    return int(n)


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized amplitude vector of length ``2**n_sites``.

    The amplitude array is stored read-only; operations return new states.
    """

    n_sites: int
    amplitudes: np.ndarray

    def __post_init__(self):
        n = check_n_sites(self.n_sites)
        amps = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amps.shape[0] != 1 << n:
            raise SizeError(f"expected {1 << n} amplitudes for {n} sites, got {amps.shape[0]}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state norm {norm!r} deviates from 1 by more than {NORM_TOL}")
        amps.setflags(write=False)
        object.__setattr__(self, "n_sites", n)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_vector(cls, vec, n_sites: int | None = None, normalize: bool = False) -> "PureState":
        vec = np.asarray(vec, dtype=np.complex128).reshape(-1)
        if n_sites is None:
            n_sites = int(vec.shape[0]).bit_length() - 1
        if normalize:
            vec = vec / np.linalg.norm(vec)
        return cls(n_sites, vec)

    @property
    def dim(self) -> int:
        return 1 << self.n_sites

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def tensor(self) -> np.ndarray:
        """View as a ``(2,) * n_sites`` tensor (axis k is site n-1-k)."""
        return self.amplitudes.reshape((2,) * self.n_sites)

    def __len__(self):
        return self.dim

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.amplitudes
        return self.amplitudes.astype(dtype)

    def __repr__(self):
        return f"PureState(n_sites={self.n_sites})"


@dataclass(frozen=True)
class BasisConfig:
    n_sites: int
    bits: int

    def __post_init__(self):
        n = check_n_sites(self.n_sites)
        if not 0 <= self.bits < (1 << n):
            raise SizeError(f"bits={self.bits} not representable on {n} sites")

    def spins(self) -> str:
        """Site-ordered arrow string, site 0 first."""
        return "".join("↓" if (self.bits >> i) & 1 else "↑" for i in range(self.n_sites))


def product_plus_state(n: int) -> PureState:
    """Tensor product of (|0> + |1>)/sqrt(2) on every site."""
    n = check_n_sites(n)
    return PureState(n, np.full(1 << n, 2.0 ** (-n / 2), dtype=np.complex128))


def basis_state(config: BasisConfig) -> PureState:
    amps = np.zeros(1 << config.n_sites, dtype=np.complex128)
    amps[config.bits] = 1.0
    return PureState(config.n_sites, amps)


def neel_bits(n: int) -> tuple[int, int]:
    """Basis integers of up-down-up-... and its spin-flipped partner."""
    n = check_n_sites(n)
    if n % 2:
        raise ParityError(f"Neel configurations need an even chain, got n={n}")
    # up on even sites -> odd sites carry bit 1
    first = sum(1 << i for i in range(1, n, 2))
    return first, first ^ ((1 << n) - 1)


def neel_pair(n: int) -> tuple[PureState, PureState]:
    first, second = neel_bits(n)
    return basis_state(BasisConfig(n, first)), basis_state(BasisConfig(n, second))


def _vector(state) -> np.ndarray:
    if isinstance(state, PureState):
        return state.amplitudes
    return np.asarray(state)


def inner(a, b) -> complex:
    """<a|b>, conjugate-linear in ``a``."""
    va, vb = _vector(a), _vector(b)
    if va.shape != vb.shape:
        raise SizeError(f"dimension mismatch: {va.shape} vs {vb.shape}")
    return complex(np.vdot(va, vb))


def _odd_site_mask(n: int) -> int:
    return sum(1 << i for i in range(1, n, 2))


def alternating_z_conjugate(psi: PureState) -> PureState:
    """Apply sigma^z on every odd site.

    Equivalent to the alternating-site spin rotation that maps the
    ferromagnetic XY coupling of nearest neighbours onto the
    antiferromagnetic one.
    """
    n = psi.n_sites
    idx = np.arange(1 << n, dtype=np.int64)
    odd = idx & _odd_site_mask(n)
    parity = np.zeros_like(idx)
    for i in range(1, n, 2):
        parity ^= (odd >> i) & 1
    signs = 1.0 - 2.0 * parity
    return PureState(n, psi.amplitudes * signs)


def translation_permutation(n: int) -> np.ndarray:
    """Index map ``perm`` with ``(T psi)[perm[b]] = psi[b]``; site i moves to i+1 mod n."""
    idx = np.arange(1 << n, dtype=np.int64)
    full = (1 << n) - 1
    return ((idx << 1) | (idx >> (n - 1))) & full


def translate(psi, n_sites: int | None = None, shift: int = 1):
    """Cyclic shift of site labels by ``shift`` (site i -> i + shift).

    Accepts a :class:`PureState` (returns one) or a raw vector (returns an array).
    """
    vec = _vector(psi)
    n = psi.n_sites if isinstance(psi, PureState) else (n_sites or int(vec.shape[0]).bit_length() - 1)
    out = vec
    perm = translation_permutation(n)
    for _ in range(shift % n):
        nxt = np.empty_like(out)
        nxt[perm] = out
        out = nxt
    if isinstance(psi, PureState):
        return PureState(n, out)
    return out


def save_state(path, psi: PureState) -> None:
    """Write ``GGM1`` magic, uint32 LE site count, then complex128 LE amplitudes."""
    payload = np.ascontiguousarray(psi.amplitudes, dtype="<c16")
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<I", psi.n_sites))
        fh.write(payload.tobytes())


def load_state(path) -> PureState:
    data = Path(path).read_bytes()
    if len(data) < 8 or data[:4] != _MAGIC:
        raise ValueError(f"{path}: not a GGM1 state file")
    (n,) = struct.unpack("<I", data[4:8])
    n = check_n_sites(n)
    expected = 8 + 16 * (1 << n)
    if len(data) != expected:
        raise ValueError(f"{path}: expected {expected} bytes for n={n}, found {len(data)}")
    amps = np.frombuffer(data, dtype="<c16", offset=8)
    return PureState(n, amps)
