"""Genuine multipartite entanglement in long-range spin-1/2 Heisenberg chains.

Exact diagonalization (Lanczos), Krylov time evolution and the generalized
geometric measure (GGM) for small periodic chains with 1/d**alpha couplings.
"""

__version__ = "0.1.0"

from .errors import (
    ContractViolation,
    ConvergenceError,
    DegenerateGroundStateError,
    GgmError,
    HermiticityError,
    ParityError,
    PropagationError,
    SizeError,
)
from .state import (
    PureState,
    BasisConfig,
    product_plus_state,
    basis_state,
    neel_pair,
    inner,
    alternating_z_conjugate,
    translate,
    save_state,
    load_state,
)
from .hamiltonian import (
    NN_ONLY,
    ModelParams,
    TwoSiteTerm,
    LongRangeOperator,
    build_model,
    apply,
    dense_matrix,
    expectation,
)
from .eigensolver import LanczosOpts, GroundResult, ground_state, dense_ground
from .entanglement import (
    Bipartition,
    GgmResult,
    canonical_bipartitions,
    max_schmidt_sq,
    schmidt_spectrum,
    ggm,
)
from .propagator import PropagatorOpts, QuenchTrace, evolve, evolve_series, dense_evolve

__all__ = [name for name in dir() if not name.startswith("_")]
