import math

import numpy as np
import pytest

from ggmchain.eigensolver import LanczosOpts, dense_ground, ground_state
from ggmchain.errors import ConvergenceError, SizeError
from ggmchain.hamiltonian import ModelParams, build_model, expectation
from ggmchain.state import inner, translate

from conftest import kron_hamiltonian, make_random_state


def test_two_site_heisenberg_ground_state():
    for alpha in (0.5, 1.0, 6.0):
        res = ground_state(build_model(ModelParams(2, alpha, 1.0, 1.0, 1.0)))
        assert res.energy == pytest.approx(-3.0, abs=1e-10)
        singlet = np.array([0, 1, -1, 0]) / math.sqrt(2)
        assert abs(abs(inner(singlet, res.state)) - 1) < 1e-10
        assert res.gap_estimate == pytest.approx(4.0, abs=1e-8)
        assert res.converged and not res.degenerate


def test_dense_two_site_gap():
    res = dense_ground(build_model(ModelParams(2, 1.0, 1.0, 1.0, 1.0)))
    assert res.energy == pytest.approx(-3.0, abs=1e-12)
    assert res.gap_estimate == pytest.approx(4.0, abs=1e-12)


def test_lanczos_matches_kron_oracle():
    op = build_model(ModelParams(8, 3.0, 1.0, 1.0, 0.5))
    evals, evecs = np.linalg.eigh(kron_hamiltonian(8, 3.0, 1.0, 1.0, 0.5))
    res = ground_state(op)
    assert abs(res.energy - evals[0]) < 1e-8
    assert abs(1 - abs(np.vdot(evecs[:, 0], res.state.amplitudes))) < 1e-6
    assert res.gap_estimate == pytest.approx(evals[1] - evals[0], abs=1e-6)


def test_ferromagnetic_multiplet_is_flagged_degenerate():
    res = ground_state(build_model(ModelParams(8, 10.0, -1.0, -1.0, -1.5)))
    assert res.degenerate
    assert res.gap_estimate < 1e-8
    assert dense_ground(build_model(ModelParams(8, 10.0, -1.0, -1.0, -1.5))).degenerate


@pytest.mark.parametrize("j", [1.0, -1.0])
def test_lanczos_vs_dense_grid(j):
    for delta in (0.0, 0.5, 1.0, 1.5, 2.0):
        for alpha in (1.0, 2.0, 4.0, 7.0, 10.0):
            op = build_model(ModelParams(8, alpha, j, j, delta))
            ref = dense_ground(op)
            got = ground_state(op)
            assert abs(got.energy - ref.energy) < 1e-8
            assert abs(1 - abs(inner(ref.state, got.state))) < 1e-6


def test_residual_below_tolerance():
    opts = LanczosOpts(tolerance=1e-10)
    op = build_model(ModelParams(10, 1.0, 1.0, 1.0, 0.5))
    res = ground_state(op, opts)
    vec = res.state.amplitudes
    assert np.linalg.norm(op.apply(vec) - res.energy * vec) < opts.tolerance
    assert res.residual < opts.tolerance


def test_variational_bound(rng):
    op = build_model(ModelParams(7, 1.5, -1.0, -1.0, 0.6))
    e0 = ground_state(op).energy
    for _ in range(100):
        assert e0 <= expectation(op, make_random_state(7, rng)) + 1e-12


def test_seed_independence():
    op = build_model(ModelParams(10, 2.0, 1.0, 1.0, 1.2))
    a = ground_state(op, LanczosOpts(seed=1))
    b = ground_state(op, LanczosOpts(seed=99))
    assert abs(a.energy - b.energy) < 1e-9
    assert abs(1 - abs(inner(a.state, b.state))) < 1e-6


def test_same_seed_is_bitwise_deterministic():
    op = build_model(ModelParams(8, 1.0, 1.0, 1.0, 0.5))
    a, b = ground_state(op, LanczosOpts(seed=5)), ground_state(op, LanczosOpts(seed=5))
    assert a.energy == b.energy
    np.testing.assert_array_equal(a.state.amplitudes, b.state.amplitudes)


@pytest.mark.parametrize("params", [
    ModelParams(8, 1.0, 1.0, 1.0, 0.5),
    ModelParams(10, 2.0, -1.0, -1.0, 1.5),
    ModelParams(6, 5.0, 1.0, 1.0, 0.25),
])
def test_nondegenerate_ground_state_is_translation_invariant(params):
    res = ground_state(build_model(params))
    assert not res.degenerate
    assert abs(abs(inner(res.state, translate(res.state))) - 1) < 1e-6


def test_non_convergence_raises_with_best_residual():
    with pytest.raises(ConvergenceError) as info:
        ground_state(build_model(ModelParams(8, 1.0, 1.0, 1.0, 0.5)), LanczosOpts(max_krylov_dim=3))
    assert info.value.best_residual > 1e-10
    assert info.value.iterations == 3


def test_odd_antiferromagnetic_ring_is_degenerate():
    # frustrated ring: ground states at momenta +k and -k
    assert dense_ground(build_model(ModelParams(9, 5.0, 1.0, 1.0, 0.25))).degenerate


def test_dense_ground_refuses_large_chains():
    with pytest.raises(SizeError):
        dense_ground(build_model(ModelParams(13, 1.0)))


@pytest.mark.parametrize("kwargs", [{"tolerance": 0}, {"max_krylov_dim": 1}, {"degeneracy_tol": -1}])
def test_invalid_options(kwargs):
    with pytest.raises(ValueError):
        LanczosOpts(**kwargs)


def test_options_from_json():
    opts = LanczosOpts.from_json({"tolerance": 1e-9, "seed": 7, "n": 12})
    assert opts.tolerance == 1e-9 and opts.seed == 7 and opts.max_krylov_dim == 200
