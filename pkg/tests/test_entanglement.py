import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ggmchain.eigensolver import ground_state
from ggmchain.entanglement import (
    Bipartition,
    canonical_bipartitions,
    ggm,
    max_schmidt_sq,
    schmidt_spectrum,
)
from ggmchain.errors import ContractViolation, SizeError
from ggmchain.hamiltonian import ModelParams, build_model
from ggmchain.state import PureState, alternating_z_conjugate, neel_pair, product_plus_state, translate

from conftest import ghz, make_random_state, w3


def brute_force_ggm(vec, n):
    """Every nonempty proper subset, reduced density matrix by explicit partial trace."""
    tens = np.asarray(vec).reshape((2,) * n)
    best = 0.0
    for k in range(1, n):
        for part in itertools.combinations(range(n), k):
            axes_a = [n - 1 - s for s in part]
            axes_b = [a for a in range(n) if a not in axes_a]
            m = np.transpose(tens, axes_a + axes_b).reshape(2**k, -1)
            sv = np.linalg.svd(m, compute_uv=False)
            best = max(best, sv[0] ** 2)
    return 1.0 - best


def reduced_single_site(vec, n, site):
    """rho_site[a, b] = sum over other bits of psi[..a..] conj(psi[..b..])."""
    rho = np.zeros((2, 2), dtype=complex)
    for idx in range(1 << n):
        for jdx in range(1 << n):
            if (idx | (1 << site)) == (jdx | (1 << site)):
                rho[(idx >> site) & 1, (jdx >> site) & 1] += vec[idx] * np.conj(vec[jdx])
    return rho


def test_bipartition_counts():
    assert [b.subset_mask for b in canonical_bipartitions(2)] == [0b01]
    assert len(canonical_bipartitions(3)) == 3
    four = canonical_bipartitions(4)
    assert [b.subset_mask for b in four] == [1, 2, 4, 8, 0b0011, 0b0101, 0b1001]
    for n in range(2, 13):
        expected = sum(math.comb(n, k) for k in range(1, (n + 1) // 2))
        if n % 2 == 0:
            expected += math.comb(n, n // 2) // 2
        assert len(canonical_bipartitions(n)) == expected
        # every nonempty proper subset or its complement appears exactly once
        full = (1 << n) - 1
        seen = {b.subset_mask for b in canonical_bipartitions(n)}
        assert all((m in seen) != (full ^ m in seen) for m in range(1, full))


def test_bipartition_invariants():
    with pytest.raises(ValueError):
        Bipartition(4, 0b0110)  # half cut without site 0
    with pytest.raises(ValueError):
        Bipartition(5, 0b00111)
    with pytest.raises(SizeError):
        Bipartition(3, 0)
    b = Bipartition(6, 0b000101)
    assert b.size == 2 and b.sites == (0, 2) and b.complement_mask == 0b111010


def test_w_state_single_site_reduced_density():
    psi = w3()
    rho = reduced_single_site(psi.amplitudes, 3, 0)
    oracle = np.linalg.eigvalsh(rho)[::-1]
    np.testing.assert_allclose(oracle, [2 / 3, 1 / 3], atol=1e-15)
    assert max_schmidt_sq(psi, Bipartition(3, 1)) == pytest.approx(2 / 3, abs=1e-14)
    np.testing.assert_allclose(schmidt_spectrum(psi, Bipartition(3, 1)), oracle, atol=1e-14)


def test_max_schmidt_examples():
    bell = PureState(2, np.array([1, 0, 0, 1]) / math.sqrt(2))
    assert max_schmidt_sq(bell, Bipartition(2, 1)) == pytest.approx(0.5, abs=1e-15)
    np.testing.assert_allclose(schmidt_spectrum(bell, Bipartition(2, 1)), [0.5, 0.5], atol=1e-15)
    for n in (3, 6):
        plus = product_plus_state(n)
        for b in canonical_bipartitions(n):
            assert max_schmidt_sq(plus, b) == pytest.approx(1.0, abs=1e-12)


def test_max_schmidt_rejects_inconsistent_masks():
    with pytest.raises(SizeError):
        max_schmidt_sq(product_plus_state(3), Bipartition(4, 1))
    with pytest.raises(SizeError):
        max_schmidt_sq(product_plus_state(3), 0b1000)


@pytest.mark.parametrize("n", range(2, 13))
def test_ggm_of_ghz(n):
    res = ggm(ghz(n))
    assert abs(res.value - 0.5) < 1e-10
    assert res.value == 1.0 - res.lambda_sq_max


def test_ggm_of_neel_superposition():
    for n in (2, 4, 8, 12):
        a, b = neel_pair(n)
        for sign in (1, -1):
            psi = PureState(n, (a.amplitudes + sign * b.amplitudes) / math.sqrt(2))
            assert abs(ggm(psi).value - 0.5) < 1e-10


def test_ggm_of_product_and_w():
    assert abs(ggm(product_plus_state(7)).value) < 1e-10
    assert abs(ggm(w3()).value - 1 / 3) < 1e-10


def test_ggm_of_product_of_entangled_pair_is_zero():
    bell = np.array([1, 0, 0, 1]) / math.sqrt(2)
    psi = PureState(4, np.kron(bell, bell))
    assert abs(ggm(psi).value) < 1e-12


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_ggm_matches_brute_force_on_random_states(n, rng):
    for _ in range(5):
        psi = make_random_state(n, rng)
        assert abs(ggm(psi).value - brute_force_ggm(psi.amplitudes, n)) < 1e-12


def test_ggm_rejects_unnormalized_vectors():
    with pytest.raises(ContractViolation):
        ggm(np.ones(8) / 2.0)


def test_ggm_reports_first_maximizer():
    # GHZ: every cut ties, so the first canonical cut wins
    res = ggm(ghz(6))
    assert res.argmax_partition == canonical_bipartitions(6)[0]
    assert res.partitions_evaluated == len(canonical_bipartitions(6))


def test_ggm_json_shape():
    out = ggm(w3()).to_json()
    assert set(out) == {"value", "lambda_sq_max", "argmax_mask", "partitions_evaluated"}


def test_interpolated_ghz_family():
    for theta in np.linspace(0, math.pi / 2, 13):
        v = np.zeros(32, dtype=complex)
        v[0], v[-1] = math.cos(theta), math.sin(theta)
        value = ggm(PureState(5, v)).value
        assert value == pytest.approx(1 - max(math.cos(theta) ** 2, math.sin(theta) ** 2), abs=1e-12)


def test_power_iteration_path_matches_full_spectrum(rng):
    states = [make_random_state(n, rng) for n in (4, 6, 8) for _ in range(4)]
    states.append(ground_state(build_model(ModelParams(8, 1.0, 1.0, 1.0, 0.5))).state)
    states.append(ground_state(build_model(ModelParams(8, 10.0, -1.0, -1.0, 1.0))).state)
    states.append(ghz(8))
    for psi in states:
        fast = ggm(psi, method="power")
        parts = canonical_bipartitions(psi.n_sites)
        lam = [schmidt_spectrum(psi, p)[0] for p in parts]
        best = max(lam)
        pick = next(i for i, v in enumerate(lam) if v >= best - 1e-12)
        assert abs(fast.value - (1 - best)) < 1e-10
        assert fast.argmax_partition == parts[pick]
        assert abs(ggm(psi, method="eigh").value - (1 - best)) < 1e-12


def test_power_path_used_automatically_above_256():
    # 2**9 > 256 for a 9-site part of an 18-site chain; use a cheap product state
    psi = product_plus_state(18)
    assert max_schmidt_sq(psi, (1 << 9) - 1) == pytest.approx(1.0, abs=1e-12)


@given(st.integers(2, 8), st.integers(0, 2**32 - 1))
@settings(max_examples=50, deadline=None)
def test_complement_symmetry(n, seed):
    rng = np.random.default_rng(seed)
    psi = make_random_state(n, rng)
    full = (1 << n) - 1
    mask = int(rng.integers(1, full))
    assert abs(max_schmidt_sq(psi, mask) - max_schmidt_sq(psi, full ^ mask)) < 1e-10
    spec = schmidt_spectrum(psi, mask)
    assert abs(spec.sum() - 1) < 1e-10
    assert abs(spec[0] - max_schmidt_sq(psi, mask)) < 1e-12
    assert np.all(np.diff(spec) <= 1e-15)


@given(st.integers(2, 8), st.integers(0, 2**32 - 1))
@settings(max_examples=50, deadline=None)
def test_ggm_invariances_and_bound(n, seed):
    rng = np.random.default_rng(seed)
    psi = make_random_state(n, rng)
    g = ggm(psi).value
    assert -1e-12 <= g <= 0.5 + 1e-12
    assert abs(ggm(translate(psi)).value - g) < 1e-10
    assert abs(ggm(alternating_z_conjugate(psi)).value - g) < 1e-10
