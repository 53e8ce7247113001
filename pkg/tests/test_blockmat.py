import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from causalvar.blockmat import as_symmetric, block_ldl, cvar_partition, spd_inverse
from causalvar.errors import DimensionMismatch, NotPositiveDefinite

from support import random_spd, scalar_ldl_oracle


def test_partition_shapes():
    assert cvar_partition(3, 2) == (1, 1, 1, 6)
    assert cvar_partition(3, 0) == (1, 1, 1)


def test_two_by_two_by_hand():
    # K = [[4, 2], [2, 3]]: dinv_1 = 4, l_21 = 2/4, dinv_2 = 3 - 0.5 * 4 * 0.5 = 2
    f = block_ldl([[4.0, 2.0], [2.0, 3.0]], (1, 1))
    assert f.L[1, 0] == pytest.approx(0.5)
    assert f.Dinv[0] == pytest.approx(4.0)
    assert f.Dinv[1] == pytest.approx(2.0)


def test_single_block_is_identity_factor():
    K = random_spd(np.random.default_rng(0), 5)
    f = block_ldl(K, (5,))
    assert np.array_equal(f.L, np.eye(5))
    assert np.allclose(f.Dinv[0], K)


@given(st.integers(2, 12), st.integers(0, 10_000))
@settings(max_examples=60, deadline=None)
def test_reconstruction_random_partitions(n, seed):
    rng = np.random.default_rng(seed)
    K = random_spd(rng, n)
    cuts = sorted(rng.choice(np.arange(1, n), size=rng.integers(0, n - 1), replace=False).tolist())
    partition = np.diff([0] + cuts + [n]).tolist()
    f = block_ldl(K, partition)
    assert np.linalg.norm(f.reconstruct() - K) <= 1e-10 * np.linalg.norm(K)
    assert np.allclose(np.triu(f.L, 1), 0.0)
    assert np.allclose(np.diag(f.L), 1.0)


@given(st.integers(2, 10), st.integers(0, 10_000))
@settings(max_examples=40, deadline=None)
def test_all_singletons_match_cholesky(n, seed):
    K = random_spd(np.random.default_rng(seed), n)
    L_ref, D_ref = scalar_ldl_oracle(K)
    f = block_ldl(K, (1,) * n)
    assert np.allclose(f.L, L_ref, atol=1e-12)
    assert np.allclose(f.Dinv, D_ref, rtol=1e-12)


def test_trailing_block_from_caller():
    rng = np.random.default_rng(3)
    K = random_spd(rng, 6)
    computed = block_ldl(K, (1, 1, 4))
    given_ = block_ldl(K, (1, 1, 4), trailing=computed.Dinv[-1], verify_trailing=True)
    assert np.allclose(given_.Dinv[-1], computed.Dinv[-1])
    with pytest.raises(AssertionError):
        block_ldl(K, (1, 1, 4), trailing=np.eye(4) * 123.0, verify_trailing=True)


def test_not_positive_definite():
    with pytest.raises(NotPositiveDefinite):
        block_ldl(np.array([[1.0, 2.0], [2.0, 1.0]]), (1, 1))
    with pytest.raises(NotPositiveDefinite):
        spd_inverse(np.diag([1.0, -1.0]))


def test_bad_partition_and_asymmetry():
    with pytest.raises(DimensionMismatch):
        block_ldl(np.eye(3), (1, 1))
    with pytest.raises(DimensionMismatch):
        as_symmetric(np.array([[1.0, 0.5], [0.0, 1.0]]))


def test_spd_inverse_multiplies_back():
    K = random_spd(np.random.default_rng(1), 7)
    assert np.allclose(spd_inverse(K) @ K, np.eye(7), atol=1e-12)
