import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.linalg import khatri_rao as scipy_khatri_rao

from lpvsafe import benchmarks as bm
from lpvsafe.data import (DataMatrices, build_matrices, check_assumption2, check_pe, collect,
                          data_residual, khatri_rao, required_samples)
from lpvsafe.errors import DimensionError
from lpvsafe.lpv import PolytopicLPV, sample_schedules, simulate


def random_plant(rng, n, m, s):
    return PolytopicLPV(tuple(rng.uniform(-1, 1, (n, n)) for _ in range(s)), rng.uniform(-1, 1, (n, m)))


def random_data(rng, n, m, s, T):
    sys = random_plant(rng, n, m, s)
    return sys, collect(sys, rng.uniform(-1, 1, (T, m)), sample_schedules(int(rng.integers(1 << 30)), s, T),
                        rng.uniform(-1, 1, n))


def test_khatri_rao_cases():
    col = khatri_rao([[0.0488], [0.9512]], [[1.0], [1.0]])
    np.testing.assert_allclose(col[:, 0], [0.0488, 0.0488, 0.9512, 0.9512])
    x = np.array([[2.0], [-3.0]])
    np.testing.assert_array_equal(khatri_rao([[1.0], [0.0], [0.0]], x)[:, 0], [2, -3, 0, 0, 0, 0])
    X0 = np.arange(6.0).reshape(2, 3)
    np.testing.assert_array_equal(khatri_rao(np.ones((1, 3)), X0), X0)
    with pytest.raises(DimensionError):
        khatri_rao(np.ones((2, 3)), np.ones((2, 4)))


@given(st.integers(1, 4), st.integers(1, 4), st.integers(1, 6), st.integers(0, 10**6))
def test_khatri_rao_block_structure(s, n, T, seed):
    rng = np.random.default_rng(seed)
    W0, X0 = rng.uniform(0, 1, (s, T)), rng.standard_normal((n, T))
    XW = khatri_rao(W0, X0)
    np.testing.assert_allclose(XW, scipy_khatri_rao(W0, X0), atol=1e-12)
    for i in range(s):
        np.testing.assert_allclose(XW[i * n:(i + 1) * n], W0[i] * X0, atol=1e-12)
    for t in range(T):
        np.testing.assert_allclose(XW[:, t], np.kron(W0[:, t], X0[:, t]), atol=1e-12)


def test_build_matrices_cases():
    traj = simulate(bm.sec5_system(), bm.SEC5_U0.T, bm.SEC5_X0, bm.SEC5_W0.T)
    D = build_matrices(traj)
    np.testing.assert_allclose(D.X0, bm.SEC5_X0_DATA, atol=5e-3)
    np.testing.assert_allclose(D.X1, bm.SEC5_X1_DATA, atol=5e-3)
    np.testing.assert_allclose(D.XW, bm.SEC5_XW_PRINTED, atol=5e-3)
    np.testing.assert_array_equal(D.X1[:, :-1], D.X0[:, 1:])
    one = build_matrices(simulate(bm.sec5_system(), [[0.5]], [1, 0], [[0.5, 0.5]]))
    assert one.U0.shape == (1, 1) and one.X0.shape == (2, 1) and one.XW.shape == (4, 1)


def test_collect_cases():
    D = collect(bm.sec5_system(), bm.SEC5_U0.T, bm.SEC5_W0.T, bm.SEC5_X0)
    np.testing.assert_allclose(D.XW, bm.SEC5_XW_PRINTED, atol=5e-3)
    Z = collect(bm.sec6_system(), np.zeros((4, 1)), sample_schedules(0, 2, 4), [0.0, 0.0])
    assert not Z.X0.any() and not Z.X1.any()
    assert collect(bm.sec6_system(), [[1.0]], sample_schedules(0, 2, 1), [1, 1]).T == 1


def test_data_matrices_validation():
    with pytest.raises(DimensionError):
        DataMatrices(U0=np.zeros((1, 3)), X0=np.zeros((2, 3)), X1=np.zeros((2, 2)), W0=np.ones((1, 3)))
    with pytest.raises(DimensionError):
        DataMatrices(U0=np.zeros((1, 2)), X0=np.zeros((2, 2)), X1=np.zeros((2, 2)), W0=np.ones((1, 2)),
                     XW=np.zeros((3, 2)))


def test_data_equation_holds_for_collected_data(rng):
    for _ in range(20):
        sys, D = random_data(rng, 3, 2, 3, 15)
        assert data_residual(D, sys) <= 1e-10


def test_assumption2_cases():
    assert check_assumption2(bm.sec5_data()).satisfied
    Z = DataMatrices(U0=np.ones((1, 6)), X0=np.zeros((2, 6)), X1=np.zeros((2, 6)), W0=np.full((2, 6), 0.5))
    rep = check_assumption2(Z)
    assert not rep.satisfied and rep.rank == 0
    rng = np.random.default_rng(0)
    _, short = random_data(rng, 2, 1, 2, 4)       # T = ns < ns + 1
    assert not check_assumption2(short).satisfied


def test_pe_cases():
    assert not check_pe(bm.sec5_data()).satisfied
    assert check_pe(bm.sec5_data()).required_T == 9
    assert required_samples(2, 1, 2) == 9
    rng = np.random.default_rng(1)
    sys = bm.sec6_system()
    D = collect(sys, rng.uniform(-1, 1, (12, 1)), sample_schedules(2, 2, 12), [1.0, -1.0])
    assert check_pe(D).satisfied
    Z = DataMatrices(U0=np.zeros((1, 12)), X0=D.X0, X1=D.X1, W0=D.W0)
    assert check_assumption2(Z).satisfied and not check_pe(Z).satisfied


def test_pe_implies_assumption2_on_random_datasets():
    rng = np.random.default_rng(2024)
    seen_pe = 0
    for k in range(100):
        n, m, s = (int(v) for v in rng.integers(1, 4, 3))
        T = int(rng.integers(1, required_samples(n, m, s) + 4))
        _, D = random_data(rng, n, m, s, T)
        if check_pe(D).satisfied:
            seen_pe += 1
            assert check_assumption2(D).satisfied
    assert seen_pe >= 10
