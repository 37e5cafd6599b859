"""The numba kernels and their numpy twins must agree bit for bit."""

import numpy as np
import pytest

from limitlab import _kernels as K
from limitlab._accel import HAVE_NUMBA, backend, backend_name, set_backend
from limitlab.rng import RngStream

pytestmark = pytest.mark.skipif(not HAVE_NUMBA, reason="numba not importable")

KEY = RngStream(2024, 1).key


@pytest.mark.parametrize("n", [1, 2, 7, 31])
def test_samplers_agree(n):
    assert np.array_equal(K.lehmer_batch_nb(KEY, 5, 300, n), K.lehmer_batch_np(KEY, 5, 300, n))
    assert np.array_equal(K.bernoulli_batch_nb(KEY, 5, 300, n, 0.3), K.bernoulli_batch_np(KEY, 5, 300, n, 0.3))
    for k in {0, n // 2, n}:
        assert np.array_equal(K.fixed_k_batch_nb(KEY, 0, 300, n, k), K.fixed_k_batch_np(KEY, 0, 300, n, k))
    assert np.array_equal(K.continuous_batch_nb(KEY, 9, 300, n), K.continuous_batch_np(KEY, 9, 300, n))


@pytest.mark.parametrize("n", [3, 11, 53])
def test_counts_agree(n):
    x = K.bernoulli_batch_np(KEY, 0, 500, n, 0.5)
    assert np.array_equal(K.count_aps_batch_nb(x), K.count_aps_batch_np(x))
    w = K.continuous_batch_np(KEY, 0, 500, n)
    assert np.array_equal(K.count_aps_cont_batch_nb(w), K.count_aps_cont_batch_np(w))
    a = K.lehmer_batch_np(KEY, 0, 500, n)
    assert np.array_equal(K.descents_batch_nb(a), K.descents_batch_np(a))


def test_fused_monte_carlo_agrees():
    assert np.array_equal(K.mc_descents_nb(KEY, 3, 400, 25), K.descents_batch_np(K.lehmer_batch_np(KEY, 3, 400, 25)))
    assert np.array_equal(K.mc_aps_nb(KEY, 3, 400, 23, 0.4),
                          K.count_aps_batch_np(K.bernoulli_batch_np(KEY, 3, 400, 23, 0.4)))
    assert np.array_equal(K.mc_aps_fixed_k_nb(KEY, 3, 400, 23, 9),
                          K.count_aps_batch_np(K.fixed_k_batch_np(KEY, 3, 400, 23, 9)))
    assert np.array_equal(K.mc_aps_continuous_nb(KEY, 3, 400, 23),
                          K.count_aps_cont_batch_np(K.continuous_batch_np(KEY, 3, 400, 23)))


@pytest.mark.parametrize("n", [3, 5, 7, 11, 13])
def test_enumeration_agrees(n):
    assert np.array_equal(K.joint_hist_nb(n, 4), K.joint_hist_np(n))
    for k in range(n + 1):
        assert np.array_equal(K.fixed_k_hist_nb(n, k), K.fixed_k_hist_np(n, k))


@pytest.mark.parametrize("n,k", [(7, 3), (11, 5), (13, 1)])
def test_swap_totals_agree(n, k):
    from math import comb

    assert np.array_equal(K.swap_totals_nb(n, k, comb(n, k)), K.swap_totals_np(n, k))
    x = K.fixed_k_batch_np(KEY, 0, 50, n, k)
    assert np.array_equal(K.swap_totals_rows_nb(x), K.swap_totals_rows_np(x))


@pytest.mark.parametrize("n", [7, 13, 31])
def test_max_degree_agrees(n):
    assert np.array_equal(K.max_degree_nb(n), K.max_degree_np(n))


def test_backend_switch():
    before = backend_name()
    with backend("numpy"):
        assert backend_name() == "numpy"
    assert backend_name() == before
    with pytest.raises(ValueError):
        set_backend("fortran")


def test_env_flag_disables_numba():
    import subprocess
    import sys

    out = subprocess.run(
        [sys.executable, "-c", "from limitlab._accel import backend_name; print(backend_name())"],
        env={**__import__("os").environ, "LIMITLAB_DISABLE_NUMBA": "1"},
        capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "numpy"
