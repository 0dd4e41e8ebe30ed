import os
import subprocess
import sys

import numpy as np
import pytest

from prodbg import _kernels as K

pytestmark = pytest.mark.skipif(not K.HAVE_NUMBA, reason="numba not installed")

rng = np.random.default_rng(7)


def test_spectrum_counts_agree():
    cov = rng.random((40, 25)) < 0.4
    failed = rng.random(40) < 0.3
    a = K.numpy_impl.spectrum_counts(cov, failed)
    b = K.numba_impl.spectrum_counts(cov, failed)
    for x, y in zip(a, b):
        assert np.array_equal(x, y)


@pytest.mark.parametrize("formula", K.FORMULAS)
def test_formula_scores_agree(formula):
    ep, ef, np_, nf = (rng.integers(0, 6, 500) for _ in range(4))
    code = K.FORMULA_CODE[formula]
    a = K.numpy_impl.formula_scores(ep, ef, np_, nf, code)
    b = K.numba_impl.formula_scores(ep, ef, np_, nf, code)
    np.testing.assert_allclose(a, b, rtol=0, atol=1e-12)


def test_mutant_kernels_agree():
    kill = rng.random((60, 12)) < 0.3
    failed = rng.random(12) < 0.4
    kf, kp = K.numpy_impl.kill_stats(kill, failed)
    kf2, kp2 = K.numba_impl.kill_stats(kill, failed)
    assert np.array_equal(kf, kf2) and np.array_equal(kp, kp2)
    origin = rng.integers(0, 8, 60)
    nf = int(failed.sum())
    np.testing.assert_allclose(K.numpy_impl.metallaxis(kf, kp, origin, 9, nf),
                               K.numba_impl.metallaxis(kf, kp, origin, 9, nf), atol=1e-12)
    np.testing.assert_allclose(K.numpy_impl.muse(kf, kp, origin, 9, nf, 12 - nf),
                               K.numba_impl.muse(kf, kp, origin, 9, nf, 12 - nf), atol=1e-12)


def test_min_ranks_agree():
    pos = np.array([rng.permutation(10) + 1 for _ in range(30)])
    truth = rng.random((30, 10)) < 0.2
    truth[:, 0] = True
    assert np.array_equal(K.numpy_impl.min_ranks(pos, truth), K.numba_impl.min_ranks(pos, truth))


def test_empty_inputs():
    for impl in (K.numpy_impl, K.numba_impl):
        kf, kp = impl.kill_stats(np.zeros((0, 3), dtype=bool), np.zeros(3, dtype=bool))
        assert len(kf) == len(kp) == 0
        assert impl.metallaxis(kf, kp, np.zeros(0, dtype=np.int64), 4, 1).tolist() == [0.0] * 4


def test_unknown_formula():
    with pytest.raises(ValueError):
        K.formula_scores([0], [0], [0], [0], "nope")


@pytest.mark.parametrize("flag, expected", [("1", "numpy"), ("0", "numba")])
def test_env_flag_selects_backend(flag, expected):
    env = dict(os.environ, PRODBG_DISABLE_JIT=flag)
    out = subprocess.run([sys.executable, "-c", "from prodbg import _kernels; print(_kernels.backend_name())"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == expected
