"""Compiled episode engine vs the pure-Python fallback: the two paths must
produce bit-identical traces, and the selection switch must work."""

import os
import subprocess
import sys

import numpy as np
import pytest

from olpce import _episode_py, kernel
from olpce.distributions import (
    GapMultisecretary,
    MultisecretaryBeta,
    TwoPointConsumption,
    UnitSquareShifted,
)
from olpce.seeding import make_rng

FAST = [
    MultisecretaryBeta(0.0),
    MultisecretaryBeta(2.5),
    GapMultisecretary(),
    TwoPointConsumption(),
    UnitSquareShifted(),
]


def test_compiled_engine_is_active_by_default():
    if os.environ.get("OLPCE_PURE_PYTHON"):
        pytest.skip("fallback forced via environment")
    assert kernel.IS_COMPILED


@pytest.mark.parametrize("dist", FAST, ids=lambda d: d.kind + str(getattr(d, "beta", "")))
@pytest.mark.parametrize("b_frac", [0.1, 0.5, 0.9])
def test_ce_traces_bit_identical(dist, b_frac):
    code = kernel.FAST_KINDS[dist.kind]
    beta = float(getattr(dist, "beta", 0.0))
    T = 400
    b0 = b_frac * T
    results = []
    for eng in (kernel, _episode_py):
        rng = make_rng(99)
        A, R = dist.sample_batch(T, rng)
        thresholds = np.empty(T)
        accepted = np.zeros(T, dtype=np.uint8)
        b_path = np.empty(T)
        total = eng.run_ce_m1(code, beta, b0, T, np.ascontiguousarray(A[:, 0]), R,
                              thresholds, accepted, b_path)
        results.append((total, thresholds.copy(), accepted.copy(), b_path.copy()))
    (t1, th1, ac1, bp1), (t2, th2, ac2, bp2) = results
    assert t1 == t2  # exact float equality, not approx
    assert np.array_equal(th1, th2)
    assert np.array_equal(ac1, ac2)
    assert np.array_equal(bp1, bp2)


@pytest.mark.parametrize("lam", [0.0, 0.3, 0.75])
def test_threshold_traces_bit_identical(lam):
    dist = GapMultisecretary()
    T = 300
    results = []
    for eng in (kernel, _episode_py):
        rng = make_rng(7)
        A, R = dist.sample_batch(T, rng)
        thresholds = np.empty(T)
        accepted = np.zeros(T, dtype=np.uint8)
        b_path = np.empty(T)
        total = eng.run_threshold_m1(lam, 40.0, T, np.ascontiguousarray(A[:, 0]), R,
                                     thresholds, accepted, b_path)
        results.append((total, thresholds.copy(), accepted.copy(), b_path.copy()))
    (t1, th1, ac1, bp1), (t2, th2, ac2, bp2) = results
    assert t1 == t2
    assert np.array_equal(th1, th2) and np.array_equal(ac1, ac2)
    assert np.array_equal(bp1, bp2)


@pytest.mark.parametrize("dist", FAST, ids=lambda d: d.kind + str(getattr(d, "beta", "")))
def test_price_functions_bit_identical(dist):
    code = kernel.FAST_KINDS[dist.kind]
    beta = float(getattr(dist, "beta", 0.0))
    for d in np.linspace(-0.5, 3.5, 257):
        assert kernel.price(code, float(d), beta) == _episode_py.price(code, float(d), beta)


@pytest.mark.parametrize("dist", FAST, ids=lambda d: d.kind + str(getattr(d, "beta", "")))
def test_engine_price_matches_distribution_price(dist):
    code = kernel.FAST_KINDS[dist.kind]
    beta = float(getattr(dist, "beta", 0.0))
    for d in np.linspace(0.01, 3.0, 41):
        assert kernel.price(code, float(d), beta) == pytest.approx(
            dist.dual_price(float(d)), abs=1e-9
        )


def test_env_var_forces_pure_python():
    script = (
        "import olpce.kernel as k, olpce._episode_py as p; "
        "assert k.engine is p, 'fallback not selected'; "
        "assert not k.IS_COMPILED"
    )
    env = dict(os.environ, OLPCE_PURE_PYTHON="1")
    res = subprocess.run([sys.executable, "-c", script], env=env,
                         capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
