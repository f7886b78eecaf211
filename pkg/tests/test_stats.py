import math

import numpy as np
import pytest
from scipy import stats as sst

from ualab import rng
from ualab.stats import poisson_gof, stable_mean, stable_sum, wilson_interval


def _poisson_by_inversion(u: np.ndarray, lam: float) -> np.ndarray:
    out = np.zeros(u.size, dtype=np.int64)
    cdf = math.exp(-lam)
    pmf = cdf
    j = 0
    while True:
        rest = u >= cdf
        if not rest.any():
            return out
        out[rest] += 1
        j += 1
        pmf *= lam / j
        cdf += pmf


def test_wilson_examples():
    assert wilson_interval(0, 10)[0] == 0.0
    assert wilson_interval(10, 10)[1] == 1.0
    lo, hi = wilson_interval(50, 100)
    assert lo < 0.5 < hi
    assert hi - lo == pytest.approx(0.19, abs=0.005)
    # closed form: centre 0.5, half-width z sqrt(1/400 + z^2/40000) / (1 + z^2/100)
    z = sst.norm.ppf(0.975)
    half = z * math.sqrt(0.25 / 100 + z * z / 40000) / (1 + z * z / 100)
    assert (lo, hi) == pytest.approx((0.5 - half, 0.5 + half), abs=1e-14)


@pytest.mark.parametrize("bad", [(-1, 5), (6, 5), (1, 0)])
def test_wilson_domain(bad):
    with pytest.raises(ValueError):
        wilson_interval(*bad)


def test_gof_accepts_true_poisson():
    passes = 0
    for m in range(100):
        u = rng.uniforms(rng.bit_generator(rng.mix_seed(42, m)), 500)
        passes += poisson_gof(_poisson_by_inversion(u, 1.0), 1.0) > 0.01
    assert passes >= 95


def test_gof_rejects_constant():
    assert poisson_gof([3] * 200, 1.0) < 1e-6


def test_gof_guards():
    with pytest.raises(ValueError):
        poisson_gof([1] * 99, 1.0)
    with pytest.raises(ValueError):
        poisson_gof([1] * 200, 0.0)


def test_stable_sum_order_independent():
    vals = [1e16, 1.0, -1e16, 3.0] * 25
    assert stable_sum(vals) == stable_sum(vals[::-1]) == 100.0
    assert stable_mean([1.0, 2.0]) == 1.5
