"""Small statistics helpers: Wilson intervals, Poisson goodness of fit, summation."""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np
from scipy import stats as sst


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    if trials < 1 or not 0 <= successes <= trials:
        raise ValueError("need 0 <= successes <= trials and trials >= 1")
    if not 0 < confidence < 1:
        raise ValueError("confidence must lie in (0, 1)")
    z = float(sst.norm.ppf(0.5 + confidence / 2))
    phat = successes / trials
    denom = 1 + z * z / trials
    centre = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    lo = 0.0 if successes == 0 else max(0.0, centre - half)
    hi = 1.0 if successes == trials else min(1.0, centre + half)
    return lo, hi


def stable_sum(values: Iterable[float]) -> float:
    """Correctly rounded sum; independent of the order values arrive in."""
    return math.fsum(values)


def stable_mean(values: Sequence[float]) -> float:
    return math.fsum(values) / len(values) if len(values) else float("nan")


def poisson_gof(samples: Sequence[int], lam: float, min_expected: float = 5.0) -> float:
    """Chi-square goodness-of-fit p-value of integer samples against Poisson(lam).

    Bins are the integers 0, 1, 2, ...; the left and right tails are merged
    until every bin expects at least ``min_expected`` counts. The last bin is
    the open tail ``[j, inf)`` so expected counts sum to the sample size.
    """
    x = np.asarray(samples, dtype=np.int64)
    if x.size < 100:
        raise ValueError("poisson_gof needs at least 100 samples")
    if lam <= 0:
        raise ValueError("lambda must be positive")
    if np.any(x < 0):
        raise ValueError("samples must be nonnegative")
    size = x.size
    top = int(max(x.max(), sst.poisson.ppf(1 - 1e-12, lam))) + 1
    observed = np.bincount(x, minlength=top + 1)[: top + 1].astype(np.float64)
    observed[top] = np.count_nonzero(x >= top)
    expected = sst.poisson.pmf(np.arange(top + 1), lam) * size
    expected[top] = sst.poisson.sf(top - 1, lam) * size

    obs_bins: list[float] = []
    exp_bins: list[float] = []
    acc_o = acc_e = 0.0
    for o, e in zip(observed, expected):
        acc_o += o
        acc_e += e
        if acc_e >= min_expected:
            obs_bins.append(acc_o)
            exp_bins.append(acc_e)
            acc_o = acc_e = 0.0
    if acc_e > 0 or acc_o > 0:
        if exp_bins:
            obs_bins[-1] += acc_o
            exp_bins[-1] += acc_e
        else:
            obs_bins.append(acc_o)
            exp_bins.append(acc_e)
    if len(exp_bins) < 2:
        raise ValueError("too few bins after merging; increase the sample size")
    o = np.asarray(obs_bins)
    e = np.asarray(exp_bins)
    chi2 = float(((o - e) ** 2 / e).sum())
    return float(sst.chi2.sf(chi2, len(exp_bins) - 1))
