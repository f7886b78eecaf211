"""Closed-form probabilities and tail bounds used as Monte Carlo oracles."""

from __future__ import annotations

import math
from dataclasses import dataclass

# below this, exp() of a log-probability is zero in double precision
_LOG_FLOOR = -745.2


@dataclass(frozen=True)
class BoundParams:
    mu: float
    t: float = 1.0
    epsilon: float = 1.0

    def __post_init__(self):
        if self.mu < 0:
            raise ValueError("mu must be nonnegative")
        if self.t <= 0:
            raise ValueError("t must be positive")
        if not 0 < self.epsilon <= 1.5:
            raise ValueError("epsilon must lie in (0, 3/2]")


def _exp(logv: float) -> float:
    return 0.0 if logv < _LOG_FLOOR else math.exp(logv)


def falling_factorial(m: int, j: int) -> int:
    """(m)_j = m (m-1) ... (m-j+1), exact."""
    out = 1
    for i in range(j):
        f = m - i
        if f == 0:
            return 0
        out *= f
    return out


def prob_in_degree_zero(x: int, n: int, k: int) -> float:
    """P(no later vertex selects x) = ((x-1)/(n-1))**k."""
    if n < 2:
        raise ValueError("need n >= 2")
    if not 1 <= x <= n:
        raise ValueError(f"vertex {x} outside [1, {n}]")
    if k < 1:
        raise ValueError("need k >= 1")
    if x == 1:
        return 0.0
    return _exp(k * (math.log(x - 1) - math.log(n - 1)))


def prob_out_degree_k_minus_1(x: int, k: int) -> float:
    """P(exactly one repeated pair among x's k selections) = C(k,2) (x-1)_{k-1} / (x-1)**k."""
    if k < 2:
        raise ValueError("need k >= 2")
    if x < k:
        raise ValueError(f"need x >= k (x={x}, k={k})")
    ff = falling_factorial(x - 1, k - 1)
    if ff == 0:
        return 0.0
    logv = math.log(math.comb(k, 2)) + math.log(ff) - k * math.log(x - 1)
    return _exp(logv)


def chernoff_lower(mu: float, t: float) -> float:
    """Bound on P(X <= mu - t) for a Bernoulli sum with mean mu."""
    if mu <= 0 or t <= 0:
        raise ValueError("mu and t must be positive")
    return _exp(-t * t / (2.0 * mu))


def chernoff_two_sided(mu: float, epsilon: float) -> float:
    """Bound on P(|X - mu| >= epsilon mu)."""
    if mu <= 0:
        raise ValueError("mu must be positive")
    if not 0 < epsilon <= 1.5:
        raise ValueError("epsilon must lie in (0, 3/2]")
    return 2.0 * _exp(-epsilon * epsilon * mu / 3.0)


def geometric_degree_fraction(j: int, k: int) -> float:
    """Limiting fraction of vertices with total degree k + j."""
    if j < 0 or k < 1:
        raise ValueError("need j >= 0 and k >= 1")
    return _exp(j * math.log(k / (k + 1)) - math.log(k + 1))
