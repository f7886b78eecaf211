"""Exact distributions of the simple random walk on the simple view."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from ualab.graph import SimpleGraphView

# refuse exact iteration beyond this many (steps * arcs)
MAX_WORK = 5 * 10**9


class WalkBudgetError(RuntimeError):
    pass


@dataclass(frozen=True)
class WalkState:
    distribution: np.ndarray
    step: int
    lazy: bool


@dataclass(frozen=True)
class StationaryDistribution:
    pi: np.ndarray


def stationary(sv: SimpleGraphView) -> StationaryDistribution:
    if sv.edge_count == 0:
        raise ValueError("stationary distribution needs at least one edge")
    return StationaryDistribution(sv.degrees / (2.0 * sv.edge_count))


def transition_matrix(sv: SimpleGraphView, lazy: bool = False):
    """Sparse row-stochastic P (or (I + P)/2), rows indexed by ``label - 1``."""
    from scipy.sparse import diags, identity

    deg = sv.degrees.astype(np.float64)
    if np.any(deg == 0):
        raise ValueError("isolated vertex: walk undefined")
    p = diags(1.0 / deg) @ sv.to_scipy()
    if lazy:
        p = 0.5 * (identity(sv.n, format="csr") + p)
    return p.tocsr()


def step_distribution(sv: SimpleGraphView, start: int, t: int, lazy: bool) -> WalkState:
    """Distribution after ``t`` exact steps from vertex ``start`` (1-based)."""
    if not 1 <= start <= sv.n:
        raise ValueError(f"start vertex {start} outside [1, {sv.n}]")
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t * (2 * sv.edge_count + sv.n) > MAX_WORK:
        raise WalkBudgetError(f"t={t} exceeds the exact-iteration budget")
    from ualab.structure import is_connected

    if not is_connected(sv):
        raise ValueError("walk distributions are computed on connected graphs")
    x = np.zeros(sv.n)
    x[start - 1] = 1.0
    if t:
        pt = transition_matrix(sv, lazy).T.tocsr()
        for _ in range(t):
            x = pt @ x
    return WalkState(x, t, lazy)


def tv_distance(p, q, tol: float = 1e-9) -> float:
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise ValueError("length mismatch")
    if abs(p.sum() - 1) > tol or abs(q.sum() - 1) > tol:
        raise ValueError("inputs must be probability vectors")
    return 0.5 * float(np.abs(p - q).sum())


def sinclair_jerrum_bound(pi_i: float, pi_j: float, phi: float, t: int) -> float:
    """sqrt(pi_j / pi_i) * (1 - phi**2 / 8)**t."""
    if not (0 < pi_i <= 1 and 0 < pi_j <= 1):
        raise ValueError("stationary masses must lie in (0, 1]")
    if not 0 <= phi <= 1:
        raise ValueError("phi must lie in [0, 1]")
    if t < 0:
        raise ValueError("t must be nonnegative")
    return math.sqrt(pi_j / pi_i) * (1.0 - phi * phi / 8.0) ** t


@dataclass(frozen=True)
class ProfileRow:
    t: int
    max_dev: float
    bound: float


def mixing_profile(sv: SimpleGraphView, start: int, t_max: int, phi: float, lazy: bool = True) -> list[ProfileRow]:
    """Per-step max_j |P^t(j|start) - pi(j)| next to the bound max_j of its right side.

    The bound column is the largest right-hand side over j, so a row satisfies
    the inequality for every j only if each j is checked; :func:`bound_violations`
    does the per-j comparison.
    """
    pi = stationary(sv).pi
    pi_i = float(pi[start - 1])
    x = step_distribution(sv, start, 0, lazy).distribution
    pt = transition_matrix(sv, lazy).T.tocsr()
    scale = np.sqrt(pi / pi_i)
    rows = []
    for t in range(t_max + 1):
        if t:
            x = pt @ x
        decay = (1.0 - phi * phi / 8.0) ** t
        rows.append(ProfileRow(t, float(np.abs(x - pi).max()), float(scale.max() * decay)))
    return rows


def bound_violations(sv: SimpleGraphView, phi: float, t_max: int, lazy: bool = True, slack: float = 1e-12) -> list[tuple[int, int, int]]:
    """All (t, i, j) with |P^t(j|i) - pi(j)| > bound, over every start i.

    Dense matrix powers; intended for small graphs.
    """
    pi = stationary(sv).pi
    p = transition_matrix(sv, lazy).toarray()
    n = sv.n
    scale = np.sqrt(pi[None, :] / pi[:, None])
    cur = np.eye(n)
    q = 1.0 - phi * phi / 8.0
    out = []
    for t in range(t_max + 1):
        if t:
            cur = cur @ p
        dev = np.abs(cur - pi[None, :])
        bad = np.argwhere(dev > scale * q**t + slack)
        out.extend((t, int(i) + 1, int(j) + 1) for i, j in bad)
    return out


def profile_csv(rows: list[ProfileRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "max_dev", "bound"])
    for r in rows:
        w.writerow([r.t, f"{r.max_dev:.17g}", f"{r.bound:.17g}"])
    return buf.getvalue()
