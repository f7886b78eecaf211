"""Vertex expansion, conductance, and the expansion-rate root rho(k).

Conductance follows the normalisation

    Phi(S) = |cut(S)| * |E| / (d(S) * d(V - S)),

with d(.) a degree sum, which sits within a factor 2 below the more common
``|cut(S)| / min(d(S), d(V - S))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ualab.graph import AttachmentGraph, SimpleGraphView

EXHAUSTIVE_LIMIT = 24
# dense eigensolver below this size, Lanczos above
_DENSE_LIMIT = 600
_EIG_TOL = 1e-8
_EIG_MAXITER = 20_000


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class RhoSolution:
    k: int
    rho_k: float
    rho_star: float


@dataclass(frozen=True)
class ExpansionReport:
    rho_exact: float | None
    phi_exact: float | None
    phi_sweep: float
    spectral_gap: float

    def as_dict(self) -> dict:
        return {
            "rho_exact": self.rho_exact,
            "phi_exact": self.phi_exact,
            "phi_sweep": self.phi_sweep,
            "spectral_gap": self.spectral_gap,
        }


def _xlogx(x: float) -> float:
    return 0.0 if x == 0 else x * math.log(x)


def _check_rho(rho: float) -> None:
    if not 0 < rho < 1:
        raise ValueError(f"rho must lie in (0, 1), got {rho}")


def f_of_rho(rho: float) -> float:
    _check_rho(rho)
    return math.log(2) - 0.5 * (_xlogx(rho) + _xlogx(1 - rho))


def g_of_rho(rho: float) -> float:
    _check_rho(rho)
    return 0.5 * (1 + rho) * math.log1p(rho) - _xlogx(rho) - (1 - rho / 2) * math.log(2 - rho)


def _bisect(fn, lo: float, hi: float, tol: float = 1e-12) -> float:
    flo, fhi = fn(lo), fn(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise ArithmeticError(f"no sign change on [{lo}, {hi}]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = fn(mid)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def rho_star() -> float:
    """Root of g on (0, 1); g < 0 near 0 and g(1/2) > 0."""
    return _bisect(g_of_rho, 1e-9, 0.5)


def solve_rho(k: int) -> RhoSolution:
    if k < 2:
        raise ValueError("rho(k) is defined for k >= 2")
    star = rho_star()
    root = _bisect(lambda r: f_of_rho(r) + k * g_of_rho(r), 1e-9, star - 1e-9)
    return RhoSolution(k=k, rho_k=root, rho_star=star)


# -- exhaustive subset enumeration ---------------------------------------------


def _neighbor_masks(sv: SimpleGraphView) -> list[int]:
    masks = []
    for i in range(sv.n):
        m = 0
        for w in sv.neighbors0(i).tolist():
            m |= 1 << w
        masks.append(m)
    return masks


def _check_small(sv: SimpleGraphView) -> None:
    if not 2 <= sv.n <= EXHAUSTIVE_LIMIT:
        raise ValueError(f"exhaustive enumeration needs 2 <= n <= {EXHAUSTIVE_LIMIT}, got {sv.n}")


def vertex_expansion_exact(sv: SimpleGraphView) -> float:
    """min |N(X)|/|X| over nonempty X with |X| <= n/2, N(X) outside X."""
    _check_small(sv)
    n = sv.n
    nbr = _neighbor_masks(sv)
    size = 1 << n
    union = np.zeros(size, dtype=np.uint32)
    for i in range(n):
        lo = 1 << i
        np.bitwise_or(union[:lo], np.uint32(nbr[i]), out=union[lo : 2 * lo])
    masks = np.arange(size, dtype=np.uint32)
    card = np.bitwise_count(masks)
    boundary = np.bitwise_count(union & ~masks)
    ok = (card >= 1) & (card <= n // 2)
    ratio = boundary[ok] / card[ok]
    return float(ratio.min())


def _subset_sums(sv: SimpleGraphView) -> tuple[np.ndarray, np.ndarray]:
    """Degree sums and cut sizes for every S within vertices 0..n-2.

    The last vertex is always outside S; Phi(S) = Phi(V - S) covers the rest.
    """
    n = sv.n
    deg = sv.degrees.tolist()
    lower = []
    for i in range(n - 1):
        m = 0
        for w in sv.neighbors0(i).tolist():
            if w < i:
                m |= 1 << w
        lower.append(m)
    size = 1 << (n - 1)
    dsum = np.zeros(size, dtype=np.int64)
    inner = np.zeros(size, dtype=np.int64)
    masks = np.arange(size, dtype=np.uint32)
    for i in range(n - 1):
        lo = 1 << i
        dsum[lo : 2 * lo] = dsum[:lo] + deg[i]
        inner[lo : 2 * lo] = inner[:lo] + np.bitwise_count(masks[:lo] & np.uint32(lower[i]))
    return dsum[1:], (dsum - 2 * inner)[1:]


def conductance_exact(sv: SimpleGraphView) -> float:
    _check_small(sv)
    from ualab.structure import is_connected

    if not is_connected(sv):
        raise ValueError("conductance is defined here for connected graphs only")
    total = 2 * sv.edge_count
    dsum, cut = _subset_sums(sv)
    phi = cut * sv.edge_count / (dsum * (total - dsum)).astype(np.float64)
    return float(phi.min())


def standard_conductance_exact(sv: SimpleGraphView) -> float:
    """min |cut(S)| / min(d(S), d(V-S)); used to document the factor-2 relation."""
    _check_small(sv)
    total = 2 * sv.edge_count
    dsum, cut = _subset_sums(sv)
    return float((cut / np.minimum(dsum, total - dsum)).min())


# -- spectral sweep ----------------------------------------------------------


def lazy_second_eigenpair(sv: SimpleGraphView) -> tuple[float, np.ndarray]:
    """Second eigenvalue of (I + D^-1 A)/2 and its right eigenvector.

    Works on the similar symmetric matrix (I + D^-1/2 A D^-1/2)/2 with the
    top eigenvector sqrt(d) projected out.
    """
    n = sv.n
    deg = sv.degrees.astype(np.float64)
    if np.any(deg == 0):
        raise ValueError("isolated vertex: walk operator undefined")
    s = 1.0 / np.sqrt(deg)
    top = np.sqrt(deg) / math.sqrt(deg.sum())
    a = sv.to_scipy()
    if n <= _DENSE_LIMIT:
        m = 0.5 * (np.eye(n) + (a.toarray() * s[:, None]) * s[None, :])
        vals, vecs = np.linalg.eigh(m)
        lam, psi = float(vals[-2]), vecs[:, -2]
    else:
        from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

        def matvec(x):
            x = np.asarray(x).ravel()
            x = x - top * (top @ x)
            y = 0.5 * (x + s * (a @ (s * x)))
            return y - top * (top @ y)

        op = LinearOperator((n, n), matvec=matvec, dtype=np.float64)
        v0 = np.ones(n) + np.arange(n) / n
        try:
            vals, vecs = eigsh(op, k=1, which="LA", tol=_EIG_TOL, v0=v0, maxiter=_EIG_MAXITER)
        except ArpackNoConvergence as exc:
            raise ConvergenceError(f"Lanczos did not converge within {_EIG_MAXITER} iterations") from exc
        lam, psi = float(vals[0]), vecs[:, 0]
    return lam, psi * s


def sweep_profile(sv: SimpleGraphView, order: np.ndarray) -> np.ndarray:
    """Phi of every prefix of ``order`` (0-based vertex indices), n-1 values."""
    n = sv.n
    pos = np.empty(n, dtype=np.int64)
    pos[order] = np.arange(n)
    deg = sv.degrees
    rows = np.repeat(np.arange(n), deg)
    cols = sv.indices
    upper = rows < cols
    # edge is internal to prefix j once j exceeds both endpoint positions
    last = np.maximum(pos[rows[upper]], pos[cols[upper]])
    inner = np.cumsum(np.bincount(last, minlength=n))[: n - 1]
    dsum = np.cumsum(deg[order])[: n - 1]
    total = 2 * sv.edge_count
    cut = dsum - 2 * inner
    return cut * sv.edge_count / (dsum * (total - dsum)).astype(np.float64)


def conductance_sweep(sv: SimpleGraphView) -> tuple[float, float]:
    """Best prefix cut along the lazy-walk second eigenvector, and 1 - lambda_2."""
    if sv.n < 2:
        raise ValueError("sweep needs n >= 2")
    from ualab.structure import is_connected

    if not is_connected(sv):
        raise ValueError("sweep needs a connected graph")
    lam, f = lazy_second_eigenpair(sv)
    order = np.lexsort((np.arange(sv.n), f))
    return float(sweep_profile(sv, order).min()), 1.0 - lam


def expansion_report(sv: SimpleGraphView) -> ExpansionReport:
    small = sv.n <= EXHAUSTIVE_LIMIT
    phi_sweep, gap = conductance_sweep(sv)
    return ExpansionReport(
        rho_exact=vertex_expansion_exact(sv) if small else None,
        phi_exact=conductance_exact(sv) if small else None,
        phi_sweep=phi_sweep,
        spectral_gap=gap,
    )


@dataclass(frozen=True)
class DegreeSumCheck:
    holds: bool
    worst_s: int
    worst_ratio: float
    minimal_b: float


def degree_sum_bound_check(g: AttachmentGraph, b: float) -> DegreeSumCheck:
    """Test D(S) <= k|S| + b |S| (log(n/|S|) + 1) for every vertex set S.

    The largest D(S) at a given |S| = s comes from the s highest degrees, so
    prefix sums of the sorted degree sequence decide the quantifier exactly.
    ``worst_ratio`` is max_s P_s / bound_s; ``minimal_b`` the least b that
    would pass.
    """
    if b <= 0:
        raise ValueError("b must be positive")
    n, k = g.n, g.k
    deg = np.sort(g.simple.degrees)[::-1].astype(np.float64)
    prefix = np.cumsum(deg)
    s = np.arange(1, n + 1, dtype=np.float64)
    spread = s * (np.log(n / s) + 1.0)
    ratio = prefix / (k * s + b * spread)
    worst = int(np.argmax(ratio))
    minimal_b = float(max(0.0, ((prefix - k * s) / spread).max()))
    return DegreeSumCheck(
        holds=bool(ratio.max() <= 1.0),
        worst_s=worst + 1,
        worst_ratio=float(ratio[worst]),
        minimal_b=minimal_b,
    )
