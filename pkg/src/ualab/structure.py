"""Minimum degree, the special set, vertex connectivity, and diameter."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ualab.flow import disjoint_paths
from ualab.graph import AttachmentGraph, SimpleGraphView

INFINITE = math.inf

# all-source BFS is used up to this many vertices
EXACT_DIAMETER_LIMIT = 10_000
_HUBS = 64
_BFS_CHUNK = 256
# local growth neighbourhood used by the connectivity certificate
_BALL_RADIUS = 2
_BALL_CAP = 64


class DiameterBounds(NamedTuple):
    lower: int
    upper: int | None


@dataclass(frozen=True)
class StructureReport:
    min_degree: int
    special_set: list[int]
    connectivity: int | None
    diameter: int | float | DiameterBounds
    is_connected: bool

    def as_dict(self) -> dict:
        diam = self.diameter
        if isinstance(diam, DiameterBounds):
            diam = {"lower": diam.lower, "upper": diam.upper}
        elif diam == INFINITE:
            diam = "inf"
        return {
            "min_degree": self.min_degree,
            "special_set": list(self.special_set),
            "connectivity": self.connectivity,
            "diameter": diam,
            "is_connected": self.is_connected,
        }


def min_degree(sv: SimpleGraphView) -> int:
    return int(sv.degrees.min()) if sv.n > 0 else 0


def special_set(g: AttachmentGraph) -> list[int]:
    """Vertices with ``k-1`` distinct out-selections and no in-selector."""
    if g.k < 2:
        raise ValueError("the special set is defined for k >= 2")
    mask = (g.out_degrees == g.k - 1) & (g.in_degrees == 0)
    return (np.flatnonzero(mask) + 1).tolist()


def components(sv: SimpleGraphView) -> tuple[int, np.ndarray]:
    from scipy.sparse.csgraph import connected_components

    return connected_components(sv.to_scipy(), directed=False)


def is_connected(sv: SimpleGraphView) -> bool:
    if sv.n <= 1:
        return True
    return components(sv)[0] == 1


# -- vertex connectivity ---------------------------------------------------


def _local(adj, s: int, t: int, cutoff: int, allowed=None) -> int:
    return disjoint_paths(adj, s, frozenset((t,)), cutoff, allowed=allowed)


def _exact_connectivity(adj: list[list[int]], vertices: list[int], cutoff: int) -> int:
    """Connectivity of the subgraph induced on ``vertices``, capped at ``cutoff``.

    Fixes a minimum-degree vertex v; the answer is the least local
    connectivity over v versus its non-neighbours and over non-adjacent pairs
    of v's neighbours.
    """
    if len(vertices) < 2:
        raise ValueError("connectivity needs at least two vertices")
    n_all = len(adj)
    allowed = [False] * n_all
    for v in vertices:
        allowed[v] = True
    sub = {v: [w for w in adj[v] if allowed[w]] for v in vertices}
    v = min(vertices, key=lambda x: (len(sub[x]), x))
    best = min(cutoff, len(sub[v]), len(vertices) - 1)
    nbrs = set(sub[v])
    for w in vertices:
        if best == 0:
            return 0
        if w == v or w in nbrs:
            continue
        best = min(best, _local(adj, v, w, best, allowed))
    ordered = sorted(nbrs)
    for i, x in enumerate(ordered):
        xn = set(sub[x])
        for y in ordered[i + 1 :]:
            if best == 0:
                return 0
            if y not in xn:
                best = min(best, _local(adj, x, y, best, allowed))
    return best


def _core(adj: list[list[int]], vertices: list[int], c: int) -> list[int]:
    """Peel vertices of induced degree < c (the c-core)."""
    alive = set(vertices)
    deg = {v: sum(1 for w in adj[v] if w in alive) for v in vertices}
    queue = deque(v for v in vertices if deg[v] < c)
    while queue:
        v = queue.popleft()
        if v not in alive:
            continue
        alive.discard(v)
        for w in adj[v]:
            if w in alive:
                deg[w] -= 1
                if deg[w] < c:
                    queue.append(w)
    return sorted(alive)


def _certify(adj: list[list[int]], n: int, c: int) -> bool | None:
    """Try to prove c-connectivity of the whole graph.

    Returns True when certified, False when some vertex has no c-fan into the
    certified part (so a separator of size < c exists), and None when no
    small c-connected seed was found.

    Every growth step rests on one fact: if H induces a c-connected graph on
    at least c + 1 vertices and each vertex of C has c paths into H that are
    disjoint apart from their start and stay inside H | C, then H | C is
    c-connected too (fewer than c deletions leave every fan one path).
    The seed is the c-core of a few oldest vertices, verified by flows.
    """
    seed = None
    for m in (16, 32, 64, 128):
        m = min(m, n)
        core = _core(adj, list(range(m)), c)
        if len(core) >= c + 1 and _exact_connectivity(adj, core, c) >= c:
            seed = core
            break
        if m == n:
            break
    if seed is None:
        return None

    inside: set[int] = set()
    allowed = bytearray(n)
    count = [0] * n

    def absorb(vs):
        queue = deque(vs)
        while queue:
            v = queue.popleft()
            if v in inside:
                continue
            inside.add(v)
            allowed[v] = 1
            for w in adj[v]:
                if w not in inside:
                    count[w] += 1
                    if count[w] >= c:
                        queue.append(w)

    inside.update(seed)
    for v in seed:
        allowed[v] = 1
    absorb([w for v in seed for w in adj[v] if w not in inside and _bump(count, w) >= c])

    for x in range(n):
        if x in inside:
            continue
        cand = {x}
        frontier = [x]
        for _ in range(_BALL_RADIUS):
            nxt = []
            for v in frontier:
                for w in adj[v]:
                    if w not in inside and w not in cand and len(cand) < _BALL_CAP:
                        cand.add(w)
                        nxt.append(w)
            frontier = nxt
        for v in cand:
            allowed[v] = 1
        changed = True
        while changed and cand:
            changed = False
            for v in sorted(cand):
                if disjoint_paths(adj, v, inside, c, fan=True, allowed=allowed) < c:
                    cand.discard(v)
                    allowed[v] = 0
                    changed = True
        for v in cand:
            allowed[v] = 0
        if cand:
            absorb(sorted(cand))

    for x in range(n):
        if x not in inside and disjoint_paths(adj, x, inside, c, fan=True) < c:
            return False
    return True


def _bump(count: list[int], w: int) -> int:
    count[w] += 1
    return count[w]


def vertex_connectivity(sv: SimpleGraphView, method: str = "auto") -> int:
    """Exact vertex connectivity of the simple graph.

    ``method="flow"`` always runs the pairwise max-flow scan; ``"auto"`` first
    tries to certify connectivity equal to the minimum degree, falling back to
    the scan whenever the certificate is unavailable or refuted.
    """
    n = sv.n
    if n < 2:
        raise ValueError("vertex connectivity needs n >= 2")
    if sv.edge_count == n * (n - 1) // 2:
        return n - 1
    delta = min_degree(sv)
    if delta == 0 or not is_connected(sv):
        return 0
    adj = sv.adjacency_lists()
    if method == "auto" and n > 64:
        verdict = _certify(adj, n, delta)
        if verdict:
            return delta
        cutoff = delta - 1 if verdict is False else delta
        return _exact_connectivity(adj, list(range(n)), cutoff)
    if method not in ("auto", "flow"):
        raise ValueError(f"unknown method {method!r}")
    return _exact_connectivity(adj, list(range(n)), delta)


# -- diameter --------------------------------------------------------------


def _eccentricities(csr, sources: np.ndarray) -> np.ndarray:
    from scipy.sparse.csgraph import shortest_path

    out = np.empty(sources.size)
    for lo in range(0, sources.size, _BFS_CHUNK):
        chunk = sources[lo : lo + _BFS_CHUNK]
        dist = shortest_path(csr, unweighted=True, directed=False, indices=chunk)
        out[lo : lo + chunk.size] = dist.max(axis=1)
    return out


def _bfs_far(csr, source: int) -> tuple[int, int]:
    from scipy.sparse.csgraph import shortest_path

    dist = shortest_path(csr, unweighted=True, directed=False, indices=[source])[0]
    far = int(np.argmax(dist))
    return far, int(dist[far])


def diameter(sv: SimpleGraphView, *, exact_limit: int = EXACT_DIAMETER_LIMIT, with_upper: bool = False):
    """Diameter of the simple graph.

    Exact (all-source BFS) for ``n <= exact_limit``; ``math.inf`` when
    disconnected. Larger graphs get :class:`DiameterBounds`: the lower end is
    the best double-sweep / hub eccentricity, the upper end ``2 * min ecc``
    over the 64 highest-degree vertices, filled only when ``with_upper``.
    """
    n = sv.n
    if n <= 1:
        return 0
    if not is_connected(sv):
        return INFINITE
    csr = sv.to_scipy()
    if n <= exact_limit:
        return int(_eccentricities(csr, np.arange(n)).max())
    a, _ = _bfs_far(csr, int(np.argmax(sv.degrees)))
    b, lower = _bfs_far(csr, a)
    _, lower2 = _bfs_far(csr, b)
    lower = max(lower, lower2)
    upper = None
    if with_upper:
        hubs = np.argsort(-sv.degrees, kind="stable")[:_HUBS]
        ecc = _eccentricities(csr, hubs)
        lower = max(lower, int(ecc.max()))
        upper = int(2 * ecc.min())
    return DiameterBounds(lower, upper)


def structure_report(g: AttachmentGraph, *, with_connectivity: bool = True) -> StructureReport:
    sv = g.simple
    conn = vertex_connectivity(sv) if with_connectivity and g.n >= 2 else None
    return StructureReport(
        min_degree=min_degree(sv),
        special_set=special_set(g) if g.k >= 2 else [],
        connectivity=conn,
        diameter=diameter(sv),
        is_connected=is_connected(sv),
    )
