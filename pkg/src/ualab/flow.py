"""Vertex-disjoint path counting by unit-capacity augmenting paths.

Each vertex ``v`` is split into ``in(v) -> out(v)`` with capacity one; every
undirected edge ``{u, w}`` becomes the arcs ``out(u) -> in(w)`` and
``out(w) -> in(u)``. The residual graph is never materialised: BFS walks the
adjacency lists and consults the two sets of saturated arcs.
"""

from __future__ import annotations

from collections import deque
from typing import Sequence


def disjoint_paths(
    adj: Sequence[Sequence[int]],
    source: int,
    targets: set[int] | frozenset[int],
    cutoff: int,
    *,
    fan: bool = False,
    allowed: Sequence[bool] | None = None,
) -> int:
    """Count internally vertex-disjoint paths from ``source`` to ``targets``.

    With ``fan=False`` ``targets`` holds a single vertex that may absorb any
    number of paths (local connectivity). With ``fan=True`` every target absorbs
    at most one path and targets are terminal, which counts a fan. Counting
    stops at ``cutoff``. ``allowed`` restricts the walk to an induced subgraph.
    Vertices are 0-based indices into ``adj``.
    """
    through: set[int] = set()  # v with in(v)->out(v) saturated
    used: set[tuple[int, int]] = set()  # (u, w) with out(u)->in(w) saturated
    into: dict[int, list[int]] = {}  # w -> [u] for saturated (u, w)
    absorbed: set[int] = set()
    paths = 0
    while paths < cutoff:
        # node encoding: 2v = in(v), 2v+1 = out(v)
        start = 2 * source + 1
        parent = {start: None, 2 * source: None}
        queue = deque([start])
        hit = None
        while queue and hit is None:
            a = queue.popleft()
            v = a >> 1
            if a & 1:
                for w in adj[v]:
                    b = 2 * w
                    if b in parent or (v, w) in used:
                        continue
                    if allowed is not None and not allowed[w]:
                        continue
                    parent[b] = a
                    if w in targets and (not fan or w not in absorbed):
                        hit = b
                        break
                    queue.append(b)
                if hit is None and v in through and v != source:
                    b = 2 * v
                    if b not in parent:
                        parent[b] = a
                        queue.append(b)
            else:
                b = a + 1
                if v not in targets and v not in through and b not in parent:
                    parent[b] = a
                    queue.append(b)
                for u in into.get(v, ()):
                    b = 2 * u + 1
                    if b not in parent:
                        parent[b] = a
                        queue.append(b)
        if hit is None:
            break
        paths += 1
        if fan:
            absorbed.add(hit >> 1)
        b = hit
        while parent[b] is not None:
            a = parent[b]
            u, w = a >> 1, b >> 1
            if a & 1 and not b & 1:
                if u == w:  # reverse of in(u)->out(u)
                    through.discard(u)
                else:
                    used.add((u, w))
                    into.setdefault(w, []).append(u)
            elif not a & 1 and b & 1:
                if u == w:
                    through.add(u)
                else:  # reverse of out(w)->in(u)
                    used.discard((w, u))
                    into[u].remove(w)
            b = a
    return paths
