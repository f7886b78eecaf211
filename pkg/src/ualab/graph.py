"""Uniform attachment graphs G(n, k).

Vertex ``u`` in ``2..n`` makes ``k`` independent uniform selections from
``1..u-1``. The raw selections are the ground truth; the simple undirected
graph (loops impossible, multi-edges collapsed) and the directed version
(edges oriented toward the older endpoint) are derived from them.

Vertex labels are 1-based everywhere in the public API. Array-valued
attributes are indexed by ``label - 1``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

import numpy as np

from ualab import rng


class GraphFormatError(ValueError):
    """Raised by :func:`deserialize`; ``line`` is the 1-based offending line."""

    reason = "malformed input"

    def __init__(self, line: int, detail: str = ""):
        self.line = line
        msg = f"line {line}: {self.reason}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class MalformedHeaderError(GraphFormatError):
    reason = "malformed header"


class MalformedLineError(GraphFormatError):
    reason = "malformed selection line"


class SelectionOutOfRangeError(GraphFormatError):
    reason = "selection out of range"


class WrongListLengthError(GraphFormatError):
    reason = "wrong selection count"


@dataclass(frozen=True)
class DegreeRecord:
    vertex: int
    d_out: int
    d_in: int
    degree: int


class SimpleGraphView:
    """Immutable simple undirected graph on vertices ``1..n`` in CSR form.

    ``indptr``/``indices`` are 0-based (row ``v-1`` lists neighbors as
    ``w-1``), neighbor rows are sorted ascending.
    """

    __slots__ = ("n", "indptr", "indices", "edge_count", "_degrees")

    def __init__(self, n: int, indptr: np.ndarray, indices: np.ndarray):
        self.n = int(n)
        self.indptr = indptr
        self.indices = indices
        self.indptr.setflags(write=False)
        self.indices.setflags(write=False)
        self.edge_count = int(indices.size // 2)
        self._degrees = np.diff(indptr)
        self._degrees.setflags(write=False)

    @classmethod
    def from_pairs0(cls, n: int, lo: np.ndarray, hi: np.ndarray) -> "SimpleGraphView":
        """Build from 0-based distinct pairs with ``lo < hi``."""
        rows = np.concatenate([lo, hi]).astype(np.int64, copy=False)
        cols = np.concatenate([hi, lo]).astype(np.int64, copy=False)
        keys = np.sort(rows * n + cols)
        rows, cols = np.divmod(keys, n)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
        return cls(n, indptr, cols)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "SimpleGraphView":
        """Build from 1-based edges; repeated edges collapse, loops are rejected."""
        arr = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        if arr.size and (arr.min() < 1 or arr.max() > n):
            raise ValueError("edge endpoint out of range")
        if np.any(arr[:, 0] == arr[:, 1]):
            raise ValueError("self-loops are not allowed in a simple graph")
        lo = np.minimum(arr[:, 0], arr[:, 1]) - 1
        hi = np.maximum(arr[:, 0], arr[:, 1]) - 1
        keys = np.unique(hi * n + lo)
        return cls.from_pairs0(n, keys % n, keys // n)

    @property
    def degrees(self) -> np.ndarray:
        """Degree array indexed by ``label - 1``."""
        return self._degrees

    def degree(self, v: int) -> int:
        return int(self._degrees[v - 1])

    def neighbors0(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i] : self.indptr[i + 1]]

    def adjacency(self, v: int) -> list[int]:
        """Sorted neighbor labels of vertex ``v``."""
        return (self.neighbors0(v - 1) + 1).tolist()

    def has_edge(self, u: int, v: int) -> bool:
        row = self.neighbors0(u - 1)
        j = np.searchsorted(row, v - 1)
        return bool(j < row.size and row[j] == v - 1)

    def edges(self) -> list[tuple[int, int]]:
        """Edges as sorted 1-based pairs ``(u, v)`` with ``u < v``."""
        rows = np.repeat(np.arange(self.n), self._degrees)
        mask = rows < self.indices
        return list(zip((rows[mask] + 1).tolist(), (self.indices[mask] + 1).tolist()))

    def adjacency_lists(self) -> list[list[int]]:
        """0-based neighbor lists; handy for pure-Python traversals."""
        ind = self.indices.tolist()
        ptr = self.indptr.tolist()
        return [ind[ptr[i] : ptr[i + 1]] for i in range(self.n)]

    def to_scipy(self):
        from scipy.sparse import csr_array

        data = np.ones(self.indices.size, dtype=np.float64)
        return csr_array((data, self.indices, self.indptr), shape=(self.n, self.n))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SimpleGraphView):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
        )

    def __repr__(self) -> str:
        return f"SimpleGraphView(n={self.n}, edges={self.edge_count})"


@dataclass(frozen=True, eq=False)
class AttachmentGraph:
    """Raw selections of G(n, k); row ``u-2`` of ``selections`` belongs to vertex ``u``."""

    n: int
    k: int
    seed: int
    selections: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.n < 1 or self.k < 1:
            raise ValueError("n and k must be positive")
        sel = np.asarray(self.selections, dtype=np.int64).reshape(self.n - 1, self.k)
        if sel.size:
            owner = np.arange(2, self.n + 1)[:, None]
            if sel.min() < 1 or np.any(sel >= owner):
                raise ValueError("every selection of vertex u must lie in [1, u-1]")
        sel.setflags(write=False)
        object.__setattr__(self, "selections", sel)

    def selections_of(self, u: int) -> list[int]:
        if u == 1:
            return []
        return self.selections[u - 2].tolist()

    @cached_property
    def _distinct_pairs0(self) -> tuple[np.ndarray, np.ndarray]:
        # (selector, selected), 0-based, selector > selected, distinct
        if self.n == 1:
            empty = np.zeros(0, dtype=np.int64)
            return empty, empty
        src = np.repeat(np.arange(1, self.n, dtype=np.int64), self.k)
        keys = np.unique(src * self.n + (self.selections.ravel() - 1))
        return keys // self.n, keys % self.n

    @property
    def duplicates(self) -> int:
        """Number of selections repeating an earlier selection of the same vertex."""
        return (self.n - 1) * self.k - self._distinct_pairs0[0].size

    @cached_property
    def simple(self) -> SimpleGraphView:
        src, dst = self._distinct_pairs0
        return SimpleGraphView.from_pairs0(self.n, dst, src)

    @cached_property
    def out_degrees(self) -> np.ndarray:
        """Distinct out-selections per vertex (index ``label - 1``)."""
        return np.bincount(self._distinct_pairs0[0], minlength=self.n)

    @cached_property
    def in_degrees(self) -> np.ndarray:
        """Distinct in-selectors per vertex (index ``label - 1``)."""
        return np.bincount(self._distinct_pairs0[1], minlength=self.n)

    def out_neighbors(self, v: int) -> list[int]:
        return sorted(set(self.selections_of(v)))

    def in_neighbors(self, v: int) -> list[int]:
        src, dst = self._distinct_pairs0
        return (src[dst == v - 1] + 1).tolist()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AttachmentGraph):
            return NotImplemented
        return (
            (self.n, self.k, self.seed) == (other.n, other.k, other.seed)
            and np.array_equal(self.selections, other.selections)
        )

    __hash__ = None


def generate(n: int, k: int, seed: int) -> AttachmentGraph:
    """Draw G(n, k) from a PCG64 stream seeded with ``seed``.

    Selections are consumed in generation order: vertex 2's k choices, then
    vertex 3's, and so on, one 64-bit word per choice.
    """
    if n < 1 or k < 1:
        raise ValueError(f"n and k must be positive (got n={n}, k={k})")
    seed = rng.check_seed(seed)
    m = (n - 1) * k
    if m == 0:
        return AttachmentGraph(n, k, seed, np.zeros((0, k), dtype=np.int64))
    words = rng.raw_words(rng.bit_generator(seed), m)
    bounds = np.repeat(np.arange(1, n, dtype=np.uint64), k)
    sel = rng.bounded(words, bounds).astype(np.int64) + 1
    return AttachmentGraph(n, k, seed, sel.reshape(n - 1, k))


def simple_view(g: AttachmentGraph) -> SimpleGraphView:
    return g.simple


def degree_records(g: AttachmentGraph) -> list[DegreeRecord]:
    d_out = g.out_degrees.tolist()
    d_in = g.in_degrees.tolist()
    return [DegreeRecord(v + 1, d_out[v], d_in[v], d_out[v] + d_in[v]) for v in range(g.n)]


def serialize(g: AttachmentGraph) -> bytes:
    lines = [f"ua {g.n} {g.k} {g.seed}"]
    for u, row in enumerate(g.selections.tolist(), start=2):
        lines.append(f"{u}: " + " ".join(map(str, row)))
    return ("\n".join(lines) + "\n").encode("utf-8")


_HEADER = re.compile(r"ua ([1-9][0-9]*) ([1-9][0-9]*) (0|[1-9][0-9]*)")
_LINE = re.compile(r"([1-9][0-9]*):((?: [0-9]+)*)")


def deserialize(data: bytes | str) -> AttachmentGraph:
    text = data.decode("utf-8") if isinstance(data, (bytes, bytearray)) else data
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise MalformedHeaderError(1, "empty input")
    m = _HEADER.fullmatch(lines[0])
    if m is None:
        raise MalformedHeaderError(1, repr(lines[0]))
    n, k, seed = (int(x) for x in m.groups())
    if seed >= 1 << 64:
        raise MalformedHeaderError(1, "seed exceeds 64 bits")
    if len(lines) != n:
        where = min(len(lines), n) + 1 if len(lines) < n else n + 1
        raise MalformedLineError(where, f"expected {n - 1} selection lines, got {len(lines) - 1}")
    sel = np.zeros((n - 1, k), dtype=np.int64)
    for u in range(2, n + 1):
        lineno = u
        lm = _LINE.fullmatch(lines[u - 1])
        if lm is None:
            raise MalformedLineError(lineno, repr(lines[u - 1]))
        if int(lm.group(1)) != u:
            raise MalformedLineError(lineno, f"expected vertex {u}")
        vals = [int(x) for x in lm.group(2).split()]
        if len(vals) != k:
            raise WrongListLengthError(lineno, f"expected {k}, got {len(vals)}")
        if any(v < 1 or v >= u for v in vals):
            raise SelectionOutOfRangeError(lineno, f"selections of {u} must lie in [1, {u - 1}]")
        sel[u - 2] = vals
    return AttachmentGraph(n, k, seed, sel)
