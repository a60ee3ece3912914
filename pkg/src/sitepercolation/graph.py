"""Immutable simple graphs in compressed adjacency form, and dense vertex sets.

The set-level counts follow the usual notation for pseudo-random graphs:

* ``ordered_pair_edge_count(g, B, C)`` is e(B, C), counting ordered pairs
  (u, v) with u in B, v in C and uv an edge, so overlapping sets count
  internal edges twice;
* ``external_neighborhood(g, S)`` is N(S), the vertices outside S with a
  neighbour in S;
* ``internal_edge_count(g, U)`` is e(U), the number of edges inside U.
"""

from __future__ import annotations

import hashlib
import io
import os
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components as _cc


class GraphInputError(ValueError):
    """Malformed graph, vertex id or vertex set."""


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


class VertexSet:
    """A subset of ``range(n)`` stored as a dense boolean mask.

    Instances are immutable; set algebra returns new sets.
    """

    __slots__ = ("mask", "_card")

    def __init__(self, mask: np.ndarray):
        mask = np.asarray(mask, dtype=bool)
        if mask.ndim != 1:
            raise GraphInputError("vertex-set mask must be one-dimensional")
        if mask.flags.writeable:
            mask = mask.copy()
        self.mask = _readonly(mask)
        self._card = int(np.count_nonzero(mask))

    @classmethod
    def of(cls, n: int, vertices: Iterable[int]) -> "VertexSet":
        mask = np.zeros(n, dtype=bool)
        idx = np.fromiter((int(v) for v in vertices), dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= n):
            raise GraphInputError(f"vertex id out of range [0, {n})")
        mask[idx] = True
        return cls(mask)

    @classmethod
    def empty(cls, n: int) -> "VertexSet":
        return cls(np.zeros(n, dtype=bool))

    @classmethod
    def full(cls, n: int) -> "VertexSet":
        return cls(np.ones(n, dtype=bool))

    @property
    def n(self) -> int:
        return self.mask.shape[0]

    def __len__(self) -> int:
        return self._card

    def __contains__(self, v: int) -> bool:
        return 0 <= v < self.n and bool(self.mask[v])

    def __iter__(self) -> Iterator[int]:
        return iter(np.flatnonzero(self.mask).tolist())

    def to_array(self) -> np.ndarray:
        return np.flatnonzero(self.mask)

    def _check(self, other: "VertexSet") -> None:
        if other.n != self.n:
            raise GraphInputError(f"vertex sets over different universes ({self.n} vs {other.n})")

    def __or__(self, other: "VertexSet") -> "VertexSet":
        self._check(other)
        return VertexSet(self.mask | other.mask)

    def __and__(self, other: "VertexSet") -> "VertexSet":
        self._check(other)
        return VertexSet(self.mask & other.mask)

    def __sub__(self, other: "VertexSet") -> "VertexSet":
        self._check(other)
        return VertexSet(self.mask & ~other.mask)

    def complement(self) -> "VertexSet":
        return VertexSet(~self.mask)

    def isdisjoint(self, other: "VertexSet") -> bool:
        self._check(other)
        return not np.any(self.mask & other.mask)

    def issubset(self, other: "VertexSet") -> bool:
        self._check(other)
        return not np.any(self.mask & ~other.mask)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, VertexSet):
            return NotImplemented
        return self.n == other.n and bool(np.array_equal(self.mask, other.mask))

    def __hash__(self) -> int:
        return hash((self.n, np.packbits(self.mask).tobytes()))

    def __repr__(self) -> str:
        items = self.to_array()
        shown = ", ".join(map(str, items[:10].tolist()))
        more = ", ..." if items.size > 10 else ""
        return f"VertexSet(n={self.n}, {{{shown}{more}}})"


class Graph:
    """Simple undirected graph with sorted neighbour lists (CSR layout).

    ``indptr[v]:indptr[v+1]`` delimits the neighbours of ``v`` inside the
    flat ``indices`` array. ``degree_bound`` is the maximum degree, and
    ``regular`` is set when every vertex has exactly that degree.
    """

    def __init__(self, n: int, indptr: np.ndarray, indices: np.ndarray,
                 degree_bound: int, regular: bool, label: str = "custom"):
        self.n = int(n)
        self.indptr = _readonly(np.ascontiguousarray(indptr, dtype=np.int64))
        self.indices = _readonly(np.ascontiguousarray(indices, dtype=np.int32 if n < 2**31 else np.int64))
        self.degree_bound = int(degree_bound)
        self.regular = bool(regular)
        self.label = label

    @classmethod
    def from_edges(cls, n: int, edges, degree_bound: int | None = None,
                   label: str = "custom", validate: bool = True) -> "Graph":
        """Build from an ``(m, 2)`` array-like of undirected edges.

        Raises :class:`GraphInputError` on self-loops, repeated edges or
        out-of-range endpoints, or if some degree exceeds ``degree_bound``.
        """
        if n < 0:
            raise GraphInputError("vertex count must be non-negative")
        e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        u, v = e[:, 0], e[:, 1]
        if validate and e.size:
            if u.min() < 0 or v.min() < 0 or u.max() >= n or v.max() >= n:
                raise GraphInputError(f"edge endpoint out of range [0, {n})")
            if np.any(u == v):
                raise GraphInputError("self-loop in edge list")
        src = np.concatenate([u, v])
        dst = np.concatenate([v, u])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        if validate and src.size > 1:
            dup = (src[1:] == src[:-1]) & (dst[1:] == dst[:-1])
            if np.any(dup):
                i = int(np.argmax(dup))
                raise GraphInputError(f"repeated edge {{{src[i]}, {dst[i]}}}")
        deg = np.bincount(src, minlength=n)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(deg, out=indptr[1:])
        dmax = int(deg.max()) if n else 0
        if degree_bound is None:
            degree_bound = dmax
        elif dmax > degree_bound:
            raise GraphInputError(f"maximum degree {dmax} exceeds bound {degree_bound}")
        regular = n > 0 and bool(np.all(deg == degree_bound))
        return cls(n, indptr, dst, degree_bound, regular, label)

    @property
    def d(self) -> int:
        return self.degree_bound

    @cached_property
    def degrees(self) -> np.ndarray:
        return _readonly(np.diff(self.indptr))

    @cached_property
    def sources(self) -> np.ndarray:
        """Row index of every entry of ``indices`` (the CSR row expansion)."""
        return _readonly(np.repeat(np.arange(self.n, dtype=self.indices.dtype), self.degrees))

    @property
    def num_edges(self) -> int:
        return int(self.indices.size // 2)

    @cached_property
    def adjacency(self) -> csr_matrix:
        data = np.ones(self.indices.size, dtype=np.float64)
        return csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))

    def neighbors(self, v: int) -> np.ndarray:
        if not 0 <= v < self.n:
            raise GraphInputError(f"vertex {v} out of range [0, {self.n})")
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def edges(self) -> np.ndarray:
        """All edges as an ``(m, 2)`` array with ``u < v``, lexicographically sorted."""
        keep = self.sources < self.indices
        return np.column_stack([self.sources[keep], self.indices[keep]]).astype(np.int64)

    @cached_property
    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(np.int64(self.n).tobytes())
        h.update(self.indptr.tobytes())
        h.update(self.indices.astype(np.int64).tobytes())
        return h.hexdigest()[:16]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.n == other.n and self.degree_bound == other.degree_bound
                and np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices))

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        kind = "regular" if self.regular else "max-degree"
        return f"Graph({self.label}, n={self.n}, {kind} d={self.degree_bound}, m={self.num_edges})"

    def validate(self) -> None:
        """Re-check symmetry, simplicity, sortedness and regularity."""
        n, src, dst = self.n, self.sources, self.indices
        if dst.size and (dst.min() < 0 or dst.max() >= n):
            raise GraphInputError("neighbour id out of range")
        if np.any(src == dst):
            raise GraphInputError("self-loop")
        same_row = src[1:] == src[:-1]
        if np.any(same_row & (dst[1:] <= dst[:-1])):
            raise GraphInputError("neighbour lists must be strictly increasing")
        fwd = np.sort(src.astype(np.int64) * n + dst)
        bwd = np.sort(dst.astype(np.int64) * n + src)
        if not np.array_equal(fwd, bwd):
            raise GraphInputError("adjacency is not symmetric")
        if self.degrees.size and self.degrees.max() > self.degree_bound:
            raise GraphInputError("degree exceeds bound")
        if self.regular and np.any(self.degrees != self.degree_bound):
            raise GraphInputError("graph flagged regular but degrees differ")


def as_vertex_set(g: Graph, S) -> VertexSet:
    if isinstance(S, VertexSet):
        if S.n != g.n:
            raise GraphInputError(f"vertex set over {S.n} vertices, graph has {g.n}")
        return S
    return VertexSet.of(g.n, S)


def neighbors(g: Graph, v: int) -> list[int]:
    return g.neighbors(v).tolist()


def ordered_pair_edge_count(g: Graph, B, C) -> int:
    """Number of ordered pairs (u, v), u in B, v in C, with uv an edge."""
    B, C = as_vertex_set(g, B), as_vertex_set(g, C)
    if not len(B) or not len(C):
        return 0
    return int(np.count_nonzero(B.mask[g.sources] & C.mask[g.indices]))


def external_neighborhood(g: Graph, S) -> VertexSet:
    S = as_vertex_set(g, S)
    out = np.zeros(g.n, dtype=bool)
    out[g.indices[S.mask[g.sources]]] = True
    out &= ~S.mask
    return VertexSet(out)


def internal_edge_count(g: Graph, U) -> int:
    return ordered_pair_edge_count(g, U, U) // 2


def neighbor_counts(g: Graph, B) -> np.ndarray:
    """``d(v, B)`` for every vertex ``v``, as an int array."""
    B = as_vertex_set(g, B)
    return np.bincount(g.sources[B.mask[g.indices]], minlength=g.n)


def connected_components(g: Graph, active=None) -> list[list[int]]:
    """Components of the induced subgraph ``G[active]``.

    Components are ordered by their smallest vertex and each list is sorted.
    """
    active = VertexSet.full(g.n) if active is None else as_vertex_set(g, active)
    verts = active.to_array()
    if verts.size == 0:
        return []
    sub = g.adjacency[verts][:, verts]
    _, labels = _cc(sub, directed=False)
    # relabel by first occurrence; verts is ascending so this orders by minimum
    _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
    rank = np.argsort(np.argsort(first))
    keys = rank[inverse]
    order = np.argsort(keys, kind="stable")
    bounds = np.flatnonzero(np.diff(keys[order])) + 1
    return [part.tolist() for part in np.split(verts[order], bounds)]


def read_edge_list(source: str | os.PathLike | io.TextIOBase, label: str = "file") -> Graph:
    """Parse the ``n d`` header + ``u v`` lines edge-list format."""
    if isinstance(source, (str, os.PathLike)):
        with open(source) as fh:
            text = fh.read()
    else:
        text = source.read()
    lines = [ln.split() for ln in text.splitlines() if ln.strip()]
    if not lines or len(lines[0]) != 2:
        raise GraphInputError("edge list must start with a 'n d' header line")
    try:
        n, d = int(lines[0][0]), int(lines[0][1])
        pairs = [(int(a), int(b)) for a, b in lines[1:]]
    except ValueError as exc:
        raise GraphInputError(f"malformed edge list: {exc}") from None
    for a, b in pairs:
        if a >= b:
            raise GraphInputError(f"edge ({a}, {b}) must satisfy u < v")
    return Graph.from_edges(n, np.array(pairs, dtype=np.int64).reshape(-1, 2), degree_bound=d, label=label)


def write_edge_list(g: Graph, dest: str | os.PathLike | io.TextIOBase) -> None:
    e = g.edges()
    buf = io.StringIO()
    buf.write(f"{g.n} {g.degree_bound}\n")
    if e.size:
        np.savetxt(buf, e, fmt="%d", delimiter=" ")
    if isinstance(dest, (str, os.PathLike)):
        with open(dest, "w") as fh:
            fh.write(buf.getvalue())
    else:
        dest.write(buf.getvalue())


def is_path(g: Graph, vertices: Sequence[int]) -> bool:
    """True if ``vertices`` are distinct and consecutive ones are adjacent."""
    if len(set(vertices)) != len(vertices):
        return False
    for a, b in zip(vertices, vertices[1:]):
        nb = g.neighbors(a)
        i = np.searchsorted(nb, b)
        if i >= nb.size or nb[i] != b:
            return False
    return True


def has_edge(g: Graph, u: int, v: int) -> bool:
    nb = g.neighbors(u)
    i = int(np.searchsorted(nb, v))
    return i < nb.size and int(nb[i]) == v
