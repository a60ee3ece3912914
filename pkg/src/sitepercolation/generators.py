"""Seeded constructions of the ground graphs.

``random_regular`` is the pseudo-random workhorse. It draws a uniform
perfect matching of the ``n*d`` degree stubs (the configuration model).
Two ways of turning that pairing into a simple graph are provided:

``"rejection"``
    Throw the whole pairing away and redraw while it has a loop or a
    repeated edge. The output is exactly uniform over simple d-regular
    graphs, but a pairing is simple only with probability about
    ``exp(-(d*d - 1) / 4)``, so this is usable for small ``d`` only.

``"repair"``
    Keep the pairing and remove each loop / repeated edge with a random
    double-edge switch against another edge, rejecting switches that would
    create a new loop or repeated edge. Approximately uniform; handles
    ``d`` in the hundreds at ``n = 10**5`` in a few seconds.

``"auto"`` (the default) picks rejection for ``d <= 4`` and repair above.
When ``d > (n - 1) / 2`` the complement of a random ``(n - 1 - d)``-regular
graph is returned instead, which is the same distribution and much easier
to sample.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from . import rng as _rng
from .graph import Graph, GraphInputError

FAMILIES = ("random-regular", "hypercube", "cycle", "complete", "circulant", "disjoint-cliques")
RETRY_BUDGET = 1000
AUTO_REJECTION_MAX_D = 4
MAX_REPAIR_ROUNDS = 10_000


class GenerationError(RuntimeError):
    """The sampler exhausted its budget without producing a simple graph."""


@dataclass(frozen=True)
class GeneratorSpec:
    family: str
    n: int
    d: int
    offsets: list[int] = field(default_factory=list)
    seed: int = 0
    method: str = "auto"

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise GraphInputError(f"unknown graph family {self.family!r}; expected one of {FAMILIES}")
        if not 0 <= self.seed < 2**64:
            raise GraphInputError("seed must be a 64-bit unsigned integer")

    def to_json(self) -> str:
        return json.dumps(asdict(self))

    @classmethod
    def from_dict(cls, obj: dict) -> "GeneratorSpec":
        obj = dict(obj)
        if obj.get("family") == "hypercube" and "n" not in obj:
            obj["n"] = 1 << int(obj["d"])
        if obj.get("family") == "circulant" and "d" not in obj:
            obj["d"] = _circulant_degree(int(obj["n"]), obj.get("offsets", []))
        if obj.get("family") == "complete" and "d" not in obj:
            obj["d"] = int(obj["n"]) - 1
        if obj.get("family") == "cycle" and "d" not in obj:
            obj["d"] = 2
        unknown = set(obj) - {"family", "n", "d", "offsets", "seed", "method"}
        if unknown:
            raise GraphInputError(f"unknown generator fields: {sorted(unknown)}")
        obj["offsets"] = [int(s) for s in obj.get("offsets", [])]
        return cls(**obj)

    @classmethod
    def from_json(cls, text: str) -> "GeneratorSpec":
        return cls.from_dict(json.loads(text))

    def build(self) -> Graph:
        fam = self.family
        if fam == "random-regular":
            return random_regular(self.n, self.d, self.seed, method=self.method)
        if fam == "hypercube":
            g = hypercube(self.d)
            if g.n != self.n:
                raise GraphInputError(f"hypercube of dimension {self.d} has {g.n} vertices, not {self.n}")
            return g
        if fam == "cycle":
            return cycle(self.n)
        if fam == "complete":
            return complete(self.n)
        if fam == "circulant":
            return circulant(self.n, self.offsets)
        return disjoint_cliques(self.n, self.d)


def random_regular(n: int, d: int, seed: int, method: str = "auto") -> Graph:
    if not 3 <= d < n:
        raise GraphInputError(f"random_regular needs 3 <= d < n, got n={n}, d={d}")
    if (n * d) % 2:
        raise GraphInputError(f"n*d must be even, got n={n}, d={d}")
    if method not in ("auto", "rejection", "repair"):
        raise GraphInputError(f"unknown random-regular method {method!r}")
    edges = _regular_edges(n, d, seed, method)
    return Graph.from_edges(n, edges, degree_bound=d, label="random-regular")


def _regular_edges(n: int, d: int, seed: int, method: str) -> np.ndarray:
    if d == 0:
        return np.empty((0, 2), dtype=np.int64)
    if 2 * d > n - 1:
        return _complement_edges(n, _regular_edges(n, n - 1 - d, seed, method))
    if method == "auto":
        method = "rejection" if d <= AUTO_REJECTION_MAX_D else "repair"
    gen = _rng.philox(seed, _rng.GRAPH)
    stubs = np.repeat(np.arange(n, dtype=np.int64), d)
    if method == "rejection":
        for _ in range(RETRY_BUDGET):
            pairs = gen.permutation(stubs).reshape(-1, 2)
            if _is_simple(n, pairs[:, 0], pairs[:, 1]):
                return pairs
        raise GenerationError(
            f"no simple pairing for n={n}, d={d} after {RETRY_BUDGET} attempts; use method='repair'")
    pairs = gen.permutation(stubs).reshape(-1, 2)
    return _repair(n, pairs[:, 0].copy(), pairs[:, 1].copy(), gen)


def _edge_keys(n: int, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    return np.minimum(u, v) * n + np.maximum(u, v)


def _is_simple(n: int, u: np.ndarray, v: np.ndarray) -> bool:
    if np.any(u == v):
        return False
    k = np.sort(_edge_keys(n, u, v))
    return not np.any(k[1:] == k[:-1])


def _repair(n: int, u: np.ndarray, v: np.ndarray, gen: np.random.Generator) -> np.ndarray:
    m = u.size
    for _ in range(MAX_REPAIR_ROUNDS):
        keys = _edge_keys(n, u, v)
        order = np.argsort(keys, kind="stable")
        sk = keys[order]
        bad = u == v
        bad[order[1:]] |= sk[1:] == sk[:-1]
        bad_idx = np.flatnonzero(bad)
        if bad_idx.size == 0:
            return np.column_stack([u, v])
        partner = gen.integers(0, m, size=bad_idx.size)
        _, first = np.unique(partner, return_index=True)
        keep = np.zeros(bad_idx.size, dtype=bool)
        keep[first] = True
        keep &= ~bad[partner]
        bi, pj = bad_idx[keep], partner[keep]
        flip = gen.random(bi.size) < 0.5
        x, y = u[bi], v[bi]
        z = np.where(flip, v[pj], u[pj])
        w = np.where(flip, u[pj], v[pj])
        k1, k2 = _edge_keys(n, x, z), _edge_keys(n, y, w)
        ok = (x != z) & (y != w) & (k1 != k2)
        ok &= ~_contains(sk, k1) & ~_contains(sk, k2)
        bi, pj = bi[ok], pj[ok]
        u[bi], v[bi], u[pj], v[pj] = x[ok], z[ok], y[ok], w[ok]
    raise GenerationError(f"switch repair did not converge for n={n} after {MAX_REPAIR_ROUNDS} rounds")


def _contains(sorted_keys: np.ndarray, probe: np.ndarray) -> np.ndarray:
    i = np.searchsorted(sorted_keys, probe)
    i = np.minimum(i, sorted_keys.size - 1)
    return sorted_keys[i] == probe


def _complement_edges(n: int, edges: np.ndarray) -> np.ndarray:
    iu, iv = np.triu_indices(n, k=1)
    present = np.zeros((n, n), dtype=bool)
    if edges.size:
        a, b = edges[:, 0], edges[:, 1]
        present[a, b] = present[b, a] = True
    keep = ~present[iu, iv]
    return np.column_stack([iu[keep], iv[keep]]).astype(np.int64)


def hypercube(dim: int) -> Graph:
    """Q^dim; vertex ``i`` is the bitstring with integer value ``i``."""
    if not 1 <= dim <= 24:
        raise GraphInputError(f"hypercube dimension must be in [1, 24], got {dim}")
    n = 1 << dim
    verts = np.arange(n, dtype=np.int64)
    parts = []
    for b in range(dim):
        lo = verts[(verts >> b) & 1 == 0]
        parts.append(np.column_stack([lo, lo | (1 << b)]))
    return Graph.from_edges(n, np.concatenate(parts), degree_bound=dim, label="hypercube")


def cycle(n: int) -> Graph:
    if n < 3:
        raise GraphInputError(f"cycle needs n >= 3, got {n}")
    a = np.arange(n, dtype=np.int64)
    return Graph.from_edges(n, np.column_stack([a, (a + 1) % n]), degree_bound=2, label="cycle")


def complete(n: int) -> Graph:
    if n < 3:
        raise GraphInputError(f"complete needs n >= 3, got {n}")
    iu, iv = np.triu_indices(n, k=1)
    return Graph.from_edges(n, np.column_stack([iu, iv]), degree_bound=n - 1, label="complete")


def _circulant_degree(n: int, offsets: Sequence[int]) -> int:
    return sum(1 if 2 * s == n else 2 for s in offsets)


def circulant(n: int, offsets: Sequence[int]) -> Graph:
    """Vertex ``i`` adjacent to ``i +- s (mod n)`` for each offset ``s``."""
    offsets = [int(s) for s in offsets]
    if n < 3:
        raise GraphInputError(f"circulant needs n >= 3, got {n}")
    if not offsets or len(set(offsets)) != len(offsets) or any(not 1 <= s <= n // 2 for s in offsets):
        raise GraphInputError(f"circulant offsets must be distinct and in [1, {n // 2}], got {offsets}")
    a = np.arange(n, dtype=np.int64)
    parts = []
    for s in offsets:
        src = a[: n // 2] if 2 * s == n else a
        parts.append(np.column_stack([src, (src + s) % n]))
    return Graph.from_edges(n, np.concatenate(parts), degree_bound=_circulant_degree(n, offsets),
                            label="circulant")


def disjoint_cliques(n: int, d: int) -> Graph:
    """``n / (d + 1)`` vertex-disjoint copies of K_{d+1}, on consecutive ids."""
    if d < 1 or n < d + 1 or n % (d + 1):
        raise GraphInputError(f"disjoint_cliques needs (d+1) | n with d >= 1, got n={n}, d={d}")
    iu, iv = np.triu_indices(d + 1, k=1)
    base = np.arange(0, n, d + 1, dtype=np.int64)[:, None]
    edges = np.column_stack([(base + iu).ravel(), (base + iv).ravel()])
    return Graph.from_edges(n, edges, degree_bound=d, label="disjoint-cliques")
