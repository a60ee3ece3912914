"""Depth-first exploration of a random induced subgraph G[R].

The explorer keeps every vertex in exactly one of four classes:

* ``T`` untouched,
* ``U`` on the stack (consecutive entries are adjacent, so U is a path),
* ``S`` fully explored and inside R,
* ``W`` queried and found outside R.

While the stack is non-empty the explorer looks at its top vertex ``v`` and
scans ``v``'s neighbours in vertex-order for the first one still in T. A
neighbour found this way gets its coin flipped: heads pushes it on the
stack, tails sends it to W. If ``v`` has no neighbour in T it is popped into
S. With an empty stack the first vertex of T (in vertex-order) gets its coin
flipped and is pushed or sent to W. At the end S is exactly R.

Coins are per-vertex: vertex ``v`` is in R iff its 64-bit Philox draw
``raw[v]`` falls below ``p * 2**64``. Every vertex is queried at most once,
so reading the coins in query order is an i.i.d. Bernoulli(p) stream, and
the same draws can be shared with :func:`direct_sample_oracle` and across
different ``p`` (monotone coupling).

An *epoch* starts when a vertex enters the empty stack and ends when the
stack empties again; it uncovers exactly one component of G[R]. A tails
result on an empty stack opens no epoch.
"""

from __future__ import annotations

from array import array
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import rng as _rng
from .graph import Graph, GraphInputError, VertexSet, connected_components, has_edge, is_path
from .spectral import edge_exists_between

TRACE_MAX_N = 10_000

# vertex classes
T, U, S, W = 0, 1, 2, 3

# trace event kinds
PUSH, REJECT, POP = "push", "reject", "pop"


def vertex_coins(n: int, p: float | Fraction, seed: int) -> np.ndarray:
    """Per-vertex membership in R: ``True`` where the coin of ``v`` is heads."""
    raw = _rng.raw_draws(seed, _rng.COINS, n)
    return _rng.heads(raw, _rng.coin_threshold(p))


def bernoulli_stream(p: float | Fraction, seed: int, length: int) -> np.ndarray:
    """``length`` i.i.d. Bernoulli(p) bits as a uint8 array."""
    return vertex_coins(length, p, seed).astype(np.uint8)


def vertex_order(n: int, seed: int, mode: str = "identity") -> np.ndarray:
    if mode == "identity":
        return np.arange(n, dtype=np.int64)
    if mode == "seeded-permutation":
        return _rng.philox(seed, _rng.SIGMA).permutation(n)
    raise GraphInputError(f"unknown sigma mode {mode!r}")


class CoinStream:
    """Per-vertex coins consumed lazily, with a query-order log.

    ``flip(v)`` returns the coin of vertex ``v``. ``consumed`` counts flips
    and ``log`` holds the queried vertices in order, so ``values()`` is the
    sequence X_1, X_2, ... that the exploration actually read.
    """

    def __init__(self, p: float | Fraction, seed: int, n: int):
        self.p, self.seed, self.n = p, seed, n
        self.heads = vertex_coins(n, p, seed)
        self.log = array("q")
        self.consumed = 0

    def flip(self, v: int) -> bool:
        self.consumed += 1
        self.log.append(v)
        return bool(self.heads[v])

    def values(self) -> np.ndarray:
        """The bits X_1, X_2, ... in query order."""
        order = np.frombuffer(self.log, dtype=np.int64) if len(self.log) else np.empty(0, np.int64)
        return self.heads[order].astype(np.uint8)


@dataclass
class EpochRecord:
    component_id: int
    vertices: list[int]
    first_query: int
    last_query: int
    max_stack: int
    path_at_max: list[int]

    @property
    def size(self) -> int:
        return len(self.vertices)


@dataclass
class RunReport:
    n: int
    d: int
    p: float
    seed: int
    sigma_mode: str
    graph: str
    R: VertexSet
    epochs: list[EpochRecord]
    total_queries: int
    largest_component: int
    second_component: int
    max_stack_global: int
    witness_path: list[int]
    query_order: np.ndarray | None = None
    heads: np.ndarray | None = None

    @property
    def r_size(self) -> int:
        return len(self.R)

    def bits(self) -> np.ndarray:
        """Coin outcomes in the order they were queried."""
        if self.query_order is None or self.heads is None:
            raise ValueError("run was not recorded with its coin log")
        return self.heads[self.query_order].astype(np.uint8)

    def component_partition(self) -> list[list[int]]:
        return sorted((e.vertices for e in self.epochs), key=lambda vs: vs[0])

    def to_dict(self) -> dict:
        return {
            "n": self.n, "d": self.d, "p": float(self.p), "seed": self.seed,
            "sigma_mode": self.sigma_mode, "graph": self.graph,
            "total_queries": self.total_queries, "r_size": self.r_size,
            "num_epochs": len(self.epochs), "largest_component": self.largest_component,
            "second_component": self.second_component, "max_stack_global": self.max_stack_global,
            "epochs": [{"size": e.size, "first_query": e.first_query,
                        "last_query": e.last_query, "max_stack": e.max_stack} for e in self.epochs],
        }


class DFSExploration:
    """One live percolation run; advance it with :meth:`run`.

    ``run(limit)`` stops right after the ``limit``-th coin flip (or at the
    end), so the state can be inspected mid-run via :meth:`partition`.
    With ``trace=True`` every transition is appended to ``events`` as
    ``(kind, vertex, query_index)``; with ``profile=True`` the stack height
    after each flip is stored in ``stack_profile``.
    """

    def __init__(self, g: Graph, p: float | Fraction, seed: int, sigma_mode: str = "identity",
                 trace: bool = False, profile: bool = False):
        if not 0 <= p <= 1:
            raise GraphInputError(f"p must lie in [0, 1], got {p}")
        if trace and g.n > TRACE_MAX_N:
            raise GraphInputError(f"trace mode is limited to n <= {TRACE_MAX_N}")
        self.g, self.p, self.seed, self.sigma_mode = g, p, seed, sigma_mode
        n = g.n
        self.coins = CoinStream(p, seed, n)
        self._heads = self.coins.heads.tolist()
        sigma = vertex_order(n, seed, sigma_mode)
        self.sigma = sigma.tolist()
        self._rank = None if sigma_mode == "identity" else np.argsort(sigma)
        self.status = bytearray(n)
        self.stack: list[int] = []
        self._nbrs: list[list[int] | None] = [None] * n
        self._cursor = [0] * n
        self._sigma_pos = 0
        self.queries = 0
        self.epochs: list[EpochRecord] = []
        self.finished = n == 0
        self.trace = trace
        self.events: list[tuple[str, int, int]] = []
        self.profile = profile
        self.stack_profile = array("i")
        self._ep_vertices: list[int] = []
        self._ep_first = 0
        self._ep_max = 0
        self._ep_path: list[int] = []
        self._pending = False

    def _load(self, v: int) -> None:
        g = self.g
        nb = g.indices[g.indptr[v]:g.indptr[v + 1]]
        if self._rank is not None:
            nb = nb[np.argsort(self._rank[nb], kind="stable")]
        self._nbrs[v] = nb.tolist()

    def run(self, limit: int | None = None) -> "DFSExploration":
        if self.finished:
            return self
        status, stack, heads = self.status, self.stack, self._heads
        nbrs, cursor, sigma = self._nbrs, self._cursor, self.sigma
        order, events, prof = self.coins.log, self.events, self.stack_profile
        trace, profile = self.trace, self.profile
        n = self.g.n
        q = self.queries
        stop = limit if limit is not None else -1
        while True:
            if stack:
                v = stack[-1]
                nb = nbrs[v]
                c = cursor[v]
                L = len(nb)
                while c < L and status[nb[c]]:
                    c += 1
                if c < L:
                    u = nb[c]
                    cursor[v] = c + 1
                    q += 1
                    order.append(u)
                    if heads[u]:
                        self._push(u, q)
                    else:
                        status[u] = W
                        if trace:
                            events.append((REJECT, u, q))
                    if profile:
                        prof.append(len(stack))
                    if q == stop:
                        break
                else:
                    cursor[v] = c
                    if self._pending:
                        self._ep_path = stack.copy()
                        self._pending = False
                    stack.pop()
                    status[v] = S
                    if trace:
                        events.append((POP, v, q))
                    if not stack:
                        self._close_epoch(q)
            else:
                pos = self._sigma_pos
                while pos < n and status[sigma[pos]]:
                    pos += 1
                self._sigma_pos = pos
                if pos == n:
                    self.finished = True
                    break
                u = sigma[pos]
                q += 1
                order.append(u)
                if heads[u]:
                    self._ep_first = q
                    self._ep_vertices = []
                    self._ep_max = 0
                    self._push(u, q)
                else:
                    status[u] = W
                    if trace:
                        events.append((REJECT, u, q))
                if profile:
                    prof.append(len(stack))
                if q == stop:
                    break
        self.queries = self.coins.consumed = q
        return self

    def _push(self, u: int, q: int) -> None:
        self.status[u] = U
        self.stack.append(u)
        self._load(u)
        self._ep_vertices.append(u)
        if len(self.stack) > self._ep_max:
            self._ep_max = len(self.stack)
            self._pending = True
        if self.trace:
            self.events.append((PUSH, u, q))

    def _close_epoch(self, q: int) -> None:
        self.epochs.append(EpochRecord(len(self.epochs), sorted(self._ep_vertices), self._ep_first,
                                       q, self._ep_max, self._ep_path))
        self._ep_path = []

    def partition(self) -> dict[str, VertexSet]:
        """Current (S, T, U, W) as vertex sets."""
        st = np.frombuffer(bytes(self.status), dtype=np.uint8)
        return {name: VertexSet(st == code) for name, code in (("S", S), ("T", T), ("U", U), ("W", W))}

    def report(self) -> RunReport:
        if not self.finished:
            raise RuntimeError("run has not finished")
        g = self.g
        sizes = sorted((e.size for e in self.epochs), reverse=True)
        best = max(self.epochs, key=lambda e: e.max_stack, default=None)
        st = np.frombuffer(bytes(self.status), dtype=np.uint8)
        return RunReport(
            n=g.n, d=g.degree_bound, p=self.p, seed=self.seed, sigma_mode=self.sigma_mode,
            graph=f"{g.label}:{g.digest}", R=VertexSet(st == S), epochs=self.epochs,
            total_queries=self.queries,
            largest_component=sizes[0] if sizes else 0,
            second_component=sizes[1] if len(sizes) > 1 else 0,
            max_stack_global=best.max_stack if best else 0,
            witness_path=list(best.path_at_max) if best else [],
            query_order=np.array(self.coins.log, dtype=np.int64),
            heads=self.coins.heads,
        )


def run_dfs_percolation(g: Graph, p: float | Fraction, seed: int, trace: bool = False,
                        sigma_mode: str = "identity") -> RunReport:
    return DFSExploration(g, p, seed, sigma_mode=sigma_mode, trace=trace).run().report()


def direct_sample_oracle(g: Graph, p: float | Fraction, seed: int) -> tuple[VertexSet, list[list[int]]]:
    """R drawn straight from the per-vertex coins, and the components of G[R]."""
    R = VertexSet(vertex_coins(g.n, p, seed))
    return R, connected_components(g, R)


def longest_path_lower_bound(report: RunReport) -> tuple[int, list[int]]:
    """Largest stack height seen, with the stack contents at that moment."""
    return report.max_stack_global, list(report.witness_path)


def find_cycle_from_path(g: Graph, path: Sequence[int], lam: float | None = None) -> list[int] | None:
    """Close a cycle through an edge between the first and last thirds of ``path``.

    Returns the cycle as a vertex list (the closing edge joins its last and
    first entries), or ``None`` if the thirds are empty or not adjacent.
    If ``lam`` is given and both thirds exceed ``lam * n / d`` an edge must
    exist; failing to find one raises ``ValueError``.
    """
    path = [int(v) for v in path]
    if not is_path(g, path):
        raise GraphInputError("not a path in the graph")
    t = len(path) // 3
    if t == 0:
        return None
    pos = {v: i for i, v in enumerate(path)}
    B = VertexSet.of(g.n, path[:t])
    C = VertexSet.of(g.n, path[-t:])
    hit = edge_exists_between(g, B, C)
    if hit is None:
        if lam is not None and t > lam * g.n / g.degree_bound:
            raise ValueError(f"no edge between thirds of size {t} > lam*n/d; lam={lam} is not a valid bound")
        return None
    i, j = pos[hit[0]], pos[hit[1]]
    return path[i:j + 1]


def audit_trace(g: Graph, run: DFSExploration) -> dict[str, int]:
    """Replay a traced run and count violations of the structural invariants.

    Checked after every transition: the four classes partition V, the stack
    is a path, no edge joins S and T, no vertex is queried twice, and within
    each epoch the k-th stacked vertex arrives after at most ``k * d`` flips
    of that epoch (``k`` flips when ``d = 0``). At the end the number of
    flips must equal |S| + |W|.
    """
    if not run.trace:
        raise ValueError("run was not traced")
    n, d = g.n, max(g.degree_bound, 1)
    status = np.zeros(n, dtype=np.uint8)
    counts = {T: n, U: 0, S: 0, W: 0}
    stack: list[int] = []
    queried = np.zeros(n, dtype=bool)
    st_edges = 0
    v_ = {k: 0 for k in ("partition", "path", "s_t_edge", "single_query", "query_window", "flip_total")}
    ep_first, ep_k = 0, 0
    last_q = 0

    def move(v: int, new: int) -> None:
        nonlocal st_edges
        old = status[v]
        nb = g.neighbors(v)
        if old == T:
            st_edges -= int(np.count_nonzero(status[nb] == S))
        if new == S:
            st_edges += int(np.count_nonzero(status[nb] == T))
        counts[old] -= 1
        counts[new] += 1
        status[v] = new

    for kind, v, q in run.events:
        if kind in (PUSH, REJECT):
            if q != last_q + 1 or queried[v] or status[v] != T:
                v_["single_query"] += 1
            queried[v] = True
            last_q = q
        if kind == PUSH:
            if not stack:
                ep_first, ep_k = q, 0
            elif not has_edge(g, stack[-1], v):
                v_["path"] += 1
            ep_k += 1
            if q - ep_first + 1 > ep_k * d:
                v_["query_window"] += 1
            move(v, U)
            stack.append(v)
        elif kind == REJECT:
            move(v, W)
        else:
            if not stack or stack[-1] != v:
                v_["path"] += 1
            else:
                stack.pop()
            move(v, S)
        if sum(counts.values()) != n or counts[U] != len(stack) or any(c < 0 for c in counts.values()):
            v_["partition"] += 1
        if st_edges != 0:
            v_["s_t_edge"] += 1
    if not np.array_equal(status, np.frombuffer(bytes(run.status), dtype=np.uint8)):
        v_["partition"] += 1
    if run.finished and last_q != counts[S] + counts[W]:
        v_["flip_total"] += 1
    if last_q != run.queries:
        v_["flip_total"] += 1
    return v_
