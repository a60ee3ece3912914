"""Finite-size versions of the percolation thresholds and the checks behind them.

Sizes:

* subcritical, p = (1 - eps)/d: every component should have fewer than
  ``ceil(4 / eps**2 * ln n)`` vertices;
* supercritical, p = (1 + eps)/d: a component of at least ``ceil(eps n / d)``
  vertices and a path of at least ``ceil(eps**2 n / (5 d))`` vertices.

Thresholds round up, which only makes a check harder to pass. ``eps`` is
converted to an exact fraction through its decimal repr, so that e.g.
``eps = 0.3`` gives ``giant_min = 300`` at ``n = 10**5, d = 100`` rather
than a float artefact of 301.

The expansion checks use the predicate ``|N(S)| < (1 - alpha0) (d m - d^2 m^2 / (2 n))``
for an m-set S and count "bad" prefix vertices: ``v_i`` is bad when it has at
most ``(1 - alpha) (d / n) (n - (d + 1)(i - 1))`` neighbours outside the
closed neighbourhood of ``v_1 .. v_{i-1}``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .exploration import DFSExploration, RunReport
from .graph import (Graph, GraphInputError, VertexSet, as_vertex_set, external_neighborhood,
                    neighbor_counts)

ENUMERATION_LIMIT = 10**8
SUBCRITICAL, SUPERCRITICAL = "subcritical", "supercritical"


def exact(x: float | int | str | Fraction) -> Fraction:
    """Exact rational for a user-facing number (floats go through their repr)."""
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


def _check_eps(epsilon) -> Fraction:
    e = exact(epsilon)
    if not 0 < e <= 1:
        raise GraphInputError(f"epsilon must lie in (0, 1], got {epsilon}")
    return e


@dataclass(frozen=True)
class ThresholdParams:
    epsilon: float
    n: int
    d: int
    side: str

    def __post_init__(self):
        _check_eps(self.epsilon)
        if self.side not in (SUBCRITICAL, SUPERCRITICAL):
            raise GraphInputError(f"side must be {SUBCRITICAL!r} or {SUPERCRITICAL!r}")
        if not 0 < self.p < 1:
            raise GraphInputError(f"p = {float(self.p)} falls outside (0, 1)")

    @property
    def p(self) -> Fraction:
        e = exact(self.epsilon)
        return ((1 - e) if self.side == SUBCRITICAL else (1 + e)) / self.d


def percolation_p(epsilon, d: int, side: str) -> Fraction:
    e = _check_eps(epsilon)
    return ((1 - e) if side == SUBCRITICAL else (1 + e)) / d


@dataclass(frozen=True)
class ExpansionParams:
    """Parameters of the non-expanding-set lemma.

    ``alpha`` defaults to ``sqrt(alpha0)``, from ``1 - alpha0 = 1 - alpha**2``.
    """

    alpha0: float
    c: float
    n: int
    d: int
    alpha: float | None = None

    def __post_init__(self):
        if not 0 < self.alpha0 <= 0.5:
            raise GraphInputError("alpha0 must lie in (0, 1/2]")
        if not 0 < self.c <= 1 / 3:
            raise GraphInputError("c must lie in (0, 1/3]")
        if self.alpha is None:
            object.__setattr__(self, "alpha", math.sqrt(self.alpha0))

    @property
    def m_low(self) -> int:
        return math.ceil(exact(self.c) * self.n / self.d)

    @property
    def m_high(self) -> int:
        return math.floor(Fraction(self.n, 3 * self.d))

    @property
    def non_vacuous(self) -> bool:
        return self.m_low <= self.m_high


def subcritical_component_bound(n: int, epsilon) -> int:
    _check_eps(epsilon)
    if n < 2:
        raise GraphInputError("n must be at least 2")
    return math.ceil(4 / float(epsilon) ** 2 * math.log(n))


def check_subcritical(report: RunReport, epsilon) -> bool:
    return report.largest_component < subcritical_component_bound(report.n, epsilon)


def supercritical_targets(n: int, d: int, epsilon) -> dict[str, int]:
    e = _check_eps(epsilon)
    return {"giant_min": math.ceil(e * n / d), "path_min": math.ceil(e * e * n / (5 * d))}


def check_supercritical(report: RunReport, epsilon) -> dict[str, bool]:
    t = supercritical_targets(report.n, report.d, epsilon)
    giant = report.largest_component >= t["giant_min"]
    path = report.max_stack_global >= t["path_min"]
    return {"giant": giant, "path": path, "both": giant and path}


def expansion_threshold(n: int, d: int, m: int, alpha0: float) -> float:
    return (1 - alpha0) * (d * m - d * d * m * m / (2 * n))


def is_non_expanding(g: Graph, S, alpha0: float) -> dict:
    S = as_vertex_set(g, S)
    m = len(S)
    if m < 1:
        raise GraphInputError("is_non_expanding needs a non-empty set")
    lhs = len(external_neighborhood(g, S))
    rhs = expansion_threshold(g.n, g.degree_bound, m, alpha0)
    return {"verdict": lhs < rhs, "lhs": lhs, "rhs": rhs}


def enumerate_non_expanding(g: Graph, m: int, alpha0: float, chunk: int = 1 << 16) -> dict[str, int]:
    """Count non-expanding sets among all m-subsets by exhaustive enumeration."""
    n = g.n
    total = math.comb(n, m)
    if total > ENUMERATION_LIMIT:
        raise GraphInputError(f"C({n}, {m}) = {total} exceeds the enumeration limit {ENUMERATION_LIMIT}")
    if m < 1:
        raise GraphInputError("m must be at least 1")
    rhs = expansion_threshold(n, g.degree_bound, m, alpha0)
    combos = itertools.combinations(range(n), m)
    bad = 0
    if n <= 64:
        nb_mask = np.zeros(n, dtype=np.uint64)
        np.bitwise_or.at(nb_mask, g.sources, np.left_shift(np.uint64(1), g.indices.astype(np.uint64)))
        bit = np.left_shift(np.uint64(1), np.arange(n, dtype=np.uint64))
        while True:
            flat = np.fromiter(itertools.chain.from_iterable(itertools.islice(combos, chunk)), dtype=np.int64)
            if flat.size == 0:
                break
            sets = flat.reshape(-1, m)
            closed = np.bitwise_or.reduce(nb_mask[sets], axis=1)
            own = np.bitwise_or.reduce(bit[sets], axis=1)
            sizes = np.bitwise_count(closed & ~own)
            bad += int(np.count_nonzero(sizes < rhs))
    else:
        for combo in combos:
            if len(external_neighborhood(g, VertexSet.of(n, combo))) < rhs:
                bad += 1
    return {"total": total, "non_expanding": bad}


def bad_positions(g: Graph, prefix: Sequence[int], alpha: float) -> list[int]:
    """1-based positions of the bad vertices of ``prefix``."""
    prefix = [int(v) for v in prefix]
    if len(set(prefix)) != len(prefix):
        raise GraphInputError("prefix has repeated vertices")
    n, d = g.n, g.degree_bound
    closed = np.zeros(n, dtype=bool)
    out = []
    for i, v in enumerate(prefix, start=1):
        nb = g.neighbors(v)
        outside = int(np.count_nonzero(~closed[nb]))
        if outside <= (1 - alpha) * d / n * (n - (d + 1) * (i - 1)):
            out.append(i)
        closed[v] = True
        closed[nb] = True
    return out


def bad_vertex_count(g: Graph, prefix: Sequence[int], alpha: float) -> int:
    return len(bad_positions(g, prefix, alpha))


def bad_choices(g: Graph, prefix: Sequence[int], alpha: float) -> VertexSet:
    """Vertices outside ``prefix`` that would be bad as its next element."""
    prefix = [int(v) for v in prefix]
    n, d, i = g.n, g.degree_bound, len(prefix) + 1
    S = VertexSet.of(n, prefix)
    open_ = (S | external_neighborhood(g, S)).complement()
    counts = neighbor_counts(g, open_)
    bad = counts <= (1 - alpha) * d / n * (n - (d + 1) * (i - 1))
    return VertexSet(bad & ~S.mask)


def stream_properties(bits, epsilon, d: int, n: int, side: str) -> dict[str, bool]:
    """Check the interval and prefix-sum properties of a Bernoulli stream.

    Subcritical returns ``{"1": ...}``: no window of length ``k d`` holds
    ``k`` or more ones. Supercritical returns ``{"2", "3", "4"}``: the prefix
    sum at ``eps^3 n`` is at most ``2 eps^3 n / d``, at ``eps n`` at most
    ``2 eps n / d``, and at every ``t`` in ``[eps^3 n, eps n]`` at least
    ``(1 + 3 eps / 4) t / d``.
    """
    x = np.asarray(bits, dtype=np.int64)
    e = _check_eps(epsilon)
    if side == SUBCRITICAL:
        if x.size < n:
            raise GraphInputError(f"subcritical stream needs {n} bits, got {x.size}")
        k = subcritical_component_bound(n, epsilon)
        return {"1": max_window_sum(x[:n], k * d) < k}
    if side != SUPERCRITICAL:
        raise GraphInputError(f"unknown side {side!r}")
    t_hi = math.floor(e * n)
    t_lo = math.ceil(e**3 * n)
    if x.size < t_hi:
        raise GraphInputError(f"supercritical stream needs {t_hi} bits, got {x.size}")
    prefix = np.cumsum(x[:t_hi])
    at_lo = int(prefix[math.floor(e**3 * n) - 1]) if math.floor(e**3 * n) else 0
    ts = np.arange(t_lo, t_hi + 1)
    slope = float(1 + Fraction(3, 4) * e)
    return {
        "2": at_lo * d <= 2 * e**3 * n,
        "3": int(prefix[-1]) * d <= 2 * e * n,
        "4": bool(np.all(prefix[ts - 1] * d >= slope * ts)),
    }


def max_window_sum(x: np.ndarray, length: int) -> int:
    """Largest sum over windows of ``length`` consecutive entries (whole array if shorter)."""
    length = min(length, x.size)
    if length == 0:
        return 0
    c = np.concatenate([[0], np.cumsum(x)])
    return int((c[length:] - c[:-length]).max())


def pause_check(g: Graph, p, seed: int, epsilon, sigma_mode: str = "identity") -> dict:
    """Stop a run after ``floor(eps n)`` flips and inspect the partition.

    Reports whether ``|S u U u W|`` equals the number of flips, whether
    ``N(S)`` lies inside ``U u W``, and the stack height (a path) at that moment.
    """
    limit = math.floor(_check_eps(epsilon) * g.n)
    run = DFSExploration(g, p, seed, sigma_mode=sigma_mode).run(limit)
    part = run.partition()
    queried = part["S"] | part["U"] | part["W"]
    frontier_ok = external_neighborhood(g, part["S"]).issubset(part["U"] | part["W"])
    return {
        "flips": run.queries,
        "queried_matches": len(queried) == run.queries,
        "frontier_ok": frontier_ok,
        "stack": len(run.stack),
        "path": list(run.stack),
    }


def stack_window_check(g: Graph, p, seed: int, epsilon, sigma_mode: str = "identity") -> dict:
    """Does the stack stay non-empty over flips ``[eps^3 n, eps n]``?

    Also reports the stream's property (4) verdict for the same run and, when
    the stack never empties, whether the epoch covering the window holds at
    least as many vertices as there were heads in the window.
    """
    e = _check_eps(epsilon)
    run = DFSExploration(g, p, seed, sigma_mode=sigma_mode, profile=True).run()
    rep = run.report()
    lo, hi = math.ceil(e**3 * g.n), math.floor(e * g.n)
    prof = np.frombuffer(run.stack_profile, dtype=np.int32)
    hi = min(hi, prof.size)
    nonempty = bool(np.all(prof[lo - 1:hi] > 0))
    bits = rep.bits()
    heads = int(bits[lo - 1:hi].sum())
    epoch_ok = None
    if nonempty:
        ep = next(ep for ep in rep.epochs if ep.first_query <= lo and ep.last_query >= hi)
        epoch_ok = ep.size >= heads
    prop4 = None
    if bits.size >= math.floor(e * g.n):
        prop4 = stream_properties(bits, epsilon, g.degree_bound, g.n, SUPERCRITICAL)["4"]
    return {"nonempty": nonempty, "property4": prop4, "heads_in_window": heads, "epoch_ok": epoch_ok}
