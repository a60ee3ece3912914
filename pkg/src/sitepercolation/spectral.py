"""Second-eigenvalue computation and the edge-distribution inequalities it controls.

For a d-regular graph with adjacency eigenvalues ``l1 >= l2 >= ... >= ln``
we report ``lambda = max(|l2|, |ln|)``. Disconnected graphs (``l2 = d``) and
bipartite graphs (``ln = -d``) therefore get ``lambda = d``.

Small graphs use a dense symmetric eigendecomposition. Larger ones run a
Lanczos iteration with full reorthogonalisation on the adjacency operator
restricted to the complement of the all-ones vector (the known top
eigenvector of a connected regular graph), and stop once both extreme Ritz
pairs have residual norm below the requested tolerance. For a symmetric
matrix that residual bounds the distance from the Ritz value to the
spectrum.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import rng as _rng
from .graph import (Graph, GraphInputError, VertexSet, as_vertex_set, connected_components,
                    neighbor_counts, ordered_pair_edge_count)

FULL_EIGENSOLVE_MAX_N = 4096
MIXING_SLACK = 1e-9


class NumericalError(RuntimeError):
    """An iterative eigensolve did not reach its tolerance."""

    def __init__(self, message: str, estimate: float, residual: float):
        super().__init__(f"{message} (best estimate {estimate:.6g}, residual {residual:.3g})")
        self.estimate = estimate
        self.residual = residual


@dataclass(frozen=True)
class SpectralReport:
    n: int
    d: int
    lambda1: float
    lam: float
    ratio: float
    method: str
    tolerance: float
    iterations: int

    def to_dict(self) -> dict:
        out = asdict(self)
        out["lambda"] = out.pop("lam")
        return {k: out[k] for k in ("n", "d", "lambda1", "lambda", "ratio", "method", "tolerance", "iterations")}

    def certifies(self, delta: float) -> bool:
        """True if the measured ratio ``lambda / d`` is below ``delta``."""
        return self.ratio + self.tolerance / max(self.d, 1) < delta


def spectral_report(g: Graph, tolerance: float = 1e-6, method: str = "auto",
                    max_iter: int = 600, seed: int = 0) -> SpectralReport:
    if not g.regular:
        raise GraphInputError("spectral_report requires a regular graph")
    if tolerance <= 0:
        raise GraphInputError("tolerance must be positive")
    if method == "auto":
        method = "full-eigensolve" if g.n <= FULL_EIGENSOLVE_MAX_N else "iterative"
    d = g.degree_bound
    if method == "full-eigensolve":
        ev = np.linalg.eigvalsh(g.adjacency.toarray())
        l1 = float(ev[-1])
        lam = float(max(abs(ev[-2]), abs(ev[0]))) if g.n > 1 else 0.0
        return SpectralReport(g.n, d, l1, lam, lam / d if d else 0.0, method, tolerance, 0)
    if method != "iterative":
        raise GraphInputError(f"unknown spectral method {method!r}")
    if len(connected_components(g)) > 1:
        return SpectralReport(g.n, d, float(d), float(d), 1.0, method, tolerance, 0)
    top, bottom, iters = lanczos_extremes(g, tolerance, max_iter=max_iter, seed=seed)
    lam = max(abs(top), abs(bottom))
    return SpectralReport(g.n, d, float(d), lam, lam / d, method, tolerance, iters)


def lanczos_extremes(g: Graph, tolerance: float, max_iter: int = 600, seed: int = 0,
                     check_every: int = 10) -> tuple[float, float, int]:
    """Largest and smallest eigenvalues of A on the orthogonal complement of 1.

    Returns ``(top, bottom, iterations)``. Raises :class:`NumericalError` if
    either residual is still above ``tolerance`` after ``max_iter`` steps.
    """
    A = g.adjacency
    n = g.n
    ones = np.full(n, 1.0 / math.sqrt(n))
    q = _rng.philox(seed, _rng.SAMPLES).standard_normal(n)
    q -= ones * (ones @ q)
    q /= np.linalg.norm(q)
    k_cap = min(max_iter, n - 1)
    Q = np.empty((k_cap + 1, n))
    alphas, betas = [], []
    Q[0] = q
    best = (0.0, 0.0, math.inf)
    for k in range(k_cap):
        w = A @ Q[k]
        a = float(Q[k] @ w)
        w -= a * Q[k]
        if k:
            w -= betas[-1] * Q[k - 1]
        # full reorthogonalisation, twice, against the basis and the deflated vector
        for _ in range(2):
            w -= Q[: k + 1].T @ (Q[: k + 1] @ w)
            w -= ones * (ones @ w)
        b = float(np.linalg.norm(w))
        alphas.append(a)
        betas.append(b)
        done = b < 1e-10 * max(1.0, abs(a))
        if done or (k + 1) % check_every == 0 or k + 1 == k_cap:
            T = np.diag(alphas) + np.diag(betas[:-1], 1) + np.diag(betas[:-1], -1)
            theta, S = np.linalg.eigh(T)
            r_bottom = abs(b * S[-1, 0])
            r_top = abs(b * S[-1, -1])
            best = (float(theta[-1]), float(theta[0]), max(r_top, r_bottom))
            if done or best[2] <= tolerance:
                return best[0], best[1], k + 1
        Q[k + 1] = w / b
    est = max(abs(best[0]), abs(best[1]))
    raise NumericalError(f"Lanczos did not converge in {k_cap} iterations", est, best[2])


def mixing_lemma_check(g: Graph, lam: float, B, C) -> dict:
    """Compare |e(B, C) - (d/n)|B||C|| against lam * sqrt(|B||C|)."""
    B, C = as_vertex_set(g, B), as_vertex_set(g, C)
    b, c = len(B), len(C)
    e = ordered_pair_edge_count(g, B, C)
    lhs = abs(e - g.degree_bound * b * c / g.n)
    rhs = lam * math.sqrt(b * c)
    return {"lhs": lhs, "rhs": rhs, "holds": lhs <= rhs + MIXING_SLACK * max(rhs, 1.0)}


def low_degree_set(g: Graph, B, alpha: float) -> VertexSet:
    """Vertices with at most ``(1 - alpha) |B| d / n`` neighbours in ``B``."""
    if not 0 < alpha < 1:
        raise GraphInputError(f"alpha must lie in (0, 1), got {alpha}")
    B = as_vertex_set(g, B)
    threshold = (1 - alpha) * len(B) * g.degree_bound / g.n
    return VertexSet(neighbor_counts(g, B) <= threshold)


def low_degree_bound(n: int, d: int, lam: float, alpha: float) -> float:
    """Upper bound ``(2 / alpha^2) (lam / d)^2 n`` on the low-degree set when |B| >= n/2."""
    return 2.0 / alpha**2 * (lam / d) ** 2 * n


def edge_exists_between(g: Graph, B, C) -> tuple[int, int] | None:
    """Lexicographically first edge (u, v) with u in B and v in C, if any."""
    B, C = as_vertex_set(g, B), as_vertex_set(g, C)
    if not B.isdisjoint(C):
        raise GraphInputError("edge_exists_between requires disjoint sets")
    hit = np.flatnonzero(B.mask[g.sources] & C.mask[g.indices])
    if hit.size == 0:
        return None
    i = int(hit[0])
    return int(g.sources[i]), int(g.indices[i])
