"""Maximum-likelihood estimation of per-community edge probabilities.

The likelihood of an observed graph under the affiliation model is non-convex
in the probabilities, but substituting 1 - p = exp(-x) with x >= 0 makes the
log-likelihood concave:

    LL(x) = sum_edges log(1 - exp(-s_uv)) - sum_c x_c * (P_c - E_c)

where s_uv sums x over the communities shared by the edge's endpoints, P_c is
the community's member-pair count and E_c its internal edge count. The second
term is the closed form of the non-edge contribution. Projected gradient
ascent with a backtracking line search therefore reaches the global optimum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InfeasibleError
from .graph import AffiliationNetwork, Graph

__all__ = ["X_CAP", "FitProblem", "FitResult", "log_likelihood_x", "log_likelihood_p", "gradient_x", "fit"]

# x is capped so that p = 1 - exp(-x) stays strictly below 1; the cap binding
# is reported instead of returning p == 1.
X_CAP = -math.log(1e-10)

_ARMIJO = 1e-4
_MAX_HALVINGS = 50


class FitProblem:
    """Precomputed per-edge shared-community structure for one (graph, net) pair.

    With `fit_epsilon` a synthetic background community containing every node
    is appended, making edges with no shared community fittable.
    """

    def __init__(self, graph: Graph, net: AffiliationNetwork, fit_epsilon: bool = False):
        if graph.num_nodes != net.num_nodes:
            raise ValueError("graph and affiliation network disagree on the node count")
        self.graph = graph
        self.net = net
        self.fit_epsilon = bool(fit_epsilon)
        n = graph.num_nodes
        n_comms = net.num_communities
        self.num_vars = n_comms + 1 if fit_epsilon else n_comms

        flat_parts: list[np.ndarray] = []
        counts = np.zeros(graph.edge_count, dtype=np.int64)
        bg = np.array([n_comms], dtype=np.int64)
        for e, (u, v) in enumerate(graph.edges):
            shared = np.intersect1d(net.communities_of(int(u)), net.communities_of(int(v)), assume_unique=True)
            if fit_epsilon:
                shared = np.concatenate([shared, bg])
            elif shared.size == 0:
                raise InfeasibleError(
                    f"edge ({u}, {v}) is not covered by any community; "
                    "enable the background community to fit such edges"
                )
            flat_parts.append(shared)
            counts[e] = shared.size
        self.edge_comms = np.concatenate(flat_parts) if flat_parts else np.empty(0, dtype=np.int64)
        self.edge_counts = counts
        self.edge_offsets = np.concatenate([[0], np.cumsum(counts)])

        sizes = net.sizes()
        pair_counts = sizes * (sizes - 1) // 2
        internal = np.bincount(self.edge_comms, minlength=self.num_vars).astype(np.int64)
        if fit_epsilon:
            pair_counts = np.concatenate([pair_counts, [n * (n - 1) // 2]])
        self.pair_counts = pair_counts.astype(np.int64)
        self.internal_edges = internal

    @property
    def num_communities(self) -> int:
        return self.net.num_communities


def _check_x(problem: FitProblem, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (problem.num_vars,):
        raise ValueError(f"x must have shape ({problem.num_vars},)")
    if np.any(x < 0):
        raise ValueError("x must be non-negative")
    return x


def _edge_sums(problem: FitProblem, x: np.ndarray) -> np.ndarray:
    if problem.graph.edge_count == 0:
        return np.empty(0, dtype=np.float64)
    return np.add.reduceat(x[problem.edge_comms], problem.edge_offsets[:-1])


def log_likelihood_x(problem: FitProblem, x) -> float:
    """Transformed log-likelihood; -inf when an edge's x-sum is zero."""
    x = _check_x(problem, x)
    s = _edge_sums(problem, x)
    if np.any(s <= 0.0):
        return -np.inf
    edge_term = float(np.log(-np.expm1(-s)).sum())
    nonedge_term = float((x * (problem.pair_counts - problem.internal_edges)).sum())
    return edge_term - nonedge_term


def log_likelihood_p(problem: FitProblem, p) -> float:
    """Log-likelihood evaluated directly from probabilities.

    `p` covers every optimization variable (including the background
    community when the problem fits one). Returns -inf when some edge has
    probability zero.
    """
    p = np.asarray(p, dtype=np.float64)
    if p.shape != (problem.num_vars,):
        raise ValueError(f"p must have shape ({problem.num_vars},)")
    if np.any(p < 0.0) or np.any(p > 1.0):
        raise ValueError("probabilities must lie in [0, 1]")
    with np.errstate(divide="ignore"):
        log_keep = np.log1p(-p)
    if problem.graph.edge_count:
        log_q = np.add.reduceat(log_keep[problem.edge_comms], problem.edge_offsets[:-1])
        with np.errstate(divide="ignore"):
            edge_term = float(np.log(-np.expm1(log_q)).sum())
    else:
        edge_term = 0.0
    outside = problem.pair_counts - problem.internal_edges
    terms = np.where(outside > 0, outside * log_keep, 0.0)
    return edge_term + float(terms.sum())


def gradient_x(problem: FitProblem, x) -> np.ndarray:
    """Gradient of the transformed log-likelihood; every edge needs a positive x-sum."""
    x = _check_x(problem, x)
    s = _edge_sums(problem, x)
    if np.any(s <= 0.0):
        bad = int(np.argmax(s <= 0.0))
        u, v = problem.graph.edges[bad]
        raise ValueError(f"gradient undefined: edge ({u}, {v}) has zero edge-probability sum")
    grad = -(problem.pair_counts - problem.internal_edges).astype(np.float64)
    if s.size:
        w = 1.0 / np.expm1(s)
        grad += np.bincount(problem.edge_comms, weights=np.repeat(w, problem.edge_counts), minlength=problem.num_vars)
    return grad


def default_x_init(problem: FitProblem) -> np.ndarray:
    """Within-community edge density, clipped to 0.9, mapped into x-space."""
    dens = np.zeros(problem.num_vars, dtype=np.float64)
    nz = problem.pair_counts > 0
    dens[nz] = np.minimum(0.9, problem.internal_edges[nz] / problem.pair_counts[nz])
    return -np.log1p(-dens)


@dataclass
class FitResult:
    """Fitted probabilities with the optimizer's diagnostics.

    `p` and `x` cover the real communities; a fitted background probability is
    reported separately as `epsilon`. Entries where the x-cap binds (reported
    probability indistinguishable from 1) are flagged in `capped`.
    """

    x: np.ndarray
    p: np.ndarray
    epsilon: float
    log_likelihood: float
    iterations: int
    converged: bool
    grad_norm: float
    capped: np.ndarray
    trace: list[float] = field(default_factory=list, repr=False)


def _projected_gradient(x: np.ndarray, g: np.ndarray) -> np.ndarray:
    pg = g.copy()
    pg[(x <= 0.0) & (g < 0.0)] = 0.0
    pg[(x >= X_CAP) & (g > 0.0)] = 0.0
    return pg


def fit(
    problem: FitProblem,
    tol: float = 1e-6,
    max_iter: int = 1000,
    x_init: np.ndarray | None = None,
) -> FitResult:
    """Projected gradient ascent on the concave transformed log-likelihood.

    Converges when the relative objective improvement drops below `tol` or the
    projected gradient's sup-norm does. The objective is non-decreasing across
    accepted steps.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    x = default_x_init(problem) if x_init is None else np.clip(_check_x(problem, np.asarray(x_init, dtype=np.float64)), 0.0, X_CAP)
    ll = log_likelihood_x(problem, x)
    if not np.isfinite(ll):
        raise ValueError("objective is -inf at the starting point; choose a positive x_init for covered edges")
    trace = [ll]
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        g = gradient_x(problem, x)
        pg_norm = float(np.max(np.abs(_projected_gradient(x, g)))) if g.size else 0.0
        if pg_norm < tol:
            converged = True
            break
        step = 1.0
        accepted = False
        for _ in range(_MAX_HALVINGS):
            cand = np.clip(x + step * g, 0.0, X_CAP)
            delta = cand - x
            if not np.any(delta):
                break
            ll_new = log_likelihood_x(problem, cand)
            if np.isfinite(ll_new) and ll_new >= ll + _ARMIJO * float(g @ delta):
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break
        improvement = ll_new - ll
        x, ll = cand, ll_new
        trace.append(ll)
        if improvement / max(1.0, abs(ll)) < tol:
            converged = True
            break
    g = gradient_x(problem, x) if problem.num_vars else np.empty(0)
    grad_norm = float(np.max(np.abs(_projected_gradient(x, g)))) if problem.num_vars else 0.0

    n_comms = problem.num_communities
    x_comm = x[:n_comms]
    result = FitResult(
        x=x_comm,
        p=-np.expm1(-x_comm),
        epsilon=float(-np.expm1(-x[n_comms])) if problem.fit_epsilon else 0.0,
        log_likelihood=ll,
        iterations=iterations,
        converged=converged,
        grad_norm=grad_norm,
        capped=x_comm >= X_CAP - 1e-9,
        trace=trace,
    )
    return result
