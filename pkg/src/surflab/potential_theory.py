"""Discrete calculus on graph views: gradient, divergence, energy, Dirichlet solves.

Conventions: unit resistances, ``m(x) = deg(x)``, and

    grad f (e)  = f(e+) - f(e-)
    div g (x)   = (1/m(x)) * (sum_{e+ = x} g(e) - sum_{e- = x} g(e))

so a unit current leaving the source has ``div = -1/m(source)`` there.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .graph_core import GraphView

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-12


class SingularSystem(RuntimeError):
    pass


class SolverDidNotConverge(RuntimeError):
    pass


class IsolatedVertex(ValueError):
    pass


def _check_len(arr, n, what):
    if len(arr) != n:
        raise ValueError(f"{what} has length {len(arr)}, view needs {n}")


def gradient(view: GraphView, f) -> np.ndarray:
    f = np.asarray(f)
    _check_len(f, view.n_vertices, "vertex function")
    return f[view.head_idx] - f[view.tail_idx]


def net_inflow(view: GraphView, g) -> np.ndarray:
    """Unnormalized divergence: sum over incoming minus sum over outgoing edges."""
    g = np.asarray(g)
    _check_len(g, view.n_edges, "edge function")
    dtype = object if g.dtype == object else np.result_type(g.dtype, float)
    out = np.zeros(view.n_vertices, dtype=dtype)
    if dtype == object:
        out[:] = 0
    np.add.at(out, view.head_idx, g)
    np.subtract.at(out, view.tail_idx, g)
    return out


def divergence(view: GraphView, g) -> np.ndarray:
    deg = view.degrees()
    if np.any(deg == 0):
        bad = [view.vertices[i] for i in np.flatnonzero(deg == 0)]
        raise IsolatedVertex(f"divergence undefined at isolated vertices {bad[:5]}")
    inflow = net_inflow(view, g)
    if inflow.dtype == object:
        return np.array([x / int(d) for x, d in zip(inflow, deg)], dtype=object)
    return inflow / deg


def dirichlet_energy(g) -> float:
    g = np.asarray(g)
    if g.dtype == object:
        return sum(x * x for x in g)
    return float(np.dot(g, g))


def inner_vertex(view: GraphView, f, h) -> float:
    """<f, h> in l2(V, m)."""
    return float(np.sum(view.degrees() * np.asarray(f) * np.asarray(h)))


def laplacian(view: GraphView) -> sp.csr_matrix:
    """Combinatorial Laplacian D - A with unit conductances; loops drop out."""
    t, h = view.tail_idx, view.head_idx
    keep = t != h
    t, h = t[keep], h[keep]
    n = view.n_vertices
    ones = np.ones(len(t))
    adj = sp.coo_matrix((np.r_[ones, ones], (np.r_[t, h], np.r_[h, t])), shape=(n, n)).tocsr()
    deg = np.asarray(adj.sum(axis=1)).ravel()
    return (sp.diags(deg) - adj).tocsr()


@dataclass(frozen=True)
class DirichletSolution:
    potentials: np.ndarray
    current: np.ndarray
    r_eff: float
    iterations: int
    residual: float


def _cg(A, b, tol, maxiter):
    diag = A.diagonal()
    M = sp.diags(1.0 / diag)
    count = [0]

    def cb(_):
        count[0] += 1

    x, info = spla.cg(A, b, rtol=tol / max(np.linalg.norm(b), 1e-300), atol=0.0,
                      maxiter=maxiter, M=M, callback=cb)
    res = float(np.linalg.norm(b - A @ x))
    if info != 0 or res > tol:
        # one refinement pass before giving up
        dx, info = spla.cg(A, b - A @ x, rtol=tol / max(res, 1e-300), atol=0.0,
                           maxiter=maxiter, M=M, callback=cb)
        x = x + dx
        res = float(np.linalg.norm(b - A @ x))
        if res > tol:
            raise SolverDidNotConverge(
                f"CG residual {res:.3e} > {tol:.1e} after {count[0]} iterations")
    return x, count[0], res


def solve_dirichlet(view: GraphView, source: int, grounded, tol: float = DEFAULT_TOL,
                    maxiter: int | None = None) -> DirichletSolution:
    """Unit current from ``source`` into the grounded set.

    Potentials vanish on ``grounded``; ``current = -grad(potentials)`` carries
    total flux 1 out of the source; ``r_eff`` is the source potential.
    Vertices not connected to the source are left at potential 0.
    """
    grounded = set(grounded)
    if not grounded:
        raise ValueError("grounded set is empty")
    if source in grounded:
        raise ValueError("source must not be grounded")
    s = view.idx(source)
    gidx = {view.idx(v) for v in grounded}

    dist = view.distances(source)
    reach = np.zeros(view.n_vertices, dtype=bool)
    reach[[view.index[v] for v in dist]] = True
    if not any(reach[i] for i in gidx):
        raise SingularSystem("source is disconnected from the grounded set")

    free = reach.copy()
    free[list(gidx)] = False
    free_idx = np.flatnonzero(free)
    pos = -np.ones(view.n_vertices, dtype=np.int64)
    pos[free_idx] = np.arange(len(free_idx))

    L = laplacian(view)
    A = L[free_idx][:, free_idx].tocsr()
    b = np.zeros(len(free_idx))
    b[pos[s]] = 1.0
    if maxiter is None:
        maxiter = max(1000, 20 * len(free_idx))
    x, its, res = _cg(A, b, tol, maxiter)
    phi = np.zeros(view.n_vertices)
    phi[free_idx] = x
    current = -gradient(view, phi)
    log.debug("dirichlet solve: %d unknowns, %d CG iterations, residual %.2e",
              len(free_idx), its, res)
    return DirichletSolution(phi, current, float(phi[s]), its, res)


def transition_matrix(view: GraphView, absorbing: bool = True) -> sp.csr_matrix:
    """p(x, y) = (#edge-endpoints from x to y) / deg(x); boundary rows are zero when absorbing."""
    t, h = view.tail_idx, view.head_idx
    n = view.n_vertices
    ones = np.ones(len(t))
    A = sp.coo_matrix((np.r_[ones, ones], (np.r_[t, h], np.r_[h, t])), shape=(n, n)).tocsr()
    deg = np.asarray(A.sum(axis=1)).ravel()
    inv = np.divide(1.0, deg, out=np.zeros(n), where=deg > 0)
    if absorbing:
        inv[np.asarray(view.boundary, dtype=bool)] = 0.0
    return (sp.diags(inv) @ A).tocsr()


def green_partial_sums(view: GraphView, x: int, y: int, n_steps: int) -> np.ndarray:
    """Running sums sum_{k=1..n} p^(k)(x, y) for n = 1..n_steps (walk killed at the shell)."""
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    P = transition_matrix(view).T.tocsr()
    dist = np.zeros(view.n_vertices)
    dist[view.idx(x)] = 1.0
    j = view.idx(y)
    out = np.empty(n_steps)
    total = 0.0
    for k in range(n_steps):
        dist = P @ dist
        total += dist[j]
        out[k] = total
    return out


def green_partial(view: GraphView, x: int, y: int, n_steps: int) -> float:
    return float(green_partial_sums(view, x, y, n_steps)[-1])


# -- file format: JSON map from id (string) to double ----------------------


def edge_function_to_json(view: GraphView, g) -> str:
    return json.dumps({str(e): float(v) for e, v in enumerate(g)}, sort_keys=True)


def vertex_function_to_json(view: GraphView, f) -> str:
    return json.dumps({str(v): float(x) for v, x in zip(view.vertices, f)}, sort_keys=True)


def edge_function_from_json(view: GraphView, text: str) -> np.ndarray:
    doc = json.loads(text)
    doc = doc.get("values", doc) if isinstance(doc, dict) else doc
    g = np.full(view.n_edges, np.nan)
    for k, v in doc.items():
        e = int(k)
        if not 0 <= e < view.n_edges:
            raise KeyError(f"edge id {e} not in view")
        g[e] = float(v)
    return g


def vertex_function_from_json(view: GraphView, text: str) -> np.ndarray:
    doc = json.loads(text)
    f = np.full(view.n_vertices, np.nan)
    for k, v in doc.items():
        f[view.idx(int(k))] = float(v)
    return f
